"""Conic modeling layer: affine algebra, embeddings, cones, both backends."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinrbal.conic import (
    Aff,
    CAff,
    ConicProgram,
    complex_soc_embed,
    hermitian_to_real_psd,
    smat,
    svec,
    svec_len,
)


def _value(aff, x):
    return aff.C @ x[aff.cols] + aff.d if aff.cols.size else aff.d


def test_min_scalar_above_one():
    prog = ConicProgram()
    x = prog.new_vars(1)
    prog.nonneg(x - 1.0)
    prog.minimize(x)
    res = prog.solve()
    assert res.status == "optimal"
    assert res.value(x)[0] == pytest.approx(1.0, abs=1e-7)


def test_soc_epigraph_of_fixed_vector():
    prog = ConicProgram()
    t = prog.new_vars(1)
    prog.soc(Aff.stack([t, Aff.constant([3.0, 4.0])]))
    prog.minimize(t)
    res = prog.solve()
    assert res.value(t)[0] == pytest.approx(5.0, abs=1e-7)


def test_complex_embed_norm():
    prog = ConicProgram()
    t = prog.new_vars(1)
    z = CAff.constant(np.array([3.0 + 4.0j]))
    prog.soc(Aff.stack([t, complex_soc_embed(z)]))
    prog.minimize(t)
    assert prog.solve().value(t)[0] == pytest.approx(5.0, abs=1e-7)


def test_psd_largest_offdiagonal():
    # max t with [[1, t], [t, 1]] psd -> 1
    prog = ConicProgram()
    t = prog.new_vars(1)
    blk = Aff.stack([
        Aff.constant(1.0),
        t * np.sqrt(2.0),  # svec scaling on the off-diagonal entry
        Aff.constant(1.0),
    ])
    prog.psd_svec(blk, 2)
    prog.minimize(t * -1.0)
    res = prog.solve()
    assert res.value(t)[0] == pytest.approx(1.0, abs=1e-6)


def test_projection_onto_soc_matches_formula():
    """min ||x - p|| over the cone x0 >= ||x1:|| has the classical
    closed-form projection."""
    p = np.array([0.5, 3.0, -4.0])
    prog = ConicProgram()
    x = prog.new_vars(3)
    r = prog.new_vars(1)
    prog.soc(x)
    prog.soc(Aff.stack([r, x - p]))
    prog.minimize(r)
    res = prog.solve()
    # projection of (s, v): scale factor (s + ||v||)/2 along (1, v/||v||)
    s, v = p[0], p[1:]
    coef = (s + np.linalg.norm(v)) / 2
    expected = np.concatenate([[coef], coef * v / np.linalg.norm(v)])
    np.testing.assert_allclose(res.value(x), expected, atol=1e-5)


def test_zero_cone_forces_equality():
    prog = ConicProgram()
    x = prog.new_vars(2)
    prog.zero(x.apply(np.array([[1.0, 1.0]])) - 3.0)
    prog.nonneg(x)
    prog.minimize(x.apply(np.array([[1.0, 0.0]])))
    res = prog.solve()
    assert res.value(x)[0] == pytest.approx(0.0, abs=1e-7)
    assert res.value(x)[1] == pytest.approx(3.0, abs=1e-7)


def test_infeasible_reported_not_raised():
    prog = ConicProgram()
    x = prog.new_vars(1)
    prog.nonneg(x - 2.0)
    prog.nonneg(x * -1.0)
    res = prog.solve()
    assert res.status == "infeasible"
    assert res.x is None


@pytest.mark.parametrize("backend", ["clarabel", "cvxopt"])
def test_backends_agree_on_small_socp(backend):
    prog = ConicProgram()
    x = prog.new_vars(2)
    t = prog.new_vars(1)
    prog.soc(Aff.stack([t, x - np.array([1.0, 2.0])]))
    prog.nonneg(x)
    prog.minimize(t)
    res = prog.solve(backend=backend)
    assert res.status == "optimal"
    assert res.value(t)[0] == pytest.approx(0.0, abs=1e-6)
    np.testing.assert_allclose(res.value(x), [1.0, 2.0], atol=1e-5)
    assert res.max_residual <= 1e-6


def test_unknown_backend_rejected():
    prog = ConicProgram()
    prog.nonneg(prog.new_vars(1))
    with pytest.raises(ValueError):
        prog.solve(backend="sedumi")


def test_backend_panic_becomes_unknown(monkeypatch):
    """Native solver panics arrive as BaseException subclasses; they must
    degrade to an unknown probe, not crash the bisection."""
    class Panic(BaseException):
        pass

    def boom(q, A, b, cones):
        raise Panic("eigval error")

    monkeypatch.setattr("sinrbal.conic._solve_clarabel", boom)
    prog = ConicProgram()
    prog.nonneg(prog.new_vars(1))
    res = prog.solve()
    assert res.status == "unknown"
    assert res.x is None


def test_solution_residual_certified():
    prog = ConicProgram()
    x = prog.new_vars(3)
    prog.soc(x)
    prog.nonneg(x.sum() * -1.0 + 1.0)
    prog.minimize(x.apply(np.array([[0.0, -1.0, 0.0]])))
    res = prog.solve()
    assert res.status == "optimal"
    assert prog.residual(res.x) <= 1e-6


def test_hermitian_embedding_doubles_spectrum():
    H = np.array([[0.0, 1j], [-1j, 0.0]])
    E = hermitian_to_real_psd(H)
    w = np.sort(np.linalg.eigvalsh(E))
    np.testing.assert_allclose(w, [-1.0, -1.0, 1.0, 1.0], atol=1e-12)


def test_hermitian_embedding_rejects_nonhermitian():
    with pytest.raises(ValueError):
        hermitian_to_real_psd(np.array([[0.0, 1.0], [0.5, 0.0]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31 - 1))
def test_svec_round_trip_and_trace_identity(n, seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, n))
    S = S + S.T
    T = rng.standard_normal((n, n))
    T = T + T.T
    assert svec(S).shape == (svec_len(n),)
    np.testing.assert_allclose(smat(svec(S)), S, atol=1e-12)
    assert svec(S) @ svec(T) == pytest.approx(np.trace(S @ T), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_affine_algebra_matches_dense_evaluation(seed):
    rng = np.random.default_rng(seed)
    prog = ConicProgram()
    a = prog.new_vars(3)
    b = prog.new_vars(2)
    x = rng.standard_normal(prog.nvar)
    D = rng.standard_normal((2, 3))
    expr = a.apply(D) + b * 2.0 - np.array([1.0, 4.0])
    direct = D @ x[a.cols] + 2.0 * x[b.cols] - np.array([1.0, 4.0])
    np.testing.assert_allclose(_value(expr, x), direct, atol=1e-12)
    np.testing.assert_allclose(_value(expr.sum(), x), direct.sum(), atol=1e-12)
    st_ = Aff.stack([a, expr])
    np.testing.assert_allclose(_value(st_, x),
                               np.concatenate([x[a.cols], direct]), atol=1e-12)


def test_caff_real_imag_split(rng):
    prog = ConicProgram()
    z = prog.new_cvars(2)
    x = rng.standard_normal(prog.nvar)
    row = np.array([[1.0 + 2.0j, -1.0j]])
    out = z.apply(row)
    zval = x[z.re.cols] + 1j * x[z.im.cols]
    np.testing.assert_allclose(_value(out.re, x) + 1j * _value(out.im, x),
                               row @ zval, atol=1e-12)
