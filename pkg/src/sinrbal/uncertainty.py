"""Norm-bounded channel uncertainty sets, dual norms, and uniform sampling.

The error model is h = h_hat + v A with v a complex row vector of length l
and A an l x T matrix of perturbation directions. Norm bounds act on the
vector of complex-component moduli (|v_1|, ..., |v_l|): "linf" means every
component modulus is at most rho, "l1" bounds their sum, "l2" the usual
Euclidean norm, and "l2_cap_linf" intersects an l2 ball with an linf box.

Every set carries two radii: the true radius rho (used for Monte-Carlo
validation) and the design radius rho_prime <= rho actually enforced by the
conservative SOCP formulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .model import as_complex_array

__all__ = [
    "NORM_KINDS",
    "UncertaintySet",
    "UnsupportedNormError",
    "UnsupportedUncertaintyError",
    "dual_norm",
    "apply_error",
    "sample_uniform",
    "gamma_entries",
]

NORM_KINDS = ("l2", "linf", "l1", "l2_cap_linf")


class UnsupportedNormError(ValueError):
    """Norm kind not recognized or not available for the requested use."""


class UnsupportedUncertaintyError(ValueError):
    """Uncertainty geometry outside a formulation's scope (e.g. the SDP
    branch handles ellipsoids only)."""


def _broadcast_link(x, B, K, name):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = np.full((B, K), float(arr))
    if arr.shape != (B, K):
        raise ValueError(f"{name} must be scalar or shape (B, K)={(B, K)}")
    return arr


@dataclass(frozen=True, eq=False)
class UncertaintySet:
    """Per-link norm-bounded error sets sharing one norm kind.

    directions is None for the identity matrix (l = T, delta^i = e_i), a
    single (l, T) complex array shared by all links, or a dict keyed by
    (b, k) with per-link matrices.
    """

    norm_kind: str
    rho: np.ndarray
    rho_prime: np.ndarray
    num_antennas: int
    directions: object = None
    box_radius: np.ndarray = None

    def __post_init__(self):
        if self.norm_kind not in NORM_KINDS:
            raise UnsupportedNormError(f"unknown norm kind {self.norm_kind!r}")
        rho = np.asarray(self.rho, dtype=float)
        rp = np.asarray(self.rho_prime, dtype=float)
        if rho.shape != rp.shape or rho.ndim != 2:
            raise ValueError("rho and rho_prime must both have shape (B, K)")
        if np.any(rho < 0) or np.any(rp < 0):
            raise ValueError("radii must be nonnegative")
        if np.any(rp > rho * (1 + 1e-12) + 1e-300):
            raise ValueError("design radius rho_prime may not exceed rho")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_prime", rp)
        if self.norm_kind == "l2_cap_linf":
            if self.box_radius is None:
                raise ValueError("l2_cap_linf requires box_radius")
            box = np.asarray(self.box_radius, dtype=float)
            if box.shape != rho.shape or np.any(box <= 0):
                raise ValueError("box_radius must be positive with shape (B, K)")
            object.__setattr__(self, "box_radius", box)
        elif self.box_radius is not None:
            raise ValueError("box_radius only applies to l2_cap_linf")
        if isinstance(self.directions, dict):
            object.__setattr__(
                self,
                "directions",
                {key: self._check_dirs(as_complex_array(a)) for key, a in self.directions.items()},
            )
        elif self.directions is not None:
            object.__setattr__(self, "directions", self._check_dirs(as_complex_array(self.directions)))

    def _check_dirs(self, a):
        if a.ndim != 2 or a.shape[1] != self.num_antennas:
            raise ValueError(f"direction matrix must be (l, T) with T={self.num_antennas}")
        if not 1 <= a.shape[0] <= self.num_antennas:
            raise ValueError("number of directions l must lie in 1..T")
        if np.any(np.linalg.norm(a, axis=1) == 0):
            raise ValueError("direction rows must be nonzero")
        return a

    @classmethod
    def for_network(cls, cfg, norm_kind, rho, rho_prime=None, divisor=None,
                    directions=None, box_radius=None):
        """Build a set matching a NetworkConfig. rho (and friends) may be
        scalars, broadcast to every link. rho_prime defaults to rho; a
        divisor c gives rho_prime = rho / c instead."""
        B, K = cfg.num_cells, cfg.num_users
        rho = _broadcast_link(rho, B, K, "rho")
        if rho_prime is not None and divisor is not None:
            raise ValueError("give rho_prime or divisor, not both")
        if divisor is not None:
            if divisor < 1:
                raise ValueError("divisor must be >= 1")
            rp = rho / float(divisor)
        elif rho_prime is not None:
            rp = _broadcast_link(rho_prime, B, K, "rho_prime")
        else:
            rp = rho.copy()
        box = None if box_radius is None else _broadcast_link(box_radius, B, K, "box_radius")
        return cls(norm_kind=norm_kind, rho=rho, rho_prime=rp,
                   num_antennas=cfg.antennas_per_bs, directions=directions,
                   box_radius=box)

    @property
    def is_identity(self):
        return self.directions is None

    def A(self, b, k):
        """Direction matrix for link (b, k), identity materialized."""
        if self.directions is None:
            return np.eye(self.num_antennas, dtype=np.complex128)
        if isinstance(self.directions, dict):
            return self.directions[(b, k)]
        return self.directions

    def n_dirs(self, b, k):
        if self.directions is None:
            return self.num_antennas
        if isinstance(self.directions, dict):
            return self.directions[(b, k)].shape[0]
        return self.directions.shape[0]

    def box_ratio(self, b, k):
        """Box-to-ball radius ratio of the unit-scaled intersection set."""
        if self.norm_kind != "l2_cap_linf":
            return None
        r = self.rho[b, k]
        return float(self.box_radius[b, k] / r) if r > 0 else np.inf

    def contains(self, b, k, v, radius="rho", tol=1e-9):
        """Membership of a complex error vector in the link's set, at the
        true (radius="rho") or design (radius="rho_prime") scale."""
        v = as_complex_array(v)
        r = float(getattr(self, radius)[b, k])
        mod = np.abs(v)
        slack = r * (1 + tol) + tol
        if self.norm_kind == "l2":
            return np.linalg.norm(v) <= slack
        if self.norm_kind == "linf":
            return mod.max(initial=0.0) <= slack
        if self.norm_kind == "l1":
            return mod.sum() <= slack
        scale = r / self.rho[b, k] if self.rho[b, k] > 0 else 0.0
        box = self.box_radius[b, k] * scale
        return np.linalg.norm(v) <= slack and mod.max(initial=0.0) <= box * (1 + tol) + tol

    def contains_batch(self, b, k, V, radius="rho", tol=1e-9):
        """Vectorized membership for a batch of rows (n, l) -> bool (n,)."""
        V = as_complex_array(V).reshape(-1, self.n_dirs(b, k))
        r = float(getattr(self, radius)[b, k])
        mod = np.abs(V)
        slack = r * (1 + tol) + tol
        if self.norm_kind == "l2":
            return np.linalg.norm(V, axis=1) <= slack
        if self.norm_kind == "linf":
            return mod.max(axis=1, initial=0.0) <= slack
        if self.norm_kind == "l1":
            return mod.sum(axis=1) <= slack
        scale = r / self.rho[b, k] if self.rho[b, k] > 0 else 0.0
        box = self.box_radius[b, k] * scale
        return ((np.linalg.norm(V, axis=1) <= slack)
                & (mod.max(axis=1, initial=0.0) <= box * (1 + tol) + tol))


def dual_norm(norm_kind, gamma, box_ratio=None):
    """max_{s in unit set} s' gamma for a nonnegative vector gamma.

    The unit set is the primal norm ball: l2 is self-dual, the dual of linf
    is the l1 norm, the dual of l1 is the linf norm. For "l2_cap_linf" the
    value is the support function of {||s||_2 <= 1, ||s||_inf <= box_ratio},
    computed as min_u ||gamma - u||_2 + box_ratio * ||u||_1 via its 1-D
    reduction (the residual gamma - u is capped at a uniform level theta).
    """
    gamma = np.asarray(gamma, dtype=float).ravel()
    if gamma.size and gamma.min() < 0:
        raise ValueError("gamma must be entrywise nonnegative")
    if norm_kind == "l2":
        return float(np.linalg.norm(gamma))
    if norm_kind == "linf":
        return float(gamma.sum())
    if norm_kind == "l1":
        return float(gamma.max(initial=0.0))
    if norm_kind == "l2_cap_linf":
        if box_ratio is None or box_ratio <= 0:
            raise ValueError("l2_cap_linf needs a positive box_ratio")
        if gamma.size == 0 or gamma.max() == 0.0:
            return 0.0
        if box_ratio >= 1.0:
            # box looser than the ball everywhere it matters
            return float(np.linalg.norm(gamma))

        def phi(theta):
            return (np.linalg.norm(np.minimum(gamma, theta))
                    + box_ratio * np.maximum(gamma - theta, 0.0).sum())

        res = minimize_scalar(phi, bounds=(0.0, float(gamma.max())), method="bounded",
                              options={"xatol": 1e-12})
        return float(min(res.fun, phi(0.0), phi(gamma.max())))
    raise UnsupportedNormError(f"unknown norm kind {norm_kind!r}")


def apply_error(h_hat, A, v):
    """Perturbed channel h_hat + v A. v may be a single vector (l,) or a
    batch (n, l); the result matches (T,) or (n, T)."""
    h_hat = as_complex_array(h_hat)
    A = as_complex_array(A)
    v = as_complex_array(v)
    if A.ndim != 2 or h_hat.shape[-1] != A.shape[1]:
        raise ValueError("directions must be (l, T) matching h_hat length")
    if v.shape[-1] != A.shape[0]:
        raise ValueError(f"v has length {v.shape[-1]}, expected {A.shape[0]}")
    return h_hat + v @ A


def _unit_phases(rng, shape):
    return np.exp(2j * np.pi * rng.random(shape))


def _sample_l2_ball(rng, n, l, radius):
    z = rng.standard_normal((n, l)) + 1j * rng.standard_normal((n, l))
    nz = np.linalg.norm(z, axis=1, keepdims=True)
    nz[nz == 0] = 1.0
    # radius factor U^(1/(2l)): uniform density in 2l real dimensions
    r = radius * rng.random((n, 1)) ** (1.0 / (2 * l))
    return z / nz * r


def _sample_disks(rng, n, l, radius):
    r = radius * np.sqrt(rng.random((n, l)))
    return r * _unit_phases(rng, (n, l))


def _sample_l1_ball(rng, n, l, radius):
    # moduli density on the solid simplex is proportional to prod r_i,
    # i.e. Dirichlet(2, ..., 2, 1) including the slack coordinate
    alpha = np.full(l + 1, 2.0)
    alpha[-1] = 1.0
    moduli = radius * rng.dirichlet(alpha, size=n)[:, :l]
    return moduli * _unit_phases(rng, (n, l))


def _sample_cap(rng, n, l, rho2, rho_inf):
    if rho_inf >= rho2:
        return _sample_l2_ball(rng, n, l, rho2)
    if l * rho_inf ** 2 <= rho2 ** 2:
        return _sample_disks(rng, n, l, rho_inf)
    # neither region contains the other: rejection from the smaller proposal
    log_vol_ball = l * np.log(np.pi * rho2 ** 2) - sum(np.log(i) for i in range(1, l + 1))
    log_vol_box = l * np.log(np.pi * rho_inf ** 2)
    use_ball = log_vol_ball <= log_vol_box
    out = np.empty((n, l), dtype=np.complex128)
    got = 0
    chunk = max(4 * n, 1024)
    for _ in range(100000):
        if use_ball:
            cand = _sample_l2_ball(rng, chunk, l, rho2)
            keep = np.max(np.abs(cand), axis=1) <= rho_inf
        else:
            cand = _sample_disks(rng, chunk, l, rho_inf)
            keep = np.linalg.norm(cand, axis=1) <= rho2
        cand = cand[keep]
        take = min(len(cand), n - got)
        out[got:got + take] = cand[:take]
        got += take
        if got == n:
            return out
    raise RuntimeError("rejection sampler failed to fill the request")


def sample_uniform(uset, b, k, rng, n=None, radius="rho"):
    """Uniform draws from link (b, k)'s error set.

    Returns a single (l,) vector when n is None, else an (n, l) batch.
    radius selects the true set ("rho") or the design set ("rho_prime").
    Every draw is asserted to lie inside the selected set.
    """
    single = n is None
    n = 1 if single else int(n)
    l = uset.n_dirs(b, k)
    r = float(getattr(uset, radius)[b, k])
    if r == 0.0:
        v = np.zeros((n, l), dtype=np.complex128)
    elif uset.norm_kind == "l2":
        v = _sample_l2_ball(rng, n, l, r)
    elif uset.norm_kind == "linf":
        v = _sample_disks(rng, n, l, r)
    elif uset.norm_kind == "l1":
        v = _sample_l1_ball(rng, n, l, r)
    else:
        scale = r / uset.rho[b, k] if uset.rho[b, k] > 0 else 0.0
        v = _sample_cap(rng, n, l, r, float(uset.box_radius[b, k]) * scale)
    assert uset.contains_batch(b, k, v, radius=radius).all(), \
        "sampler produced a point outside the set"
    return v[0] if single else v


def gamma_entries(f_plus, f_minus):
    """Entrywise max{-f_plus, -f_minus, 0}; the nonnegative vector the
    dual norm acts on in the tractable robust counterpart."""
    fp = np.asarray(f_plus, dtype=float)
    fm = np.asarray(f_minus, dtype=float)
    if fp.shape != fm.shape:
        raise ValueError("f_plus and f_minus must have equal length")
    return np.maximum(np.maximum(-fp, -fm), 0.0)
