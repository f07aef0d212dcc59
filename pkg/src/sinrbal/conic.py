"""Backend-neutral conic programming layer.

One standard form serves every formulation in the package:

    minimize    q' x
    subject to  value(block_j) in K_j   for each constraint block,

where each block value is an affine function of the real decision vector x
and K_j is the zero cone (equalities), the nonnegative orthant, a second
order cone (first entry bounds the Euclidean norm of the rest), or the cone
of positive semidefinite matrices in scaled-vector (svec) form. Affine
values are held as Aff objects: a dense coefficient panel over the block's
active columns, globally sparse once assembled.

Solvers plug in behind solve(); clarabel is the default, cvxopt's conelp
the alternative. A reported-feasible point is never trusted as-is: an
independent residual check at 1e-6 absolute runs on every solve and
downgrades the status to "unknown" on violation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Aff",
    "CAff",
    "ConicProgram",
    "SolveResult",
    "complex_soc_embed",
    "hermitian_to_real_psd",
    "svec",
    "smat",
    "svec_len",
    "FEAS_TOL",
    "BACKENDS",
]

FEAS_TOL = 1e-6
BACKENDS = ("clarabel", "cvxopt")
_SQRT2 = np.sqrt(2.0)


class Aff:
    """Affine vector value C @ x[cols] + d over a conic program's variables.

    cols are global variable indices (unique, sorted); C has one column per
    active variable and one row per entry of the value.
    """

    __slots__ = ("cols", "C", "d")

    def __init__(self, cols, C, d):
        self.cols = np.asarray(cols, dtype=np.int64)
        self.C = np.asarray(C, dtype=float)
        self.d = np.asarray(d, dtype=float)
        if self.C.ndim != 2 or self.C.shape != (self.d.size, self.cols.size):
            raise ValueError("inconsistent Aff shapes")

    @staticmethod
    def constant(d):
        d = np.atleast_1d(np.asarray(d, dtype=float))
        return Aff(np.empty(0, dtype=np.int64), np.zeros((d.size, 0)), d)

    @property
    def size(self):
        return self.d.size

    def _aligned(self, other):
        cols = np.union1d(self.cols, other.cols)
        def expand(a, rows):
            C = np.zeros((rows, cols.size))
            if a.cols.size:
                C[:, np.searchsorted(cols, a.cols)] = a.C
            return C
        return cols, expand(self, self.size), expand(other, other.size)

    def __add__(self, other):
        if isinstance(other, Aff):
            if self.size != other.size:
                raise ValueError("adding Aff values of different lengths")
            cols, A, B = self._aligned(other)
            return Aff(cols, A + B, self.d + other.d)
        return Aff(self.cols, self.C, self.d + np.asarray(other, dtype=float))

    __radd__ = __add__

    def __neg__(self):
        return Aff(self.cols, -self.C, -self.d)

    def __sub__(self, other):
        if isinstance(other, Aff):
            return self + (-other)
        return self + (-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + np.asarray(other, dtype=float)

    def __mul__(self, s):
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            return Aff(self.cols, self.C * s, self.d * s)
        if s.shape != (self.size,):
            raise ValueError("scale must be a scalar or one factor per row")
        return Aff(self.cols, self.C * s[:, None], self.d * s)

    __rmul__ = __mul__

    def apply(self, D):
        """Left-multiply by a constant real matrix."""
        D = np.asarray(D, dtype=float)
        if D.ndim != 2 or D.shape[1] != self.size:
            raise ValueError("matrix width must equal the Aff length")
        return Aff(self.cols, D @ self.C, D @ self.d)

    def __getitem__(self, idx):
        C = self.C[idx]
        d = self.d[idx]
        if np.ndim(d) == 0:
            C = C.reshape(1, -1)
            d = np.atleast_1d(d)
        return Aff(self.cols, C, d)

    def sum(self):
        return Aff(self.cols, self.C.sum(axis=0, keepdims=True),
                   np.atleast_1d(self.d.sum()))

    @staticmethod
    def stack(parts):
        parts = [p if isinstance(p, Aff) else Aff.constant(p) for p in parts]
        cols = parts[0].cols
        for p in parts[1:]:
            cols = np.union1d(cols, p.cols)
        rows = sum(p.size for p in parts)
        C = np.zeros((rows, cols.size))
        d = np.empty(rows)
        r = 0
        for p in parts:
            if p.cols.size:
                C[r:r + p.size, np.searchsorted(cols, p.cols)] = p.C
            d[r:r + p.size] = p.d
            r += p.size
        return Aff(cols, C, d)


class CAff:
    """Complex affine vector kept as split real/imag Aff parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        if re.size != im.size:
            raise ValueError("re and im must have equal length")
        self.re = re
        self.im = im

    @staticmethod
    def constant(z):
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        return CAff(Aff.constant(z.real), Aff.constant(z.imag))

    @property
    def size(self):
        return self.re.size

    def __add__(self, other):
        if isinstance(other, CAff):
            return CAff(self.re + other.re, self.im + other.im)
        z = np.asarray(other, dtype=np.complex128)
        return CAff(self.re + z.real, self.im + z.imag)

    __radd__ = __add__

    def __neg__(self):
        return CAff(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other if isinstance(other, CAff) else -np.asarray(other, dtype=np.complex128))

    def apply(self, Z):
        """Left-multiply by a constant complex matrix."""
        Z = np.asarray(Z, dtype=np.complex128)
        X, Y = Z.real, Z.imag
        return CAff(self.re.apply(X) - self.im.apply(Y),
                    self.im.apply(X) + self.re.apply(Y))

    def __getitem__(self, idx):
        return CAff(self.re[idx], self.im[idx])

    @staticmethod
    def stack(parts):
        return CAff(Aff.stack([p.re for p in parts]),
                    Aff.stack([p.im for p in parts]))


def complex_soc_embed(caff):
    """Real embedding [Re; Im] of a complex affine vector; its Euclidean
    norm equals the complex norm at every assignment."""
    if isinstance(caff, CAff):
        return Aff.stack([caff.re, caff.im])
    z = np.atleast_1d(np.asarray(caff, dtype=np.complex128))
    return Aff.constant(np.concatenate([z.real, z.imag]))


def hermitian_to_real_psd(H, tol=1e-10):
    """[[X, -Y], [Y, X]] embedding of a Hermitian H = X + jY; positive
    semidefinite exactly when H is, with every eigenvalue doubled."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    X, Y = H.real, H.imag
    return np.block([[X, -Y], [Y, X]])


def svec_len(n):
    return n * (n + 1) // 2


def svec(S):
    """Scaled upper-triangle vectorization, column major, off-diagonal
    entries multiplied by sqrt(2) so inner products are preserved."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    iu = np.triu_indices(n)
    # triu_indices is row major over the upper triangle; reorder to
    # column-major (j outer, i inner) to match the solver convention
    order = np.lexsort((iu[0], iu[1]))
    i, j = iu[0][order], iu[1][order]
    v = S[i, j] * np.where(i == j, 1.0, _SQRT2)
    return v


def smat(v):
    """Inverse of svec."""
    v = np.asarray(v, dtype=float)
    m = v.size
    n = int((np.sqrt(8 * m + 1) - 1) / 2)
    if svec_len(n) != m:
        raise ValueError("length is not a triangular number")
    S = np.zeros((n, n))
    pos = 0
    for j in range(n):
        for i in range(j + 1):
            if i == j:
                S[i, j] = v[pos]
            else:
                S[i, j] = S[j, i] = v[pos] / _SQRT2
            pos += 1
    return S


def _svec_index_maps(n):
    """(i, j, scale) arrays of the svec ordering for order n."""
    i = np.concatenate([np.arange(j + 1) for j in range(n)])
    j = np.concatenate([np.full(jj + 1, jj) for jj in range(n)])
    scale = np.where(i == j, 1.0, _SQRT2)
    return i, j, scale


@dataclass
class SolveResult:
    """Outcome of one conic solve.

    status is "optimal" (backend solved and the independent residual check
    passed), "infeasible" (certified primal infeasible), or "unknown"
    (anything else: near-solves, iteration limits, backend errors, failed
    residual check). x is None unless status is "optimal".
    """

    status: str
    x: np.ndarray = None
    solve_time: float = 0.0
    iterations: int = 0
    max_residual: float = np.nan
    backend: str = ""
    objective: float = np.nan

    def value(self, aff):
        if self.x is None:
            return None
        if isinstance(aff, CAff):
            re = self.value(aff.re)
            im = self.value(aff.im)
            return re + 1j * im
        v = aff.C @ self.x[aff.cols] + aff.d if aff.cols.size else aff.d.copy()
        return v


class ConicProgram:
    """Incrementally built conic program over named-by-handle variables."""

    def __init__(self):
        self.nvar = 0
        self._blocks = []  # (kind, aff, order-or-None)
        self._objective = None

    def new_vars(self, n):
        """n fresh real scalars, returned as an identity Aff."""
        cols = np.arange(self.nvar, self.nvar + n, dtype=np.int64)
        self.nvar += n
        return Aff(cols, np.eye(n), np.zeros(n))

    def new_cvars(self, n):
        """n fresh complex scalars (2n underlying reals)."""
        return CAff(self.new_vars(n), self.new_vars(n))

    def zero(self, aff):
        """Constrain the affine value to equal zero."""
        self._blocks.append(("zero", aff, None))

    def nonneg(self, aff):
        self._blocks.append(("nonneg", aff, None))

    def soc(self, aff):
        """First entry bounds the Euclidean norm of the remaining entries."""
        if aff.size < 1:
            raise ValueError("second order cone needs dimension >= 1")
        self._blocks.append(("soc", aff, None))

    def psd_svec(self, aff, order):
        if aff.size != svec_len(order):
            raise ValueError("svec length does not match the matrix order")
        self._blocks.append(("psd", aff, order))

    def minimize(self, aff):
        if aff.size != 1:
            raise ValueError("objective must be scalar")
        self._objective = aff

    def _compile(self):
        """Canonical arrays (q, A, b, cones) with blocks grouped in the
        order zero, nonneg, soc, psd."""
        ordered = [blk for kind in ("zero", "nonneg", "soc", "psd")
                   for blk in self._blocks if blk[0] == kind]
        rows = sum(blk[1].size for blk in ordered)
        data, ri, ci = [], [], []
        b = np.empty(rows)
        cones = []
        r = 0
        for kind, aff, order in ordered:
            m = aff.size
            if aff.cols.size:
                nz = np.nonzero(aff.C)
                data.append(-aff.C[nz])
                ri.append(nz[0] + r)
                ci.append(aff.cols[nz[1]])
            b[r:r + m] = aff.d
            cones.append((kind, m if kind != "psd" else order))
            r += m
        A = sp.csc_matrix(
            (np.concatenate(data) if data else np.empty(0),
             (np.concatenate(ri) if ri else np.empty(0, dtype=np.int64),
              np.concatenate(ci) if ci else np.empty(0, dtype=np.int64))),
            shape=(rows, self.nvar),
        )
        q = np.zeros(self.nvar)
        if self._objective is not None and self._objective.cols.size:
            q[self._objective.cols] = self._objective.C[0]
        return q, A, b, cones, ordered

    def residual(self, x):
        """Worst violation of any block at x (independent of any backend)."""
        worst = 0.0
        for kind, aff, order in self._blocks:
            v = aff.C @ x[aff.cols] + aff.d if aff.cols.size else aff.d
            if kind == "zero":
                viol = np.max(np.abs(v), initial=0.0)
            elif kind == "nonneg":
                viol = max(0.0, float(-v.min(initial=0.0)))
            elif kind == "soc":
                viol = max(0.0, float(np.linalg.norm(v[1:]) - v[0]))
            else:
                w = np.linalg.eigvalsh(smat(v))
                viol = max(0.0, float(-w[0]))
            worst = max(worst, viol)
        return worst

    def solve(self, backend="clarabel"):
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}")
        if not self._blocks:
            # nothing to satisfy; bounded only for a zero objective
            if self._objective is None or not self._objective.cols.size:
                return SolveResult(status="optimal", x=np.zeros(self.nvar),
                                   max_residual=0.0, backend=backend,
                                   objective=0.0)
            return SolveResult(status="unknown", backend=backend)
        q, A, b, cones, _ = self._compile()
        t0 = time.perf_counter()
        try:
            if backend == "clarabel":
                status, x, iters = _solve_clarabel(q, A, b, cones)
            else:
                status, x, iters = _solve_cvxopt(q, A, b, cones)
        except (KeyboardInterrupt, SystemExit):
            raise
        except BaseException:
            # native-extension panics (rust/pyo3) skip Exception entirely
            status, x, iters = "unknown", None, 0
        elapsed = time.perf_counter() - t0
        res = SolveResult(status=status, x=x, solve_time=elapsed,
                          iterations=iters, backend=backend)
        if status == "optimal":
            res.max_residual = self.residual(x)
            if res.max_residual > FEAS_TOL:
                res.status = "unknown"
                res.x = None
            else:
                res.objective = float(q @ x)
        return res


def _solve_clarabel(q, A, b, cones):
    import clarabel

    cone_objs = []
    for kind, dim in _merge_adjacent(cones):
        if kind == "zero":
            cone_objs.append(clarabel.ZeroConeT(dim))
        elif kind == "nonneg":
            cone_objs.append(clarabel.NonnegativeConeT(dim))
        elif kind == "soc":
            cone_objs.append(clarabel.SecondOrderConeT(dim))
        else:
            cone_objs.append(clarabel.PSDTriangleConeT(dim))
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    P = sp.csc_matrix((q.size, q.size))
    solver = clarabel.DefaultSolver(P, q, A, b, cone_objs, settings)
    sol = solver.solve()
    name = str(sol.status)
    if name == "Solved":
        return "optimal", np.asarray(sol.x, dtype=float), int(sol.iterations)
    if name == "PrimalInfeasible":
        return "infeasible", None, int(sol.iterations)
    return "unknown", None, int(sol.iterations)


def _merge_adjacent(cones):
    """Zero and nonneg blocks are contiguous after grouping; merge them so
    the backend sees one cone of each."""
    merged = []
    for kind, dim in cones:
        if kind in ("zero", "nonneg") and merged and merged[-1][0] == kind:
            merged[-1] = (kind, merged[-1][1] + dim)
        else:
            merged.append((kind, dim))
    return merged


_EXPAND_CACHE = {}


def _svec_expand(n):
    """Sparse map from svec coordinates to full column-major n*n storage,
    as cvxopt's semidefinite blocks expect."""
    if n not in _EXPAND_CACHE:
        i, j, scale = _svec_index_maps(n)
        rows = np.concatenate([j * n + i, i * n + j])
        cols = np.concatenate([np.arange(i.size)] * 2)
        vals = np.concatenate([1.0 / np.where(i == j, 1.0, _SQRT2)] * 2)
        # diagonal entries appear twice at the same (row, col); halve them
        dup = np.concatenate([i == j] * 2)
        vals[dup] *= 0.5
        _EXPAND_CACHE[n] = sp.csr_matrix(
            (vals, (rows, cols)), shape=(n * n, i.size)
        )
    return _EXPAND_CACHE[n]


def _solve_cvxopt(q, A, b, cones):
    import cvxopt
    from cvxopt import matrix, solvers, spmatrix

    solvers.options["show_progress"] = False
    A = A.tocsr()
    r = 0
    segs = {"zero": [], "nonneg": [], "soc": [], "psd": []}
    for kind, dim in cones:
        m = svec_len(dim) if kind == "psd" else dim
        Ablk, bblk = A[r:r + m], b[r:r + m]
        if kind == "psd":
            E = _svec_expand(dim)
            Ablk, bblk = E @ Ablk, E @ bblk
        segs[kind].append((Ablk, bblk, dim))
        r += m

    def to_cvx(m):
        coo = sp.coo_matrix(m)
        return spmatrix(coo.data, coo.row.tolist(), coo.col.tolist(), size=coo.shape)

    dims = {"l": 0, "q": [], "s": []}
    Gs, hs = [], []
    for Ablk, bblk, dim in segs["nonneg"]:
        Gs.append(Ablk); hs.append(bblk); dims["l"] += dim
    for Ablk, bblk, dim in segs["soc"]:
        Gs.append(Ablk); hs.append(bblk); dims["q"].append(dim)
    for Ablk, bblk, dim in segs["psd"]:
        Gs.append(Ablk); hs.append(bblk); dims["s"].append(dim)
    kwargs = {}
    if segs["zero"]:
        Aeq = sp.vstack([s[0] for s in segs["zero"]])
        beq = np.concatenate([s[1] for s in segs["zero"]])
        # cvxopt negates nothing here: A x = b with our b = d, A = -C
        kwargs["A"] = to_cvx(-Aeq)   # back to +C so C x + d = 0 -> C x = -d
        kwargs["b"] = matrix(-beq)
    if not Gs:
        Gs.append(sp.csr_matrix((1, q.size)))
        hs.append(np.array([1.0]))
        dims["l"] += 1
    G = to_cvx(sp.vstack(Gs))
    h = matrix(np.concatenate(hs))
    sol = solvers.conelp(matrix(q), G, h, dims, **kwargs)
    status = sol["status"]
    iters = int(sol.get("iterations", 0))
    if status == "optimal":
        return "optimal", np.asarray(sol["x"]).ravel(), iters
    if status == "primal infeasible":
        return "infeasible", None, iters
    return "unknown", None, iters
