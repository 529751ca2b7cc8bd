"""The solution variety W = {(A, x) : A x = 0} of full-rank n x (n+1) systems.

A point stores A together with a unit kernel vector x; x is a projective
point, so only its line matters.  Tangent vectors (A', x') satisfy
A' x + A x' = 0 and are kept horizontal, <x', x> = 0.  The condition metric
weights both factors by alpha(A) = sigma_n(A)^-2:

    |(A', x')|^2 = alpha(A) (|A'|_F^2 + |x'|^2).

Because a full-rank A has a one-dimensional kernel, x is a smooth function
of A and a path in W is determined by its A-component.  Geodesics are
therefore computed on the A-nodes alone, with x recomputed from A, which
keeps every node exactly on W.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .convexity import ConvexityReport, ScalarTrace, check_discrete_convexity
from .errors import (
    InputError,
    NoConvergenceError,
    NotConvergedError,
    RankDeficientError,
    SeedSingularError,
    ShapeMismatchError,
    SingularNodeError,
)
from .geodesic import (
    EnergyState,
    GeodesicOptions,
    PathEnergy,
    TRAPEZOID,
    _anneal,
    _banded,
    default_seed,
    reparametrize_arclength,
)
from .matcore import SINGULAR_RTOL, as_matrix, ctranspose, field_of
from .spectral import SmoothedAlpha, real_basis, to_real

log = logging.getLogger(__name__)

KERNEL_TOL = 1e-10


def _phase_normalize(x: np.ndarray) -> np.ndarray:
    """Scale x so that its largest-modulus entry is real and positive."""
    k = int(np.argmax(np.abs(x)))
    if not np.iscomplexobj(x):
        return x * np.sign(x[k])
    out = x * (abs(x[k]) / x[k])
    out[k] = abs(x[k])
    return out


@dataclass(frozen=True)
class VarietyPoint:
    """(A, x) with A an n x (n+1) full-rank matrix and x a unit vector in its kernel."""

    A: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A)
        n, m = A.shape
        if m != n + 1:
            raise ShapeMismatchError(f"A must be n x (n+1), got {n}x{m}")
        x = np.asarray(self.x)
        if x.shape != (m,):
            raise ShapeMismatchError(f"x must have {m} entries")
        if np.iscomplexobj(x) and not np.iscomplexobj(A):
            if np.any(np.imag(x) != 0):
                raise InputError("complex x for a real A")
            x = np.real(x)
        x = x.astype(A.dtype)
        nx = np.linalg.norm(x)
        if abs(nx - 1.0) > 1e-12:
            raise InputError(f"x must be a unit vector, |x| = {nx:.15g}")
        if np.linalg.norm(A @ x) > KERNEL_TOL * np.linalg.norm(A):
            raise InputError("x is not in the kernel of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "x", _phase_normalize(x))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def field(self) -> str:
        return field_of(self.A)

    def constraint_residual(self) -> float:
        return float(np.linalg.norm(self.A @ self.x) / np.linalg.norm(self.A))


def kernel_point(A) -> VarietyPoint:
    """(A, x) with x the last right singular vector of A, phase-normalized."""
    A = as_matrix(A)
    n, m = A.shape
    if m != n + 1:
        raise ShapeMismatchError(f"A must be n x (n+1), got {n}x{m}")
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    if s[-1] <= SINGULAR_RTOL * np.linalg.norm(A):
        raise RankDeficientError("A is rank deficient, its kernel is not a single line")
    x = Vh[-1].conj()
    return VarietyPoint(A, x / np.linalg.norm(x))


def _batch_kernels(stack: np.ndarray):
    """Unit kernel vectors and thin SVD factors for a stack of n x (n+1) matrices."""
    U, s, Vh = np.linalg.svd(stack, full_matrices=True)
    n = stack.shape[1]
    x = Vh[:, -1, :].conj()
    return x, U, s, Vh[:, :n, :]


def tangent_project_W(p: VarietyPoint, dA, dx):
    """Orthogonal projection of (dA, dx) onto the horizontal tangent space of W at p.

    The constraints A' x + A x' = 0 and <x', x> = 0 form a linear map L into
    K^n x K, and the projection is v - L^*(L L^*)^-1 L v.
    """
    A, x = p.A, p.x
    dt = np.result_type(A, dA, dx)
    dA = np.asarray(dA, dtype=dt)
    dx = np.asarray(dx, dtype=dt)
    if dA.shape != A.shape or dx.shape != x.shape:
        raise ShapeMismatchError("(dA, dx) must match the point's shapes")
    n = A.shape[0]
    r = dA @ x + A @ dx
    c = np.vdot(x, dx)
    Ax = A @ x
    G = np.zeros((n + 1, n + 1), dtype=dt)
    G[:n, :n] = np.eye(n) + A @ ctranspose(A)
    G[:n, n] = Ax
    G[n, :n] = Ax.conj()
    G[n, n] = 1.0
    y = np.linalg.solve(G, np.concatenate([r, [c]]))
    yr, ys = y[:n], y[n]
    return dA - np.outer(yr, x.conj()), dx - ctranspose(A) @ yr - x * ys


@dataclass(frozen=True)
class VarietyPath:
    """Points of W joined segment by segment; the endpoints are fixed."""

    points: tuple
    times: np.ndarray | None = None

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 2:
            raise InputError("a path needs at least two points")
        shapes = {q.A.shape for q in pts}
        if len(shapes) != 1:
            raise ShapeMismatchError("all points must have the same shape")
        object.__setattr__(self, "points", pts)
        t = np.linspace(0.0, 1.0, len(pts)) if self.times is None else np.asarray(self.times, float)
        object.__setattr__(self, "times", t)

    @classmethod
    def from_matrices(cls, nodes, times=None) -> "VarietyPath":
        return cls(tuple(kernel_point(A) for A in nodes), times)

    @property
    def A_nodes(self) -> np.ndarray:
        return np.array([q.A for q in self.points])

    @property
    def x_nodes(self) -> np.ndarray:
        return np.array([q.x for q in self.points])

    @property
    def N(self) -> int:
        return len(self.points) - 1

    def __len__(self):
        return len(self.points)

    def max_constraint_residual(self) -> float:
        return max(q.constraint_residual() for q in self.points)


def _aligned_dx2(x: np.ndarray) -> np.ndarray:
    """|x_{i+1} - c x_i|^2 minimized over unit scalars c, i.e. 2 - 2 |<x_i, x_{i+1}>|."""
    c = np.abs(np.sum(x[1:].conj() * x[:-1], axis=1))
    return np.maximum(2.0 - 2.0 * np.minimum(c, 1.0), 0.0)


def _node_segment_lengths(nodes: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(nodes, compute_uv=False)[:, -1]
    if np.any(s <= SINGULAR_RTOL * np.linalg.norm(nodes.reshape(len(nodes), -1), axis=1)):
        raise SingularNodeError("a node is rank deficient")
    x, *_ = _batch_kernels(nodes)
    dA2 = np.sum(np.abs(np.diff(nodes, axis=0)) ** 2, axis=(1, 2))
    return np.sqrt(dA2 + _aligned_dx2(x)) * (1.0 / s[:-1] + 1.0 / s[1:]) / 2.0


def variety_segment_lengths(path) -> np.ndarray:
    """Trapezoid condition length of each segment of a path in W."""
    if isinstance(path, VarietyPath):
        nodes = path.A_nodes
        x = path.x_nodes
        s = np.linalg.svd(nodes, compute_uv=False)[:, -1]
        if np.any(s <= 0):
            raise SingularNodeError("a node is rank deficient")
        dA2 = np.sum(np.abs(np.diff(nodes, axis=0)) ** 2, axis=(1, 2))
        return np.sqrt(dA2 + _aligned_dx2(x)) * (1.0 / s[:-1] + 1.0 / s[1:]) / 2.0
    return _node_segment_lengths(np.asarray(path))


def variety_condition_length(path) -> float:
    """sum_i sqrt(|dA_i|^2 + |dx_i|^2) (1/sigma_n(A_i) + 1/sigma_n(A_{i+1})) / 2."""
    return float(np.sum(variety_segment_lengths(path)))


# ---------------------------------------------------------------------------
# discrete energy on W


def _pair_terms(pair: np.ndarray):
    """q = |A_r - A_l|^2 + 2 - 2 |<x_l, x_r>| and its gradients for stacked pairs.

    ``pair`` holds 2k matrices, alternating left and right ends.  With
    c = <x_l, x_r> and x' = -A^+ A' x for the kernel map, the x-part has
    gradient 2 (c/|c|) (A_l^+)^* x_r x_l^* in A_l, and symmetrically in A_r.
    """
    x, U, s, Vh1 = _batch_kernels(pair)
    xl, xr = x[0::2], x[1::2]
    D = pair[1::2] - pair[0::2]
    c = np.sum(xr.conj() * xl, axis=1)
    ac = np.abs(c)
    ph = c / ac

    def pinv_h(sel, y):
        # (A^+)^* y = U S^-1 V1^* y
        return np.einsum("kij,kj,kjl,kl->ki", U[sel], 1.0 / s[sel], Vh1[sel], y)

    left = 2.0 * ph[:, None, None] * (pinv_h(slice(0, None, 2), xr)[:, :, None] * xl.conj()[:, None, :])
    right = 2.0 * ph.conj()[:, None, None] * (pinv_h(slice(1, None, 2), xl)[:, :, None] * xr.conj()[:, None, :])
    q = np.sum(np.abs(D) ** 2, axis=(1, 2)) + 2.0 - 2.0 * ac
    return q, -2.0 * D + left, 2.0 * D + right


@dataclass
class VarietyState(EnergyState):
    q: np.ndarray = None
    a: np.ndarray = None
    b: np.ndarray = None


class VarietyEnergy(PathEnergy):
    """Trapezoid condition energy of a path in W, as a function of its A-nodes.

    Segment i contributes q_i (alpha(A_i) + alpha(A_{i+1})) / 2 / dt with
    q_i = |A_{i+1} - A_i|^2 + 2 - 2 |<x_i, x_{i+1}>|, x_i the kernel of A_i.
    """

    def __init__(self, A: np.ndarray, B: np.ndarray, N: int, fd_rel: float = 1e-5):
        super().__init__(A, B, N, TRAPEZOID)
        self.fd_rel = fd_rel

    def _segment_terms(self, nodes: np.ndarray):
        """q_i and its gradients with respect to the left and right node."""
        pair = np.stack([nodes[:-1], nodes[1:]], axis=1).reshape((-1,) + nodes.shape[1:])
        return _pair_terms(pair)

    def value(self, X: np.ndarray) -> float:
        nodes = self.full(X)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            s = np.linalg.svd(nodes, compute_uv=False)
            dA2 = np.sum(np.abs(np.diff(nodes, axis=0)) ** 2, axis=(1, 2))
            if not self.feasible(dA2, s[:, -1]):
                return np.inf
            x, *_ = _batch_kernels(nodes)
            q = dA2 + _aligned_dx2(x)
            h = s**-2
            top = h[:, -1]
            f = top + self.temp * np.log(np.sum(np.exp((h - top[:, None]) / self.temp[:, None]), axis=1))
        if not np.all(np.isfinite(f)) or not np.all(np.isfinite(q)):
            return np.inf
        return self._weighted_sum(q, f)

    def evaluate(self, X: np.ndarray) -> VarietyState:
        nodes = self.full(X)
        q, a, b = self._segment_terms(nodes)
        D = np.diff(nodes, axis=0)
        sa = SmoothedAlpha(nodes, self.temp)
        f, g = sa.value, sa.grad()
        E = self._weighted_sum(q, f)
        F = (f[:-1] + f[1:]) / 2.0
        G = (b[:-1] * F[:-1, None, None] + a[1:] * F[1:, None, None]
             + ((q[:-1] + q[1:]) / 2.0)[:, None, None] * g[1:-1]) / self.dt
        return VarietyState(X, E, G, D, q, sa, q=q, a=a, b=b)

    def _segment_hessians(self, nodes: np.ndarray, basis: np.ndarray):
        """Blocks of the Hessian of q_i by central differences of its gradients.

        Returns (LL, RL, RR) with RL[i] the block (right node row, left node column).
        """
        cplx = self.complex
        p = basis.shape[0]
        k = nodes.shape[0] - 1
        s = np.linalg.svd(nodes, compute_uv=False)[:, -1]
        step = self.fd_rel * np.minimum(s[:-1], s[1:])
        LL = np.empty((k, p, p))
        RL = np.empty((k, p, p))
        LR = np.empty((k, p, p))
        RR = np.empty((k, p, p))
        for j in range(p):
            for side in (0, 1):
                diffs = []
                for sign in (1.0, -1.0):
                    lo = nodes[:-1].copy()
                    hi = nodes[1:].copy()
                    target = lo if side == 0 else hi
                    target += sign * step[:, None, None] * basis[j]
                    pair = np.stack([lo, hi], axis=1).reshape((-1,) + nodes.shape[1:])
                    _, a, b = _pair_terms(pair)
                    diffs.append((to_real(a, cplx), to_real(b, cplx)))
                da = (diffs[0][0] - diffs[1][0]) / (2.0 * step[:, None])
                db = (diffs[0][1] - diffs[1][1]) / (2.0 * step[:, None])
                if side == 0:
                    LL[:, :, j], RL[:, :, j] = da, db
                else:
                    LR[:, :, j], RR[:, :, j] = da, db
        LL = 0.5 * (LL + np.swapaxes(LL, 1, 2))
        RR = 0.5 * (RR + np.swapaxes(RR, 1, 2))
        RL = 0.5 * (RL + np.swapaxes(LR, 1, 2))
        return LL, RL, RR

    def hessian_banded(self, st: VarietyState) -> np.ndarray:
        sa = st.smoothed
        nodes = self.full(st.X)
        basis = real_basis(self.shape, self.complex, nodes.dtype)
        p = basis.shape[0]
        c = 1.0 / self.dt
        cplx = self.complex
        f = sa.value
        F = (f[:-1] + f[1:]) / 2.0
        gv = to_real(sa.grad(), cplx)
        av = to_real(st.a, cplx)
        bv = to_real(st.b, cplx)
        q = st.q
        LL, RL, RR = self._segment_hessians(nodes, basis)
        k = self.N - 1
        Hf = to_real(sa.hvp_at(slice(1, -1), np.broadcast_to(basis, (k,) + basis.shape)), cplx)
        Hf = 0.5 * (Hf + np.swapaxes(Hf, 1, 2))
        gi = gv[1:-1]
        ab = bv[:-1] + av[1:]
        cross = ab[:, :, None] * gi[:, None, :]
        diag = c * (
            RR[:-1] * F[:-1, None, None]
            + LL[1:] * F[1:, None, None]
            + 0.5 * (cross + np.swapaxes(cross, 1, 2))
            + ((q[:-1] + q[1:]) / 2.0)[:, None, None] * Hf
        )
        # block (node j+1, node j) for interior j = 1 .. N-2, segment j
        sub = c * (
            RL[1:-1] * F[1:-1, None, None]
            + 0.5 * bv[1:-1][:, :, None] * gv[1:-2][:, None, :]
            + 0.5 * gv[2:-1][:, :, None] * av[1:-1][:, None, :]
        )
        return _banded(diag, sub, p)


# ---------------------------------------------------------------------------
# geodesics


@dataclass
class VarietyGeodesicResult:
    path: VarietyPath
    length_kappa: float
    grad_norm: float
    iterations: int
    condition_speed: np.ndarray
    converged: bool
    seed_length: float = np.nan
    energy_history: list = field(default_factory=list)
    message: str = ""
    tol: float = np.nan
    max_constraint_residual: float = 0.0


def _as_point(p) -> VarietyPoint:
    if isinstance(p, VarietyPoint):
        return p
    return kernel_point(p)


def minimize_variety_path(p, q, N: int | None = None, opts: GeodesicOptions | None = None) -> VarietyGeodesicResult:
    """Local minimizer of the discrete condition energy on W between p and q.

    Newton steps act on the A-nodes; every iterate's x-nodes are the exact
    kernels, so each node stays on W.  The result is redistributed to equal
    condition length per segment.
    """
    opts = opts or GeodesicOptions()
    N = N or opts.nodes
    if N < 1:
        raise InputError("need at least one segment")
    p, q = _as_point(p), _as_point(q)
    if p.A.shape != q.A.shape:
        raise ShapeMismatchError("endpoints must have the same shape")
    A, B = p.A, q.A
    if field_of(A) != field_of(B):
        A, B = A.astype(complex), B.astype(complex)

    if opts.seed is not None:
        seed = np.asarray(opts.seed, dtype=A.dtype).copy()
        if seed.shape != (N + 1,) + A.shape:
            raise ShapeMismatchError("seed must have N+1 nodes of the endpoint shape")
        seed[0], seed[-1] = A, B
    else:
        seed = default_seed(A, B, N)
    try:
        seed_len = float(np.sum(_node_segment_lengths(seed)))
    except SingularNodeError as exc:
        raise SeedSingularError(str(exc)) from None

    if np.array_equal(A, B) and opts.seed is None:
        path = VarietyPath(tuple([p] * (N + 1)))
        return VarietyGeodesicResult(path, 0.0, 0.0, 0, np.zeros(N), True, seed_len, [], "trivial",
                                     opts.tol, path.max_constraint_residual())
    if N == 1:
        path = VarietyPath((p, q))
        seg = variety_segment_lengths(path)
        return VarietyGeodesicResult(path, float(seg.sum()), 0.0, 0, seg, True, seed_len, [],
                                     "trivial", opts.tol, path.max_constraint_residual())

    energy = VarietyEnergy(A, B, N)
    X, res, it, hist, msg = _anneal(energy, seed[1:-1], opts)
    converged = res <= opts.tol
    raw_nodes = energy.full(X)
    raw_len = float(np.sum(_node_segment_lengths(raw_nodes)))
    nodes = raw_nodes
    if opts.reparametrize:
        nodes = reparametrize_arclength(nodes, lengths=_node_segment_lengths).nodes
    pts = [p] + [kernel_point(M) for M in nodes[1:-1]] + [q]
    seg = variety_segment_lengths(VarietyPath(tuple(pts)))
    path = VarietyPath(tuple(pts), np.concatenate([[0.0], np.cumsum(seg)]))
    result = VarietyGeodesicResult(
        path=path,
        length_kappa=raw_len,
        grad_norm=res,
        iterations=it,
        condition_speed=seg * N,
        converged=converged,
        seed_length=seed_len,
        energy_history=hist,
        message=msg,
        tol=opts.tol,
        max_constraint_residual=path.max_constraint_residual(),
    )
    if not converged:
        if opts.strict:
            raise NoConvergenceError(f"minimize_variety_path: {msg}, residual {res:.3e}", result)
        log.warning("minimize_variety_path did not converge: %s (residual %.3e)", msg, res)
    return result


def variety_log_alpha_trace(path: VarietyPath, label: str = "log_alpha") -> ScalarTrace:
    """t -> log alpha(A(t)) at the nodes, t the cumulative condition length on W."""
    seg = variety_segment_lengths(path)
    A = path.A_nodes
    s = np.linalg.svd(A, compute_uv=False)[:, -1]
    if seg.sum() > 0 and np.all(seg > 0):
        t = np.concatenate([[0.0], np.cumsum(seg)])
    else:
        t = np.arange(len(path), dtype=float)
    return ScalarTrace(t, -2.0 * np.log(s), label)


def verify_variety_selfconvexity(result: VarietyGeodesicResult, tol: float = 1e-4) -> ConvexityReport:
    if not result.converged:
        raise NotConvergedError(
            f"variety geodesic residual {result.grad_norm:.3e} is above its tolerance {result.tol:.1e}"
        )
    return check_discrete_convexity(variety_log_alpha_trace(result.path), tol)


def strata_signature(p: VarietyPoint):
    """Multiplicity signature of A, which labels the stratum W_(k) containing p."""
    from .strata import classify

    return classify(p.A)


__all__ = [
    "VarietyPoint",
    "VarietyPath",
    "VarietyGeodesicResult",
    "kernel_point",
    "tangent_project_W",
    "variety_condition_length",
    "variety_segment_lengths",
    "minimize_variety_path",
    "variety_log_alpha_trace",
    "verify_variety_selfconvexity",
    "strata_signature",
]
