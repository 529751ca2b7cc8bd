"""Condition lengths and condition geodesics in the full-rank n x m matrices.

The condition metric is the real Frobenius metric scaled by
alpha(A) = sigma_n(A)^-2.  Geodesics with fixed endpoints are computed by
minimizing the discrete energy

    E = sum_i |A_{i+1} - A_i|_F^2 (alpha(A_i) + alpha(A_{i+1})) / 2 / dt,   dt = 1/N

over the interior nodes (a midpoint-rule variant is available too).  Energy
minimizers have constant speed, so they are length minimizers as well, and
they are finally redistributed to equal condition arc length.

alpha is only Lipschitz where sigma_n is multiple, and geodesics often run
along such strata.  The minimizer therefore works on a log-sum-exp smoothing
of alpha whose temperature is lowered stage by stage, each stage solved by
damped Newton on the block-tridiagonal Hessian.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import cho_solve_banded, cholesky_banded, expm, logm

from .errors import (
    InputError,
    MultipleSigmaError,
    NoConvergenceError,
    SeedSingularError,
    ShapeMismatchError,
    SingularNodeError,
)
from .matcore import (
    DEFAULT_CLUSTER_TOL,
    SINGULAR_RTOL,
    alpha,
    as_matrix,
    batch_sigma_min,
    ctranspose,
    field_of,
    sigma_gap_is_simple,
    singular_values,
    subgradient_alpha,
)
from .spectral import SmoothedAlpha, from_real, real_basis, to_real

log = logging.getLogger(__name__)


@dataclass
class DiscretePath:
    """Nodes A_0 ... A_N joined piecewise linearly; the endpoints are fixed."""

    nodes: np.ndarray
    times: np.ndarray | None = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes)
        if self.nodes.ndim != 3 or self.nodes.shape[0] < 2:
            raise InputError("a path needs at least two nodes of shape (n, m)")
        if self.times is None:
            self.times = np.linspace(0.0, 1.0, self.nodes.shape[0])
        self.times = np.asarray(self.times, dtype=float)
        if self.times.shape != (self.nodes.shape[0],):
            raise InputError("one time per node is required")

    @property
    def N(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def shape(self):
        return self.nodes.shape[1:]

    @property
    def field(self) -> str:
        return field_of(self.nodes)

    def __len__(self):
        return self.nodes.shape[0]


def _nodes_of(path) -> np.ndarray:
    return path.nodes if isinstance(path, DiscretePath) else np.asarray(path)


def node_sigma_min(nodes: np.ndarray) -> np.ndarray:
    s = batch_sigma_min(nodes)
    scale = np.linalg.norm(nodes.reshape(nodes.shape[0], -1), axis=1)
    bad = s <= SINGULAR_RTOL * scale
    if np.any(bad):
        raise SingularNodeError(f"node {int(np.argmax(bad))} is singular")
    return s


def segment_lengths(path) -> np.ndarray:
    """Per-segment trapezoid condition lengths |dA| (1/s_i + 1/s_{i+1}) / 2."""
    nodes = _nodes_of(path)
    inv = 1.0 / node_sigma_min(nodes)
    d = np.linalg.norm(np.diff(nodes, axis=0).reshape(nodes.shape[0] - 1, -1), axis=1)
    return d * (inv[:-1] + inv[1:]) / 2.0


def condition_length(path) -> float:
    """Trapezoid quadrature of the integral of |A'|_F / sigma_n(A)."""
    return float(np.sum(segment_lengths(path)))


# ---------------------------------------------------------------------------
# discrete energy


SEGMENT_REACH = 1.0
# relative rounding level of the summed energy
ENERGY_RESOLUTION = 1e-13
# sigma_j carries absolute error ~eps sigma_1, so h_j = sigma_j^-2 is known to
# about 2 eps kappa relative; temperatures below ~1e8 times that make the
# softmax weights, and with them the gradient, dominated by rounding noise
TEMP_NOISE_FLOOR = 2e8 * np.finfo(float).eps
MIDPOINT = "midpoint"
TRAPEZOID = "trapezoid"


class PathEnergy:
    """Discrete condition energy of a path with fixed endpoints A, B and N segments.

    Two quadratures of the integral of alpha |A'|^2 are available:

    * ``midpoint``:  sum_i |A_{i+1} - A_i|^2 alpha(M_i) / dt, M_i the segment midpoint;
    * ``trapezoid``: sum_i |A_{i+1} - A_i|^2 (alpha(A_i) + alpha(A_{i+1})) / 2 / dt.

    alpha is evaluated in its log-sum-exp smoothed form at the per-sample
    temperatures ``temp`` (see ``condgeo.spectral``); lowering ``temp``
    toward zero recovers the exact energy.
    """

    def __init__(self, A: np.ndarray, B: np.ndarray, N: int, quadrature: str = TRAPEZOID):
        if quadrature not in (MIDPOINT, TRAPEZOID):
            raise InputError(f"unknown quadrature {quadrature!r}")
        self.A, self.B, self.N = A, B, N
        self.dt = 1.0 / N
        self.shape = A.shape
        self.complex = np.iscomplexobj(A)
        self.quadrature = quadrature
        self.temp = np.full(N if quadrature == MIDPOINT else N + 1, 1e-9 * alpha(A))

    def full(self, X: np.ndarray) -> np.ndarray:
        return np.concatenate([self.A[None], X, self.B[None]], axis=0)

    def samples(self, nodes: np.ndarray) -> np.ndarray:
        """The matrices at which alpha enters the energy."""
        if self.quadrature == MIDPOINT:
            return (nodes[:-1] + nodes[1:]) / 2.0
        return nodes

    def set_temperature(self, X: np.ndarray, tau: float) -> None:
        """Temperatures tau * alpha per sample, floored at the SVD's resolution of alpha."""
        s = np.linalg.svd(self.samples(self.full(X)), compute_uv=False)
        kappa = s[:, 0] / s[:, -1]
        self.temp = np.maximum(tau, TEMP_NOISE_FLOOR * kappa) * s[:, -1] ** -2

    def feasible(self, d2: np.ndarray, smin: np.ndarray) -> bool:
        """Every linear segment is certified nonsingular.

        sigma_n is 1-Lipschitz.  For the midpoint rule, |A_{i+1} - A_i| <=
        sigma_n(M_i) keeps the segment at least sigma_n(M_i) / 2 away from
        the singular set; for the trapezoid rule the bound is the mean of the
        end values.  Without the check a long segment could jump across the
        singular set between two samples.
        """
        bound = smin if self.quadrature == MIDPOINT else (smin[:-1] + smin[1:]) / 2.0
        return bool(np.all(np.sqrt(d2) <= SEGMENT_REACH * bound))

    def _weighted_sum(self, d2, f) -> float:
        if self.quadrature == MIDPOINT:
            return float(np.sum(d2 * f) / self.dt)
        return float(np.sum(d2 * (f[:-1] + f[1:])) / (2.0 * self.dt))

    def value(self, X: np.ndarray) -> float:
        nodes = self.full(X)
        d2 = np.sum(np.abs(np.diff(nodes, axis=0)) ** 2, axis=(1, 2))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            s = np.linalg.svd(self.samples(nodes), compute_uv=False)
            if not self.feasible(d2, s[:, -1]):
                return np.inf
            h = s**-2
            top = h[:, -1]
            f = top + self.temp * np.log(np.sum(np.exp((h - top[:, None]) / self.temp[:, None]), axis=1))
        if not np.all(np.isfinite(f)):
            return np.inf
        return self._weighted_sum(d2, f)

    def evaluate(self, X: np.ndarray) -> "EnergyState":
        nodes = self.full(X)
        D = np.diff(nodes, axis=0)
        d2 = np.sum(np.abs(D) ** 2, axis=(1, 2))
        sa = SmoothedAlpha(self.samples(nodes), self.temp)
        f, g = sa.value, sa.grad()
        E = self._weighted_sum(d2, f)
        if self.quadrature == MIDPOINT:
            half = 0.5 * d2[:, None, None] * g
            pull = 2.0 * f[:, None, None] * D
            # node j is the right end of segment j-1 and the left end of segment j
            G = (pull[:-1] + half[:-1] - pull[1:] + half[1:]) / self.dt
        else:
            W = (d2[:-1] + d2[1:]) / 2.0
            fs = f[:-1] + f[1:]
            G = (W[:, None, None] * g[1:-1] + D[:-1] * fs[:-1, None, None] - D[1:] * fs[1:, None, None]) / self.dt
        return EnergyState(X, E, G, D, d2, sa)

    def residual(self, X: np.ndarray, G: np.ndarray) -> float:
        """Norm of the energy gradient measured in the condition metric at each node."""
        s = batch_sigma_min(X)
        g2 = np.sum(np.abs(G) ** 2, axis=(1, 2))
        return float(np.sqrt(np.sum(s**2 * g2)))

    def hessian_banded(self, st: "EnergyState") -> np.ndarray:
        """Energy Hessian in lower banded storage (bandwidth 2p - 1).

        The Hessian is block tridiagonal with p x p blocks, p the real
        dimension of one node.
        """
        sa = st.smoothed
        basis = real_basis(self.shape, self.complex, st.D.dtype)
        p = basis.shape[0]
        eye = np.eye(p)
        c = 1.0 / self.dt
        Dv = to_real(st.D, self.complex)
        gv = to_real(sa.grad(), self.complex)
        f = sa.value
        if self.quadrature == MIDPOINT:
            k = st.D.shape[0]
            Hf = to_real(sa.hvp(np.broadcast_to(basis, (k,) + basis.shape)), self.complex)
            Hf = 0.5 * (Hf + np.swapaxes(Hf, 1, 2))
            Dg = Dv[:, :, None] * gv[:, None, :]
            gD = np.swapaxes(Dg, 1, 2)
            quarter = 0.25 * st.d2[:, None, None] * Hf
            two_f = 2.0 * f[:, None, None] * eye
            Jbb = c * (two_f + Dg + gD + quarter)
            Jaa = c * (two_f - Dg - gD + quarter)
            Jba = c * (Dg - two_f - gD + quarter)
            return _banded(Jbb[:-1] + Jaa[1:], Jba[1:-1], p)
        # trapezoid: alpha enters at the nodes, Hessians only at interior ones
        k = self.N - 1
        Hf = to_real(sa.hvp_at(slice(1, -1), np.broadcast_to(basis, (k,) + basis.shape)), self.complex)
        Hf = 0.5 * (Hf + np.swapaxes(Hf, 1, 2))
        W = (st.d2[:-1] + st.d2[1:]) / 2.0
        dD = Dv[:-1] - Dv[1:]
        gi = gv[1:-1]
        cross = dD[:, :, None] * gi[:, None, :]
        diag = c * (
            W[:, None, None] * Hf
            + (f[:-2] + 2.0 * f[1:-1] + f[2:])[:, None, None] * eye
            + cross
            + np.swapaxes(cross, 1, 2)
        )
        Dm = Dv[1:-1]
        sub = c * (
            -(f[1:-2] + f[2:-1])[:, None, None] * eye
            - gv[2:-1][:, :, None] * Dm[:, None, :]
            + Dm[:, :, None] * gv[1:-2][:, None, :]
        )
        return _banded(diag, sub, p)


def _banded(diag: np.ndarray, sub: np.ndarray, p: int) -> np.ndarray:
    """Lower banded storage of a symmetric block-tridiagonal matrix."""
    nb = diag.shape[0]
    ab = np.zeros((2 * p, nb * p))
    a_idx, b_idx = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    low = a_idx >= b_idx
    starts = (np.arange(nb) * p)[:, None]
    ab[(a_idx - b_idx)[low][None, :], starts + b_idx[low][None, :]] = diag[:, a_idx[low], b_idx[low]]
    if nb > 1:
        ab[(p + a_idx - b_idx).ravel()[None, :], starts[:-1] + b_idx.ravel()[None, :]] = sub.reshape(nb - 1, -1)
    return ab


@dataclass
class EnergyState:
    X: np.ndarray
    E: float
    G: np.ndarray
    D: np.ndarray
    d2: np.ndarray
    smoothed: SmoothedAlpha


# ---------------------------------------------------------------------------
# seeds


def _straight_curve(A: np.ndarray, B: np.ndarray):
    def curve(t):
        t = np.asarray(t)[:, None, None]
        return (1.0 - t) * A[None] + t * B[None]
    return curve


def _polar_parts(A: np.ndarray):
    n = A.shape[0]
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    P = (U * s) @ ctranspose(U)
    Q = np.zeros((A.shape[1], A.shape[1]), dtype=np.result_type(A, float))
    Q[:n, :n] = U
    Q[n:, n:] = np.eye(A.shape[1] - n)
    return P, Q @ Vh


def _polar_curve(A: np.ndarray, B: np.ndarray):
    n = A.shape[0]
    PA, QA = _polar_parts(A)
    PB, QB = _polar_parts(B)
    real = not np.iscomplexobj(A)
    if real:
        dA, dB = np.linalg.det(QA), np.linalg.det(QB)
        if dA * dB < 0:
            if A.shape[1] == n:
                raise SeedSingularError("real square endpoints lie in different components of GL")
            QB[-1] *= -1.0
    L = logm(ctranspose(QA) @ QB)
    if real:
        if np.max(np.abs(np.imag(L))) > 1e-8:
            raise SeedSingularError("could not connect the orthogonal factors")
        L = np.real(L)
    L = (L - ctranspose(L)) / 2.0

    def curve(t):
        t = np.asarray(t, dtype=float)
        out = np.empty((t.size,) + A.shape, dtype=A.dtype)
        for i, ti in enumerate(t):
            W = (QA @ expm(ti * L))[:n]
            out[i] = ((1.0 - ti) * PA + ti * PB) @ W
        return out
    return curve


def _clamp_curve(A: np.ndarray, floor: float):
    """Raise the singular values of A below ``floor`` to it, singular vectors fixed."""
    U, sig, Vh = np.linalg.svd(A, full_matrices=False)
    target = np.maximum(sig, floor)

    def curve(t):
        t = np.asarray(t, dtype=float)[:, None]
        s_t = (1.0 - t) * sig + t * target
        return np.einsum("ij,kj,jl->kil", U, s_t, Vh)
    return curve


def _clamped_polar_curve(A: np.ndarray, B: np.ndarray):
    """Lift the small singular values of A, cross by the polar curve, then lower them to B's.

    The middle piece keeps sigma_n at or above the floor, so only the two
    short end pieces come near the singular set.
    """
    floor = min(np.linalg.norm(A, 2), np.linalg.norm(B, 2))
    up, down = _clamp_curve(A, floor), _clamp_curve(B, floor)
    Ac, Bc = up([1.0])[0], down([1.0])[0]
    middle = _polar_curve(Ac, Bc)

    def curve(t):
        t = np.asarray(t, dtype=float)
        out = np.empty((t.size,) + A.shape, dtype=A.dtype)
        first, last = t < 1.0 / 3.0, t > 2.0 / 3.0
        mid = ~(first | last)
        if first.any():
            out[first] = up(3.0 * t[first])
        if mid.any():
            out[mid] = middle(3.0 * t[mid] - 1.0)
        if last.any():
            out[last] = down(3.0 - 3.0 * t[last])
        return out
    return curve


def _even_condition_nodes(curve, A, B, N: int, oversample: int = 16) -> np.ndarray:
    """N + 1 points on ``curve`` spaced evenly in condition length.

    Spacing in the curve parameter would make segments near a badly
    conditioned endpoint long compared with sigma_n there.
    """
    t = np.linspace(0.0, 1.0, oversample * N + 1)
    dense = curve(t)
    s = batch_sigma_min(dense)
    if np.any(s <= SINGULAR_RTOL * np.linalg.norm(dense.reshape(len(t), -1), axis=1)):
        raise SeedSingularError("seed curve meets a singular matrix")
    d = np.linalg.norm(np.diff(dense, axis=0).reshape(len(t) - 1, -1), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(d * (1.0 / s[:-1] + 1.0 / s[1:]) / 2.0)])
    tn = np.interp(np.linspace(0.0, cum[-1], N + 1), cum, t) if cum[-1] > 0 else np.linspace(0, 1, N + 1)
    out = curve(tn)
    out[0], out[-1] = A, B
    return out


def straight_seed(A: np.ndarray, B: np.ndarray, N: int) -> np.ndarray:
    """Nodes on the segment from A to B, evenly spaced in condition length."""
    return _even_condition_nodes(_straight_curve(A, B), A, B, N)


def polar_seed(A: np.ndarray, B: np.ndarray, N: int) -> np.ndarray:
    """Path P(t) W(t): P interpolates the positive factors linearly, W moves along
    a one-parameter subgroup of the unitary group.

    sigma_n along the path is at least the smaller endpoint value, so the
    seed is nonsingular whenever the endpoints lie in the same component.
    Nodes are evenly spaced in condition length.
    """
    return _even_condition_nodes(_polar_curve(A, B), A, B, N)


def seed_is_feasible(nodes: np.ndarray, margin: float = 0.5) -> bool:
    """Every segment passes ``feasible`` for both quadratures with room to spare."""
    d = np.linalg.norm(np.diff(nodes, axis=0).reshape(nodes.shape[0] - 1, -1), axis=1)
    smid = batch_sigma_min((nodes[:-1] + nodes[1:]) / 2.0)
    snode = batch_sigma_min(nodes)
    bound = np.minimum(smid, (snode[:-1] + snode[1:]) / 2.0)
    return bool(np.all(d <= margin * SEGMENT_REACH * bound))


def lifted_seed(A: np.ndarray, B: np.ndarray, N: int) -> np.ndarray:
    """Raise small singular values, cross by the polar curve, lower them again.

    Much shorter than the plain polar seed when an endpoint is nearly singular.
    """
    return _even_condition_nodes(_clamped_polar_curve(A, B), A, B, N)


def default_seed(A: np.ndarray, B: np.ndarray, N: int) -> np.ndarray:
    """Shortest feasible seed among the straight, polar and lifted constructions."""
    best, best_len = None, np.inf
    for build in (straight_seed, polar_seed, lifted_seed):
        try:
            seed = build(A, B, N)
        except SeedSingularError:
            continue
        if not seed_is_feasible(seed):
            continue
        length = condition_length(seed)
        if length < best_len:
            best, best_len = seed, length
    if best is None:
        raise SeedSingularError(
            f"{N} segments are too few to resolve a nonsingular seed; increase the node count"
        )
    return best


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class GeodesicOptions:
    nodes: int = 64
    tol: float = 1e-7
    max_iter: int = 500
    smoothing: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
    quadrature: str = TRAPEZOID
    seed: np.ndarray | None = None
    reparametrize: bool = True
    strict: bool = False


@dataclass
class GeodesicResult:
    path: DiscretePath
    length_kappa: float
    grad_norm: float
    iterations: int
    condition_speed: np.ndarray
    converged: bool
    seed_length: float = np.nan
    energy_history: list = field(default_factory=list)
    message: str = ""
    tol: float = np.nan
    raw_path: DiscretePath | None = None


def newton_minimize(energy: PathEnergy, X0: np.ndarray, tol: float, max_iter: int):
    """Damped Newton iteration on the interior nodes with a backtracking line search.

    The Hessian is shifted by mu * diag(H) whenever it is not positive
    definite.  Steps are accepted only when the energy does not increase,
    so the energy history is monotone.  Returns (X, residual, iterations,
    history, message).
    """
    if not np.isfinite(energy.value(X0)):
        raise SeedSingularError(
            "a seed segment is too long for its distance to the singular set; "
            "increase the node count"
        )
    st = energy.evaluate(X0)
    history = [st.E]
    res = energy.residual(st.X, st.G)
    mu, it, message = 0.0, 0, "converged"
    cplx = energy.complex
    shape = energy.shape
    while res > tol:
        if it >= max_iter:
            message = "iteration limit reached"
            break
        it += 1
        ab = energy.hessian_banded(st)
        scale = np.abs(ab[0]).copy()
        g = to_real(st.G, cplx).ravel()
        d = None
        for _ in range(60):
            shifted = ab.copy()
            shifted[0] += mu * scale
            try:
                chol = cholesky_banded(shifted, lower=True)
                d = -cho_solve_banded((chol, True), g)
                break
            except np.linalg.LinAlgError:
                mu = max(4.0 * mu, 1e-8)
        if d is None:
            message = "Hessian could not be regularized"
            break
        D = from_real(d.reshape(st.G.shape[0], -1), shape, cplx)
        slope = float(g @ d)
        if -slope <= ENERGY_RESOLUTION * abs(st.E):
            # the predicted decrease is below the rounding level of E, so E
            # cannot rank candidates; the residual serves as merit instead
            cand = st.X + D
            if np.isfinite(energy.value(cand)):
                new = energy.evaluate(cand)
                new_res = energy.residual(new.X, new.G)
                if new_res < res and new.E <= st.E + ENERGY_RESOLUTION * abs(st.E):
                    st, res = new, new_res
                    history.append(st.E)
                    mu = mu / 4.0 if mu > 1e-12 else 0.0
                    continue
            mu = max(16.0 * mu, 1e-6)
            if mu > 1e8:
                message = "stalled at the energy's rounding level"
                break
            continue
        step, accepted = 1.0, None
        for _ in range(50):
            Xn = st.X + step * D
            En = energy.value(Xn)
            if np.isfinite(En) and En <= st.E + 1e-4 * step * slope:
                accepted = Xn
                break
            step *= 0.5
        if accepted is None:
            if mu < 1e8:
                mu = max(16.0 * mu, 1e-6)
                continue
            message = "line search stalled"
            break
        new = energy.evaluate(accepted)
        if new.E > st.E:
            mu = max(16.0 * mu, 1e-6)
            continue
        mu = mu / 4.0 if mu > 1e-12 else 0.0
        st = new
        history.append(st.E)
        res = energy.residual(st.X, st.G)
    return st.X, res, it, history, message


def _anneal(energy: PathEnergy, X0: np.ndarray, opts: GeodesicOptions):
    """Minimize while lowering the alpha smoothing temperature stage by stage.

    Temperatures are relative to each segment's alpha at the start of the
    stage.  The loop stops early once the smoothing is inactive, meaning
    every segment puts all but 1e-14 of its weight on sigma_n.
    """
    X, hist, total = X0, [], 0
    res, msg = np.inf, "no stages"
    taus = list(opts.smoothing)
    if not taus:
        raise InputError("at least one smoothing temperature is required")
    for k, tau in enumerate(taus):
        energy.set_temperature(X, tau)
        last = k == len(taus) - 1
        stage_tol = opts.tol if last else max(opts.tol, 1e-2 * tau)
        X, res, it, h, msg = newton_minimize(energy, X, stage_tol, opts.max_iter - total)
        total += it
        hist.extend(h if not hist else h[1:])
        if total >= opts.max_iter:
            break
        if res <= opts.tol and not _smoothing_active(energy, X):
            break
    return X, res, total, hist, msg


def _smoothing_active(energy: PathEnergy, X: np.ndarray) -> bool:
    s = np.linalg.svd(energy.samples(energy.full(X)), compute_uv=False)
    inv2 = s**-2
    z = np.exp((inv2 - inv2[:, -1:]) / energy.temp[:, None])
    w = z / z.sum(axis=1, keepdims=True)
    return bool(np.max(1.0 - w[:, -1]) > 1e-14)


def _check_endpoints(A, B):
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise ShapeMismatchError(f"endpoint shapes differ: {A.shape} vs {B.shape}")
    if field_of(A) != field_of(B):
        dt = np.result_type(A, B)
        A, B = A.astype(dt), B.astype(dt)
    for name, X in (("A", A), ("B", B)):
        if singular_values(X)[-1] <= SINGULAR_RTOL * np.linalg.norm(X):
            raise SingularNodeError(f"endpoint {name} is singular")
    return A, B


def minimize_path(A, B, N: int | None = None, opts: GeodesicOptions | None = None) -> GeodesicResult:
    """Local minimizer of the discrete condition energy between fixed endpoints.

    ``path`` is redistributed to uniform condition speed; ``raw_path`` holds
    the minimizer's own nodes, whose length is ``length_kappa``.  When the
    residual tolerance is not reached, the best iterate is returned with
    ``converged=False`` (or NoConvergenceError is raised if ``opts.strict``).
    """
    opts = opts or GeodesicOptions()
    N = N or opts.nodes
    if N < 1:
        raise InputError("need at least one segment")
    A, B = _check_endpoints(A, B)
    if opts.seed is not None:
        seed = np.asarray(opts.seed, dtype=A.dtype)
        if seed.shape != (N + 1,) + A.shape:
            raise ShapeMismatchError("seed must have N+1 nodes of the endpoint shape")
        seed = seed.copy()
        seed[0], seed[-1] = A, B
    else:
        seed = default_seed(A, B, N)
    try:
        seed_len = condition_length(seed)
    except SingularNodeError as exc:
        raise SeedSingularError(str(exc)) from None

    if N == 1 or np.array_equal(A, B) and opts.seed is None:
        nodes = np.repeat(A[None], N + 1, axis=0) if np.array_equal(A, B) else seed
        path = DiscretePath(nodes)
        seg = segment_lengths(path)
        return GeodesicResult(path, float(seg.sum()), 0.0, 0, seg * N, True, seed_len,
                              [], "trivial", opts.tol)

    energy = PathEnergy(A, B, N, opts.quadrature)
    X, res, it, hist, msg = _anneal(energy, seed[1:-1], opts)
    converged = res <= opts.tol
    raw = DiscretePath(energy.full(X))
    raw_seg = segment_lengths(raw)
    raw = DiscretePath(raw.nodes, np.concatenate([[0.0], np.cumsum(raw_seg)]))
    # resampling moves the nodes off the minimizing polygon, so the reported
    # length is the minimizer's own
    path = reparametrize_arclength(raw) if opts.reparametrize else raw
    seg = segment_lengths(path)
    result = GeodesicResult(
        path=path,
        length_kappa=float(raw_seg.sum()),
        grad_norm=res,
        iterations=it,
        condition_speed=seg * N,
        converged=converged,
        seed_length=seed_len,
        energy_history=hist,
        message=msg,
        tol=opts.tol,
        raw_path=raw,
    )
    if not converged:
        if opts.strict:
            raise NoConvergenceError(f"minimize_path: {msg}, residual {res:.3e}", result)
        log.warning("minimize_path did not converge: %s (residual %.3e)", msg, res)
    return result


# ---------------------------------------------------------------------------
# arc length


def reparametrize_arclength(
    path, rtol: float = 1e-10, max_passes: int = 100, lengths=None
) -> DiscretePath:
    """Redistribute nodes so that every segment has the same condition length.

    New nodes are taken on the cubic spline through the old ones (which
    interpolates them exactly), at parameters chosen iteratively until the
    segment lengths agree to ``rtol``.  Times run over [0, L].  ``lengths``
    maps a node array to its segment lengths and defaults to
    ``segment_lengths``.
    """
    lengths = lengths or segment_lengths
    nodes = _nodes_of(path)
    N = nodes.shape[0] - 1
    seg = lengths(nodes)
    total = seg.sum()
    if total <= 0:
        raise InputError("cannot reparametrize a constant path")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    tau = cum / total
    if np.any(np.diff(tau) <= 0):
        keep = np.concatenate([[True], np.diff(tau) > 0])
        curve = CubicSpline(tau[keep], nodes[keep], axis=0)
    else:
        curve = CubicSpline(tau, nodes, axis=0)
    targets = np.arange(N + 1) / N
    out = nodes.copy()
    for _ in range(max_passes):
        if np.max(np.abs(seg / seg.mean() - 1.0)) <= rtol:
            break
        tau = np.interp(targets, cum / cum[-1], tau)
        out = curve(tau)
        out[0], out[-1] = nodes[0], nodes[-1]
        seg = lengths(out)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
    else:
        log.debug("arc-length reparametrization stopped after %d passes", max_passes)
    return DiscretePath(out, times=cum)


# ---------------------------------------------------------------------------
# shooting


def shoot_geodesic(
    A0,
    V0,
    T: float,
    steps: int,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> DiscretePath:
    """Integrate the geodesic equation (alpha A')' = |A'|^2 grad(alpha) / 2 from A0.

    V0 is rescaled to unit condition speed, so T is the condition length of
    the returned path.  The momentum P = alpha A' is renormalized after each
    RK4 step to keep |P|^2 / alpha = 1.  Raises MultipleSigmaError, carrying
    the exit time and partial path, if sigma_n stops being simple.
    """
    A = as_matrix(A0)
    V = np.asarray(V0, dtype=np.result_type(A, V0))
    if V.shape != A.shape:
        raise ShapeMismatchError("initial velocity must match A0")
    if np.iscomplexobj(V) and not np.iscomplexobj(A):
        A = A.astype(complex)
    nv = np.linalg.norm(V)
    if nv == 0:
        raise InputError("initial velocity must be nonzero")
    a0 = alpha(A)
    V = V / np.sqrt(a0 * nv**2)
    P = a0 * V
    h = T / steps

    def rhs(X, P):
        s = singular_values(X)
        if not sigma_gap_is_simple(s, cluster_tol):
            raise MultipleSigmaError("sigma_n not simple")
        al = s[-1] ** -2
        g = subgradient_alpha(X)
        return P / al, 0.5 * np.sum(np.abs(P) ** 2) / al**2 * g

    nodes = [A.copy()]
    times = [0.0]
    for k in range(steps):
        try:
            k1 = rhs(A, P)
            k2 = rhs(A + h / 2 * k1[0], P + h / 2 * k1[1])
            k3 = rhs(A + h / 2 * k2[0], P + h / 2 * k2[1])
            k4 = rhs(A + h * k3[0], P + h * k3[1])
        except MultipleSigmaError:
            t_exit = k * h
            raise MultipleSigmaError(
                f"sigma_n became multiple near t = {t_exit:.6g}",
                exit_time=t_exit,
                path=DiscretePath(np.array(nodes), np.array(times)),
            ) from None
        A = A + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        P = P + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        P = P * np.sqrt(alpha(A) / np.sum(np.abs(P) ** 2))
        nodes.append(A.copy())
        times.append((k + 1) * h)
    return DiscretePath(np.array(nodes), np.array(times))


def condition_speeds(path: DiscretePath) -> np.ndarray:
    """Per-segment condition speed: segment length over its time step."""
    return segment_lengths(path) / np.diff(path.times)


def second_differences(path: DiscretePath) -> np.ndarray:
    """|A_{i+1} - 2 A_i + A_{i-1}| / dt^2 on the path's (near-uniform) time grid."""
    X = path.nodes
    dt = np.mean(np.diff(path.times))
    dd = X[2:] - 2 * X[1:-1] + X[:-2]
    return np.linalg.norm(dd.reshape(dd.shape[0], -1), axis=1) / dt**2
