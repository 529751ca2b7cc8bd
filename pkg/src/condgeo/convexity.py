"""Convexity diagnostics for log alpha along paths.

A continuous function is convex when its second symmetric upper derivative

    SD2 f(x) = limsup_{h -> 0} (f(x + h) + f(x - h) - 2 f(x)) / h^2

is nonnegative almost everywhere and never -inf.  Here the limsup is
estimated on a finite ladder of steps, and sampled traces are judged by their
discrete second differences.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    GridTooIrregularError,
    InputError,
    MultipleSigmaError,
    NotConvergedError,
    ShapeMismatchError,
    SingularInputError,
)
from .matcore import SINGULAR_RTOL, alpha, as_matrix, ctranspose, sigma_gap_is_simple

CONVEX = "convex_within_tol"
VIOLATED = "violated"
MAX_IRREGULARITY = 1.01
DEFAULT_HS = tuple(0.1 * 2.0 ** -j for j in range(13))


@dataclass(frozen=True)
class ScalarTrace:
    """Samples of a scalar function of time on an increasing grid."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ShapeMismatchError("times and values must be 1-D of equal length")
        if np.any(np.diff(t) <= 0):
            raise InputError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class ConvexityReport:
    min_second_difference: float
    worst_index: int
    verdict: str
    tol: float
    tol_requested: float
    irregularity: float
    label: str = ""

    @property
    def convex(self) -> bool:
        return self.verdict == CONVEX

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SD2Estimate:
    """Largest quotient over the step ladder, and whether it grows like 1/h."""

    value: float
    diverging: bool
    quotients: np.ndarray


def sd2_upper(f: Callable[[float], float], x: float, hs: Sequence[float] = DEFAULT_HS) -> SD2Estimate:
    """Lower estimate of SD2 f(x): the max of the symmetric quotients over ``hs``.

    The sequence is flagged as diverging when its last three quotients are
    positive and each grows at least 0.9 times as fast as 1/h does.
    """
    hs = np.asarray(hs, dtype=float)
    if hs.ndim != 1 or hs.size == 0 or np.any(hs <= 0) or np.any(np.diff(hs) >= 0):
        raise InputError("hs must be a nonempty strictly decreasing sequence of positive steps")
    fx = f(x)
    q = np.array([(f(x + h) + f(x - h) - 2.0 * fx) / h**2 for h in hs])
    diverging = False
    if q.size >= 3:
        tail, ht = q[-3:], hs[-3:]
        if np.all(tail > 0):
            growth = tail[1:] / tail[:-1]
            diverging = bool(np.all(growth >= 0.9 * ht[:-1] / ht[1:]))
    return SD2Estimate(float(q.max()), diverging, q)


def second_differences(trace: ScalarTrace) -> np.ndarray:
    """Three-point second differences on the (possibly slightly non-uniform) grid.

    On a uniform grid this is (v_{i+1} + v_{i-1} - 2 v_i) / dt^2.
    """
    t, v = trace.times, trace.values
    h = np.diff(t)
    slope = np.diff(v) / h
    return 2.0 * (slope[1:] - slope[:-1]) / (h[1:] + h[:-1])


def grid_irregularity(times: np.ndarray) -> float:
    h = np.diff(np.asarray(times, dtype=float))
    return float(h.max() / h.min())


def check_discrete_convexity(trace: ScalarTrace, tol: float = 1e-4) -> ConvexityReport:
    """Convex within tol iff every second difference is >= -tol (1 + max |v|)."""
    if len(trace) < 3:
        raise InputError("a convexity check needs at least 3 samples")
    if tol <= 0:
        raise InputError("tol must be positive")
    irr = grid_irregularity(trace.times)
    if irr > MAX_IRREGULARITY:
        raise GridTooIrregularError(
            f"max/min spacing {irr:.6f} exceeds {MAX_IRREGULARITY}"
        )
    sd = second_differences(trace)
    worst = int(np.argmin(sd))
    tol_eff = tol * (1.0 + float(np.max(np.abs(trace.values))))
    mn = float(sd[worst])
    return ConvexityReport(
        min_second_difference=mn,
        worst_index=worst + 1,
        verdict=CONVEX if mn >= -tol_eff else VIOLATED,
        tol=tol_eff,
        tol_requested=tol,
        irregularity=irr,
        label=trace.label,
    )


def log_alpha_trace(path, label: str = "log_alpha") -> ScalarTrace:
    """t -> log alpha(A(t)) at the nodes, t the cumulative condition length.

    A path of zero length gets the index grid instead.
    """
    from .geodesic import segment_lengths

    nodes = path.nodes if hasattr(path, "nodes") else np.asarray(path)
    s = np.linalg.svd(nodes, compute_uv=False)[:, -1]
    seg = segment_lengths(nodes)
    if seg.sum() > 0 and np.all(seg > 0):
        t = np.concatenate([[0.0], np.cumsum(seg)])
    else:
        t = np.arange(nodes.shape[0], dtype=float)
    return ScalarTrace(t, -2.0 * np.log(s), label)


def verify_selfconvexity(result, tol: float = 1e-4) -> ConvexityReport:
    """Discrete convexity of log alpha along a converged geodesic, in arc length."""
    if not result.converged:
        raise NotConvergedError(
            f"geodesic residual {result.grad_norm:.3e} is above its tolerance {result.tol:.1e}"
        )
    return check_discrete_convexity(log_alpha_trace(result.path), tol)


def log_alpha_second_derivative(A, E) -> float:
    """d^2/dt^2 log alpha(A + tE) at t = 0, for A with simple sigma_n.

    With M(t) = (A + tE)(A + tE)^*, lambda = sigma_n^2 is a simple eigenvalue
    of M and log alpha = -log lambda, so second-order eigenvalue perturbation
    gives the derivative in closed form.
    """
    A = as_matrix(A)
    E = np.asarray(E, dtype=np.result_type(A, E))
    if E.shape != A.shape:
        raise ShapeMismatchError("direction must match A")
    lam, U = np.linalg.eigh(A @ ctranspose(A))
    if not sigma_gap_is_simple(np.sqrt(np.maximum(lam[::-1], 0.0))):
        raise MultipleSigmaError("sigma_n is not simple")
    M1 = A @ ctranspose(E) + E @ ctranspose(A)
    M2 = 2.0 * E @ ctranspose(E)
    u = U[:, 0]
    c1 = ctranspose(U) @ M1 @ u
    d1 = float(np.real(c1[0]))
    d2 = float(np.real(np.vdot(u, M2 @ u)))
    d2 += 2.0 * float(np.sum(np.abs(c1[1:]) ** 2 / (lam[0] - lam[1:])))
    l0 = lam[0]
    return -d2 / l0 + (d1 / l0) ** 2


def lambda_min_gram(A: np.ndarray, B: np.ndarray, h: float) -> float:
    """Smallest eigenvalue of A A^* + h^2 B B^*, as sigma_n([A | hB])^2."""
    s = np.linalg.svd(np.hstack([A, h * B]), compute_uv=False)
    return float(s[-1] ** 2)


def sd2_lower_bound_margins(A, B, hs: Sequence[float]) -> np.ndarray:
    """alpha(A + hB) + alpha(A - hB) - 2 / lambda_n(A A^* + h^2 B B^*) for each h.

    lambda_n^-1 is convex on positive definite matrices and the two Gram
    matrices average to A A^* + h^2 B B^*, so every margin is nonnegative.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=np.result_type(A, B))
    if B.shape != A.shape:
        raise ShapeMismatchError("B must match A")
    alpha(A)
    out = []
    for h in np.atleast_1d(np.asarray(hs, dtype=float)):
        lhs = alpha(A + h * B) + alpha(A - h * B)
        lam = lambda_min_gram(A, B, h)
        if lam <= (SINGULAR_RTOL * np.linalg.norm(A)) ** 2:
            raise SingularInputError("A A^* + h^2 B B^* is singular")
        out.append(lhs - 2.0 / lam)
    return np.array(out)


def sd2_lower_bound_check(A, B, hs: Sequence[float], rtol: float = 1e-10) -> bool:
    """True iff every margin is >= -rtol * max(1, 2 / lambda_n)."""
    A = as_matrix(A)
    B = np.asarray(B, dtype=np.result_type(A, B))
    margins = sd2_lower_bound_margins(A, B, hs)
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    scale = np.array([max(1.0, 2.0 / lambda_min_gram(A, B, h)) for h in hs])
    return bool(np.all(margins >= -rtol * scale))
