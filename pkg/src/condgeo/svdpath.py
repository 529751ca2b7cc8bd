"""Smooth SVD continuation inside a multiplicity stratum.

Along a path gamma(t) that stays in P_(k) we integrate U' = U A, V' = V B and
the cluster values sigma_i' with M = U^* gamma' V split into blocks:

    off-diagonal  A_ij = (s_j M_ij + s_i M_ji^*) / (s_j^2 - s_i^2)
                  B_ij = (s_i M_ij + s_j M_ji^*) / (s_j^2 - s_i^2)
    diagonal      s_i' = Re trace(M_ii) / k_i
                  A_ii = -B_ii = skew(M_ii) / (2 s_i)

The padding columns of V behave as a cluster with value 0.  Classical RK4 is
used, with U and V retracted to the unitary group after every accepted step.
After each step the state is re-anchored on the exact path point by one
Newton correction that feeds the residual U^* gamma V - Sigma through the
same block formulas, so error does not accumulate across steps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    ClusterCollisionError,
    InputError,
    NotNearUnitaryError,
    StepFailureError,
)
from .matcore import DEFAULT_CLUSTER_TOL, as_matrix, ctranspose, svd
from .strata import MultiplicitySignature, cluster_singular_values

DEFAULT_GAP_TOL = 1e-6


def retract_unitary(U: np.ndarray) -> np.ndarray:
    """Unitary polar factor of U, the nearest unitary matrix in Frobenius norm."""
    W, s, Zh = np.linalg.svd(U)
    if np.max(np.abs(s - 1.0)) > 0.5:
        raise NotNearUnitaryError(
            f"matrix is {np.max(np.abs(s - 1.0)):.3g} from unitary in operator norm"
        )
    return W @ Zh


def unitary_drift(U: np.ndarray) -> float:
    return float(np.linalg.norm(ctranspose(U) @ U - np.eye(U.shape[1])))


def skew_part(X: np.ndarray) -> np.ndarray:
    return (X - ctranspose(X)) / 2.0


class PathSpec:
    """A smooth matrix path on [t0, t1].

    Either give ``func`` (and optionally its derivative ``deriv``; otherwise
    a central difference with step ``fd_step`` is used) or give sample
    ``times`` and ``nodes``, which are interpolated by a cubic spline.
    """

    def __init__(
        self,
        func: Callable[[float], np.ndarray] | None = None,
        deriv: Callable[[float], np.ndarray] | None = None,
        t0: float = 0.0,
        t1: float = 1.0,
        times=None,
        nodes=None,
        fd_step: float = 1e-5,
    ):
        if func is None:
            if times is None or nodes is None:
                raise InputError("PathSpec needs either func or (times, nodes)")
            times = np.asarray(times, dtype=float)
            nodes = np.asarray(nodes)
            if nodes.ndim != 3 or nodes.shape[0] != times.size or times.size < 2:
                raise InputError("nodes must be (k, n, m) with one node per time")
            if np.any(np.diff(times) <= 0):
                raise InputError("times must be strictly increasing")
            spline = CubicSpline(times, nodes, axis=0)
            dspline = spline.derivative()
            func = spline
            deriv = dspline
            t0, t1 = float(times[0]), float(times[-1])
        self.func = func
        self._deriv = deriv
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.fd_step = fd_step

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.func(t))

    def derivative(self, t: float) -> np.ndarray:
        if self._deriv is not None:
            return np.asarray(self._deriv(t))
        h = self.fd_step
        return (self(t + h) - self(t - h)) / (2.0 * h)

    def reversed(self) -> "PathSpec":
        """Same path traversed backwards, reparametrized on [t0, t1]."""
        a, b = self.t0, self.t1
        rev = PathSpec(
            func=lambda t: self(a + b - t),
            deriv=lambda t: -self.derivative(a + b - t),
            t0=a,
            t1=b,
            fd_step=self.fd_step,
        )
        return rev


@dataclass
class StepControl:
    steps: int = 200
    residual_tol: float = 1e-8
    local_tol: float = 1e-6
    min_step: float = 1e-7
    anchor: bool = True
    gap_tol: float = DEFAULT_GAP_TOL
    cluster_tol: float = DEFAULT_CLUSTER_TOL


@dataclass
class SVDTrajectory:
    times: np.ndarray
    U: list = field(default_factory=list)
    V: list = field(default_factory=list)
    sigma_distinct: np.ndarray | None = None
    sigma_dot: np.ndarray | None = None
    residual: np.ndarray | None = None
    unitary_drift: np.ndarray | None = None
    signature: MultiplicitySignature | None = None

    def sigma_full(self, i: int) -> np.ndarray:
        return np.repeat(self.sigma_distinct[i], self.signature.parts)

    def reconstruct(self, i: int) -> np.ndarray:
        U, V = self.U[i], self.V[i]
        n = U.shape[0]
        return (U * self.sigma_full(i)) @ ctranspose(V[:, :n])


class SVDTracker:
    """Integrates one smooth SVD along a path.  Holds mutable state; not shareable."""

    def __init__(self, sig: MultiplicitySignature, step: StepControl | None = None):
        self.sig = sig
        self.step = step or StepControl()
        self._blocks = sig.blocks()
        self.last_blocks = None

    # -- the vector field ---------------------------------------------------
    def rates(self, U, V, s, gdot):
        """Return (A, B, sdot) for state (U, V, s) and path velocity gdot."""
        sig, blocks = self.sig, self._blocks
        n = sig.n
        m = V.shape[0]
        M = ctranspose(U) @ gdot @ V
        dt = np.result_type(U, V, gdot)
        A = np.zeros((n, n), dtype=dt)
        B = np.zeros((m, m), dtype=dt)
        sdot = np.empty(sig.u)
        s2 = s * s
        self._check_gaps(s)
        for i, bi in enumerate(blocks):
            Mii = M[bi, bi]
            k = bi.stop - bi.start
            sdot[i] = np.real(np.trace(Mii)) / k
            Aii = skew_part(Mii) / (2.0 * s[i])
            A[bi, bi] = Aii
            B[bi, bi] = -Aii
            for j in range(i + 1, sig.u):
                bj = blocks[j]
                Mij, Mji_h = M[bi, bj], ctranspose(M[bj, bi])
                den = s2[j] - s2[i]
                Aij = (s[j] * Mij + s[i] * Mji_h) / den
                Bij = (s[i] * Mij + s[j] * Mji_h) / den
                A[bi, bj] = Aij
                A[bj, bi] = -ctranspose(Aij)
                B[bi, bj] = Bij
                B[bj, bi] = -ctranspose(Bij)
            if m > n:
                Bip = -M[bi, n:] / s[i]
                B[bi, n:] = Bip
                B[n:, bi] = -ctranspose(Bip)
        self.last_blocks = (A, B)
        return A, B, sdot

    def _check_gaps(self, s):
        s2 = s * s
        floor = self.step.gap_tol * s2[0]
        if s.size > 1 and np.min(s2[:-1] - s2[1:]) < floor:
            raise ClusterCollisionError("inter-cluster gap of sigma^2 below gap_tol")
        if s[-1] <= 0:
            raise ClusterCollisionError("smallest cluster value reached zero")

    def _rk4(self, path, t, h, U, V, s):
        def f(tt, UU, VV, ss):
            A, B, sd = self.rates(UU, VV, ss, path.derivative(tt))
            return UU @ A, VV @ B, sd

        k1 = f(t, U, V, s)
        k2 = f(t + h / 2, U + h / 2 * k1[0], V + h / 2 * k1[1], s + h / 2 * k1[2])
        k3 = f(t + h / 2, U + h / 2 * k2[0], V + h / 2 * k2[1], s + h / 2 * k2[2])
        k4 = f(t + h, U + h * k3[0], V + h * k3[1], s + h * k3[2])
        Un = U + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        Vn = V + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        sn = s + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        return retract_unitary(Un), retract_unitary(Vn), sn

    def anchor(self, G, U, V, s):
        """One Newton step pulling (U, V, s) onto an exact SVD of G."""
        n = U.shape[0]
        S = np.zeros(G.shape)
        S[np.arange(n), np.arange(n)] = np.repeat(s, self.sig.parts)
        E = ctranspose(U) @ G @ V - S
        A, B, ds = self.rates(U, V, s, U @ E @ ctranspose(V))
        return retract_unitary(U @ (np.eye(n) + A)), retract_unitary(V @ (np.eye(V.shape[0]) + B)), s + ds

    def residual(self, path, t, U, V, s) -> float:
        G = path(t)
        n = U.shape[0]
        R = (U * np.repeat(s, self.sig.parts)) @ ctranspose(V[:, :n]) - G
        return float(np.linalg.norm(R) / np.linalg.norm(G))

    def initial_state(self, path: "PathSpec"):
        A0 = as_matrix(path(path.t0))
        f = svd(A0)
        sig, means = cluster_singular_values(f.sigma, self.step.cluster_tol)
        if sig != self.sig:
            raise InputError(f"initial point has signature {sig.parts}, expected {self.sig.parts}")
        return f.U, f.V, means

    def track(self, path: PathSpec, state=None) -> SVDTrajectory:
        ctl = self.step
        if state is None:
            state = self.initial_state(path)
        U, V, s = (np.array(x) for x in state)
        s = s.astype(float)
        if np.iscomplexobj(path(path.t0)):
            U, V = U.astype(complex), V.astype(complex)
        times = np.linspace(path.t0, path.t1, ctl.steps + 1)
        traj = SVDTrajectory(times=times, signature=self.sig)
        sig_hist, sdot_hist, res_hist, drift_hist = [], [], [], []

        def record(t, U, V, s):
            _, _, sd = self.rates(U, V, s, path.derivative(t))
            traj.U.append(U)
            traj.V.append(V)
            sig_hist.append(s.copy())
            sdot_hist.append(sd)
            res_hist.append(self.residual(path, t, U, V, s))
            drift_hist.append(max(unitary_drift(U), unitary_drift(V)))

        record(times[0], U, V, s)
        for t, t_next in zip(times[:-1], times[1:]):
            U, V, s = self._advance(path, t, t_next, U, V, s)
            record(t_next, U, V, s)
        traj.sigma_distinct = np.array(sig_hist)
        traj.sigma_dot = np.array(sdot_hist)
        traj.residual = np.array(res_hist)
        traj.unitary_drift = np.array(drift_hist)
        return traj

    def _advance(self, path, t, t_end, U, V, s):
        """RK4 from t to t_end, halving the substep while the residual is too large."""
        ctl = self.step
        h = t_end - t
        while t < t_end - 1e-15 * max(1.0, abs(t_end)):
            h = min(h, t_end - t)
            try:
                Un, Vn, sn = self._rk4(path, t, h, U, V, s)
                if ctl.anchor:
                    ok = self.residual(path, t + h, Un, Vn, sn) <= ctl.local_tol
                    if ok:
                        Un, Vn, sn = self.anchor(path(t + h), Un, Vn, sn)
                else:
                    ok = True
                ok = ok and self.residual(path, t + h, Un, Vn, sn) <= ctl.residual_tol
            except NotNearUnitaryError:
                ok = False
            except ClusterCollisionError as exc:
                raise ClusterCollisionError(f"{exc} near t = {t:.6g}", time=t) from None
            if ok:
                t, U, V, s = t + h, Un, Vn, sn
                continue
            if h / 2 < ctl.min_step:
                raise StepFailureError(f"residual tolerance not met at t = {t:.6g}", time=t)
            h /= 2
        return U, V, s


def track_svd(
    path: PathSpec,
    sig: MultiplicitySignature,
    step: StepControl | None = None,
    state=None,
) -> SVDTrajectory:
    """Follow a smooth SVD of ``path`` from ``path.t0`` to ``path.t1``.

    ``state`` optionally supplies the starting (U, V, sigma_distinct); by
    default it comes from an SVD of the first point with clusters averaged.
    """
    return SVDTracker(sig, step).track(path, state)
