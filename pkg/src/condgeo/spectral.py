"""Log-sum-exp smoothing of alpha with exact first and second derivatives.

alpha(M) = sigma_n(M)^-2 is the largest eigenvalue h_n of (M M^*)^-1 and is
not differentiable where sigma_n is multiple.  At a fixed temperature T the
smoothed value

    alpha_T(M) = T log sum_j exp(h_j / T),    h_j = sigma_j^-2,

is a smooth spectral function of lambda = sigma^2, and
alpha <= alpha_T <= alpha + T log n.  Its gradient sum_j w_j grad(h_j), with
softmax weights w, is a convex combination of the singular-pair gradients
-2 sigma_j^-3 u_j v_j^*.  The weights on pairs outside the sigma_n cluster
decay like exp(-gap / T).

Everything is batched over a leading axis of shape (k, n, m).
"""
from __future__ import annotations

import numpy as np

from .matcore import ctranspose


def _phi(x: np.ndarray) -> np.ndarray:
    """expm1(x) / x for x <= 0, equal to 1 at 0."""
    small = np.abs(x) < 1e-8
    safe = np.where(small, -1.0, x)
    return np.where(small, 1.0 + x / 2.0, np.expm1(safe) / safe)


class SmoothedAlpha:
    """Value, gradient and Hessian-vector products of alpha_T on a stack."""

    def __init__(self, stack: np.ndarray, temp: np.ndarray):
        self.stack = stack
        self.temp = np.asarray(temp, dtype=float)
        U, s, Vh = np.linalg.svd(stack, full_matrices=False)
        self.U, self.s, self.Vh = U, s, Vh
        lam = s**2
        h = 1.0 / lam
        top = h[:, -1]
        T = self.temp[:, None]
        z = np.exp((h - top[:, None]) / T)
        tot = z.sum(axis=1)
        w = z / tot[:, None]
        self.lam, self.h, self.w = lam, h, w
        self.value = top + self.temp * np.log(tot)
        self.hp = -(h**2)  # dh/dlambda
        self.hpp = 2.0 * h**3
        self.g = w * self.hp  # derivative w.r.t. lambda_j
        self._gamma = self._divided_differences()

    @property
    def sigma_min(self) -> np.ndarray:
        return self.s[:, -1]

    def grad(self) -> np.ndarray:
        c = 2.0 * self.g * self.s
        return np.einsum("kij,kj,kjl->kil", self.U, c, self.Vh)

    def _divided_differences(self) -> np.ndarray:
        """(g_i - g_j) / (lambda_i - lambda_j), with its limit on the diagonal.

        For each pair the index with the larger h is the reference r, so the
        exponent x = (h_o - h_r) / T is nonpositive and nothing cancels.
        """
        s, lam, h, w, hp = self.s, self.lam, self.h, self.w, self.hp
        T = self.temp[:, None, None]
        si, sj = s[:, :, None], s[:, None, :]
        li, lj = lam[:, :, None], lam[:, None, :]
        # h_i - h_j from sigma differences
        dh = (sj - si) * (sj + si) / (li * lj)
        ref_is_j = dh <= 0
        x = np.where(ref_is_j, dh, -dh) / T
        w_ref = np.where(ref_is_j, w[:, None, :], w[:, :, None])
        hp_other = np.where(ref_is_j, hp[:, :, None], hp[:, None, :])
        return -w_ref * hp_other * _phi(x) / (li * lj * T) + w_ref * (li + lj) / (li**2 * lj**2)

    def hvp(self, dM: np.ndarray) -> np.ndarray:
        """Second derivative of alpha_T along dM, as a gradient-shaped array.

        dM may carry an extra axis after the batch axis, shape (k, p, n, m).
        """
        return self.hvp_at(slice(None), dM)

    def hvp_at(self, sel, dM: np.ndarray) -> np.ndarray:
        """``hvp`` for the batch members selected by ``sel``."""
        U, s, Vh, w, hp = self.U[sel], self.s[sel], self.Vh[sel], self.w[sel], self.hp[sel]
        hpp, g, gamma, temp = self.hpp[sel], self.g[sel], self._gamma[sel], self.temp[sel]
        extra = dM.ndim == 4
        if not extra:
            dM = dM[:, None]
        Uh = ctranspose(U)[:, None]
        UdM = Uh @ dM
        Z = UdM @ ctranspose(Vh)[:, None]
        sr = s[:, None, None, :]
        sc = s[:, None, :, None]
        K = Z * sr + sc * ctranspose(Z)
        kd = np.real(np.diagonal(K, axis1=-2, axis2=-1))
        T = temp[:, None, None]
        wb, hpb, hppb = w[:, None], hp[:, None], hpp[:, None]
        mean = np.sum(wb * hpb * kd, axis=-1, keepdims=True)
        diag = wb * hpb * (hpb * kd - mean) / T + wb * hppb * kd
        Delta = gamma[:, None] * K
        n = s.shape[1]
        idx = np.arange(n)
        Delta[..., idx, idx] = diag
        out = 2.0 * U[:, None] @ (Delta @ (s[:, :, None] * Vh)[:, None] + g[:, None, :, None] * UdM)
        return out if extra else out[:, 0]


def real_basis(shape, complex_field: bool, dtype) -> np.ndarray:
    """Frobenius-orthonormal real basis of the n x m matrices, shape (p, n, m)."""
    n, m = shape
    eye = np.eye(n * m).reshape(n * m, n, m).astype(dtype)
    if complex_field:
        return np.concatenate([eye, 1j * eye], axis=0)
    return eye


def to_real(X: np.ndarray, complex_field: bool) -> np.ndarray:
    """Flatten the trailing (n, m) axes into real coordinates for real_basis."""
    flat = X.reshape(X.shape[:-2] + (-1,))
    if complex_field:
        return np.concatenate([flat.real, flat.imag], axis=-1)
    return flat.real if np.iscomplexobj(flat) else flat


def from_real(v: np.ndarray, shape, complex_field: bool) -> np.ndarray:
    n, m = shape
    if complex_field:
        half = v.shape[-1] // 2
        z = v[..., :half] + 1j * v[..., half:]
        return z.reshape(v.shape[:-1] + (n, m))
    return v.reshape(v.shape[:-1] + (n, m))
