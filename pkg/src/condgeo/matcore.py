"""Dense matrices over R or C, the SVD, and the conformal factor sigma_n^-2.

Matrices are plain 2-D numpy arrays.  The field is read off the dtype: any
complex dtype means the complex field, anything else is real and gets
promoted to float64.  Real inputs always produce real outputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    FieldMismatchError,
    InputError,
    MultipleSigmaError,
    ShapeMismatchError,
    SingularInputError,
)

REAL = "real"
COMPLEX = "complex"

DEFAULT_CLUSTER_TOL = 1e-8
SINGULAR_RTOL = 1e-14


def field_of(A: np.ndarray) -> str:
    return COMPLEX if np.iscomplexobj(A) else REAL


def dtype_for(field: str):
    if field == REAL:
        return np.float64
    if field == COMPLEX:
        return np.complex128
    raise InputError(f"unknown field {field!r}")


def as_matrix(a, field: str | None = None) -> np.ndarray:
    """Validate and normalise a matrix with ``rows <= cols`` and finite entries."""
    A = np.asarray(a)
    if A.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D matrix, got shape {A.shape}")
    n, m = A.shape
    if n < 1 or m < 1 or n > m:
        raise ShapeMismatchError(f"need 1 <= rows <= cols, got {n}x{m}")
    if field is None:
        field = field_of(A)
    if field == REAL and np.iscomplexobj(A):
        if np.any(A.imag != 0):
            raise FieldMismatchError("real-tagged matrix has nonzero imaginary part")
        A = A.real
    A = A.astype(dtype_for(field), copy=False)
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def ctranspose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, -1, -2).conj()


def frobenius_inner(M: np.ndarray, N: np.ndarray):
    """<M, N>_F = trace(N^* M) = sum m_ij conj(n_ij)."""
    if M.shape != N.shape:
        raise ShapeMismatchError(f"shape mismatch {M.shape} vs {N.shape}")
    if field_of(M) != field_of(N):
        raise FieldMismatchError("field mismatch in Frobenius inner product")
    return np.vdot(N, M)


def real_inner(M: np.ndarray, N: np.ndarray) -> float:
    """Re <M, N>_F, the real inner product the metric is built on."""
    return float(np.real(np.vdot(N, M)))


@dataclass(frozen=True)
class SVDFactorization:
    """A = U diag(sigma) V^*, with U n x n, V m x m and sigma non-increasing."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        n = self.U.shape[0]
        return (self.U * self.sigma) @ ctranspose(self.V[:, :n])


def svd(A: np.ndarray) -> SVDFactorization:
    A = as_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    # LAPACK already sorts, but the ordering is part of the contract
    order = np.argsort(-s, kind="stable")
    if np.any(order != np.arange(s.size)):
        U, s = U[:, order], s[order]
        head = Vh[order]
        Vh = np.vstack([head, Vh[s.size:]])
    return SVDFactorization(U=U, sigma=s, V=ctranspose(Vh))


def singular_values(A: np.ndarray) -> np.ndarray:
    return np.linalg.svd(A, compute_uv=False)


def sigma_min(A: np.ndarray) -> float:
    """Smallest singular value, i.e. the Frobenius distance to rank-deficient matrices."""
    A = as_matrix(A)
    return float(singular_values(A)[-1])


def _check_nonsingular(A: np.ndarray, s: np.ndarray) -> None:
    if s[-1] <= SINGULAR_RTOL * np.linalg.norm(A):
        raise SingularInputError(f"sigma_n = {s[-1]:.3e} is zero within tolerance")


def alpha(A: np.ndarray) -> float:
    """The conformal factor sigma_n(A)^-2."""
    A = as_matrix(A)
    s = singular_values(A)
    _check_nonsingular(A, s)
    return float(s[-1]) ** -2


def log_alpha(A: np.ndarray) -> float:
    return float(np.log(alpha(A)))


def sigma_gap_is_simple(sigma: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> bool:
    if sigma.size < 2:
        return True
    return bool(sigma[-2] - sigma[-1] > cluster_tol * sigma[0])


@dataclass(frozen=True)
class GradientSelection:
    matrix: np.ndarray
    simple: bool


def grad_alpha(A: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> GradientSelection:
    """Gradient of sigma_n^-2 where sigma_n is simple: -2 sigma_n^-3 u_n v_n^*.

    The singular pair (u_n, v_n) is only defined up to a common unit factor
    c, and (c u_n)(c v_n)^* = u_n v_n^*, so no sign or phase convention is
    needed.
    """
    A = as_matrix(A)
    f = svd(A)
    _check_nonsingular(A, f.sigma)
    if not sigma_gap_is_simple(f.sigma, cluster_tol):
        raise MultipleSigmaError(
            f"sigma_n not simple: gap {f.sigma[-2] - f.sigma[-1]:.3e} "
            f"<= {cluster_tol:g} * sigma_1"
        )
    return GradientSelection(matrix=_grad_from_factors(f), simple=True)


def subgradient_alpha(A: np.ndarray) -> np.ndarray:
    """-2 sigma_n^-3 u v^* for whichever sigma_n singular pair the SVD returns.

    At a simple sigma_n this is the gradient; otherwise it is one element of
    the generalized gradient.
    """
    A = as_matrix(A)
    f = svd(A)
    _check_nonsingular(A, f.sigma)
    return _grad_from_factors(f)


def _grad_from_factors(f: SVDFactorization) -> np.ndarray:
    n = f.U.shape[0]
    s = f.sigma[-1]
    u = f.U[:, n - 1]
    v = f.V[:, n - 1]
    return -2.0 * s**-3 * np.outer(u, v.conj())


def batch_alpha_grad(stack: np.ndarray):
    """sigma_n, alpha and the (sub)gradient of alpha for a stack of matrices.

    ``stack`` has shape (k, n, m).  Returns (sigma_min, alpha, grad) with grad
    of shape (k, n, m).  Nothing is validated; callers guarantee finiteness.
    """
    U, s, Vh = np.linalg.svd(stack, full_matrices=False)
    n = stack.shape[-2]
    smin = s[:, n - 1]
    u = U[:, :, n - 1]
    v_conj = Vh[:, n - 1, :]
    grad = (-2.0 * smin**-3)[:, None, None] * (u[:, :, None] * v_conj[:, None, :])
    return smin, smin**-2, grad


def batch_sigma_min(stack: np.ndarray) -> np.ndarray:
    return np.linalg.svd(stack, compute_uv=False)[..., -1]


def random_matrix(rng: np.random.Generator, n: int, m: int, field: str = REAL) -> np.ndarray:
    """I.i.d. standard normal entries; complex entries have unit total variance."""
    if field == REAL:
        return rng.standard_normal((n, m))
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def random_endpoint_pair(rng: np.random.Generator, n: int, m: int, field: str = REAL):
    """Two Gaussian matrices, with B's first row negated if needed to share A's component.

    Real square invertible matrices form two components (det > 0 and det < 0);
    every other case is connected.
    """
    A = random_matrix(rng, n, m, field)
    B = random_matrix(rng, n, m, field)
    if field == REAL and n == m and np.linalg.det(A) * np.linalg.det(B) < 0:
        B[0] *= -1.0
    return A, B


def random_unitary(rng: np.random.Generator, n: int, field: str = REAL) -> np.ndarray:
    """Haar-distributed orthogonal/unitary matrix via QR with sign fix."""
    Z = random_matrix(rng, n, n, field)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_skew(rng: np.random.Generator, n: int, field: str = REAL) -> np.ndarray:
    Z = random_matrix(rng, n, n, field)
    return (Z - ctranspose(Z)) / 2.0
