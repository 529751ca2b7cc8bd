"""Singular-value multiplicity strata P_(k) and their diagonal representatives."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InputError, SingularInputError
from .matcore import (
    COMPLEX,
    DEFAULT_CLUSTER_TOL,
    REAL,
    SINGULAR_RTOL,
    as_matrix,
    dtype_for,
    field_of,
    svd,
)


@dataclass(frozen=True)
class MultiplicitySignature:
    """Multiplicities (k_1, ..., k_u) of the distinct singular values, largest first."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(k) for k in self.parts)
        if not parts or any(k < 1 for k in parts):
            raise InputError(f"signature parts must be positive, got {self.parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def u(self) -> int:
        return len(self.parts)

    def blocks(self) -> list[slice]:
        out, start = [], 0
        for k in self.parts:
            out.append(slice(start, start + k))
            start += k
        return out

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def signature(*parts: int) -> MultiplicitySignature:
    return MultiplicitySignature(tuple(parts))


@dataclass(frozen=True)
class StratumInfo:
    signature: MultiplicitySignature
    field: str
    codim: int
    dim_Dk: int


@dataclass(frozen=True)
class DiagonalPoint:
    """diag(s_1 I_k1, ..., s_u I_ku) padded with zero columns to n x m."""

    sigma_distinct: tuple[float, ...]
    signature: MultiplicitySignature
    cols: int
    field: str = REAL

    def __post_init__(self):
        s = tuple(float(x) for x in self.sigma_distinct)
        object.__setattr__(self, "sigma_distinct", s)
        if len(s) != self.signature.u:
            raise InputError("one distinct value per signature part is required")
        if s[-1] <= 0 or any(a <= b for a, b in zip(s, s[1:])):
            raise InputError(f"values must be strictly decreasing and positive: {s}")
        if self.cols < self.signature.n:
            raise InputError("cols must be at least the row count")

    @property
    def n(self) -> int:
        return self.signature.n

    def diagonal(self) -> np.ndarray:
        return np.repeat(np.array(self.sigma_distinct), self.signature.parts)

    def matrix(self) -> np.ndarray:
        n = self.n
        D = np.zeros((n, self.cols), dtype=dtype_for(self.field))
        D[np.arange(n), np.arange(n)] = self.diagonal()
        return D


def cluster_singular_values(sigma: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Single-linkage clusters of a non-increasing sigma vector.

    Consecutive values join a cluster when their gap is at most
    ``cluster_tol * sigma[0]``.  Returns (parts, cluster means).
    """
    thresh = cluster_tol * sigma[0]
    parts, means, start = [], [], 0
    for i in range(1, sigma.size + 1):
        if i == sigma.size or sigma[i - 1] - sigma[i] > thresh:
            parts.append(i - start)
            means.append(float(np.mean(sigma[start:i])))
            start = i
    return MultiplicitySignature(tuple(parts)), np.array(means)


def classify(A: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> MultiplicitySignature:
    A = as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= SINGULAR_RTOL * np.linalg.norm(A):
        raise SingularInputError("matrix is rank deficient")
    return cluster_singular_values(s, cluster_tol)[0]


def codimension(sig: MultiplicitySignature, field: str, n: int) -> int:
    """Real codimension of P_(k) in the n x m matrices."""
    if sig.n != n:
        raise InputError(f"signature {sig.parts} does not sum to n = {n}")
    sq = sum(k * k for k in sig.parts)
    if field == COMPLEX:
        return sq - sig.u
    if field == REAL:
        return (n + sq) // 2 - sig.u
    raise InputError(f"unknown field {field!r}")


def stratum_info(sig: MultiplicitySignature, field: str) -> StratumInfo:
    return StratumInfo(sig, field, codimension(sig, field, sig.n), sig.u)


def ambient_real_dim(n: int, m: int, field: str) -> int:
    return n * m * (2 if field == COMPLEX else 1)


def _unit(n, m, i, j, value, dtype):
    E = np.zeros((n, m), dtype=dtype)
    E[i, j] = value
    return E


def tangent_basis_Pk(D: DiagonalPoint) -> list[np.ndarray]:
    """Real-orthonormal basis of the tangent space of P_(k) at D.

    Diagonal blocks contribute real multiples of the identity plus the
    skew-hermitian (skew-symmetric if real) matrices; every other entry,
    padding columns included, is free.
    """
    n, m, field = D.n, D.cols, D.field
    dt = dtype_for(field)
    cplx = field == COMPLEX
    scalars = (1.0, 1j) if cplx else (1.0,)
    blocks = D.signature.blocks()
    block_of = np.empty(n, dtype=int)
    for b, sl in enumerate(blocks):
        block_of[sl] = b
    basis = []
    r2 = np.sqrt(0.5)
    for sl in blocks:
        k = sl.stop - sl.start
        E = np.zeros((n, m), dtype=dt)
        E[sl, sl] = np.eye(k) / np.sqrt(k)
        basis.append(E)
        idx = range(sl.start, sl.stop)
        for p, q in combinations(idx, 2):
            E = _unit(n, m, p, q, r2, dt)
            E[q, p] = -r2
            basis.append(E)
            if cplx:
                E = _unit(n, m, p, q, 1j * r2, dt)
                E[q, p] = 1j * r2
                basis.append(E)
        if cplx:
            basis.extend(_unit(n, m, p, p, 1j, dt) for p in idx)
    for i in range(n):
        for j in range(m):
            if j < n and block_of[i] == block_of[j]:
                continue
            basis.extend(_unit(n, m, i, j, c, dt) for c in scalars)
    return basis


def tangent_basis_at(A: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[np.ndarray]:
    """Tangent basis of the stratum through a general A, pushed forward as U (.) V^*."""
    A = as_matrix(A)
    f = svd(A)
    sig, means = cluster_singular_values(f.sigma, cluster_tol)
    D = DiagonalPoint(tuple(means), sig, A.shape[1], field_of(A))
    Vh = f.V.conj().T
    return [f.U @ E @ Vh for E in tangent_basis_Pk(D)]


def tangent_projection_Dk(D: DiagonalPoint, M: np.ndarray) -> np.ndarray:
    """Orthogonal projection of M onto the tangent space of D_(k) at D."""
    if M.shape != (D.n, D.cols):
        raise InputError(f"expected shape {(D.n, D.cols)}, got {M.shape}")
    out = np.zeros_like(M)
    for sl in D.signature.blocks():
        k = sl.stop - sl.start
        lam = np.real(np.trace(M[sl, sl])) / k
        out[sl, sl] = lam * np.eye(k)
    return out


def signatures_of(n: int):
    """All compositions of n, i.e. every multiplicity pattern with n rows."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in signatures_of(n - first):
            yield (first,) + rest
