"""Symmetries of alpha under the unitary action (U, V) . A = U A V^*.

The action of U_n x U_m (O_n x O_m over the reals) preserves alpha, and
its infinitesimal generators are the Killing fields K(A) = B1 A + A B2^* with
B1, B2 skew.  This module evaluates the quantities that show up when the
Hessian of an invariant function is split into orbit and transverse parts,
checks that splitting numerically, and computes the Bombieri-normalized
condition number of a polynomial system at a zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable

import numpy as np

from .errors import (
    DegenerateLinearPartError,
    FlowEscapeError,
    InputError,
    MultipleSigmaError,
    ShapeMismatchError,
)
from .matcore import (
    DEFAULT_CLUSTER_TOL,
    alpha,
    as_matrix,
    ctranspose,
    grad_alpha,
    random_matrix,
    random_skew,
    random_unitary,
    real_inner,
    singular_values,
)
from .strata import DiagonalPoint, MultiplicitySignature, cluster_singular_values, tangent_projection_Dk

SKEW_RTOL = 1e-12


def _skew_part(B: np.ndarray) -> np.ndarray:
    return (B - ctranspose(B)) / 2.0


def _is_skew(B: np.ndarray) -> bool:
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        return False
    return bool(np.linalg.norm(B + ctranspose(B)) <= SKEW_RTOL * max(1.0, np.linalg.norm(B)))


@dataclass(frozen=True)
class SkewPair:
    """(B1, B2) in the Lie algebra: B1 is n x n and B2 is m x m, both skew.

    Inputs are replaced by their skew parts, so the invariant holds exactly.
    """

    B1: np.ndarray
    B2: np.ndarray

    def __post_init__(self):
        B1, B2 = np.asarray(self.B1), np.asarray(self.B2)
        for name, B in (("B1", B1), ("B2", B2)):
            if B.ndim != 2 or B.shape[0] != B.shape[1]:
                raise ShapeMismatchError(f"{name} must be square, got shape {B.shape}")
        object.__setattr__(self, "B1", _skew_part(B1.astype(np.result_type(B1, float))))
        object.__setattr__(self, "B2", _skew_part(B2.astype(np.result_type(B2, float))))

    @classmethod
    def zeros(cls, n: int, m: int, field: str = "real") -> "SkewPair":
        dt = complex if field == "complex" else float
        return cls(np.zeros((n, n), dtype=dt), np.zeros((m, m), dtype=dt))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, m: int, field: str = "real") -> "SkewPair":
        return cls(random_skew(rng, n, field), random_skew(rng, m, field))

    def conjugated(self, U: np.ndarray, V: np.ndarray) -> "SkewPair":
        """The pair (U B1 U^*, V B2 V^*) generating the same field at U A V^*."""
        return SkewPair(U @ self.B1 @ ctranspose(U), V @ self.B2 @ ctranspose(V))

    def scaled(self, c: float) -> "SkewPair":
        return SkewPair(c * self.B1, c * self.B2)


def _check_pair(pair: SkewPair, A: np.ndarray) -> None:
    n, m = A.shape
    if pair.B1.shape != (n, n) or pair.B2.shape != (m, m):
        raise ShapeMismatchError(
            f"pair shapes {pair.B1.shape}, {pair.B2.shape} do not fit a {n}x{m} matrix"
        )


def killing_field(pair: SkewPair, A) -> np.ndarray:
    """K(A) = B1 A + A B2^*, the velocity of exp(t B1) A exp(t B2)^* at t = 0."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ShapeMismatchError("A must be a matrix")
    _check_pair(pair, A)
    return pair.B1 @ A + A @ ctranspose(pair.B2)


def killing_norm2_grad(pair: SkewPair, A: np.ndarray) -> np.ndarray:
    """Gradient of |K|^2 in the real Frobenius metric: 2 (B1 B1^* A + A B2 B2^* - 2 B1 A B2^*)."""
    B1, B2 = pair.B1, pair.B2
    return 2.0 * (B1 @ ctranspose(B1) @ A + A @ B2 @ ctranspose(B2) - 2.0 * B1 @ A @ ctranspose(B2))


def _diagonal_values(Sigma: np.ndarray) -> np.ndarray:
    n, m = Sigma.shape
    if n > m:
        raise ShapeMismatchError("need rows <= cols")
    off = Sigma.copy()
    off[np.arange(n), np.arange(n)] = 0
    d = np.diagonal(Sigma)
    if np.any(off != 0) or np.any(np.imag(d) != 0):
        raise InputError("Sigma must be a real diagonal matrix")
    d = np.real(d)
    if np.any(d <= 0) or np.any(np.diff(d) > 0):
        raise InputError("Sigma must have positive, non-increasing diagonal")
    return d


def sigma_prime(Sigma: np.ndarray, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Sigma^T with the smallest cluster of diagonal values set to zero (m x n)."""
    Sigma = np.asarray(Sigma)
    d = _diagonal_values(Sigma)
    sig, _ = cluster_singular_values(d, cluster_tol)
    ku = sig.parts[-1]
    dp = d.copy()
    dp[d.size - ku:] = 0.0
    out = np.zeros(Sigma.shape[::-1], dtype=Sigma.dtype)
    out[np.arange(d.size), np.arange(d.size)] = dp
    return out


def lemma46_J(Sigma, B, C, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> float:
    """Re(tr(B B^* S S') + tr(S' S C C^*) - 2 tr(B S C^* S')), S = Sigma, S' = sigma_prime(S).

    B is n x n and C is m x m, both skew.  The value is nonnegative.
    """
    S = np.asarray(Sigma)
    B, C = np.asarray(B), np.asarray(C)
    n, m = S.shape
    if B.shape != (n, n) or C.shape != (m, m):
        raise ShapeMismatchError("B must be n x n and C m x m")
    if not (_is_skew(B) and _is_skew(C)):
        raise InputError("B and C must be skew-hermitian")
    Sp = sigma_prime(S, cluster_tol)
    BBh, CCh, Ch = B @ ctranspose(B), C @ ctranspose(C), ctranspose(C)
    val = np.trace(BBh @ S @ Sp) + np.trace(Sp @ S @ CCh) - 2.0 * np.trace(B @ S @ Ch @ Sp)
    return float(np.real(val))


def cor38_condition3(A, pair: SkewPair, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> float:
    """alpha D(|K|^2)(grad alpha) + |K|^2 |grad alpha|^2 at A, for simple sigma_n.

    Nonnegative for every pair; at a diagonal A it equals
    4 / (k_u sigma_u^6) * lemma46_J(A, B1, B2).
    """
    A = as_matrix(A)
    _check_pair(pair, A)
    g = grad_alpha(A, cluster_tol).matrix
    K = killing_field(pair, A)
    dK = real_inner(killing_norm2_grad(pair, A), g)
    return alpha(A) * dK + real_inner(K, K) * real_inner(g, g)


def cor38_scale(A, pair: SkewPair) -> float:
    """Natural size of the two terms of cor38_condition3, for relative tolerances."""
    A = as_matrix(A)
    g = grad_alpha(A).matrix
    gn2 = real_inner(g, g)
    kn = np.linalg.norm(pair.B1) ** 2 + np.linalg.norm(pair.B2) ** 2
    return float(max(1e-300, (alpha(A) * np.linalg.norm(A) ** 2 + np.linalg.norm(A) ** 2) * kn * gn2))


def lemma46_scale(Sigma, B, C) -> float:
    """sigma_1^2 (|B|^2 + |C|^2), the size of each trace term of lemma46_J."""
    s1 = float(np.max(np.abs(np.asarray(Sigma))))
    return max(1e-300, s1**2 * (np.linalg.norm(B) ** 2 + np.linalg.norm(C) ** 2))


# ---------------------------------------------------------------------------
# random configurations


def random_diagonal(
    rng: np.random.Generator, n: int, m: int, field: str = "real", simple_last: bool = False
) -> DiagonalPoint:
    """A diagonal point with a random multiplicity pattern and well separated values.

    Each of the n - 1 possible cluster boundaries is present with probability
    1/2; ``simple_last`` forces the smallest value to be simple.
    """
    cuts = [i for i in range(1, n) if rng.random() < 0.5]
    if simple_last and n > 1 and (n - 1) not in cuts:
        cuts.append(n - 1)
    bounds = [0] + sorted(cuts) + [n]
    parts = tuple(b - a for a, b in zip(bounds, bounds[1:]))
    u = len(parts)
    steps = rng.uniform(0.1, 1.0, u)
    steps[-1] = rng.uniform(0.3, 1.0)
    values = np.cumsum(steps[::-1])[::-1]
    return DiagonalPoint(tuple(values), MultiplicitySignature(parts), m, field)


def sample_lemma46(rng: np.random.Generator, n: int, m: int, field: str = "real"):
    """(Sigma, B, C): a random diagonal Sigma and random skew B (n x n), C (m x m)."""
    D = random_diagonal(rng, n, m, field)
    return D.matrix(), random_skew(rng, n, field), random_skew(rng, m, field)


def sample_cor38(rng: np.random.Generator, n: int, m: int, field: str = "real"):
    """(A, pair) with A = U D V^* for a random diagonal D whose sigma_n is simple."""
    D = random_diagonal(rng, n, m, field, simple_last=True)
    U, V = random_unitary(rng, n, field), random_unitary(rng, m, field)
    return U @ D.matrix() @ ctranspose(V), SkewPair.random(rng, n, m, field)


def sample_hessian_config(rng: np.random.Generator, n: int, m: int, field: str = "real", sigma=None):
    """(p, b, pair): p diagonal with simple sigma_n, b a unit tangent to D_(k) at p.

    ``sigma`` optionally fixes the diagonal values (non-increasing, last one simple).
    """
    if sigma is None:
        D = random_diagonal(rng, n, m, field, simple_last=True)
    else:
        sig, means = cluster_singular_values(np.asarray(sigma, dtype=float))
        if sig.n != n:
            raise ShapeMismatchError(f"sigma needs {n} values")
        if sig.parts[-1] != 1:
            raise InputError("the smallest value must be simple")
        D = DiagonalPoint(tuple(means), sig, m, field)
    b = tangent_projection_Dk(D, random_matrix(rng, n, m, field))
    b = b / np.linalg.norm(b)
    return D.matrix(), b, SkewPair.random(rng, n, m, field)


# ---------------------------------------------------------------------------
# Hessian splitting check


@dataclass(frozen=True)
class InvariantFunction:
    """A scalar function on matrices together with its Frobenius gradient."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def _alpha_grad_checked(A: np.ndarray) -> np.ndarray:
    return grad_alpha(A).matrix


ALPHA = InvariantFunction(alpha, _alpha_grad_checked, "alpha")


@dataclass(frozen=True)
class HessianSymmetryTerms:
    """Terms of Hess(w, w) = Hess(b, b) + <grad |K|^2, grad f> / 2 + d/dt <B, K>(phi_t(p))."""

    hess_ww: float
    hess_bb: float
    killing_term: float
    flow_term: float
    residual: float
    scale: float


def _hess(testfn: InvariantFunction, p, x, y, step):
    if not np.any(y):
        return 0.0
    dg = (testfn.grad(p + step * y) - testfn.grad(p - step * y)) / (2.0 * step)
    return real_inner(dg, x)


def _gradient_flow(testfn: InvariantFunction, p: np.ndarray, t: float, steps: int) -> np.ndarray:
    """phi_t(p) for the flow of grad f, by classical RK4."""
    h = t / steps
    X = p.copy()
    try:
        for _ in range(steps):
            k1 = testfn.grad(X)
            k2 = testfn.grad(X + h / 2 * k1)
            k3 = testfn.grad(X + h / 2 * k2)
            k4 = testfn.grad(X + h * k3)
            X = X + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    except MultipleSigmaError as exc:
        raise FlowEscapeError(f"gradient flow left the region where sigma_n is simple: {exc}") from None
    return X


def hessian_symmetry_terms(
    testfn: InvariantFunction,
    p,
    b,
    pair: SkewPair,
    fd_step: float = 1e-4,
    flow_time: float | None = None,
    flow_steps: int = 8,
) -> HessianSymmetryTerms:
    """Evaluate every term of the Hessian splitting at p with w = b + K(p).

    Hessians come from central differences of the analytic gradient.  The
    last term differentiates t -> <D phi_t(p) b, K(phi_t(p))> at t = 0, with
    D phi_t(p) b the symmetric difference of the flows from p +- fd_step b
    and the t-derivative a central difference over +-flow_time.
    """
    p = as_matrix(p)
    b = np.asarray(b, dtype=np.result_type(p, b))
    if b.shape != p.shape:
        raise ShapeMismatchError("b must match p")
    _check_pair(pair, p)
    flow_time = fd_step if flow_time is None else flow_time
    k = killing_field(pair, p)
    w = b + k
    hww = _hess(testfn, p, w, w, fd_step)
    hbb = _hess(testfn, p, b, b, fd_step)
    kterm = 0.5 * real_inner(killing_norm2_grad(pair, p), testfn.grad(p))
    if np.any(b):
        def pairing(t):
            if t == 0:
                return real_inner(b, k)
            plus = _gradient_flow(testfn, p + fd_step * b, t, flow_steps)
            minus = _gradient_flow(testfn, p - fd_step * b, t, flow_steps)
            Bt = (plus - minus) / (2.0 * fd_step)
            return real_inner(Bt, killing_field(pair, _gradient_flow(testfn, p, t, flow_steps)))

        fterm = (pairing(flow_time) - pairing(-flow_time)) / (2.0 * flow_time)
    else:
        fterm = 0.0
    residual = abs(hww - hbb - kterm - fterm)
    scale = max(1.0, abs(hww), abs(hbb), abs(kterm), abs(fterm))
    return HessianSymmetryTerms(hww, hbb, kterm, fterm, residual, scale)


def hessian_symmetry_residual(
    testfn: InvariantFunction, p, b, pair: SkewPair, fd_step: float = 1e-4
) -> float:
    """|Hess(w,w) - Hess(b,b) - <grad |K|^2, grad f>/2 - d/dt <B,K>(phi_t(p))|."""
    return hessian_symmetry_terms(testfn, p, b, pair, fd_step).residual


def orbit_tangent_basis(p: np.ndarray) -> np.ndarray:
    """Real orthonormal basis of the orbit tangent space at p, one row per vector.

    Rows are in the flattened real coordinates of ``condgeo.spectral.to_real``.
    """
    from .spectral import to_real

    p = as_matrix(p)
    n, m = p.shape
    cplx = np.iscomplexobj(p)
    dt = p.dtype
    scalars = (1.0, 1j) if cplx else (1.0,)
    gens = []
    for left, size in ((True, n), (False, m)):
        for i in range(size):
            for j in range(i, size):
                for c in scalars:
                    if i == j and c == 1.0:
                        continue
                    S = np.zeros((size, size), dtype=dt)
                    S[i, j] = c
                    S[j, i] = -np.conj(c)
                    if left:
                        pair = SkewPair(S, np.zeros((m, m), dt))
                    else:
                        pair = SkewPair(np.zeros((n, n), dt), S)
                    gens.append(to_real(killing_field(pair, p), cplx))
    if not gens:
        return np.zeros((0, p.size * (2 if cplx else 1)))
    U, s, _ = np.linalg.svd(np.array(gens).T, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
    return U[:, :rank].T


def transverse_part(p: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Component of b orthogonal to the orbit tangent space at p."""
    from .spectral import from_real, to_real

    cplx = np.iscomplexobj(p) or np.iscomplexobj(b)
    Q = orbit_tangent_basis(p.astype(complex) if cplx else p)
    v = to_real(np.asarray(b, dtype=complex if cplx else float), cplx)
    v = v - Q.T @ (Q @ v)
    return from_real(v, p.shape, cplx)


# ---------------------------------------------------------------------------
# polynomial systems vanishing at 0


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= degree in graded lexicographic order.

    Lower total degree comes first; within a degree, larger powers of the
    earlier variables come first, so for two variables of degree <= 2 the
    order is 1, x1, x2, x1^2, x1 x2, x2^2.
    """
    out = []
    for d in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), d):
            a = [0] * nvars
            for v in combo:
                a[v] += 1
            block.append(tuple(a))
        block.sort(reverse=True)
        out.extend(block)
    return out


def multinomial(d: int, a: tuple[int, ...]) -> float:
    """d! / (a_1! ... a_n! (d - |a|)!)."""
    rest = d - sum(a)
    if rest < 0:
        raise InputError(f"monomial {a} exceeds degree {d}")
    den = factorial(rest)
    for ai in a:
        den *= factorial(ai)
    return factorial(d) / den


@dataclass(frozen=True)
class PolySystemAtZero:
    """n polynomials in n variables, all vanishing at the origin.

    ``coefficients[i]`` lists the coefficients of f_i over
    ``monomials(n, degrees[i])``; its first entry, the constant term, must
    be zero.
    """

    degrees: tuple[int, ...]
    coefficients: tuple[np.ndarray, ...]

    def __post_init__(self):
        degs = tuple(int(d) for d in self.degrees)
        n = len(degs)
        if n == 0 or any(d < 1 for d in degs):
            raise InputError("degrees must be positive")
        if len(self.coefficients) != n:
            raise ShapeMismatchError("one coefficient vector per polynomial is required")
        coeffs = []
        for d, c in zip(degs, self.coefficients):
            c = np.asarray(c)
            c = c.astype(np.result_type(c, float))
            if c.shape != (len(monomials(n, d)),):
                raise ShapeMismatchError(
                    f"degree {d} in {n} variables needs {len(monomials(n, d))} coefficients"
                )
            if c[0] != 0:
                raise InputError("polynomials must vanish at 0 (constant coefficient nonzero)")
            coeffs.append(c)
        object.__setattr__(self, "degrees", degs)
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def n(self) -> int:
        return len(self.degrees)

    @classmethod
    def from_terms(cls, degrees, terms) -> "PolySystemAtZero":
        """Build from per-polynomial dicts {exponent tuple: coefficient}."""
        n = len(degrees)
        coeffs = []
        for d, t in zip(degrees, terms):
            index = {a: k for k, a in enumerate(monomials(n, d))}
            c = np.zeros(len(index), dtype=complex if any(np.iscomplexobj(v) for v in t.values()) else float)
            for a, v in t.items():
                a = tuple(int(x) for x in a)
                if a not in index:
                    raise InputError(f"monomial {a} is not of degree <= {d} in {n} variables")
                c[index[a]] = v
            coeffs.append(c)
        return cls(tuple(degrees), tuple(coeffs))

    @classmethod
    def linear(cls, A, degrees=None) -> "PolySystemAtZero":
        """The system f(x) = A x, padded with zero higher-order terms."""
        A = np.asarray(A)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ShapeMismatchError("linear part must be square")
        degrees = tuple(degrees) if degrees is not None else (1,) * n
        terms = [{tuple(int(k == j) for k in range(n)): A[i, j] for j in range(n)} for i in range(n)]
        return cls.from_terms(degrees, terms)

    def linear_part(self) -> np.ndarray:
        """Df(0): entry (i, j) is the coefficient of x_j in f_i."""
        n = self.n
        out = np.zeros((n, n), dtype=np.result_type(*self.coefficients))
        for i, c in enumerate(self.coefficients):
            out[i] = c[1 : n + 1]
        return out

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x)
        vals = []
        for d, c in zip(self.degrees, self.coefficients):
            mons = monomials(self.n, d)
            vals.append(sum(ck * np.prod(x ** np.array(a)) for ck, a in zip(c, mons)))
        return np.array(vals)


def bombieri_inner(f: PolySystemAtZero, g: PolySystemAtZero) -> complex:
    """sum_i sum_a f_ia conj(g_ia) / multinomial(d_i, a)."""
    if f.degrees != g.degrees:
        raise ShapeMismatchError("systems must have the same degrees")
    total = 0.0
    for d, cf, cg in zip(f.degrees, f.coefficients, g.coefficients):
        w = np.array([multinomial(d, a) for a in monomials(f.n, d)])
        total = total + np.sum(cf * np.conj(cg) / w)
    return total


def bombieri_mu(sys: PolySystemAtZero) -> float:
    """mu(f, 0) = 1 / sigma_n(diag(d_i^-1/2) Df(0))."""
    L = sys.linear_part()
    M = L / np.sqrt(np.array(sys.degrees, dtype=float))[:, None]
    s = singular_values(M)
    if s[-1] <= 1e-14 * max(s[0], np.finfo(float).tiny):
        raise DegenerateLinearPartError("Df(0) is singular")
    return float(1.0 / s[-1])
