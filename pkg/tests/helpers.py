"""Shared oracles and generators for the test suite."""
import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from condgeo.geodesic import condition_length
from condgeo.matcore import ctranspose, random_skew, random_unitary
from condgeo.svdpath import PathSpec


def stratum_path(rng, parts, m, field):
    """Smooth path U(t) D(t) V(t)^* whose cluster values keep the pattern ``parts``.

    U and V follow one-parameter subgroups and the cluster values oscillate
    slightly around well separated levels, so the path stays in one stratum.
    """
    n = sum(parts)
    u = len(parts)
    U0, V0 = random_unitary(rng, n, field), random_unitary(rng, m, field)
    S1, S2 = 0.5 * random_skew(rng, n, field), 0.5 * random_skew(rng, m, field)
    base = np.cumsum(rng.uniform(0.5, 1.0, u))[::-1] + 0.3
    amp = rng.uniform(-0.2, 0.2, u)
    freq = rng.uniform(0.5, 2.0, u)

    def diag(v):
        D = np.zeros((n, m), dtype=U0.dtype)
        D[np.arange(n), np.arange(n)] = v
        return D

    def vals(t):
        return np.repeat(base + amp * np.sin(freq * t), parts)

    def dvals(t):
        return np.repeat(amp * freq * np.cos(freq * t), parts)

    def f(t):
        return U0 @ expm(t * S1) @ diag(vals(t)) @ ctranspose(V0 @ expm(t * S2))

    def df(t):
        U, V, D = U0 @ expm(t * S1), V0 @ expm(t * S2), diag(vals(t))
        return U @ (S1 @ D + diag(dvals(t)) - D @ S2) @ ctranspose(V)

    return PathSpec(f, df, 0.0, 1.0)


def cluster_means(A, parts):
    s = np.linalg.svd(A, compute_uv=False)
    out, i = [], 0
    for k in parts:
        out.append(s[i : i + k].mean())
        i += k
    return np.array(out)


def diagonal_subsolver(a, b, N, weights=None):
    """Best diagonal-only path between diag(a) and diag(b), by an independent method.

    The path is parametrized by log sigma_j(t_i), one scalar function per
    cluster with multiplicity ``weights``.  The trapezoid energy with a
    log-sum-exp smoothed max of sigma^-2 is minimized by L-BFGS over a
    decreasing temperature ladder.  Returns the trapezoid condition length.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    u = a.size
    k = np.ones(u) if weights is None else np.asarray(weights, float)
    dt = 1.0 / N
    la, lb = np.log(a), np.log(b)

    def full(z):
        return np.exp(np.vstack([la, z.reshape(N - 1, u), lb]))

    def fg(z, T):
        s = full(z)
        h = s**-2
        top = h.max(axis=1)
        e = np.exp((h - top[:, None]) / (T * top[:, None]))
        Z = e.sum(axis=1)
        f = top + T * top * np.log(Z)
        w = e / Z[:, None]
        D = np.diff(s, axis=0)
        q = np.sum(k * D**2, axis=1)
        F = (f[:-1] + f[1:]) / 2
        gs = np.zeros_like(s)
        gs[:-1] -= 2 * k * D * F[:, None]
        gs[1:] += 2 * k * D * F[:, None]
        qn = np.zeros(N + 1)
        qn[:-1] += q / 2
        qn[1:] += q / 2
        gs += qn[:, None] * w * (-2 * s**-3)
        return np.sum(q * F) / dt, (gs * s)[1:-1].ravel() / dt

    t = np.linspace(0, 1, N + 1)[:, None]
    z = (la * (1 - t) + lb * t)[1:-1].ravel()
    for T in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8):
        z = minimize(fg, z, args=(T,), jac=True, method="L-BFGS-B",
                     options={"maxiter": 5000, "gtol": 1e-12, "ftol": 1e-15}).x
    s = full(z)
    nodes = np.array([np.diag(np.repeat(row, k.astype(int))) for row in s])
    return condition_length(nodes)


def fd_gradient(f, X, h=1e-6):
    """Central-difference Frobenius gradient of a real function of a (complex) matrix."""
    G = np.zeros_like(X)
    for idx in np.ndindex(X.shape):
        E = np.zeros_like(X)
        E[idx] = 1.0
        g = (f(X + h * E) - f(X - h * E)) / (2 * h)
        if np.iscomplexobj(X):
            E[idx] = 1j
            g = g + 1j * (f(X + h * E) - f(X - h * E)) / (2 * h)
        G[idx] = g
    return G
