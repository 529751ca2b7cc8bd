"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

The verdict lines are printed in the "acceptance criteria" section of the
pytest terminal summary.
"""
import numpy as np
import pytest

from condgeo.convexity import sd2_lower_bound_check, verify_selfconvexity
from condgeo.geodesic import GeodesicOptions, condition_length, minimize_path
from condgeo.matcore import random_endpoint_pair, random_matrix
from condgeo.strata import DiagonalPoint, ambient_real_dim, codimension, signature, signatures_of, tangent_basis_Pk
from condgeo.svdpath import StepControl, track_svd
from condgeo.symmetry import (
    ALPHA,
    PolySystemAtZero,
    SkewPair,
    bombieri_mu,
    cor38_condition3,
    cor38_scale,
    hessian_symmetry_terms,
    lemma46_J,
    lemma46_scale,
    sample_cor38,
    sample_hessian_config,
    sample_lemma46,
)
from condgeo.variety import minimize_variety_path, verify_variety_selfconvexity

from helpers import cluster_means, diagonal_subsolver, stratum_path

FIELDS = ("real", "complex")


@pytest.mark.slow
def test_criterion_01_log_alpha_convex_along_random_geodesics(acceptance_log):
    configs = [(2, 2), (3, 3), (2, 3), (3, 5)]
    worst, lines, ok = -np.inf, [], True
    for n, m in configs:
        for field in FIELDS:
            converged = convex = 0
            for seed in range(50):
                A, B = random_endpoint_pair(np.random.default_rng(seed), n, m, field)
                res = minimize_path(A, B, 64, GeodesicOptions(tol=1e-7))
                if not res.converged:
                    continue
                converged += 1
                rep = verify_selfconvexity(res, 1e-4)
                convex += rep.convex
                worst = max(worst, -rep.min_second_difference / rep.tol)
            ok &= converged >= 49 and convex == converged
            lines.append(f"{n}x{m} {field}: {convex}/{converged}/50")
    acceptance_log(1, ok, "convex/converged/total " + ", ".join(lines)
                   + f"; worst violation/tol {worst:.2e}")
    assert ok


def test_criterion_02_diagonal_endpoints_stay_diagonal(acceptance_log):
    rng = np.random.default_rng(2)
    N = 64
    max_off, max_excess, ok = 0.0, -np.inf, True
    for parts in ((1, 1), (1, 1, 1)):
        n = len(parts)
        for _ in range(10):
            a = np.sort(rng.uniform(0.2, 3.0, n))[::-1]
            b = np.sort(rng.uniform(0.2, 3.0, n))[::-1]
            res = minimize_path(np.diag(a), np.diag(b), N)
            nodes = res.raw_path.nodes
            off = nodes.copy()
            idx = np.arange(n)
            off[:, idx, idx] = 0
            rel_off = np.linalg.norm(off) / np.linalg.norm(nodes)
            excess = res.length_kappa - diagonal_subsolver(a, b, N)
            max_off, max_excess = max(max_off, rel_off), max(max_excess, excess)
            ok &= res.converged and rel_off <= 1e-5 and excess <= 1e-6
    acceptance_log(2, ok, f"20 problems; max off-diagonal mass {max_off:.1e}, "
                   f"max length over diagonal-only optimum {max_excess:.1e}")
    assert ok


def test_criterion_03_smooth_svd_tracking(acceptance_log):
    rng = np.random.default_rng(3)
    strata = [(1, 1), (1, 1, 1), (2, 1)]
    worst_res = worst_fd = worst_rt = 0.0
    h = 1e-5
    for k in range(20):
        parts = strata[k % 3]
        n = sum(parts)
        m = n + int(rng.integers(0, 3))
        field = FIELDS[k % 2]
        path = stratum_path(rng, parts, m, field)
        sig = signature(*parts)
        fwd = track_svd(path, sig, StepControl(steps=100))
        for i, t in enumerate(fwd.times):
            fd = (cluster_means(path(t + h), parts) - cluster_means(path(t - h), parts)) / (2 * h)
            worst_fd = max(worst_fd, np.max(np.abs(fd - fwd.sigma_dot[i])))
        rel = fwd.residual / np.array([np.linalg.norm(path(t)) for t in fwd.times])
        worst_res = max(worst_res, rel.max())
        back = track_svd(path.reversed(), sig, StepControl(steps=100),
                         state=(fwd.U[-1], fwd.V[-1], fwd.sigma_distinct[-1]))
        rt = max(np.linalg.norm(back.U[-1] - fwd.U[0]), np.linalg.norm(back.V[-1] - fwd.V[0]),
                 np.max(np.abs(back.sigma_distinct[-1] - fwd.sigma_distinct[0])))
        worst_rt = max(worst_rt, rt)
    ok = worst_res <= 1e-8 and worst_fd <= 1e-6 and worst_rt <= 1e-7
    acceptance_log(3, ok, f"20 paths; residual {worst_res:.1e}, sigma-dot vs FD {worst_fd:.1e}, "
                   f"round trip {worst_rt:.1e}")
    assert ok


def test_criterion_04_trace_inequality_and_third_condition(acceptance_log):
    rng = np.random.default_rng(4)
    min_j, bad_j = np.inf, 0
    for k in range(10_000):
        n = int(rng.integers(1, 5))
        m = n + int(rng.integers(0, 3))
        S, B, C = sample_lemma46(rng, n, m, FIELDS[k % 2])
        rel = lemma46_J(S, B, C) / lemma46_scale(S, B, C)
        min_j = min(min_j, rel)
        bad_j += rel < -1e-10
    min_c, bad_c = np.inf, 0
    for k in range(1_000):
        n = int(rng.integers(1, 5))
        m = n + int(rng.integers(0, 3))
        A, pair = sample_cor38(rng, n, m, FIELDS[k % 2])
        rel = cor38_condition3(A, pair) / cor38_scale(A, pair)
        min_c = min(min_c, rel)
        bad_c += rel < -1e-8
    ok = bad_j == 0 and bad_c == 0
    acceptance_log(4, ok, f"J: 10000 draws, {bad_j} violations, min J/scale {min_j:.1e}; "
                   f"third condition: 1000 draws, {bad_c} violations, min {min_c:.1e}")
    assert ok


def test_criterion_05_hessian_splitting(acceptance_log):
    rng = np.random.default_rng(5)
    worst = worst_b0 = worst_k0 = 0.0
    for k in range(100):
        n = int(rng.integers(2, 4))
        m = n + int(rng.integers(0, 2))
        field = FIELDS[k % 2]
        p, b, pair = sample_hessian_config(rng, n, m, field)
        t = hessian_symmetry_terms(ALPHA, p, b, pair, 1e-4)
        worst = max(worst, t.residual / t.scale)
        t0 = hessian_symmetry_terms(ALPHA, p, np.zeros_like(p), pair, 1e-4)
        worst_b0 = max(worst_b0, t0.residual / t0.scale)
        tk = hessian_symmetry_terms(ALPHA, p, b, SkewPair.zeros(n, m, field), 1e-4)
        worst_k0 = max(worst_k0, tk.residual / tk.scale)
    ok = worst <= 1e-4 and worst_b0 <= 1e-5 and worst_k0 <= 1e-5
    acceptance_log(5, ok, f"100 configurations; residual/scale {worst:.1e}, "
                   f"b = 0 {worst_b0:.1e}, k = 0 {worst_k0:.1e}")
    assert ok


def test_criterion_06_lower_bound_inequality(acceptance_log):
    rng = np.random.default_rng(6)
    bad = 0
    for k in range(10_000):
        n = int(rng.integers(1, 5))
        m = n + int(rng.integers(0, 3))
        field = FIELDS[k % 2]
        A, B = random_matrix(rng, n, m, field), random_matrix(rng, n, m, field)
        bad += not sd2_lower_bound_check(A, B, [rng.uniform(0.0, 1.0)])
    acceptance_log(6, bad == 0, f"10000 draws, {bad} violations")
    assert bad == 0


@pytest.mark.slow
def test_criterion_07_variety_geodesics(acceptance_log):
    lines, ok, worst_c = [], True, 0.0
    for field in FIELDS:
        converged = convex = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            A, B = random_matrix(rng, 2, 3, field), random_matrix(rng, 2, 3, field)
            res = minimize_variety_path(A, B, 64)
            worst_c = max(worst_c, res.max_constraint_residual)
            ok &= res.max_constraint_residual <= 1e-8
            if res.converged:
                converged += 1
                convex += verify_variety_selfconvexity(res, 1e-4).convex
        ok &= convex == converged
        lines.append(f"{field} {convex}/{converged}/20")
    acceptance_log(7, ok, "convex/converged/total " + ", ".join(lines)
                   + f"; max |Ax|/|A| {worst_c:.1e}")
    assert ok


def test_criterion_08_codimension_matches_tangent_basis(acceptance_log):
    checked, bad = 0, 0
    for field in FIELDS:
        for n in range(1, 5):
            for m in (n, n + 1, n + 2):
                for parts in signatures_of(n):
                    vals = tuple(float(len(parts) - i) for i in range(len(parts)))
                    D = DiagonalPoint(vals, signature(*parts), m, field)
                    codim = ambient_real_dim(n, m, field) - len(tangent_basis_Pk(D))
                    bad += codim != codimension(D.signature, field, n)
                    checked += 1
    acceptance_log(8, bad == 0, f"{checked} signature/shape/field cases, {bad} mismatches")
    assert bad == 0


def test_criterion_09_closed_form_oracles(acceptance_log):
    errs = []
    for a, b in ((1.0, 4.0), (4.0, 1.0), (1.0, 2.0), (0.5, 3.0)):
        res = minimize_path(np.array([[a]]), np.array([[b]]), 256)
        errs.append(abs(res.length_kappa - abs(np.log(b / a))))
    t = np.linspace(0, 1, 1001)
    e_line = abs(condition_length((1 + t).reshape(-1, 1, 1)) - np.log(2))
    rng = np.random.default_rng(9)
    e_mu = 0.0
    for k in range(200):
        n = int(rng.integers(1, 5))
        A = random_matrix(rng, n, n, FIELDS[k % 2])
        mu = bombieri_mu(PolySystemAtZero.linear(A))
        e_mu = max(e_mu, abs(mu * np.linalg.svd(A, compute_uv=False)[-1] - 1))
    ok = max(errs) <= 1e-4 and e_line <= 1e-5 and e_mu <= 1e-12
    acceptance_log(9, ok, f"1x1 geodesic length error {max(errs):.1e} (N = 256), "
                   f"line length error {e_line:.1e}, mu relative error {e_mu:.1e}")
    assert ok


def test_criterion_10_refinement_stability(acceptance_log):
    A, B = random_endpoint_pair(np.random.default_rng(7), 2, 2, "real")
    L = [minimize_path(A, B, N).length_kappa for N in (32, 64, 128)]
    d1, d2 = L[0] - L[1], L[1] - L[2]
    ok = d1 >= 0 and d2 >= 0 and d2 <= 5 * d1
    acceptance_log(10, ok, f"lengths {L[0]:.6f}, {L[1]:.6f}, {L[2]:.6f}; "
                   f"change ratio {d2 / d1 if d1 else np.inf:.3f}")
    assert ok
