"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 on
success, 1 on bad input (malformed JSON, shape mismatch, singular data),
2 when a computation or verification fails; failures print a JSON report
whose ``violated`` field names the broken invariant.  Random draws come from
PCG64 streams keyed by (seed, trial index), so a fixed seed reproduces the
output byte for byte.  ``CONDGEO_THREADS`` caps the number of worker
processes used by batch commands (default 1).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as cio
from .convexity import (
    DEFAULT_HS,
    check_discrete_convexity,
    log_alpha_trace,
    sd2_lower_bound_check,
)
from .errors import (
    CondGeoError,
    InputError,
    MalformedInputError,
    ShapeMismatchError,
    SingularInputError,
)
from .geodesic import GeodesicOptions, minimize_path, segment_lengths
from .matcore import COMPLEX, DEFAULT_CLUSTER_TOL, REAL, random_endpoint_pair, random_matrix
from .strata import classify, codimension

log = logging.getLogger("condgeo")

THREADS_ENV = "CONDGEO_THREADS"
FIELDS = (REAL, COMPLEX)


class VerificationFailure(Exception):
    """A check did not pass; ``report`` is printed and the exit code is 2."""

    def __init__(self, report: dict):
        super().__init__(report.get("violated", "verification"))
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


@dataclass
class ExperimentConfig:
    """Parameters shared by the batch commands."""

    n: int = 2
    m: int = 2
    field: str = REAL
    nodes: int = 64
    tol: float = 1e-7
    convexity_tol: float = 1e-4
    seed: int = 0
    trials: int = 50

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise InputError("need 1 <= n <= m")
        if self.field not in FIELDS:
            raise InputError(f"field must be one of {FIELDS}")
        if self.nodes < 2:
            raise InputError("nodes must be at least 2")
        if not (self.tol > 0 and self.convexity_tol > 0):
            raise InputError("tolerances must be positive")
        if self.trials < 1:
            raise InputError("trials must be positive")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream for one trial of a seeded batch."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        k = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return k


def map_ordered(fn, items: list) -> list:
    """fn over items, in parallel when allowed; results keep the input order."""
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _emit(obj, compact: bool = True) -> None:
    if compact:
        sys.stdout.write(json.dumps(cio._plain(obj), separators=(",", ":"), allow_nan=False) + "\n")
    else:
        sys.stdout.write(cio.dumps(obj))


def _trace_path(out: str, explicit: str | None, suffix: str) -> Path:
    if explicit:
        return Path(explicit)
    p = Path(out)
    return p.with_name(p.stem + suffix)


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    A = cio.load_matrix(args.input)
    sig = classify(A, args.tol)
    out = {"signature": list(sig.parts), "codim_C": codimension(sig, COMPLEX, sig.n)}
    if args.all:
        out["codim_R"] = codimension(sig, REAL, sig.n)
        out["field"] = "complex" if np.iscomplexobj(A) else "real"
        out["sigma"] = np.linalg.svd(A, compute_uv=False)
    _emit(out)
    return 0


def _geodesic_payload(result) -> dict:
    p = result.path
    return {
        "length": result.length_kappa,
        "times": p.times,
        "nodes": [cio.matrix_to_json(M) for M in p.nodes],
        "diagnostics": {
            "converged": result.converged,
            "grad_norm": result.grad_norm,
            "tol": result.tol,
            "iterations": result.iterations,
            "seed_length": result.seed_length,
            "resampled_length": float(np.sum(segment_lengths(p))),
            "message": result.message,
        },
    }


def cmd_geodesic(args) -> int:
    A = cio.load_matrix(args.a)
    B = cio.load_matrix(args.b)
    if A.shape != B.shape:
        raise ShapeMismatchError(f"endpoint shapes differ: {A.shape} vs {B.shape}")
    opts = GeodesicOptions(nodes=args.nodes, tol=args.tol, max_iter=args.max_iter)
    r = minimize_path(A, B, args.nodes, opts)
    cio.save_json(args.out, _geodesic_payload(r))
    trace = _trace_path(args.out, args.trace, ".csv")
    rows = cio.geodesic_trace_rows(r.path.nodes, r.path.times, segment_lengths(r.path))
    cio.write_csv(trace, cio.TRACE_COLUMNS, rows)
    summary = {
        "length": r.length_kappa,
        "converged": r.converged,
        "grad_norm": r.grad_norm,
        "iterations": r.iterations,
        "out": str(args.out),
        "trace": str(trace),
    }
    if not r.converged:
        raise VerificationFailure({"status": "fail", "violated": "first_order_residual", **summary})
    _emit(summary)
    return 0


def cmd_svd_track(args) -> int:
    from .svdpath import PathSpec, StepControl, track_svd

    nodes, times = cio.path_from_json(cio.load_json(args.path))
    if times is None:
        times = np.linspace(args.t0 if args.t0 is not None else 0.0,
                            args.t1 if args.t1 is not None else 1.0, len(nodes))
    spec = PathSpec(times=times, nodes=nodes)
    t0 = spec.t0 if args.t0 is None else args.t0
    t1 = spec.t1 if args.t1 is None else args.t1
    if not (spec.t0 <= t0 < t1 <= spec.t1):
        raise InputError(f"[t0, t1] must lie inside the path's time range [{spec.t0}, {spec.t1}]")
    spec.t0, spec.t1 = float(t0), float(t1)
    sig = classify(spec(spec.t0), args.cluster_tol)
    traj = track_svd(spec, sig, StepControl(steps=args.steps, cluster_tol=args.cluster_tol))
    u = sig.u
    header = ["t"] + [f"sigma_{i + 1}" for i in range(u)] + ["residual", "unitary_drift"]
    rows = [
        [float(t)] + [float(x) for x in traj.sigma_distinct[i]] + [float(traj.residual[i]), float(traj.unitary_drift[i])]
        for i, t in enumerate(traj.times)
    ]
    cio.write_csv(args.out, header, rows)
    _emit({
        "signature": list(sig.parts),
        "steps": args.steps,
        "max_residual": float(np.max(traj.residual)),
        "max_unitary_drift": float(np.max(traj.unitary_drift)),
        "out": str(args.out),
    })
    return 0


def cmd_check_convexity(args) -> int:
    obj = cio.load_json(args.geodesic)
    if not isinstance(obj, dict):
        raise MalformedInputError("expected a geodesic JSON object")
    diag = obj.get("diagnostics", {})
    if "points" in obj:
        from .variety import VarietyPath, variety_log_alpha_trace, variety_segment_lengths

        path = VarietyPath(tuple(cio.point_from_json(p) for p in obj["points"]))
        trace = variety_log_alpha_trace(path)
        nodes, seg = path.A_nodes, variety_segment_lengths(path)
    else:
        nodes, _ = cio.path_from_json(obj)
        trace = log_alpha_trace(nodes)
        seg = segment_lengths(nodes)
    out_csv = _trace_path(args.geodesic, args.trace, ".convexity.csv")
    cio.write_csv(out_csv, cio.TRACE_COLUMNS, cio.geodesic_trace_rows(nodes, trace.times, seg))
    if diag.get("converged") is False:
        raise VerificationFailure({"status": "fail", "violated": "converged",
                                   "message": "the geodesic did not converge", "trace": str(out_csv)})
    report = check_discrete_convexity(trace, args.tol).to_dict()
    report["trace"] = str(out_csv)
    if report["verdict"] != "convex_within_tol":
        raise VerificationFailure({"status": "fail", "violated": "log_alpha_convexity", **report})
    _emit(report)
    return 0


def cmd_variety_geodesic(args) -> int:
    from .variety import minimize_variety_path, variety_segment_lengths

    p = cio.point_from_json(cio.load_json(args.p))
    q = cio.point_from_json(cio.load_json(args.q))
    opts = GeodesicOptions(nodes=args.nodes, tol=args.tol, max_iter=args.max_iter)
    r = minimize_variety_path(p, q, args.nodes, opts)
    payload = {
        "length": r.length_kappa,
        "times": r.path.times,
        "points": [cio.point_to_json(x) for x in r.path.points],
        "diagnostics": {
            "converged": r.converged,
            "grad_norm": r.grad_norm,
            "tol": r.tol,
            "iterations": r.iterations,
            "seed_length": r.seed_length,
            "max_constraint_residual": r.max_constraint_residual,
            "message": r.message,
        },
    }
    cio.save_json(args.out, payload)
    trace = _trace_path(args.out, args.trace, ".csv")
    rows = cio.geodesic_trace_rows(r.path.A_nodes, r.path.times, variety_segment_lengths(r.path))
    cio.write_csv(trace, cio.TRACE_COLUMNS, rows)
    summary = {
        "length": r.length_kappa,
        "converged": r.converged,
        "grad_norm": r.grad_norm,
        "max_constraint_residual": r.max_constraint_residual,
        "out": str(args.out),
        "trace": str(trace),
    }
    if not r.converged:
        raise VerificationFailure({"status": "fail", "violated": "first_order_residual", **summary})
    _emit(summary)
    return 0


def cmd_lemma46_sample(args) -> int:
    from .symmetry import lemma46_J, lemma46_scale, sample_lemma46

    if args.n < 1 or args.m < args.n or args.draws < 1:
        raise InputError("need 1 <= n <= m and draws >= 1")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    min_j, min_rel, bad = math.inf, math.inf, 0
    for _ in range(args.draws):
        S, B, C = sample_lemma46(rng, args.n, args.m, args.field)
        J = lemma46_J(S, B, C)
        rel = J / lemma46_scale(S, B, C)
        min_j, min_rel = min(min_j, J), min(min_rel, rel)
        bad += rel < -args.rtol
    out = {
        "n": args.n, "m": args.m, "field": args.field, "draws": args.draws, "seed": args.seed,
        "min_J": min_j, "min_J_relative": min_rel, "violations": bad,
        "verdict": "pass" if bad == 0 else "fail",
    }
    if bad:
        raise VerificationFailure({"status": "fail", "violated": "lemma46_J_nonnegative", **out})
    _emit(out)
    return 0


HESSIAN_COLUMNS = ("trial", "hess_ww", "hess_bb", "killing_term", "flow_term", "residual", "scale")


def cmd_hessian_check(args) -> int:
    from .symmetry import ALPHA, hessian_symmetry_terms, sample_hessian_config

    cfg = cio.load_json(args.config)
    if not isinstance(cfg, dict):
        raise MalformedInputError("config must be a JSON object")
    try:
        n = int(cfg.get("n", 2))
        m = int(cfg.get("m", n))
        fld = cfg.get("field", REAL)
        trials = int(cfg.get("trials", 10))
        seed = int(cfg.get("seed", 0))
        fd_step = float(cfg.get("fd_step", 1e-4))
        tol = float(cfg.get("tol", 1e-4))
        sigma = cfg.get("sigma")
    except (TypeError, ValueError):
        raise MalformedInputError("config values have the wrong types") from None
    ExperimentConfig(n=n, m=m, field=fld, trials=trials, seed=seed, tol=tol)
    if fd_step <= 0:
        raise InputError("fd_step must be positive")
    rows, worst = [], 0.0
    for i in range(trials):
        p, b, pair = sample_hessian_config(trial_rng(seed, i), n, m, fld, sigma)
        t = hessian_symmetry_terms(ALPHA, p, b, pair, fd_step)
        rows.append([i, t.hess_ww, t.hess_bb, t.killing_term, t.flow_term, t.residual, t.scale])
        worst = max(worst, t.residual / t.scale)
    out = {
        "columns": list(HESSIAN_COLUMNS),
        "rows": rows,
        "max_relative_residual": worst,
        "tol": tol,
        "verdict": "pass" if worst <= tol else "fail",
    }
    if args.out:
        cio.write_csv(args.out, HESSIAN_COLUMNS, rows)
    if worst > tol:
        raise VerificationFailure({"status": "fail", "violated": "hessian_symmetry_identity", **out})
    _emit(out)
    return 0


def _poly_from_json(obj):
    from .symmetry import PolySystemAtZero

    if not isinstance(obj, dict) or "degrees" not in obj or "polynomials" not in obj:
        raise MalformedInputError("a system needs 'degrees' and 'polynomials'")
    try:
        degrees = [int(d) for d in obj["degrees"]]
        terms = []
        for poly in obj["polynomials"]:
            t = {}
            for term in poly:
                c = float(term.get("re", 0.0)) + 1j * float(term.get("im", 0.0))
                t[tuple(int(a) for a in term["exponent"])] = c if c.imag else c.real
            terms.append(t)
    except (TypeError, ValueError, KeyError, AttributeError):
        raise MalformedInputError("each term needs 'exponent' and numeric 're'/'im'") from None
    if len(terms) != len(degrees):
        raise MalformedInputError("one polynomial per degree is required")
    return PolySystemAtZero.from_terms(degrees, terms)


def cmd_mu(args) -> int:
    from .symmetry import PolySystemAtZero, bombieri_mu

    if (args.system is None) == (args.matrix is None):
        raise InputError("give exactly one of --system or --matrix")
    if args.system is not None:
        sys_ = _poly_from_json(cio.load_json(args.system))
    else:
        A = cio.load_matrix(args.matrix)
        sys_ = PolySystemAtZero.linear(A, args.degrees)
    _emit({"mu": bombieri_mu(sys_), "degrees": list(sys_.degrees)})
    return 0


# ---------------------------------------------------------------------------
# batch reports


def _theorem1_trial(job):
    cfg, i = job
    from .convexity import verify_selfconvexity

    A, B = random_endpoint_pair(trial_rng(cfg.seed, i), cfg.n, cfg.m, cfg.field)
    r = minimize_path(A, B, cfg.nodes, GeodesicOptions(nodes=cfg.nodes, tol=cfg.tol))
    row = {"trial": i, "converged": r.converged, "grad_norm": r.grad_norm, "length": r.length_kappa}
    if r.converged:
        rep = verify_selfconvexity(r, cfg.convexity_tol)
        row.update(verdict=rep.verdict, min_second_difference=rep.min_second_difference, tol=rep.tol)
    else:
        row.update(verdict="not_converged")
    return row


def _variety_trial(job):
    cfg, i = job
    from .convexity import CONVEX
    from .variety import kernel_point, minimize_variety_path, verify_variety_selfconvexity

    rng = trial_rng(cfg.seed, i)
    p = kernel_point(random_matrix(rng, cfg.n, cfg.n + 1, cfg.field))
    q = kernel_point(random_matrix(rng, cfg.n, cfg.n + 1, cfg.field))
    r = minimize_variety_path(p, q, cfg.nodes, GeodesicOptions(nodes=cfg.nodes, tol=cfg.tol))
    row = {"trial": i, "converged": r.converged, "grad_norm": r.grad_norm, "length": r.length_kappa,
           "max_constraint_residual": r.max_constraint_residual}
    if r.converged:
        rep = verify_variety_selfconvexity(r, cfg.convexity_tol)
        row.update(verdict=rep.verdict, min_second_difference=rep.min_second_difference, tol=rep.tol)
        if r.max_constraint_residual > 1e-8:
            row["verdict"] = "constraint_residual"
        elif rep.verdict != CONVEX:
            row["verdict"] = rep.verdict
    else:
        row.update(verdict="not_converged")
    return row


def _lemma46_trial(job):
    cfg, i = job
    from .symmetry import lemma46_J, lemma46_scale, sample_lemma46

    S, B, C = sample_lemma46(trial_rng(cfg.seed, i), cfg.n, cfg.m, cfg.field)
    rel = lemma46_J(S, B, C) / lemma46_scale(S, B, C)
    return {"trial": i, "converged": True, "J_relative": rel,
            "verdict": "convex_within_tol" if rel >= -1e-10 else "violated"}


def _sd2_trial(job):
    cfg, i = job
    rng = trial_rng(cfg.seed, i)
    A = random_matrix(rng, cfg.n, cfg.m, cfg.field)
    B = random_matrix(rng, cfg.n, cfg.m, cfg.field)
    ok = sd2_lower_bound_check(A, B, DEFAULT_HS)
    return {"trial": i, "converged": True, "verdict": "convex_within_tol" if ok else "violated"}


SUITES = {
    "theorem1": _theorem1_trial,
    "variety": _variety_trial,
    "lemma46": _lemma46_trial,
    "sd2-bound": _sd2_trial,
}


def run_suite(suite: str, cfg: ExperimentConfig) -> dict:
    """Run a seeded batch and summarize it; rows are ordered by trial index."""
    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    rows = map_ordered(SUITES[suite], [(cfg, i) for i in range(cfg.trials)])
    converged = sum(r["converged"] for r in rows)
    passed = sum(r["verdict"] == "convex_within_tol" for r in rows)
    failed = sum(r["converged"] and r["verdict"] != "convex_within_tol" for r in rows)
    # at most one optimizer failure per 50 trials is tolerated
    allowed = cfg.trials - math.ceil(0.98 * cfg.trials)
    ok = failed == 0 and cfg.trials - converged <= allowed
    return {
        "suite": suite,
        "config": {"n": cfg.n, "m": cfg.m, "field": cfg.field, "nodes": cfg.nodes, "tol": cfg.tol,
                   "convexity_tol": cfg.convexity_tol, "seed": cfg.seed, "trials": cfg.trials},
        "summary": {"trials": cfg.trials, "converged": converged, "passed": passed,
                    "failed": failed, "allowed_nonconverged": allowed,
                    "verdict": "pass" if ok else "fail"},
        "trials": rows,
    }


def cmd_report(args) -> int:
    m = args.m if args.m is not None else (args.n + 1 if args.suite == "variety" else args.n)
    cfg = ExperimentConfig(n=args.n, m=m, field=args.field, nodes=args.nodes, tol=args.tol,
                           convexity_tol=args.convexity_tol, seed=args.seed, trials=args.trials)
    report = run_suite(args.suite, cfg)
    if args.out:
        cio.save_json(args.out, report)
    if report["summary"]["verdict"] != "pass":
        bad = "first_order_residual" if report["summary"]["failed"] == 0 else "log_alpha_convexity"
        if args.suite == "lemma46":
            bad = "lemma46_J_nonnegative"
        elif args.suite == "sd2-bound":
            bad = "sd2_lower_bound"
        raise VerificationFailure({"status": "fail", "violated": bad, **report})
    _emit(report)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="condgeo", description="Condition-metric geometry of matrices.")
    p.add_argument("--log-level", default="WARNING", help="logging level on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", help="singular-value multiplicity signature of a matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=DEFAULT_CLUSTER_TOL, help="relative cluster tolerance")
    s.add_argument("--all", action="store_true", help="also print the real codimension and sigma")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("geodesic", help="discrete condition geodesic between two matrices")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--nodes", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--max-iter", type=int, default=500)
    s.add_argument("--out", required=True)
    s.add_argument("--trace", help="CSV trace path (default: OUT with .csv suffix)")
    s.set_defaults(func=cmd_geodesic)

    s = sub.add_parser("svd-track", help="smooth SVD along a sampled path")
    s.add_argument("--path", required=True)
    s.add_argument("--t0", type=float)
    s.add_argument("--t1", type=float)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--cluster-tol", type=float, default=DEFAULT_CLUSTER_TOL)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_svd_track)

    s = sub.add_parser("check-convexity", help="discrete convexity of log alpha along a geodesic")
    s.add_argument("--geodesic", required=True)
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--trace", help="CSV trace path (default: GEODESIC.convexity.csv)")
    s.set_defaults(func=cmd_check_convexity)

    s = sub.add_parser("variety-geodesic", help="discrete condition geodesic on the solution variety")
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--nodes", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--max-iter", type=int, default=500)
    s.add_argument("--out", required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_variety_geodesic)

    s = sub.add_parser("lemma46-sample", help="sample the trace inequality on random draws")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--m", type=int, default=4)
    s.add_argument("--field", choices=FIELDS, default=REAL)
    s.add_argument("--draws", type=int, default=1000)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--rtol", type=float, default=1e-10)
    s.set_defaults(func=cmd_lemma46_sample)

    s = sub.add_parser("hessian-check", help="Hessian splitting identity on random configurations")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="optional CSV copy of the residual table")
    s.set_defaults(func=cmd_hessian_check)

    s = sub.add_parser("mu", help="normalized condition number of a polynomial system at 0")
    s.add_argument("--system")
    s.add_argument("--matrix")
    s.add_argument("--degrees", type=int, nargs="+")
    s.set_defaults(func=cmd_mu)

    s = sub.add_parser("report", help="seeded batch verification suite")
    s.add_argument("--suite", choices=sorted(SUITES), default="theorem1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int)
    s.add_argument("--field", choices=FIELDS, default=REAL)
    s.add_argument("--nodes", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("--convexity-tol", type=float, default=1e-4)
    s.add_argument("--out")
    s.set_defaults(func=cmd_report)
    return p


def _positive_tolerances(args) -> None:
    for name in ("tol", "convexity_tol", "rtol", "cluster_tol"):
        v = getattr(args, name, None)
        if v is not None and not v > 0:
            raise InputError(f"--{name.replace('_', '-')} must be positive")
    for name in ("nodes", "steps", "max_iter", "trials", "draws"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise InputError(f"--{name.replace('_', '-')} must be positive")


def run_command(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                            stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        _positive_tolerances(args)
        return args.func(args)
    except VerificationFailure as exc:
        _emit(exc.report)
        return 2
    except (InputError, SingularInputError) as exc:
        _emit({"status": "error", "error": exc.code, "message": str(exc)})
        return 1
    except CondGeoError as exc:
        _emit({"status": "fail", "violated": exc.code, "message": str(exc)})
        return 2


def main(argv=None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
