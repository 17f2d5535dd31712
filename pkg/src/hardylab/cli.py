"""Command-line entry point: ``hardylab <command> [flags]``.

Every command writes ``<command>.json`` (sorted keys, no timestamps) and
``<command>.meta.json`` (timestamps, runtime, versions) into the output
directory, which is ``--out``, else ``$HARDYLAB_OUT``, else ``./hardylab-out``.
Profiles are dumped as CSV next to them.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import claims as claims_mod
from .exponents import DomainError, classify, critical_q, exponents
from .geometry import RadialDomain, make_grid, normalized_trace
from .hardy import hardy_constant, local_hardy_constant
from .linear import fit_boundary_exponent, harmonic_profile, kernel_lq_test, radial_green
from .nonlinear import (NonlinearProblem, NonuniquenessRefusal, Region, SolverFailure,
                        maximal_solution, nonuniqueness_demo, solve_dirichlet, solve_strip,
                        solve_with_trace)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_VIOLATED = 4
EXIT_TRACE_LOSS = 5
EXIT_REFUSED = 6

COMMANDS = ("exponents", "hardy", "harmonic", "green", "trace", "solve", "maximal",
            "kernel-lq", "nonunique", "verify-all")


class UsageError(ValueError):
    """A flag combination that the selected command cannot run."""


@dataclass
class RunConfig:
    command: str
    mu: float = 0.0
    dim: int = 3
    q: float = 2.0
    domain: str = "ball:1"
    n: int = 2048
    grading_power: float = 2.0
    trace_tol: float = 0.02
    newton_tol: float = 1e-11
    fit_tol: float = 0.02
    out: str = "hardylab-out"
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def radial_domain(self) -> RadialDomain:
        return RadialDomain.parse(self.domain, self.dim)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.n < 16:
            raise UsageError("--n must be at least 16")
        if not self.grading_power >= 1:
            raise UsageError("--grading must be >= 1")
        if min(self.trace_tol, self.newton_tol, self.fit_tol) <= 0:
            raise UsageError("tolerances must be positive")
        if self.command in ("verify-all",):
            return
        try:
            exponents(self.mu)
            if self.command not in ("exponents", "kernel-lq"):
                self.radial_domain()
            else:
                critical_q(self.mu, self.dim)
        except (DomainError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        if self.command in ("trace", "solve", "maximal", "nonunique", "kernel-lq") and not self.q > 1:
            raise UsageError("--q must exceed 1")


def _plain(obj):
    return claims_mod._plain(obj)


def _write(out: Path, name: str, payload: dict, meta: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    with open(path, "w") as fh:
        json.dump(_plain(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / f"{name}.meta.json", "w") as fh:
        json.dump(_plain(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _meta(config: RunConfig, started: float) -> dict:
    return {"timestamp": datetime.now(timezone.utc).isoformat(), "runtime_s": time.perf_counter() - started,
            "python": platform.python_version(), "numpy": np.__version__, "config": asdict(config)}


# ---------------------------------------------------------------------------
# commands: each maps onto one library operation


def cmd_exponents(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    crit = critical_q(cfg.mu, cfg.dim)
    payload = {"mu": cfg.mu, "dim": cfg.dim, "alpha_plus": crit.pair.alpha_plus,
               "alpha_minus": crit.pair.alpha_minus, "q_c": crit.q_c, "q_star": crit.q_star.to_json()}
    if "q" in cfg.extra:
        cls = classify(cfg.mu, cfg.dim, cfg.q)
        payload["classification"] = {"q": cfg.q, "regime": cls.regime.value, "reasons": list(cls.reasons)}
    return payload, EXIT_OK


def cmd_hardy(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    dom = cfg.radial_domain()
    rho = cfg.extra.get("rho")
    if rho is not None:
        return {"domain": dom.describe(), **local_hardy_constant(dom, rho, n=cfg.n).report()}, EXIT_OK
    res = hardy_constant(dom, make_grid(dom, cfg.n, cfg.grading_power))
    res.eigenfunction.to_csv(out / "hardy_eigenfunction.csv")
    fit = fit_boundary_exponent(res.eigenfunction)
    return res.report(boundary_exponent_fit=fit.exponent), EXIT_OK


def cmd_harmonic(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    dom = cfg.radial_domain()
    branch = cfg.extra.get("branch", "alpha_minus")
    prof = harmonic_profile(dom, cfg.mu, branch, rho=cfg.extra.get("rho"), n=cfg.n,
                            grading_power=cfg.grading_power)
    payload = {"domain": dom.describe(), "mu": cfg.mu, "branch": branch,
               "target_exponent": prof.target_exponent, "fits": prof.fits,
               "coefficients": prof.coefficients()}
    for k, g in enumerate(prof.grids):
        prof.on(g).to_csv(out / f"harmonic_profile_{k}.csv")
    if branch == "alpha_minus" and dom.kind != "slab":
        grid = make_grid(dom, cfg.n, cfg.grading_power)
        payload["trace"] = normalized_trace(prof.on(grid), prof.pair, rtol=cfg.trace_tol).as_dict()
    return payload, EXIT_OK


def cmd_green(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    dom = cfg.radial_domain()
    G = radial_green(dom, cfg.mu, cfg.extra.get("source_r", 0.0), cfg.n, cfg.grading_power)
    G.values.to_csv(out / "green.csv")
    fit = fit_boundary_exponent(G.values)
    payload = {"domain": dom.describe(), "mu": cfg.mu, "source_r": G.source_r,
               "two_sided": G.two_sided_constants(), "boundary_exponent": fit.exponent,
               "alpha_plus": exponents(cfg.mu).alpha_plus}
    return payload, EXIT_OK


def _problem(cfg: RunConfig, **kw) -> NonlinearProblem:
    return NonlinearProblem(cfg.radial_domain(), cfg.mu, cfg.q, **kw)


def cmd_trace(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    prob = _problem(cfg, trace_mass=cfg.extra.get("c", 1.0))
    rep = solve_with_trace(prob, n=cfg.n, grading_power=cfg.grading_power, rho=cfg.extra.get("rho"),
                           trace_tol=cfg.trace_tol)
    rep.solution.to_csv(out / "trace_solution.csv")
    code = EXIT_TRACE_LOSS if rep.status == "trace_loss" else EXIT_OK if rep.success else EXIT_SOLVER
    return {"problem": prob.describe(), **rep.as_dict()}, code


def cmd_solve(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    strip = cfg.extra.get("strip")
    if strip is not None:
        prob = _problem(cfg, inner_data=strip)
        rep = solve_strip(prob, rho=cfg.extra.get("rho"), n=cfg.n, grading_power=cfg.grading_power)
    else:
        prob = _problem(cfg)
        region = Region(cfg.extra.get("delta_min", 0.05), component=cfg.extra.get("component"))
        rep = solve_dirichlet(prob, region, tuple(cfg.extra.get("data", (1.0, 1.0))), n=cfg.n,
                              grading_power=cfg.grading_power, tol=cfg.newton_tol)
    rep.solution.to_csv(out / "solution.csv")
    return {"problem": prob.describe(), **rep.as_dict()}, EXIT_OK if rep.success else EXIT_SOLVER


def cmd_maximal(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    prob = _problem(cfg)
    rep = maximal_solution(prob, n=cfg.n, grading_power=cfg.grading_power)
    rep.solution.to_csv(out / "maximal_solution.csv")
    return {"problem": prob.describe(), **rep.as_dict()}, EXIT_OK if rep.success else EXIT_SOLVER


def cmd_kernel_lq(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    v = kernel_lq_test(cfg.mu, cfg.dim, cfg.q)
    return {"mu": cfg.mu, "dim": cfg.dim, **v.as_dict()}, EXIT_OK


def cmd_nonunique(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    dom = cfg.radial_domain()
    try:
        res = nonuniqueness_demo(dom, cfg.q, n=cfg.n, grading_power=cfg.grading_power,
                                 trace_tol=cfg.trace_tol)
    except NonuniquenessRefusal as exc:
        return {"domain": dom.describe(), "q": cfg.q, "status": "refused", "reason": str(exc)}, EXIT_REFUSED
    res.U0.solution.to_csv(out / "nonunique_U0.csv", fitted=res.ground_state.values * res.tau)
    return {"domain": dom.describe(), "q": cfg.q, "status": "solved", **res.as_dict()}, EXIT_OK


def _claim_worker(args):
    claim_id, quick, seed, out = args
    started = time.perf_counter()
    rep = claims_mod.run_claim(claim_id, quick=quick, seed=seed)
    runtime = time.perf_counter() - started
    path = _write(Path(out) / "claims", claim_id, rep.as_dict(), {"runtime_s": runtime})
    return rep.as_dict(), runtime, str(path)


def cmd_verify_all(cfg: RunConfig, out: Path) -> tuple[dict, int]:
    quick = bool(cfg.extra.get("quick", False))
    workers = int(cfg.extra.get("workers", 1))
    ids = cfg.extra.get("claims") or list(claims_mod.CLAIMS)
    unknown = [c for c in ids if c not in claims_mod.CLAIMS]
    if unknown:
        raise UsageError(f"unknown claim ids: {unknown}")
    jobs = [(cid, quick, cfg.seed, str(out)) for cid in ids]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_claim_worker, jobs))
    else:
        results = [_claim_worker(j) for j in jobs]
    matrix = [r[0] for r in results]
    for rep, runtime, _ in results:
        print(f"{rep['claim_id']:24s} {rep['status']:12s} {runtime:8.2f}s", file=sys.stderr)
    counts = {s: sum(r["status"] == s for r in matrix) for s in claims_mod.STATUSES}
    payload = {"quick": quick, "seed": cfg.seed, "counts": counts, "claims": matrix}
    return payload, EXIT_VIOLATED if counts["violated"] else EXIT_OK


DISPATCH = {
    "exponents": cmd_exponents, "hardy": cmd_hardy, "harmonic": cmd_harmonic, "green": cmd_green,
    "trace": cmd_trace, "solve": cmd_solve, "maximal": cmd_maximal, "kernel-lq": cmd_kernel_lq,
    "nonunique": cmd_nonunique, "verify-all": cmd_verify_all,
}


def run(config: RunConfig) -> int:
    """Validate, dispatch and write artifacts; returns the exit status."""
    config.validate()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    name = config.command.replace("-", "_")
    try:
        payload, code = DISPATCH[config.command](config, out)
    except SolverFailure as exc:
        path = _write(out, name, {"status": "solver_failure", "error": str(exc),
                                  "history": list(getattr(exc, "history", []) or [])},
                      _meta(config, started))
        print(f"solver failure: {exc} (report: {path})", file=sys.stderr)
        return EXIT_SOLVER
    path = _write(out, name, payload, _meta(config, started))
    if config.command != "verify-all":
        print(json.dumps(_plain(payload if len(json.dumps(_plain(payload))) < 4000 else
                                {"report": str(path)}), indent=2, sort_keys=True))
    else:
        print(json.dumps({"report": str(path), "counts": payload["counts"]}, sort_keys=True))
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _pair(text: str) -> tuple[float, float]:
    vals = [float(v) for v in text.split(",")]
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("expected 'a' or 'a,b'")
    return vals[0], vals[1]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu", type=float, default=0.0, help="Hardy coefficient, mu < 1/4 (default 0)")
    common.add_argument("--dim", type=int, default=3, help="space dimension N >= 2 (default 3)")
    common.add_argument("--domain", default="ball:1", help="ball:R, annulus:a,b or slab:H (default ball:1)")
    common.add_argument("--n", type=int, default=2048, help="mesh nodes (default 2048)")
    common.add_argument("--grading", type=float, default=2.0, dest="grading_power",
                        help="boundary grading power (default 2)")
    common.add_argument("--trace-tol", type=float, default=0.02)
    common.add_argument("--newton-tol", type=float, default=1e-11)
    common.add_argument("--fit-tol", type=float, default=0.02)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="artifact directory (default $HARDYLAB_OUT or ./hardylab-out)")

    parser = argparse.ArgumentParser(prog="hardylab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", parents=[common], help="alpha_pm, q_c, q*")
    p.add_argument("--q", type=float, default=None, help="also classify this exponent")

    p = sub.add_parser("hardy", parents=[common], help="Hardy constant of the domain or of a strip")
    p.add_argument("--rho", type=float, default=None, help="strip width for the local constant")

    p = sub.add_parser("harmonic", parents=[common], help="radial L_mu-harmonic profile")
    p.add_argument("--branch", choices=("alpha_minus", "alpha_plus"), default="alpha_minus")
    p.add_argument("--rho", type=float, default=None)

    p = sub.add_parser("green", parents=[common], help="radial Green function")
    p.add_argument("--source-r", type=float, default=0.0)

    p = sub.add_parser("trace", parents=[common], help="moderate solution with trace c dS")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=None)

    p = sub.add_parser("solve", parents=[common], help="Dirichlet problem in a region, or a zero-trace strip")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--delta-min", type=float, default=0.05)
    p.add_argument("--data", type=_pair, default=(1.0, 1.0), help="boundary values 'a' or 'lo,hi'")
    p.add_argument("--component", default=None)
    p.add_argument("--strip", type=float, default=None, help="inner value of a zero-trace strip problem")
    p.add_argument("--rho", type=float, default=None)

    p = sub.add_parser("maximal", parents=[common], help="maximal (large) solution")
    p.add_argument("--q", type=float, required=True)

    p = sub.add_parser("kernel-lq", parents=[common], help="L^q integrability of the half-space kernel")
    p.add_argument("--q", type=float, required=True)

    p = sub.add_parser("nonunique", parents=[common], help="second zero-trace solution on an annulus")
    p.add_argument("--q", type=float, required=True)

    p = sub.add_parser("verify-all", parents=[common], help="run the claim verification matrix")
    p.add_argument("--quick", action="store_true", help="reduced meshes")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--claims", nargs="*", default=None, help="subset of claim ids")
    return parser


_EXTRA = ("rho", "branch", "source_r", "c", "delta_min", "data", "component", "strip", "quick",
          "workers", "claims")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    out = ns.out or os.environ.get("HARDYLAB_OUT") or "hardylab-out"
    extra = {k: getattr(ns, k) for k in _EXTRA if getattr(ns, k, None) is not None}
    q = getattr(ns, "q", None)
    if q is not None:
        extra["q"] = q
    return RunConfig(command=ns.command, mu=ns.mu, dim=ns.dim, q=q if q is not None else 2.0,
                     domain=ns.domain, n=ns.n, grading_power=ns.grading_power, trace_tol=ns.trace_tol,
                     newton_tol=ns.newton_tol, fit_tol=ns.fit_tol, out=out, seed=ns.seed, extra=extra)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    cfg = config_from_args(ns)
    try:
        return run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hardylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
