#!/usr/bin/env python3
"""Compiled kernels against the pure-Python fallback.

Times the tridiagonal solve and the monotone sweep of both backends on the
same data, checks that they agree, and runs one end-to-end moderate-solution
solve per backend in a subprocess (``HARDYLAB_PURE_PYTHON=1`` selects the
fallback at import).

Usage:
  python3 benchmarks/bench_kernels.py [--n 4096] [--repeat 5]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from hardylab import _kernels_py
from hardylab.geometry import RadialDomain
from hardylab.nonlinear import Region, _System
from hardylab.operator import DiscreteOperator

try:
    from hardylab import _kernels
except ImportError:
    _kernels = None

END_TO_END = (
    "import time;"
    "from hardylab import _core;"
    "from hardylab.geometry import RadialDomain;"
    "from hardylab.nonlinear import NonlinearProblem, solve_with_trace;"
    "t = time.perf_counter();"
    "rep = solve_with_trace(NonlinearProblem(RadialDomain.ball(1.0, 3), 0.0, 1.5, trace_mass=1.0), n={n});"
    "print(_core.BACKEND, time.perf_counter() - t, rep.trace.extrapolated_limit)"
)


def _system(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    sub = -rng.uniform(0.5, 1.0, n - 1)
    sup = sub.copy()
    diag = np.zeros(n)
    diag[:-1] -= sub
    diag[1:] -= sup
    diag += rng.uniform(0.01, 0.1, n)
    return sub, diag, sup


def bench_solve(mod, n: int, repeat: int) -> float:
    sub, diag, sup = _system(n)
    rhs = np.ones(n)
    return min(timeit.repeat(lambda: mod.tridiag_solve(sub, diag, sup, rhs), number=10, repeat=repeat)) / 10


def bench_monotone(mod, n: int, repeat: int):
    """Sweep from the constant supersolution to the solution of an interior Dirichlet problem."""
    dom = RadialDomain.ball(1.0, 3)
    grid = Region(0.05).grid(dom, n, 2.0)
    system = _System.build(DiscreteOperator(grid, 0.1), 2.0, 1.0, 1.0)
    lam = 1.1 * 2.0 * 2.0
    args = (system.sub, system.diag, system.sup, system.vol, system.bc, lam, 2.0,
            np.full(grid.n, 2.0), np.zeros(grid.n), 1e-12, 1_000_000, 1e-9)
    t = min(timeit.repeat(lambda: mod.monotone_iterate(*args), number=1, repeat=repeat))
    return t, mod.monotone_iterate(*args)


def end_to_end(n: int, pure: bool) -> dict:
    env = dict(os.environ)
    env.pop("HARDYLAB_PURE_PYTHON", None)
    if pure:
        env["HARDYLAB_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env, check=True,
                         capture_output=True, text=True).stdout.split()
    return {"backend": out[0], "seconds": float(out[1]), "trace": float(out[2])}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        sys.exit("compiled extension not built; run: python3 setup.py build_ext --inplace")

    res = {"n": args.n}
    for name, mod in (("cython", _kernels), ("python", _kernels_py)):
        t_mono, out = bench_monotone(mod, args.n, args.repeat)
        res[name] = {"tridiag_solve_s": bench_solve(mod, args.n, args.repeat),
                     "monotone_s": t_mono, "monotone_iterations": out[1]}
        res[name + "_solution"] = out[0]
    diff = float(np.max(np.abs(res.pop("cython_solution") - res.pop("python_solution"))))
    res["monotone_max_difference"] = diff
    for key in ("tridiag_solve_s", "monotone_s"):
        res["speedup_" + key[:-2]] = res["python"][key] / res["cython"][key]
    res["end_to_end"] = [end_to_end(args.n, pure) for pure in (False, True)]
    res["speedup_end_to_end"] = res["end_to_end"][1]["seconds"] / res["end_to_end"][0]["seconds"]
    print(json.dumps(res, indent=2))


if __name__ == "__main__":
    main()
