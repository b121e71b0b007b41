"""Command-line entry point and report emission.

Subcommands: ``radius``, ``index``, ``mp``, ``sweep``, ``verify``.
Single computations and suite reports are JSON; sweeps and curves are
CSV.  Every output file gets a sibling ``<name>.manifest.json`` echoing
the configuration; manifests are reproducible except for timestamps.

Exit codes: 0 = all checks passed, 1 = suite violation, 2 = input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .index import (absolute_index_estimate, mp_constant,
                    numerical_index_estimate, poly_index_estimate,
                    rank_r_index_estimate, theoretical_bounds)
from .operators import (HomogeneousPolynomial, Operator, operator_from_json)
from .radius import (BudgetExceeded, absolute_radius, numerical_radius,
                     poly_radius)
from .spaces import SpaceError, parse_descriptor
from .suites import (SuiteReport, bounds_check, duality_check, gcc_check,
                     lcc_check, monotone_sweep, sum_index_check)
from .spaces import lp, tower

DEFAULT_SEED = 20240801

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


class InputError(ValueError):
    pass


def _default_seed() -> int:
    env = os.environ.get("NUMINDEX_SEED")
    return int(env) if env else DEFAULT_SEED


def _threads() -> int:
    env = os.environ.get("NUMINDEX_THREADS")
    return max(int(env), 1) if env else 1


@dataclass
class RunConfig:
    command: str
    space: str | None = None
    matrix: str | None = None
    method: str = "auto"
    budget: int = 64
    resolution: int = 2000
    seed: int = DEFAULT_SEED
    out: str | None = None
    options: dict = field(default_factory=dict)


def _manifest(config: RunConfig, started: float, summary: dict,
              counters: dict | None = None) -> dict:
    return {"artifact_version": __version__,
            "config": asdict(config),
            "started_at": started,
            "ended_at": time.time(),
            "counters": counters or {},
            "summary": summary}


def _write_json(path: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(config: RunConfig, payload: dict, started: float,
          counters: dict | None = None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if config.out:
        _write_json(config.out, payload)
        _write_json(config.out + ".manifest.json",
                    _manifest(config, started, {"output": config.out}, counters))


def _load_space(args) -> "SpaceDescriptor":
    if not args.space:
        raise InputError("missing --space")
    try:
        return parse_descriptor(args.space, field=getattr(args, "field", None))
    except SpaceError as exc:
        raise InputError(f"bad --space: {exc}") from exc


def _load_operator(args, desc) -> Operator:
    if not args.matrix:
        raise InputError("missing --matrix")
    try:
        with open(args.matrix) as fh:
            return operator_from_json(fh.read(), descriptor=desc)
    except FileNotFoundError as exc:
        raise InputError(f"matrix file not found: {args.matrix}") from exc
    except (ValueError, KeyError) as exc:
        raise InputError(f"bad --matrix file {args.matrix}: {exc}") from exc


def cmd_radius(args) -> int:
    started = time.time()
    desc = _load_space(args)
    config = RunConfig("radius", args.space, args.matrix, args.method,
                       args.budget, args.resolution, args.seed, args.out,
                       {"absolute": args.absolute, "poly_k": args.poly_k})
    if args.poly_k:
        d = desc.total_dim
        with open(args.matrix) as fh:
            obj = json.load(fh)
        flat = np.array(obj["matrix"], dtype=float)
        k = args.poly_k
        if flat.size != d ** (k + 1):
            raise InputError(f"tensor needs {d ** (k + 1)} entries for degree {k}")
        P = HomogeneousPolynomial(k, flat.reshape((d,) * (k + 1)), desc)
        est = poly_radius(P, budget=args.budget, rng=args.seed,
                          method="grid" if args.method == "grid" else "ascent",
                          resolution=args.resolution)
    else:
        T = _load_operator(args, desc)
        try:
            if args.absolute:
                est = absolute_radius(T, budget=args.budget, rng=args.seed,
                                      method=args.method if args.method != "auto" else "ascent",
                                      resolution=args.resolution)
            else:
                est = numerical_radius(T, method=args.method, budget=args.budget,
                                       rng=args.seed, resolution=args.resolution)
        except BudgetExceeded as exc:
            raise InputError(str(exc)) from exc
    payload = {"command": "radius",
               "space": args.space,
               "value": est.value,
               "method": est.method,
               "guarantee": est.guarantee,
               "witness": {"x": _num_list(est.witness.x),
                           "xstar": _num_list(est.witness.xstar),
                           "slack": est.witness.slack},
               "seed": args.seed}
    _emit(config, payload, started, {"evals": est.evals})
    return EXIT_OK


def _num_list(arr):
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        return [[float(z.real), float(z.imag)] for z in arr]
    return [float(v) for v in arr]


def cmd_index(args) -> int:
    started = time.time()
    desc = _load_space(args)
    config = RunConfig("index", args.space, None, "minmax", args.budget,
                       0, args.seed, args.out,
                       {"rank": args.rank, "absolute": args.absolute,
                        "poly_k": args.poly_k})
    if args.absolute:
        est = absolute_index_estimate(desc, budget=args.budget, rng=args.seed)
    elif args.rank:
        est = rank_r_index_estimate(desc, args.rank, budget=args.budget,
                                    rng=args.seed)
    elif args.poly_k and args.poly_k > 1:
        est = poly_index_estimate(desc, args.poly_k, budget=args.budget,
                                  rng=args.seed)
    else:
        est = numerical_index_estimate(desc, budget=args.budget, rng=args.seed)
    bounds = theoretical_bounds(desc)
    payload = {"command": "index",
               "space": args.space,
               "upper_bound_best_found": est.upper_bound,
               "radius_method": est.radius_method,
               "restarts_used": est.restarts_used,
               "theoretical_bounds": {"lower": bounds.lower,
                                      "lower_tag": bounds.lower_tag,
                                      "upper": bounds.upper,
                                      "upper_tag": bounds.upper_tag,
                                      "note": bounds.note},
               "closed_form_target": est.target,
               "seed": args.seed}
    _emit(config, payload, started, {"ratio_evals": est.restarts_used})
    return EXIT_OK


def cmd_mp(args) -> int:
    started = time.time()
    if args.p < 1 or args.p == math.inf:
        raise InputError("--p must be a finite number >= 1")
    config = RunConfig("mp", None, None, "scan", 0, 0, args.seed, args.out,
                       {"p": args.p, "emit_curve": args.emit_curve})
    res = mp_constant(args.p)
    payload = {"command": "mp", "p": res.p, "value": res.value,
               "argmax_t": res.argmax_t}
    if args.emit_curve:
        ts = np.linspace(0.0, 1.0, 1001)
        with np.errstate(invalid="ignore"):
            vals = np.nan_to_num(np.abs(ts ** (args.p - 1.0) - ts) /
                                 (1.0 + ts ** args.p), nan=res.value)
        with open(args.emit_curve, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, v in zip(ts, vals):
                w.writerow([f"{t:.6f}", f"{v:.12f}"])
            w.writerow(["max", f"{res.value:.12f}"])
        _write_json(args.emit_curve + ".manifest.json",
                    _manifest(config, started, {"output": args.emit_curve}))
    _emit(config, payload, started)
    return EXIT_OK


def _parse_range(text: str) -> list[float]:
    """``a..b`` (step 1) or ``a..b:step``."""
    try:
        if ".." not in text:
            return [float(text)]
        lo, rest = text.split("..", 1)
        step = 1.0
        if ":" in rest:
            hi, step_s = rest.split(":", 1)
            step = float(step_s)
        else:
            hi = rest
        lo, hi = float(lo), float(hi)
        if step <= 0 or hi < lo:
            raise ValueError
        out = []
        v = lo
        while v <= hi + 1e-12:
            out.append(round(v, 12))
            v += step
        return out
    except ValueError as exc:
        raise InputError(f"bad range {text!r}") from exc


def cmd_sweep(args) -> int:
    started = time.time()
    config = RunConfig("sweep", None, None, "minmax", args.budget, 0,
                       args.seed, args.out,
                       {"family": args.family, "p": args.p, "m": args.m})
    rows = []
    if args.family == "lpm":
        ps = _parse_range(args.p)
        ms = [int(m) for m in _parse_range(args.m or "2..4")]
        if not ps or not ms:
            raise InputError("empty sweep range")
        for p in ps:
            report = monotone_sweep(p, ms, budget=args.budget, seed=args.seed)
            mp = mp_constant(p) if p != math.inf else None
            for (m, val) in report.extra["trajectory"]:
                rows.append({"p": p, "m": m, "index_upper_bound": f"{val:.9f}",
                             "mp": f"{mp.value:.9f}" if mp else ""})
    elif args.family == "lp2-curve":
        ps = _parse_range(args.p)
        if not ps:
            raise InputError("empty sweep range")
        for k, p in enumerate(ps):
            est = numerical_index_estimate(lp(p, 2), budget=args.budget,
                                           rng=args.seed + k)
            mp = mp_constant(p)
            rows.append({"p": p, "m": 2,
                         "index_upper_bound": f"{est.upper_bound:.9f}",
                         "mp": f"{mp.value:.9f}"})
    else:
        raise InputError(f"unknown sweep family {args.family!r}")
    out = args.out or "sweep.csv"
    with open(out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["p", "m", "index_upper_bound", "mp"])
        w.writeheader()
        w.writerows(rows)
    _write_json(out + ".manifest.json",
                _manifest(config, started, {"rows": len(rows), "output": out}))
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


VERIFY_SUITES = ("lcc", "gcc", "sums", "duality", "bounds")


def _run_suite(name: str, args) -> SuiteReport:
    seed = args.seed
    cases = args.cases
    budget = args.budget
    threads = _threads()
    if name == "lcc":
        tw = tower([3.0, 3.0])
        return lcc_check(tw, m=1, j=1, cases=cases, seed=seed,
                         budget=budget, threads=threads)
    if name == "gcc":
        space = lp(1.5, 3)
        return gcc_check(space, subset=(0, 1), cases=cases, seed=seed,
                         budget=budget, threads=threads)
    if name == "sums":
        from .spaces import scalar
        return sum_index_check([scalar(), scalar()], mode="linf",
                               budget=max(budget, 60), seed=seed)
    if name == "duality":
        desc = parse_descriptor(args.space) if args.space else lp(3, 2)
        return duality_check(desc, cases=cases, budget=budget, seed=seed,
                             index_budget=max(budget, 60), threads=threads)
    if name == "bounds":
        return bounds_check([1.5, 3.0], [2], budget=max(budget, 100), seed=seed)
    raise InputError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    started = time.time()
    names = VERIFY_SUITES if args.suite == "all" else (args.suite,)
    for n in names:
        if n not in VERIFY_SUITES:
            raise InputError(f"unknown suite {n!r}; choose from "
                             f"{', '.join(VERIFY_SUITES + ('all',))}")
    config = RunConfig("verify", args.space, None, "suite", args.budget, 0,
                       args.seed, args.out, {"suite": args.suite,
                                             "cases": args.cases})
    outdir = args.out or "reports"
    os.makedirs(outdir, exist_ok=True)
    all_passed = True
    for name in names:
        report = _run_suite(name, args)
        path = os.path.join(outdir, f"{name}.json")
        _write_json(path, report.to_dict())
        _write_json(path + ".manifest.json",
                    _manifest(config, started,
                              {"suite": name, "passed": report.passed,
                               "max_violation": report.max_violation}))
        status = "pass" if report.passed else "FAIL"
        print(f"{name}: {status} (max violation {report.max_violation:.3e}, "
              f"tolerance {report.tolerance:.0e})")
        all_passed = all_passed and report.passed
    return EXIT_OK if all_passed else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="numindex",
        description="Numerical radii and numerical-index estimates on "
                    "finite-dimensional p-sum Banach spaces.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, budget=64):
        sp.add_argument("--seed", type=int, default=_default_seed(),
                        help="root seed (env NUMINDEX_SEED overrides the default)")
        sp.add_argument("--budget", type=int, default=budget,
                        help="restart / evaluation budget")
        sp.add_argument("--out", help="output file (JSON) or directory (verify)")

    sp = sub.add_parser("radius", help="numerical radius of one operator")
    sp.add_argument("--space", required=True, help="descriptor text, e.g. lp(p=2,dim=2)")
    sp.add_argument("--matrix", required=True, help="operator JSON file")
    sp.add_argument("--field", choices=["real", "complex"])
    sp.add_argument("--method", default="auto",
                    choices=["auto", "ascent", "enumerate", "grid"])
    sp.add_argument("--resolution", type=int, default=2000)
    sp.add_argument("--absolute", action="store_true",
                    help="absolute numerical radius instead of nu")
    sp.add_argument("--poly-k", type=int, default=0,
                    help="treat the matrix file as a degree-k tensor")
    common(sp)
    sp.set_defaults(fn=cmd_radius)

    sp = sub.add_parser("index", help="numerical-index upper bound")
    sp.add_argument("--space", required=True)
    sp.add_argument("--field", choices=["real", "complex"])
    sp.add_argument("--rank", type=int, default=0, help="rank-r index")
    sp.add_argument("--absolute", action="store_true", help="absolute index")
    sp.add_argument("--poly-k", type=int, default=0, help="polynomial index of order k")
    common(sp, budget=200)
    sp.set_defaults(fn=cmd_index)

    sp = sub.add_parser("mp", help="the constant M_p")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--emit-curve", help="write the (t, value) curve as CSV")
    common(sp)
    sp.set_defaults(fn=cmd_mp)

    sp = sub.add_parser("sweep", help="index sweeps over (p, m) grids")
    sp.add_argument("--family", required=True, choices=["lpm", "lp2-curve"])
    sp.add_argument("--p", required=True, help="value or range a..b[:step]")
    sp.add_argument("--m", help="integer range a..b for family lpm")
    common(sp, budget=120)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", required=True,
                    help="lcc|gcc|sums|duality|bounds|all")
    sp.add_argument("--space", help="descriptor for the duality suite")
    sp.add_argument("--cases", type=int, default=20)
    common(sp, budget=24)
    sp.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags already
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (InputError, SpaceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
