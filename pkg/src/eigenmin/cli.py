"""Command-line entry point: ``eigenmin verify|fiber|appendix|all``.

Exit codes: 0 when every gated check passes, 1 when one fails, 2 for an
invalid configuration or a refused overwrite.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .config import DEFAULT_TOLERANCES, RunConfig
from .errors import ConstraintError
from .verification import Report, appendix_into, fiber_into, verify_into

log = logging.getLogger("eigenmin")

ALL_GRID = {"SUSO": (2, 3, 4), "SPU": (1, 2, 3), "SOU": (2, 3, 4), "SUSP": (2, 3)}


class UsageError(Exception):
    pass


def _parse_tolerances(extra: list[str]) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    it = iter(extra)
    for tok in it:
        if not tok.startswith("--tol."):
            raise UsageError(f"unrecognized argument {tok!r}")
        name, _, value = tok[len("--tol."):].partition("=")
        if not value:
            value = next(it, None)
            if value is None:
                raise UsageError(f"{tok} needs a value")
        if name not in DEFAULT_TOLERANCES:
            raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
        try:
            tols[name] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {name} must be a number, got {value!r}") from None
    return tols


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--out", help="write the JSON report here (default: stdout)")
    common.add_argument("--csv", help="also write the checks table as CSV")
    common.add_argument("--force", action="store_true", help="overwrite existing output files")
    common.add_argument("-v", "--verbose", action="store_true")

    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--space", type=str.lower, choices=["suso", "spu", "sou", "susp"])
    space.add_argument("--n", type=int)
    space.add_argument("--backend", choices=["exact", "fd"], default="exact")
    space.add_argument("--params", help="JSON parameter file {space, n, a_re, a_im, b_re, b_im}")

    parser = argparse.ArgumentParser(
        prog="eigenmin",
        description="Numerical certification of minimal fibres of eigenfunctions on "
        "SU(n)/SO(n), Sp(n)/U(n), SO(2n)/U(n) and SU(2n)/Sp(n).",
        epilog="Tolerances are overridden with --tol.NAME VALUE; names: " + ", ".join(DEFAULT_TOLERANCES),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common, space], help="eigenvalue, invariance and backend checks")
    fiber = sub.add_parser("fiber", parents=[common, space], help="zero fibre, regularity, minimality")
    fiber.add_argument("--points", help="write sampled fibre points as a JSON array")
    app = sub.add_parser("appendix", parents=[common], help="determinant identities of the SO(2n)/U(n) system")
    app.add_argument("--nmax", type=int, default=6)
    every = sub.add_parser("all", parents=[common, space], help="verify + fiber over the grid, then appendix")
    every.add_argument("--nmax", type=int, default=6)
    return parser


def _config(args, tols, default_samples) -> RunConfig:
    if args.space is None or args.n is None:
        raise UsageError("--space and --n are required")
    return RunConfig(
        space=args.space,
        n=args.n,
        seed=args.seed,
        samples=args.samples if args.samples is not None else default_samples,
        tolerances=tols,
        backend=args.backend,
        output_path=args.out,
        params_path=args.params,
    ).validate()


def _claim(path: str | None, force: bool):
    if path and Path(path).exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")


def _merge(parent: Report, child: Report, label: str):
    d = child.to_dict()
    for c in d["checks"]:
        parent.data["checks"].append(dict(c, name=f"{label}/{c['name']}"))
    for k, v in d["wall_time"].items():
        parent.wall_time[f"{label}/{k}"] = v
    parent.data.setdefault("runs", []).append({k: v for k, v in d.items() if k not in ("wall_time",)} | {"label": label})


def run(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        tols = _parse_tolerances(extra)
        for path in (args.out, args.csv, getattr(args, "points", None)):
            _claim(path, args.force)
        report = _dispatch(args, tols)
    except (UsageError, ConstraintError) as exc:
        print(f"eigenmin: error: {exc}", file=sys.stderr)
        return 2

    data = report.to_dict()
    text = json.dumps(data, indent=2, sort_keys=True, default=_json_default)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "residual", "tolerance", "pass", "gated"])
            for c in data["checks"]:
                w.writerow([c["name"], c["residual"], c["tolerance"], c["pass"], c["gated"]])
    for c in data["checks"]:
        status = "PASS" if c["pass"] else ("FAIL" if c["gated"] else "info")
        log.info("%-5s %s residual=%s tol=%s", status, c["name"], c["residual"], c["tolerance"])
    return 0 if data["pass"] else 1


def _dispatch(args, tols) -> Report:
    if args.command == "appendix":
        report = Report("appendix", {"seed": args.seed, "nmax": args.nmax, "samples": args.samples or 50})
        appendix_into(report, args.nmax, args.seed, args.samples or 50, tols["appendix_rel"])
        return report

    if args.command == "verify":
        cfg = _config(args, tols, 20)
        report = Report("verify", cfg.echo())
        verify_into(report, cfg)
        return report

    if args.command == "fiber":
        cfg = _config(args, tols, 20)
        report = Report("fiber", cfg.echo())
        points = [] if args.points else None
        fiber_into(report, cfg, points_out=points)
        if args.points:
            Path(args.points).write_text(json.dumps([fp.to_json() for fp in points]) + "\n")
        return report

    # all
    if args.nmax < 2:
        raise UsageError(f"--nmax must be at least 2, got {args.nmax}")
    if args.space is not None:
        if args.n is None:
            raise UsageError("--n is required with --space")
        grid = [(args.space.upper(), args.n)]
    else:
        grid = [(s, n) for s, ns in ALL_GRID.items() for n in ns]
    report = Report("all", {"seed": args.seed, "samples": args.samples, "nmax": args.nmax, "grid": grid})
    for sid, n in grid:
        args.space, args.n = sid, n
        cfg = _config(args, tols, 20)
        for cmd, fn in (("verify", verify_into), ("fiber", fiber_into)):
            child = Report(cmd, cfg.echo())
            fn(child, cfg)
            _merge(report, child, f"{sid}({n})/{cmd}")
    child = Report("appendix")
    appendix_into(child, args.nmax, args.seed, args.samples or 50, tols["appendix_rel"])
    _merge(report, child, "appendix")
    return report


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
