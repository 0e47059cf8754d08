"""Command-line entry point: ``lejadisk {leja,interp,converge,bounds,verify}``.

Exit status is 0 when every check of the command passes, 1 when a check
fails and 2 on usage errors (unknown function id, bad degree list).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .functions import REGISTRY
from .geometry import DEFAULT_ANGULAR, DEFAULT_RADIAL
from .leja import canonical_leja

log = logging.getLogger("lejadisk")


def parse_degrees(text: str) -> tuple[int, ...]:
    """``"2,4,8"`` or ``"2-32"`` or a mix such as ``"2-6,13,32"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            lo, hi = int(lo), int(hi)
            if lo > hi:
                raise argparse.ArgumentTypeError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"degrees must be positive integers, got {text!r}")
    return tuple(sorted(set(out)))


def _common(p: argparse.ArgumentParser, degrees_default: str | None) -> None:
    p.add_argument("--d", type=parse_degrees, default=parse_degrees(degrees_default) if degrees_default else None,
                   help="degree(s): comma list and/or ranges, e.g. 2-6,13,32")
    p.add_argument("--f", default="smooth-expcos", help="test function id")
    p.add_argument("--kind", choices=("kergin", "hakopian"), default="kergin")
    p.add_argument("--grid-radial", type=int, default=DEFAULT_RADIAL)
    p.add_argument("--grid-angular", type=int, default=DEFAULT_ANGULAR)
    p.add_argument("--quad-nodes", type=int, default=32, help="Gauss nodes per segment integral")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lejadisk",
                                     description="Kergin and Hakopian interpolation at Leja points of the disk")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("leja", help="write a Leja section as JSON")
    _common(p, "8")

    p = sub.add_parser("interp", help="build one interpolant and write its coefficients")
    _common(p, "8")

    p = sub.add_parser("converge", help="error table over degrees")
    _common(p, ",".join(map(str, ex.DEFAULT_DEGREES)))
    p.add_argument("--timing", action="store_true", help="add a wall_time column")

    p = sub.add_parser("bounds", help="norm bounds and h_st magnitude bounds")
    _common(p, ",".join(map(str, ex.DEFAULT_DEGREES)))
    p.add_argument("--per-pair", action="store_true", help="CSV with one row per pair")

    p = sub.add_parser("verify", help="run the oracle suite")
    _common(p, "6")
    p.add_argument("--perturb", type=float, default=0.0,
                   help="push the last node off the circle by this relative amount (negative control)")
    return parser


def _config(args) -> ex.ExperimentConfig:
    return ex.ExperimentConfig(
        command=args.command, degrees=args.d, function=args.f, kind=args.kind,
        grid_radial=args.grid_radial, grid_angular=args.grid_angular, quad_nodes=args.quad_nodes,
        seed=args.seed, out=args.out, fmt=args.fmt, perturb=getattr(args, "perturb", 0.0),
        timing=getattr(args, "timing", False))


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text)


def cmd_leja(cfg: ex.ExperimentConfig) -> int:
    sections = [canonical_leja(d).to_json() for d in cfg.degrees]
    _write(ex.dumps(sections[0] if len(sections) == 1 else sections) + "\n", cfg.out)
    return 0


def cmd_interp(cfg: ex.ExperimentConfig) -> int:
    results = [ex.run_interp(cfg, d) for d in cfg.degrees]
    _write(ex.dumps(results[0] if len(results) == 1 else results) + "\n", cfg.out)
    return 0


def cmd_converge(cfg: ex.ExperimentConfig) -> int:
    result = ex.run_converge(cfg, progress=log.info)
    if cfg.fmt == "csv":
        _write(ex.records_to_csv(result.records, cfg.timing), cfg.out)
    else:
        _write(ex.dumps(ex.convergence_to_json(result)) + "\n", cfg.out)
    for name, c in result.checks.items():
        log.info("check %s: value %.3e tol %.1e %s", name, c["value"], c["tol"], "pass" if c["pass"] else "FAIL")
    return 0 if result.passed else 1


def cmd_bounds(cfg: ex.ExperimentConfig, per_pair: bool = False) -> int:
    result = ex.run_bounds(cfg, progress=log.info)
    if cfg.fmt == "csv":
        _write(ex.bounds_to_csv(result, per_pair), cfg.out)
    else:
        _write(ex.dumps(ex.bounds_to_json(result)) + "\n", cfg.out)
    return 0 if result.passed else 1


def cmd_verify(cfg: ex.ExperimentConfig) -> int:
    all_checks = {d: ex.run_verify(cfg, d) for d in cfg.degrees}
    ok = all(c.passed for cs in all_checks.values() for c in cs)
    if cfg.fmt == "csv":
        text = "".join(ex.checks_to_csv(d, cs) if i == 0 else ex.checks_to_csv(d, cs).split("\n", 1)[1]
                       for i, (d, cs) in enumerate(all_checks.items()))
    else:
        text = ex.dumps({"config": cfg.to_json(), "passed": ok,
                         "checks": {str(d): [vars(c) for c in cs] for d, cs in all_checks.items()}}) + "\n"
    _write(text, cfg.out)
    for d, cs in all_checks.items():
        for c in cs:
            if not c.passed:
                log.warning("d=%d %s failed: %.3e > %.1e %s", d, c.name, c.value, c.tol, c.detail)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.command in ("interp", "converge") and args.f not in REGISTRY:
        parser.error(f"unknown test function {args.f!r}; known: {', '.join(REGISTRY.names())}")
    cfg = _config(args)
    try:
        if args.command == "leja":
            return cmd_leja(cfg)
        if args.command == "interp":
            return cmd_interp(cfg)
        if args.command == "converge":
            return cmd_converge(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg, args.per_pair)
        return cmd_verify(cfg)
    except ValueError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
