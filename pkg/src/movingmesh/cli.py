"""Command-line entry point.

Subcommands: run, compare, convergence, list-presets.  Exit codes:
0 success, 2 configuration error, 3 numerical failure (CFL violation,
dry state, node crossing, solver breakdown).
"""

from __future__ import annotations

import argparse
import sys

from . import backend
from .config import (PRESET_ALIASES, PRESET_DESCRIPTIONS, PRESETS,
                     load_preset, resolve)
from .errors import ConfigError, MovingMeshError
from .harness import (compare, convergence, run, write_comparison,
                      write_convergence, write_report)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="movingmesh",
        description="Conservative TVD predictor-corrector schemes on "
                    "adaptively moving 1D grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--frames", type=int, default=None,
                       help="number of output snapshots (default 11)")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; echoed into the summary, unused "
                            "by the numerics")
        p.add_argument("--quiet", action="store_true",
                       help="suppress console output")

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("source", help="preset name or config file")
    p_run.add_argument("--mode", choices=("fixed", "moving"), default=None,
                       help="override the grid mode")
    add_common(p_run)

    p_cmp = sub.add_parser("compare",
                           help="run fixed and moving grids side by side")
    p_cmp.add_argument("source", help="preset name or config file")
    add_common(p_cmp)

    p_conv = sub.add_parser("convergence", help="grid-doubling error study")
    p_conv.add_argument("source", help="preset name or config file")
    p_conv.add_argument("--levels", type=int, default=3,
                        help="number of refinement levels (default 3)")
    add_common(p_conv)

    sub.add_parser("list-presets", help="show the built-in experiment presets")
    return parser


def _apply_overrides(cfg, args):
    if getattr(args, "frames", None) is not None:
        from dataclasses import replace
        cfg = replace(cfg, frames=args.frames)
    if getattr(args, "mode", None) is not None:
        cfg = cfg.with_mode(args.mode)
    return cfg


def _list_presets() -> None:
    alias_of = {}
    for alias, target in PRESET_ALIASES.items():
        alias_of.setdefault(target, []).append(alias)
    for name in PRESETS:
        cfg = load_preset(name)
        aliases = ", ".join(sorted(alias_of.get(name, [])))
        alias_txt = f" (alias: {aliases})" if aliases else ""
        print(f"{name}{alias_txt}")
        print(f"    {PRESET_DESCRIPTIONS[name]}")
        print(f"    kind={cfg.kind} N={cfg.n_cells} CFL={cfg.cfl} "
              f"T={cfg.final_time} monitor={cfg.monitor.kind}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    quiet = getattr(args, "quiet", False)

    if args.command == "list-presets":
        _list_presets()
        return EXIT_OK

    try:
        cfg = resolve(args.source)
        cfg = _apply_overrides(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "run":
            report = run(cfg)
            extra = {"seed": args.seed} if args.seed is not None else None
            write_report(report, args.out, extra=extra)
            if not quiet:
                print(f"{cfg.name} [{cfg.mode}] finished: {report.steps} steps, "
                      f"CFL max {report.cfl_max:.3f}, backend {backend.BACKEND}, "
                      f"{report.wall_time:.2f}s")
                if report.error_l1 is not None:
                    print(f"errors vs exact ({report.error_field}): "
                          f"L1 = {report.error_l1:.6e}, "
                          f"Linf = {report.error_linf:.6e}")
                print(f"wrote {args.out}/profiles.csv, trajectory.csv, "
                      f"summary.json")
        elif args.command == "compare":
            rep = compare(cfg)
            write_comparison(rep, args.out)
            if not quiet:
                for label, r in (("moving", rep.moving), ("fixed", rep.fixed)):
                    line = f"{cfg.name} [{label}]: {r.steps} steps"
                    if r.error_l1 is not None:
                        line += (f", L1 = {r.error_l1:.6e}, "
                                 f"Linf = {r.error_linf:.6e}")
                    print(line)
        else:
            rows = convergence(cfg, args.levels)
            write_convergence(rows, args.out)
            if not quiet:
                for row in rows:
                    order = "-" if row["order"] is None else f"{row['order']:.3f}"
                    print(f"N = {row['n_cells']:6d}  L1 = {row['l1']:.6e}  "
                          f"order = {order}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MovingMeshError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
