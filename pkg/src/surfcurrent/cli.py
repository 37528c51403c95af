"""Command line entry point: trace, sweep, fock-table, validate."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fock
from .errors import ConfigError, ConvergenceError, DomainError, FitError
from .harness import dump_psi_table, load_config, run_sweep, run_trace, validate, with_overrides


def _write(text: str, out: str | None) -> None:
    if out in (None, "-", "stdout"):
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head)
            sys.stdout = open("/dev/null", "w")
    else:
        Path(out).write_text(text)


def _log(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", default="stdout", help="output path, or stdout")
    common.add_argument("--quiet", action="store_true", help="no progress messages on stderr")

    p = argparse.ArgumentParser(prog="surfcurrent", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace", parents=[common], help="current traces on the boundary")
    t.add_argument("--kinds", help="comma-separated current kinds")
    t.add_argument("--k", type=float, help="wavenumber (overrides config)")

    sub.add_parser("sweep", parents=[common], help="k-sweep scaling study")

    f = sub.add_parser("fock-table", parents=[common], help="table of Psi and its first two derivatives")
    f.add_argument("--tau-min", type=float, default=-10.0)
    f.add_argument("--tau-max", type=float, default=20.0)
    f.add_argument("--step", type=float, default=0.5)

    v = sub.add_parser("validate", parents=[common], help="run the property checks")
    v.add_argument("--k", type=float, help="wavenumber (overrides config)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        kinds = getattr(args, "kinds", None)
        cfg = with_overrides(
            cfg,
            k=getattr(args, "k", None),
            kinds=[s.strip() for s in kinds.split(",") if s.strip()] if kinds else None,
        )
        if args.command == "trace":
            _log(args, f"trace: {cfg.samples} samples, k = {cfg.k:g}, kinds {','.join(cfg.kinds)}")
            _write(run_trace(cfg).to_csv(), args.out)
        elif args.command == "sweep":
            _log(args, f"sweep: k in {list(cfg.k_list)}")
            _write(run_sweep(cfg).to_csv(), args.out)
        elif args.command == "fock-table":
            table = dump_psi_table(args.tau_min, args.tau_max, args.step, cfg.tau_switch)
            _write(table.to_csv(), args.out)
        else:
            results, report = validate(cfg)
            _write(report, args.out)
            return 0 if all(r.passed for r in results) else 1
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, FitError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
