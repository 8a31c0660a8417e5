"""Command-line entry point.

Exit codes: 0 success, 1 config error, 2 I/O error, 3 oracle verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .harness import ExperimentConfig, ExperimentIOError, compare_sr, load_config, run_experiment, verify_oracle
from .metrics import BatchError
from .params import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ORACLE = 0, 1, 2, 3


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evoc", description="Self-regulated creativity in a cultural-evolution lattice model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON experiment config (defaults apply when omitted)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=_non_negative, help="base seed")
        p.add_argument("--replicates", type=_positive)
        p.add_argument("--iterations", type=_non_negative)
        p.add_argument("--chaining", type=_on_off, metavar="on|off")
        p.add_argument("--jobs", type=_positive, help="worker processes (default: all CPUs)")
        p.add_argument("--charts", action="store_true", help="also write SVG line charts")

    run_p = sub.add_parser("run", help="run every configured variant and write aggregates")
    add_common(run_p)
    run_p.add_argument("--sr", type=_on_off, metavar="on|off", help="force self-regulation in every variant")

    cmp_p = sub.add_parser("compare", help="compare the sr_on and sr_off variants")
    add_common(cmp_p)

    sub.add_parser("oracle", help="exhaustively check the single-action fitness optima")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.with_overrides(
        seed=args.seed,
        iterations=args.iterations,
        chaining_enabled=args.chaining,
        sr_enabled=getattr(args, "sr", None),
        replicates=args.replicates,
        jobs=args.jobs,
        output_dir=args.out,
    )


def _cmd_run(args) -> int:
    cfg = _resolve_config(args)
    results = run_experiment(cfg, charts=args.charts)
    for name, res in results.items():
        final = res.aggregate
        print(
            f"{name}: {final.replicates} replicates, final mean fitness "
            f"{final.mean['mean_fitness'][-1]:.4f}, diversity {final.mean['diversity'][-1]:.1f}"
        )
    print(f"wrote {cfg.output_dir}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _resolve_config(args)
    report = compare_sr(cfg, charts=args.charts)
    lo, hi = report.final_difference_ci
    print(f"final mean-fitness difference (sr_on - sr_off): {report.final_difference:.4f} [95% CI {lo:.4f}, {hi:.4f}]")
    print(f"diversity peak sr_on:  iteration {report.diversity_peak_sr_on[0]} ({report.diversity_peak_sr_on[1]:.1f})")
    print(f"diversity peak sr_off: iteration {report.diversity_peak_sr_off[0]} ({report.diversity_peak_sr_off[1]:.1f})")
    print(
        f"sr_on final imitators {report.final_frac_imitators_sr_on:.3f}, "
        f"creators {report.final_frac_creators_sr_on:.3f}"
    )
    print(f"wrote {cfg.output_dir / 'comparison.json'}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    report = verify_oracle()
    print(json.dumps(report.rules, indent=2))
    if not report.ok:
        print("oracle check FAILED: prose rule must give max 10 with 8 head-neutral optima", file=sys.stderr)
        return EXIT_ORACLE
    print("oracle check passed")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"run": _cmd_run, "compare": _cmd_compare, "oracle": _cmd_oracle}
    try:
        return handlers[args.command](args)
    except (ConfigError, BatchError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
