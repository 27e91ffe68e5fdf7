"""``bench`` command line interface.

Subcommands:

* ``bench run <config.yaml> [--jobs N] [--output-dir PATH]``
* ``bench summarize <result-dir>``
* ``bench generate-config --preset overfit-prone [--output-dir PATH]``

Exit codes: 0 full success, 2 when some runs failed but the experiment
completed, 1 on config or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .bench import (
    load_config,
    preset_config_text,
    run_experiment,
    summarize_result_dir,
)
from .exceptions import ConfigError, NoSuccessfulRunsError, PseudoSelectError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Pseudo-label selection benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="run an experiment config")
    run_cmd.add_argument("config", help="path to a YAML experiment config")
    run_cmd.add_argument("--jobs", type=int, default=1, help="worker pool size")
    run_cmd.add_argument("--output-dir", default=None, help="override config output_dir")

    sum_cmd = sub.add_parser("summarize", help="recompute summary.csv for a result dir")
    sum_cmd.add_argument("result_dir", help="directory containing results.csv")

    gen_cmd = sub.add_parser("generate-config", help="emit a preset config")
    gen_cmd.add_argument("--preset", required=True, help="preset name, e.g. overfit-prone")
    gen_cmd.add_argument(
        "--output-dir",
        default=None,
        help="write <preset>.yaml into this directory instead of stdout",
    )
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output_dir is not None:
        config = replace(config, output_dir=args.output_dir)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    result = run_experiment(config, jobs=args.jobs)
    failed = [r for r in result.runs if r.status != "ok"]
    print(f"{len(result.runs) - len(failed)}/{len(result.runs)} runs ok; "
          f"outputs in {result.output_dir}")
    for record in failed:
        print(f"  failed: {record.criterion} seed {record.seed}: {record.error}",
              file=sys.stderr)
    return 2 if failed else 0


def _cmd_summarize(args) -> int:
    summaries = summarize_result_dir(args.result_dir)
    header = f"{'criterion':<28}{'mean':>14}{'sd':>14}{'vs confidence':>16}{'n':>5}"
    print(header)
    for s in summaries:
        paired = "" if s.mean_paired_diff_vs_confidence is None else (
            f"{s.mean_paired_diff_vs_confidence:+.6f}"
        )
        sd_text = f"{s.sd:.6f}" + ("*" if s.sd_degenerate else "")
        print(f"{s.criterion:<28}{s.mean:>14.6f}{sd_text:>14}{paired:>16}{s.n_runs:>5}")
    if any(s.sd_degenerate for s in summaries):
        print("(* single run: sd degenerate, reported as 0)")
    return 0


def _cmd_generate_config(args) -> int:
    text = preset_config_text(args.preset)
    if args.output_dir is None:
        sys.stdout.write(text)
    else:
        out_dir = Path(args.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        target = out_dir / f"{args.preset}.yaml"
        target.write_text(text)
        print(str(target))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
        return _cmd_generate_config(args)
    except (ConfigError, NoSuccessfulRunsError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except PseudoSelectError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
