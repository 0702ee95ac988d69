"""Command-line interface: run experiments, emit tables and a run manifest.

Exit codes: 0 success, 2 configuration error, 3 every sweep point
infeasible, 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__
from .allocation import InfeasibleRateError
from .beamformer import InfeasibleGainError
from .config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    preset_description,
    preset_names,
    preset_path,
)
from .experiments import ExperimentResult, run_experiment

OUTPUT_DIR_ENV = "MMWNOMA_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _write_csv(path: Path, result: ExperimentResult) -> None:
    # '.' decimal and '\n' line ends regardless of locale; floats use
    # shortest round-trip formatting so reruns are byte-identical
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        writer.writerows(result.rows)


def _write_json(path: Path, result: ExperimentResult) -> None:
    payload = {"columns": result.columns, "rows": result.rows}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(path: Path, cfg: ExperimentConfig, outputs: list[str]) -> None:
    payload = {
        "tool": "mmwnoma",
        "version": __version__,
        "experiment": cfg.experiment,
        "config": cfg.to_dict(),
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_outputs(cfg: ExperimentConfig, result: ExperimentResult, out_dir: Path) -> list[Path]:
    """Write the results table and manifest; returns the written paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    table = out_dir / f"{cfg.experiment}.{cfg.format}"
    if cfg.format == "csv":
        _write_csv(table, result)
    else:
        _write_json(table, result)
    manifest = out_dir / "manifest.json"
    _write_manifest(manifest, cfg, [table.name])
    return [table, manifest]


def _cmd_run(args) -> int:
    overrides = {"seed": args.seed, "output": args.out, "format": args.format}
    try:
        if args.preset:
            config_path = preset_path(args.preset)
        else:
            config_path = Path(args.config)
        cfg = load_config(config_path, overrides)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out or os.environ.get(OUTPUT_DIR_ENV) or cfg.output)
    try:
        result = run_experiment(cfg, workers=args.threads)
    except (InfeasibleRateError, InfeasibleGainError) as exc:
        print(f"infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if result.feasible_points == 0:
        print("infeasible configuration: no sweep point is feasible", file=sys.stderr)
        return EXIT_INFEASIBLE

    try:
        paths = write_outputs(cfg, result, out_dir)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(p)
    if result.feasible_points < result.total_points:
        print(
            f"note: {result.total_points - result.feasible_points} of "
            f"{result.total_points} sweep points infeasible (rows carry nan)",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_presets(args) -> int:
    if args.presets_command == "list":
        for name in preset_names():
            desc = preset_description(name)
            print(f"{name:8s} {desc}")
        return EXIT_OK
    print("usage: mmwnoma presets list", file=sys.stderr)
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwnoma",
        description=(
            "Joint power control and constant-modulus analog beamforming "
            "simulator for a 2-user uplink mmWave NOMA cell"
        ),
    )
    parser.add_argument("--version", action="version", version=f"mmwnoma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file or preset")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a TOML experiment config")
    src.add_argument("--preset", help="name of a shipped preset (see `presets list`)")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument(
        "--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} or config value)"
    )
    run_p.add_argument("--format", choices=("csv", "json"), help="output format override")
    run_p.add_argument(
        "--threads", type=int, default=1, help="worker processes for Monte Carlo trials"
    )
    run_p.set_defaults(func=_cmd_run)

    presets_p = sub.add_parser("presets", help="inspect shipped experiment presets")
    presets_p.add_argument("presets_command", choices=("list",))
    presets_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
