"""Command line entry point: ``casoratian run <config.json>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .config import load_config, parse_config
from .errors import ConfigError
from .experiments import RunResult, fit_to_json, render, run_experiment
from .numeric import MODES


def report_json(result: RunResult) -> str:
    body = {
        "config_echo": result.config_echo,
        "checks": [c.to_json() for c in result.checks],
        "fits": [fit_to_json(f) for f in result.fits],
        "status": "PASS" if result.passed else "FAIL",
    }
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def report_csv(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.csv_header)
    for row in result.csv_rows:
        writer.writerow(render(row))
    return buf.getvalue()


def emit_report(result: RunResult, out_dir: str | Path, report_name: str, csv_name: str) -> tuple[Path, Path]:
    """Write the JSON report and the CSV table; identical results give identical bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path, csv_path = out / report_name, out / csv_name
    report_path.write_text(report_json(result))
    csv_path.write_text(report_csv(result))
    return report_path, csv_path


def _summary(result: RunResult) -> str:
    lines = []
    for c in result.checks:
        flag = "" if c.asserted else " (not asserted)"
        lines.append(f"{c.status:<12} {c.name}{flag}: {c.detail}")
    for f in result.fits:
        lines.append(
            f"{f.status:<12} fit k={f.k} j={f.j}: observed {render(f.observed_rate)}"
            f" vs {render(f.theoretical_rate)}, slope {render(f.error_slope)}"
            f" vs {render(f.theoretical_slope)}"
        )
    lines.append("PASS" if result.passed else "FAIL")
    return "\n".join(lines)


def run(config_path: str, out_dir: str | None = None, mode: str | None = None, quiet: bool = False) -> int:
    try:
        if mode is None:
            cfg = load_config(config_path)
        else:
            raw = json.loads(Path(config_path).read_text())
            if isinstance(raw, dict):
                raw["mode"] = mode
            cfg = parse_config(raw)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = run_experiment(cfg)
    target = out_dir or cfg.out_dir or "."
    try:
        report_path, csv_path = emit_report(result, target, cfg.report_name, cfg.csv_name)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return 3
    if not quiet:
        print(_summary(result))
        print(f"report: {report_path}\ntable:  {csv_path}")
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casoratian",
        description="Exact Casorati determinant identities, rate fits and dhLV simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config", help="experiment config (JSON)")
    p_run.add_argument("--out-dir", help="directory for the report and table")
    p_run.add_argument("--mode", choices=MODES, help="override the arithmetic mode")
    p_run.add_argument("--quiet", action="store_true", help="suppress the summary")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.config, args.out_dir, args.mode, args.quiet)


if __name__ == "__main__":
    sys.exit(main())
