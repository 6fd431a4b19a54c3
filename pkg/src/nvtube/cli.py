"""Command-line entry point: ``nvtube <scenario> --config file.yaml --out dir``."""

import argparse
import os
from pathlib import Path
import sys

from .config import Config, ConfigError, load_config
from .dynamics import PhysicsValidityError
from .scenarios import SCENARIOS

OUT_ENV = "NVTUBE_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nvtube", description="NV spin / nanotube phonon simulations.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in SCENARIOS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        sp.add_argument("--config", type=Path, help="YAML config file (defaults used if omitted)")
        sp.add_argument("--out", type=Path,
                        help=f"output directory (default: ${OUT_ENV} or ./out)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="format of the data tables; the report is always JSON")
        if name == "sweep":
            sp.add_argument("--workers", type=int, default=1)
    return p


def write_result(result, out: Path, fmt: str) -> dict:
    """Write tables and the report under ``out``; return the written paths by name."""
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, table in result.tables.items():
        path = out / f"{name}.{fmt}"
        path.write_text(table.to_csv() if fmt == "csv" else table.to_json() + "\n")
        paths[name] = str(path)
    report_path = out / f"{result.report.scenario}_report.json"
    paths["report"] = str(report_path)
    result.report.outputs = paths
    report_path.write_text(result.report.to_json() + "\n")
    return paths


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out or Path(os.environ.get(OUT_ENV, "out"))
    try:
        cfg = load_config(args.config) if args.config else Config()
        if args.command == "sweep":
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            result = SCENARIOS["sweep"](cfg, workers=args.workers)
        else:
            result = SCENARIOS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsValidityError as exc:
        print(f"physics validity abort: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    write_result(result, out, args.format)
    print(result.report.to_json())
    print(f"wall clock: {result.report.wall_clock_s:.3f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
