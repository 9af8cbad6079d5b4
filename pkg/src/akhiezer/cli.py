"""Command-line entry point: ``akhiezer-lab {compute,verify,compare}``.

Exit status 0 when every check passes, 1 when any check fails and 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.akhiezer.errors import AkhiezerError, ConfigError, GeometryError
from src.akhiezer.report import Report, write_report
from src.akhiezer.suite import LabState, compare_suite, compute_tables, prepare, verify_suite
from src.config import AKHIEZER_LOG_LEVEL, load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def write_tables(tables: Dict[str, pd.DataFrame], out_dir: Path) -> List[Path]:
    """Write each table as RFC-4180 CSV (CRLF line ends)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, frame in tables.items():
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, lineterminator="\r\n", float_format="%.17g")
        paths.append(path)
    logger.info("Wrote %d tables to %s", len(paths), out_dir)
    return paths


def cmd_compute(state: LabState) -> int:
    write_tables(compute_tables(state), Path(state.config.out_dir))
    print(f"compute: tables written to {state.config.out_dir}")
    return EXIT_OK


def _finish(report: Report, out_dir: Path) -> int:
    path = write_report(report, out_dir / f"{report.command}_report.json")
    summary = report.summary
    print(
        f"{report.command}: {summary.passed}/{summary.total} passed "
        f"({summary.failed} failed, {summary.skipped} skipped) -> {path}"
    )
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify(state: LabState) -> int:
    return _finish(verify_suite(state), Path(state.config.out_dir))


def cmd_compare(state: LabState) -> int:
    if state.genus == 0:
        raise ConfigError("compare needs an interval set of genus >= 1")
    frame, report = compare_suite(state)
    out_dir = Path(state.config.out_dir)
    write_tables({"comparison": frame}, out_dir)
    return _finish(report, out_dir)


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "compare": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="akhiezer-lab",
        description="Compute and cross-check Akhiezer polynomials on several intervals.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="What to run.")
    parser.add_argument("--config", help="JSON run document (default: the two-band example).")
    parser.add_argument("--out", help="Output directory (default: AKHIEZER_OUT_DIR or ./out).")
    parser.add_argument("--n-max", type=int, help="Largest degree n.")
    parser.add_argument("--order", type=int, help="Quadrature nodes per band.")
    parser.add_argument("--tol", type=float, help="Theta truncation tolerance.")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: AKHIEZER_LOG_LEVEL or INFO).",
    )
    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level or AKHIEZER_LOG_LEVEL, logging.INFO),
        format="%(levelname)s [%(name)s] %(message)s",
    )
    overrides = {
        "command": args.command,
        "out_dir": args.out,
        "n_max": args.n_max,
        "order": args.order,
        "theta_tol": args.tol,
    }
    try:
        config = load_config(args.config, overrides)
        state = prepare(config)
        return COMMANDS[config.command](state)
    except GeometryError as exc:
        logger.error("Invalid interval set: %s", exc)
        return EXIT_USAGE
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except AkhiezerError as exc:
        logger.error("Run aborted by %s: %s", type(exc).__name__, exc)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
