"""``glt`` command line: run the configured pipelines and write CSV tables.

Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, load_config
from .functions import SingularEvaluation
from .linalg import ConvergenceError, NotHermitianError
from .pipeline import Experiment

log = logging.getLogger("gltsym")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def fmt(value) -> str:
    """Six significant digits; integers verbatim."""
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    text = f"{value:.6g}"
    return "0" if text == "-0" else text


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _command_outputs(exp: Experiment, command: str, out: Path) -> list[str]:
    cfg = exp.cfg
    if command == "extract":
        write_csv(out / "coefficients.csv", ["m", "j", "k", "re", "im"], exp.coefficient_rows())
        return ["coefficients.csv"]
    if command == "tables":
        write_csv(out / "table1.csv", ["m", "gamma_norm"], exp.gamma_table())
        write_csv(out / "table2.csv", ["l", *cfg.n], exp.eig_error_table())
        write_csv(out / "table3.csv", ["l", *cfg.m], exp.l2_error_table())
        return ["table1.csv", "table2.csv", "table3.csv"]
    if command == "compare":
        cols = exp.figure_columns()
        write_csv(out / "figure1.csv", list(cols), zip(*cols.values()))
        return ["figure1.csv"]
    if command == "weyl":
        labels, rows = exp.weyl_rows()
        write_csv(out / "weyl.csv", ["n", *labels], rows)
        return ["weyl.csv"]
    if command == "qcurve":
        write_csv(out / "qcurve.csv", ["n", "r", "q"], exp.qcurve_rows())
        return ["qcurve.csv"]
    if command == "counterexample":
        write_csv(out / "counterexample.csv", ["n", "gnorm_lt", "gnorm_lt_squared"],
                  exp.counterexample_rows())
        return ["counterexample.csv"]
    raise ValueError(f"unknown command {command!r}")


def run(cfg: RunConfig) -> int:
    """Run every command in ``cfg.commands``; returns the exit code."""
    out = Path(cfg.output)
    exp = Experiment(cfg)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for command in cfg.commands:
            log.info("running %s", command)
            written += _command_outputs(exp, command, out)
        manifest = {
            "version": __version__,
            "config": cfg.describe(),
            "outputs": written,
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except (SingularEvaluation, ConvergenceError, NotHermitianError, ArithmeticError, ValueError) as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=[*COMMANDS, "run"],
                        help="pipeline to run; 'run' runs the commands listed in the config")
    parser.add_argument("--config", required=True, help="run configuration (INI)")
    parser.add_argument("--out", help="output directory (overrides the config)")
    parser.add_argument("--threads", type=int, help="worker threads (overrides the config)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    if args.command != "run":
        cfg.commands = [args.command]
        if args.command == "tables" and not cfg.has_truth:
            log.error("config error: the tables command needs a [truth] symbol")
            return EXIT_CONFIG
    if args.out:
        cfg.output = args.out
    if args.threads:
        if args.threads < 1:
            log.error("config error: --threads must be positive")
            return EXIT_CONFIG
        cfg.threads = args.threads
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
