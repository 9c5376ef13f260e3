"""Command-line entry point.

    abhbf <experiment> --config scenario.json --out results.csv [--seed N] [--trials N] [--threads N]

Exit status: 0 on success, 2 on configuration errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import __version__
from .config import ConfigError, ScenarioConfig, load_config
from .experiment import EXPERIMENTS, run_experiment
from .output import write_outputs

log = logging.getLogger("abhbf")

_HELP = {
    "gain-3d": "gain over subcarriers and elevation, conventional beam vs AB-HBF",
    "gain-spread": "AB-HBF gain over subcarriers for each spread in spread_list",
    "gain-cuts": "AB-HBF gain along elevation and azimuth cuts",
    "rate-snr": "achievable rate versus SNR for the configured schemes",
    "rate-antennas": "achievable rate versus transmit array size (tx_sizes)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abhbf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", help="JSON scenario file (default: desk profile)")
        p.add_argument("--out", required=True, help="CSV output path; metadata goes next to it")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--trials", type=int, help="override the number of trials")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        overrides = {k: getattr(args, k) for k in ("seed", "trials") if getattr(args, k) is not None}
        if overrides:
            cfg = replace(cfg, **overrides)
        if args.threads < 1:
            raise ConfigError("threads: must be >= 1")
        table = run_experiment(cfg, args.experiment, threads=args.threads)
        csv_path, meta_path = write_outputs(table, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    log.info("wrote %d rows to %s (metadata %s)", len(table.rows), csv_path, meta_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
