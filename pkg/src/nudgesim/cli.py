"""Command-line entry point.

    nudgesim simulate --config run.json [--seed N | --seeds A..B] [--out DIR]
    nudgesim decompose --input spy.csv [--dividends] [--output out.csv]
    nudgesim breakeven --nudge 0.0004 --daily-cost 400000
    nudgesim variance --input spy.csv

Exit status: 0 success, 2 bad usage, 3 invalid configuration or
parameters, 4 unreadable/unwritable file, 5 invalid input data.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .accounting import AccountingError, breakeven_size
from .config import load_config
from .decompose import DecompositionError, decompose, variance_shares
from .impact import DomainError
from .ingest import IngestError, read_price_csv, write_price_csv
from .sim import ConfigError, SimConfig, run_sim

log = logging.getLogger("nudgesim")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_IO, EXIT_DATA = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _seed_range(text: str) -> range:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 0 or hi < lo or hi >= 2**64:
        raise argparse.ArgumentTypeError(f"seed range must satisfy 0 <= A <= B < 2**64, got {text!r}")
    return range(lo, hi + 1)


def _write_run(config: SimConfig, seed: int, out: Path) -> Path:
    result = run_sim(config, seed)
    out.mkdir(parents=True, exist_ok=True)
    for sym, series in result.series.items():
        write_price_csv(series, out / f"{sym}.csv")
    result.ledger.write_csv(out / "ledger.csv")
    for sym, series in result.series.items():
        if len(series) >= 2:
            log.info("seed %d %s: %s", seed, sym, decompose(series).summary())
    return out


def cmd_simulate(args: argparse.Namespace) -> int:
    run = load_config(args.config)
    out = Path(args.out)
    if args.seeds is None:
        seed = run.seed if args.seed is None else args.seed
        if not 0 <= seed < 2**64:
            raise ConfigError(f"--seed: must be an unsigned 64-bit integer, got {seed}")
        _write_run(run.sim, seed, out)
        print(f"wrote {len(run.sim.assets)} price series and ledger.csv to {out}")
        return EXIT_OK

    seeds = list(args.seeds)
    workers = max(1, min(args.workers or os.cpu_count() or 1, len(seeds)))
    if workers == 1:
        for s in seeds:
            _write_run(run.sim, s, out / f"seed_{s}")
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_write_run, [run.sim] * len(seeds), seeds, [out / f"seed_{s}" for s in seeds]))
    print(f"wrote {len(seeds)} runs to {out}")
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    series = read_price_csv(args.input)
    result = decompose(series, include_dividends=args.dividends)
    output = Path(args.output) if args.output else Path(args.input).with_suffix(".decomposition.csv")
    result.write_csv(output)
    log.info("%s: %s", series.symbol, result.summary())
    print(result.summary())
    return EXIT_OK


def cmd_breakeven(args: argparse.Namespace) -> int:
    print(f"{breakeven_size(args.nudge, args.daily_cost):.2f}")
    return EXIT_OK


def cmd_variance(args: argparse.Namespace) -> int:
    shares = variance_shares(read_price_csv(args.input))
    print(f"intraday_share={shares.intraday_share:.6f} overnight_share={shares.overnight_share:.6f}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nudgesim", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run the agent-based simulation")
    p.add_argument("--config", required=True, help="JSON run configuration")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, help="override the config seed")
    seeds.add_argument("--seeds", type=_seed_range, help="inclusive seed range A..B, one output dir per seed")
    p.add_argument("--workers", type=int, default=None, help="worker processes for --seeds")
    p.add_argument("--out", default="sim_out", help="output directory (default: sim_out)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="cumulative overnight/intraday returns of a price CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--dividends", action="store_true", help="reinvest dividends in the overnight leg")
    p.add_argument("--output", help="decomposition CSV (default: <input>.decomposition.csv)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("breakeven", help="portfolio size at which the mark-up pays for the round trip")
    p.add_argument("--nudge", type=float, required=True, help="daily price nudge as a fraction")
    p.add_argument("--daily-cost", type=float, required=True, help="daily round-trip cost, currency")
    p.set_defaults(func=cmd_breakeven)

    p = sub.add_parser("variance", help="intraday/overnight variance shares of a price CSV")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_variance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, AccountingError, DomainError) as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IngestError, DecompositionError) as exc:
        print(f"error: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: file error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
