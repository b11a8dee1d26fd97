"""Command line entry point.

Exit status: 0 on success, 1 for invalid input, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import correlation, pn_codes
from .config import ConfigError, load_config, parse_range
from .sweep import format_csv, sweep_rows, theory_rows, write_csv

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
SEED_ENV = "LINKSIM_SEED"


def bundled_configs() -> dict[str, Path]:
    root = resources.files("linksim") / "configs"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".yaml")}


def resolve_config(name: str) -> Path:
    """A filesystem path, or the name of a bundled config (``examples/<name>`` also works)."""
    path = Path(name)
    if path.is_file():
        return path
    bundled = bundled_configs()
    stem = path.stem if path.suffix in (".yaml", ".yml") else path.name
    if stem in bundled:
        return bundled[stem]
    raise ConfigError("<config>", f"no such file or bundled config: {name} (bundled: {', '.join(sorted(bundled))})")


def _emit(text: str, out: str | None) -> None:
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_simulate(args) -> int:
    cfg = load_config(resolve_config(args.config))
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    elif os.environ.get(SEED_ENV):
        try:
            cfg = cfg.with_seed(int(os.environ[SEED_ENV]))
        except ValueError:
            raise ConfigError(SEED_ENV, f"not an integer: {os.environ[SEED_ENV]!r}") from None
    rows = sweep_rows(cfg, jobs=args.jobs)
    out = args.out or cfg.output
    if out:
        write_csv(rows, out)
    else:
        sys.stdout.write(format_csv(rows))
    return EXIT_OK


def cmd_theory(args) -> int:
    try:
        values = parse_range(args.ebn0)
    except ValueError as exc:
        raise ConfigError("--ebn0", str(exc)) from None
    _emit(format_csv(theory_rows(args.scheme, args.channel, values)), args.out)
    return EXIT_OK


def cmd_codes(args) -> int:
    try:
        poly = pn_codes.parse_polynomial(args.poly)
    except ValueError as exc:
        raise ConfigError("--poly", str(exc)) from None
    base = pn_codes.to_bipolar(pn_codes.generate_msequence(poly))
    if args.ccf is None:
        profile = correlation.periodic_acf_profile(base)
    else:
        profile = correlation.periodic_ccf_profile(base, np.roll(base, -args.ccf))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("lag", "raw", "normalized"))
    for lag, raw, norm in profile.rows():
        writer.writerow((lag, raw, repr(norm)))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_doctor(args) -> int:
    from .doctor import run_checks

    return EXIT_OK if run_checks(sys.stdout) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linksim", description="DSSS downlink BER simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a configured Eb/N0 sweep and write CSV")
    p.add_argument("config", help="YAML config path or bundled config name (e.g. table1)")
    p.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
    p.add_argument("--seed", type=int, help=f"override the master seed (also ${SEED_ENV})")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory", help="closed-form BER/SER curve as CSV")
    p.add_argument("--scheme", required=True)
    p.add_argument("--channel", default="awgn")
    p.add_argument("--ebn0", required=True, help="start:stop:step in dB, inclusive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("codes", help="correlation table of an M-sequence")
    p.add_argument("--poly", required=True, help='e.g. "x^3+x+1" or "3,1,0"')
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--acf", action="store_true", help="periodic autocorrelation")
    g.add_argument("--ccf", type=int, metavar="SHIFT", help="cross-correlation against the code shifted by SHIFT")
    p.add_argument("--out")
    p.set_defaults(func=cmd_codes)

    p = sub.add_parser("doctor", help="run the invariant self-checks")
    p.set_defaults(func=cmd_doctor)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
