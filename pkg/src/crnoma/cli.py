"""``crnoma`` command-line driver."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import PRESETS, dump_config, get_preset
from .montecarlo import WORKERS_ENV, default_workers
from .sweep import AXES, MODES, SweepSpec, emit_csv, emit_plot_script, rows_to_csv, run_sweep


def parse_values(text: str) -> tuple[float, ...]:
    """Comma list ("0,10,inf") or inclusive range "start:stop:step"."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"bad range {text!r}; expected start:stop:step with step > 0")
        start, stop, step = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(round(start + i * step, 12)) for i in range(max(n, 0)))
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crnoma",
        description="Outage probability of a two-hop underlay CR-NOMA downlink (closed form and Monte Carlo).",
        epilog=f"Worker count defaults to min(8, CPUs); override with ${WORKERS_ENV}.",
    )
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="JSON config file (SystemConfig field names; *_db keys accepted)")
    src.add_argument("--preset", default="baseline", choices=sorted(PRESETS), help="built-in scenario")
    p.add_argument("--series", help="comma-separated preset series to run (default: all)")
    p.add_argument("--axis", default="transmit_snr_db", choices=AXES)
    p.add_argument("--values", default="0:40:2", help='e.g. "0:40:5" or "0,10,20"')
    p.add_argument("--snr-db", type=float, default=30.0, help="transmit SNR when the axis is not the SNR")
    p.add_argument("--mode", default="analytic", choices=MODES)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--joint-sic", action="store_true", help="also report the joint-SIC Monte Carlo outage")
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    p.add_argument("--plot", help="also write a matplotlib script to this path")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--dump-preset", metavar="PATH", help="write the selected preset config as JSON and exit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _fail(exc: Exception) -> int:
    print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
    return 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.dump_preset:
            dump_config(get_preset(args.preset).config, args.dump_preset)
            return 0
        spec = SweepSpec(
            base=args.config or args.preset,
            axis=args.axis,
            values=parse_values(args.values),
            modes=args.mode,
            trials=args.trials,
            seed=args.seed,
            out=args.out,
            snr_db=args.snr_db,
            series=tuple(s.strip() for s in args.series.split(",")) if args.series else None,
            joint_sic=args.joint_sic,
        )
        rows = run_sweep(spec, workers=args.workers or default_workers())
        if args.out:
            emit_csv(rows, args.out)
        else:
            sys.stdout.write(rows_to_csv(rows))
        if args.plot:
            emit_plot_script(rows, args.plot, axis=spec.axis)
    except (ValueError, OSError, KeyError) as exc:
        return _fail(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
