"""``ispi`` command line."""

from __future__ import annotations

import argparse
import logging
import sys

from ispi.app.bench import bench
from ispi.app.config import ConfigError, load_config
from ispi.app.experiments import run_moving, run_noise_sweep, run_static
from ispi.app.outputs import RunWriter
from ispi.scene import Trajectory

log = logging.getLogger("ispi")


def build_parser():
    ap = argparse.ArgumentParser(prog="ispi", description="Instant single-pixel imaging simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run-static", "reconstruct the object at each N of the sweep"),
        ("run-moving", "video of a moving object, one frame per N measurements"),
        ("run-noise-sweep", "IGI vs CGI under optical background noise"),
        ("bench", "throughput of the streaming reconstructor"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON config (defaults for every missing field)")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="master seed, 64-bit unsigned")
        p.add_argument("--no-figures", action="store_true", help="skip PNG figures")
        p.add_argument("--timing", action="store_true", help="also write wall-clock timing.json")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        config = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be a 64-bit unsigned integer")
            config = config.with_seed(args.seed)
        if args.no_figures:
            config.figures = False
        out = args.out or config.output_dir
        if args.command == "run-static":
            report = run_static(config, out)
        elif args.command == "run-moving":
            if config.trajectory is None:
                config.trajectory = Trajectory()
            report = run_moving(config, out)
        elif args.command == "run-noise-sweep":
            report = run_noise_sweep(config, out=out)
        else:
            result = bench(config)
            RunWriter(out).json("bench.json", result)
            print(f"{result['steps_per_s']:.0f} steps/s at {result['width']}x{result['height']} "
                  f"({result['realtime_margin']:.1f}x the {result['dmd_rate']:g} Hz DMD rate)")
            return 0
    except ConfigError as exc:
        print(f"ispi: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ispi: I/O error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"ispi: invalid input: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        RunWriter(out).json("timing.json", report.timing_dict())
    print(f"{report.kind}: {len(report.frames)} frame(s) written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
