"""
Parancssori belépési pont.

    python -m acidlab [--config PATH] [--out DIR] [--seed N] <alparancs>

Kilépési kódok: 0 siker, 2 konfigurációs hiba, 3 futási hiba vagy divergencia.
"""
import argparse
import logging
import os
import sys

from acidlab import settings
from acidlab.errors import AcidLabError, ConfigError
from acidlab.grid.images import read_f64grid
from acidlab.grid.metrics import SSIM_WINDOW, l2_norm, psnr, ssim
from acidlab.lab.config import EXPERIMENTS, config_from_text, load_config
from acidlab.lab.runner import execute
from acidlab.lab.tables import write_rows

logger = logging.getLogger("lab_cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="acidlab", description="ACID stabilization laboratory")
    parser.add_argument("--config", help="flat key = value experiment config (or a run manifest)")
    parser.add_argument("--out", help="run directory (default: $ACIDLAB_OUT/<experiment>)")
    parser.add_argument("--seed", type=int, help="global seed override")
    parser.add_argument("--log-level", default=None, help="logging level (default: $ACIDLAB_LOG_LEVEL)")

    commands = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        commands.add_parser(name, help=f"run the {name} protocol")
    metrics = commands.add_parser("metrics", help="compare two F64GRID images")
    metrics.add_argument("reference")
    metrics.add_argument("candidate")
    metrics.add_argument("--peak", type=float, default=None, help="PSNR/SSIM peak (default: reference range)")
    return parser


def run_metrics(args):
    reference = read_f64grid(args.reference)
    candidate = read_f64grid(args.candidate)
    peak = args.peak or float(reference.max() - reference.min()) or 1.0
    value = ssim(reference, candidate, peak) if min(reference.shape) >= SSIM_WINDOW else None
    row = (psnr(reference, candidate, peak), value, l2_norm(reference - candidate))
    print(f"psnr={row[0]!r} ssim={row[1]!r} l2_error={row[2]!r}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_rows(os.path.join(args.out, "metrics.csv"), ["psnr", "ssim", "l2_error"], [row])
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    settings.configure_logging(args.log_level)

    try:
        if args.command == "metrics":
            return run_metrics(args)
        overrides = {"seed": args.seed, "experiment": args.command}
        if args.config:
            config = load_config(args.config, overrides)
        else:
            config = config_from_text("", overrides)
        execute(config, args.out)
        return EXIT_OK
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG
    except (AcidLabError, OSError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_RUNTIME
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
