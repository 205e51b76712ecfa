"""Command line interface: ``lpmhd run|check|resume``."""

import argparse
import logging
import sys

from ..errors import ConfigError
from .run import configure_logging, load_config, resume, run

log = logging.getLogger("lpmhd")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="lpmhd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "integrate a configuration"),
                            ("check", "validate a configuration and exit")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config")
    p = sub.add_parser("resume", help="continue a run from a snapshot")
    p.add_argument("snapshot")
    p.add_argument("config")
    for p in sub.choices.values():
        p.add_argument("--out", default="lpmhd_out", help="output directory")
        p.add_argument("--quiet", action="store_true", help="only report errors")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet)
    try:
        cfg = load_config(args.config)
        if args.command == "check":
            log.info("%s: ok (%s, %d steps)", args.config, cfg.model, cfg.n_steps)
            return EXIT_OK
        if args.command == "run":
            return run(cfg, args.out)
        return resume(args.snapshot, cfg, args.out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
