"""Command-line entrypoint composing the subcommand modules."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from .cli import SUBCOMMANDS
from .cli.common import EXIT_DOMAIN_FAILURE, EXIT_USAGE
from .config import get_settings
from .libs.exceptions import RoughIsometryError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog=settings.app_name, description="Rough isometries between percolations")
    parser.add_argument("--log-level", default=settings.log_level)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0

    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return int(args.handler(args))
    except ValidationError as exc:
        logger.error(f"invalid input: {exc}")
        return EXIT_USAGE
    except (RoughIsometryError, ValueError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return EXIT_DOMAIN_FAILURE


if __name__ == "__main__":
    sys.exit(main())
