"""
Theta Orbifold - command-line entry point
Orbifold elliptic genera, discrete torsion and their identity checks
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.config import get_settings
from src.routers import algebra_router, genus_router, verify_router
from src.utils.errors import ThetaOrbifoldError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="theta-orbifold", description=__doc__.strip().splitlines()[1])
    parser.add_argument("--verbose", "-v", action="store_true", help="log at INFO level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    genus_router.register(subparsers)
    verify_router.register(subparsers)
    algebra_router.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args, settings)
    except ThetaOrbifoldError as e:
        logging.getLogger(__name__).debug(f"{type(e).__name__}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
