"""
Genus commands: orbifold, twisted, witten, height-one, euler
"""

import argparse
import logging

from src.config import Settings
from src.routers.options import add_run_options, build_config
from src.services.genus_service import get_genus_service

logger = logging.getLogger(__name__)

COMMANDS = {
    "orbifold": ("orbifold genus: sum of sector values over commuting pairs", 1),
    "twisted": ("discrete-torsion twist of the orbifold genus by a cocycle file", 2),
    "witten": ("Witten genus of the ambient components", 1),
    "height-one": ("height-one model over the multiplicative formal group", 1),
    "euler": ("orbifold Euler characteristic", 1),
}


def register(subparsers: argparse._SubParsersAction) -> None:
    for name, (help_text, count) in COMMANDS.items():
        parser = subparsers.add_parser(name, help=help_text)
        parser.add_argument("inputs", nargs=count, help="orbifold data file" + (", cocycle file" if count == 2 else ""))
        add_run_options(parser)
        parser.add_argument("--normalize", action="store_true", help="divide the sum by |G|")
        parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    cfg = build_config(args, settings)
    report = get_genus_service().run(cfg)
    logger.info(f"{cfg.command}: {report.sectors} pairs in {report.execution_time_ms:.1f} ms")
    print(report.value)
    return 0
