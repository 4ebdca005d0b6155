"""
Group commands: h2, weil, pairs
"""

import argparse

from src.config import Settings
from src.routers.options import build_config, int_list
from src.services.cohomology_service import get_cohomology_service


def register(subparsers: argparse._SubParsersAction) -> None:
    h2 = subparsers.add_parser("h2", help="H^2(G; Z/n) by Smith normal form")
    h2.add_argument("--n", type=int, help="coefficient modulus (default: exponent of G)")
    h2.add_argument("--brute-force", action="store_true", help="cross-check by enumerating cochains")

    weil = subparsers.add_parser("weil", help="Weil pairing on (Z/n)^2")
    weil.add_argument("--n", type=int, required=True)
    weil.add_argument("--a", type=int_list, required=True, help="first element, e.g. 1,0")
    weil.add_argument("--b", type=int_list, required=True, help="second element, e.g. 0,1")
    weil.add_argument("--primitive-root", type=int)

    pairs = subparsers.add_parser("pairs", help="list commuting pairs")
    pairs.add_argument("--prime", type=int, help="only pairs of p-power order")

    for parser in (h2, pairs):
        parser.add_argument("inputs", nargs="?", help="group or data file")
        parser.add_argument("--abelian", type=int_list, help="inline abelian group, e.g. 2,2")
    for parser in (h2, weil, pairs):
        parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    if isinstance(getattr(args, "inputs", None), str):
        args.inputs = [args.inputs]
    cfg = build_config(args, settings)
    report = get_cohomology_service().run(cfg)
    print(report.value)
    for line in report.details:
        print(line)
    return 0 if report.ok else 1
