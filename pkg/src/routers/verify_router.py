"""
Verification commands: verify-theta, verify-lifts, compare-analytic
Exit 0 when every identity holds, 1 otherwise
"""

import argparse

from src.config import Settings
from src.routers.options import add_run_options, build_config
from src.services.verification_service import get_verification_service


def register(subparsers: argparse._SubParsersAction) -> None:
    theta = subparsers.add_parser("verify-theta", help="theta and f quasi-periodicity identities")
    add_run_options(theta)

    lifts = subparsers.add_parser("verify-lifts", help="lift independence of every sector value")
    lifts.add_argument("inputs", nargs=1, help="orbifold data file")
    add_run_options(lifts)

    analytic = subparsers.add_parser("compare-analytic", help="analytic stalks against sector integrands")
    analytic.add_argument("inputs", nargs=1, help="orbifold data file with a cyclic group")
    add_run_options(analytic)

    for parser in (theta, lifts, analytic):
        parser.add_argument("--inject-fault", action="store_true", help="corrupt the input; the check must fail")
        parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, settings: Settings) -> int:
    cfg = build_config(args, settings)
    report = get_verification_service().run(cfg)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1
