"""
Shared argparse options and RunConfig assembly for all routers
"""

import argparse
from typing import List

from pydantic import ValidationError

from src.config import Settings
from src.models.run_models import RunConfig
from src.utils.errors import InputError


def int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def add_run_options(parser: argparse.ArgumentParser) -> None:
    # N counts q^(1/n), n the exponent of the data group; verify-theta has n = 1
    parser.add_argument("--order", "-N", type=int, help="truncation order N: series are exact below q^(N/n)")
    parser.add_argument("--jet-order", type=int, help="top jet degree (at least the largest component dimension)")
    parser.add_argument("--canonical", action="store_true", help="print the canonical line rendering")
    parser.add_argument("--prime", type=int, help="restrict to pairs of p-power order")
    parser.add_argument("--primitive-root", type=int, help="use zeta_n^c as the primitive root in phases")
    parser.add_argument("--seed", type=int, help="seed for randomized checks")
    parser.add_argument("--threads", type=int, help="worker threads for sector evaluation")


def build_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """CLI flags override settings field by field"""

    def pick(name, default):
        value = getattr(args, name, None)
        return default if value is None else value

    try:
        return RunConfig(
            command=args.command,
            inputs=list(getattr(args, "inputs", None) or []),
            order=pick("order", settings.default_order),
            jet_order=getattr(args, "jet_order", None),
            output="canonical" if getattr(args, "canonical", False) else "human",
            normalize=getattr(args, "normalize", False),
            primitive_root=pick("primitive_root", settings.primitive_root_power),
            prime=getattr(args, "prime", None),
            seed=pick("seed", settings.seed),
            threads=pick("threads", settings.threads),
            inject_fault=getattr(args, "inject_fault", False),
            modulus=getattr(args, "n", None),
            vector_a=getattr(args, "a", None),
            vector_b=getattr(args, "b", None),
            group_orders=getattr(args, "abelian", None),
            brute_force=getattr(args, "brute_force", False),
            h2_max_order=settings.h2_max_order,
            brute_force_limit=settings.brute_force_limit,
        )
    except ValidationError as e:
        first = e.errors()[0]
        location = "--" + "-".join(str(p) for p in first["loc"]).replace("_", "-")
        raise InputError(first["msg"], location=location)
