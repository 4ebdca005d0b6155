"""
Cohomology Service - group-level commands
H^2 by Smith normal form, the Weil pairing and commuting-pair listings
"""

import logging
import time

from src.algebra.cohom import brute_force_h2_order, h2_compute, weil_pairing
from src.algebra.groups import FiniteGroup, commuting_pairs, p_power_pairs, pair_orbits
from src.models.run_models import AlgebraReport, RunConfig
from src.services.data_service import get_data_service
from src.utils.errors import InputError, StructureError


class CohomologyService:
    """Entry point for h2, weil and pairs"""

    def __init__(self):
        self.data_service = get_data_service()
        self.logger = logging.getLogger(__name__)

    def _group(self, cfg: RunConfig) -> FiniteGroup:
        if cfg.group_orders is not None:
            return FiniteGroup.abelian(cfg.group_orders)
        if cfg.inputs:
            return self.data_service.load_group(cfg.inputs[0])
        raise InputError(f"{cfg.command} needs a group file or --abelian")

    def h2(self, cfg: RunConfig) -> AlgebraReport:
        """
        H^2(G; Z/n) from the Smith normal form of the bar differentials

        Args:
            cfg: RunConfig with a group (file or --abelian); --n defaults to the exponent of G

        Returns:
            AlgebraReport; ok is False when --brute-force disagrees with the Smith form
        """
        start = time.perf_counter()

        # Step 1: Smith normal form
        G = self._group(cfg)
        n = cfg.modulus or G.exponent
        result = h2_compute(G, n, cfg.h2_max_order)
        details = [f"|H^2({G.name}; Z/{n})| = {result.order}"]

        # Step 2: Optional cross-check by enumerating cocycles
        ok = True
        if cfg.brute_force:
            count = brute_force_h2_order(G, n, cfg.brute_force_limit)
            ok = count == result.order
            details.append(f"{'✅' if ok else '❌'} brute-force cochain count: {count}")
            if not ok:
                self.logger.error(f"H^2 mismatch on {G.name}: Smith form {result.order}, enumeration {count}")
        return AlgebraReport(
            command=cfg.command,
            value=result.render(),
            details=details,
            ok=ok,
            execution_time_ms=(time.perf_counter() - start) * 1000,
        )

    def weil(self, cfg: RunConfig) -> AlgebraReport:
        start = time.perf_counter()
        if cfg.modulus is None or cfg.vector_a is None or cfg.vector_b is None:
            raise InputError("weil needs --n, --a and --b")
        if len(cfg.vector_a) != 2 or len(cfg.vector_b) != 2:
            raise InputError("weil arguments are elements of (Z/n)^2", location="--a/--b")
        value = weil_pairing(cfg.vector_a, cfg.vector_b, cfg.modulus, cfg.primitive_root)
        return AlgebraReport(
            command=cfg.command,
            value=value.render(),
            execution_time_ms=(time.perf_counter() - start) * 1000,
        )

    def pairs(self, cfg: RunConfig) -> AlgebraReport:
        """
        Commuting pairs of G, or those of p-power order with --prime

        Args:
            cfg: RunConfig with a group (file or --abelian)

        Returns:
            AlgebraReport with the pair count as value; details describe the group,
            list the pairs and, for small abelian groups, count the GL2 orbits
        """
        start = time.perf_counter()
        G = self._group(cfg)
        pairs = commuting_pairs(G) if cfg.prime is None else p_power_pairs(G, cfg.prime)
        details = ["group: " + ", ".join(f"{key}={value}" for key, value in G.describe().items())]
        details.extend(f"({G.labels[g]}) ({G.labels[h]})" for g, h in pairs)
        if G.orders is not None and G.exponent <= 6 and G.order <= 36:
            orbits = pair_orbits(G)
            details.append(f"GL2(Z/{G.exponent}) orbits: {len(orbits)}")
        return AlgebraReport(
            command=cfg.command,
            value=str(len(pairs)),
            details=details,
            execution_time_ms=(time.perf_counter() - start) * 1000,
        )

    def run(self, cfg: RunConfig) -> AlgebraReport:
        handlers = {"h2": self.h2, "weil": self.weil, "pairs": self.pairs}
        if cfg.command not in handlers:
            raise StructureError(f"cohomology service does not handle {cfg.command}")
        return handlers[cfg.command](cfg)


_cohomology_instance = None


def get_cohomology_service() -> CohomologyService:
    global _cohomology_instance
    if _cohomology_instance is None:
        _cohomology_instance = CohomologyService()
    return _cohomology_instance
