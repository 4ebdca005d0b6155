"""
Genus Service - runs genus computations for the CLI
Loads data through DataService and renders values into GenusReport
"""

import logging
import time
from typing import Union

from src.algebra import genus
from src.algebra.cohom import epsilon
from src.algebra.exactnum import CyclotomicNumber
from src.algebra.groups import commuting_pairs, p_power_pairs
from src.algebra.series import PuiseuxSeries
from src.models.run_models import GenusReport, RunConfig
from src.services.data_service import get_data_service
from src.utils.errors import InputError, StructureError

Value = Union[PuiseuxSeries, CyclotomicNumber]


def render_value(value, output: str = "human") -> str:
    """Canonical lines, or a plain constant when the value has no q or y dependence"""
    if isinstance(value, PuiseuxSeries):
        if output == "canonical":
            return value.render_canonical()
        exponents = [e for e in value.terms]
        if exponents in ([], [0]):
            coefficient = value.coefficient(0)
            if coefficient.is_constant():
                return coefficient.constant_value().render()
        return value.render()
    if isinstance(value, CyclotomicNumber):
        return value.render()
    return str(value)


class GenusService:
    """
    Entry point for orbifold, twisted, witten, height-one and euler.
    Series are truncated below q^(N/n), with N from --order and n the exponent of the group.
    """

    def __init__(self):
        self.data_service = get_data_service()
        self.logger = logging.getLogger(__name__)

    def _load(self, cfg: RunConfig, count: int = 1):
        if len(cfg.inputs) < count:
            raise InputError(f"{cfg.command} needs {count} input file(s), got {len(cfg.inputs)}")
        data = self.data_service.load_orbifold(cfg.inputs[0])
        if cfg.jet_order is not None and cfg.jet_order < data.max_dim():
            raise InputError(
                f"jet order {cfg.jet_order} is below the largest component dimension {data.max_dim()}",
                location="--jet-order",
            )
        return data

    def _report(self, cfg: RunConfig, value: Value, start: float, sectors: int = 0) -> GenusReport:
        elapsed = (time.perf_counter() - start) * 1000
        self.logger.info(f"{cfg.command} computed in {elapsed:.1f} ms")
        return GenusReport(
            command=cfg.command,
            value=render_value(value, cfg.output),
            canonical=value.render_canonical() if isinstance(value, PuiseuxSeries) else None,
            order=cfg.order,
            normalization="divide_by_G" if cfg.normalize else "raw",
            sectors=sectors,
            execution_time_ms=elapsed,
        )

    def _pair_count(self, data: genus.OrbifoldData, prime) -> int:
        return len(commuting_pairs(data.group) if prime is None else p_power_pairs(data.group, prime))

    def orbifold(self, cfg: RunConfig) -> GenusReport:
        """
        Orbifold genus: sum of sector values over commuting pairs

        Args:
            cfg: RunConfig with one orbifold data file

        Returns:
            GenusReport holding the rendered series
        """
        start = time.perf_counter()
        data = self._load(cfg)
        value = genus.orbifold_genus(
            data,
            cfg.precision(data.n),
            "divide_by_G" if cfg.normalize else "raw",
            prime=cfg.prime,
            degree=cfg.jet_order,
            threads=cfg.threads,
        )
        return self._report(cfg, value, start, self._pair_count(data, cfg.prime))

    def twisted(self, cfg: RunConfig) -> GenusReport:
        """
        Discrete-torsion twist by the epsilon form of a cocycle file

        Args:
            cfg: RunConfig with an orbifold data file and a cocycle file on the same group

        Returns:
            GenusReport holding the rendered series
        """
        start = time.perf_counter()

        # Step 1: Load both files and match their groups
        data = self._load(cfg, 2)
        cocycle = self.data_service.load_cocycle(cfg.inputs[1])
        if cocycle.group.table != data.group.table:
            raise InputError("cocycle group differs from the orbifold group", location=cfg.inputs[1])

        # Step 2: Weight each pair by its phase
        value = genus.twisted_genus(
            data,
            epsilon(cocycle),
            cfg.precision(data.n),
            "divide_by_G" if cfg.normalize else "raw",
            prime=cfg.prime,
            primitive_root=cfg.primitive_root,
            degree=cfg.jet_order,
            threads=cfg.threads,
        )
        return self._report(cfg, value, start, self._pair_count(data, cfg.prime))

    def witten(self, cfg: RunConfig) -> GenusReport:
        """Witten genus of the ambient components; the group action is ignored"""
        start = time.perf_counter()
        data = self._load(cfg)
        if data.group.order != 1:
            self.logger.warning(f"witten uses the ambient data only; ignoring the action of {data.group.name}")
        N = cfg.precision(data.n)
        total = PuiseuxSeries.zero(N)
        for comp in data.ambient:
            total = total + genus.witten_genus(comp.tangent_roots, comp.integral, N, comp.generators)
        return self._report(cfg, total, start, 1)

    def height_one(self, cfg: RunConfig) -> GenusReport:
        start = time.perf_counter()
        data = self._load(cfg)
        value = genus.height_one_genus(data, cfg.prime, cfg.jet_order)
        return self._report(cfg, value, start, data.group.order)

    def euler(self, cfg: RunConfig) -> GenusReport:
        start = time.perf_counter()
        data = self._load(cfg)
        value = genus.orbifold_euler_characteristic(data, cfg.prime)
        elapsed = (time.perf_counter() - start) * 1000
        return GenusReport(
            command=cfg.command,
            value=str(value),
            order=None,
            normalization="divide_by_G",
            sectors=self._pair_count(data, cfg.prime),
            execution_time_ms=elapsed,
        )

    def run(self, cfg: RunConfig) -> GenusReport:
        handlers = {
            "orbifold": self.orbifold,
            "twisted": self.twisted,
            "witten": self.witten,
            "height-one": self.height_one,
            "euler": self.euler,
        }
        if cfg.command not in handlers:
            raise StructureError(f"genus service does not handle {cfg.command}")
        return handlers[cfg.command](cfg)


_genus_instance = None


def get_genus_service() -> GenusService:
    global _genus_instance
    if _genus_instance is None:
        _genus_instance = GenusService()
    return _genus_instance
