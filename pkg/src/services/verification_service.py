"""
Verification Service - machine-checked identities
Theta and f quasi-periodicity, lift independence and the analytic stalk comparison
"""

import logging
from fractions import Fraction

from tqdm import tqdm

from src.algebra import genus, jacobi
from src.algebra.exactnum import YRational
from src.algebra.groups import commuting_pairs
from src.models.run_models import CheckReport, RunConfig
from src.services.data_service import get_data_service
from src.utils.errors import InputError, StructureError


class VerificationService:
    """
    Runs verify-theta, verify-lifts and compare-analytic.
    Every command returns one CheckReport; the router maps ok to exit 0 and a failure to exit 1.
    """

    def __init__(self):
        self.data_service = get_data_service()
        self.logger = logging.getLogger(__name__)

    def _finish(self, report: CheckReport) -> CheckReport:
        if report.ok:
            self.logger.info(f"{report.name}: passed")
        else:
            self.logger.error(f"{report.name}: failed at {report.first_mismatch}")
        return report

    def verify_theta(self, cfg: RunConfig) -> CheckReport:
        """
        Quasi-periodicity of theta and f, plus a seeded numeric spot check

        Args:
            cfg: RunConfig; `order` counts whole powers of q here, `seed` picks the numeric points

        Returns:
            CheckReport with one subcheck per identity
        """
        N = cfg.order
        base = jacobi.theta_reduced(N)
        pair = None

        # Step 1: Corrupt the inputs when a negative control is requested
        if cfg.inject_fault:
            # q^0: s^(1/2) - s^(-1/2) becomes 2 s^(1/2) - s^(-1/2)
            base = base + jacobi.ThetaSeries.monomial(1, 0, Fraction(1, 2), N)
            work = jacobi.fraction_order(N, 1)
            clean = jacobi.FractionPair.build(work)
            pair = clean._replace(
                numerator=clean.numerator + jacobi.ThetaSeries.monomial(YRational.y_power(1), 0, Fraction(1, 2), work)
            )

        # Step 2: Exact identities
        reports = [
            jacobi.theta_shift_check(N, base),
            jacobi.f_fraction_check(N, k=1, base=pair),
            jacobi.f_fraction_check(N, k=2),
            jacobi.f_fraction_check(N, k=0, ell=1),
            jacobi.f_composition_check(N),
        ]

        # Step 3: Symbolic values against the floating products
        reports.append(jacobi.numeric_agreement_check(N, cfg.seed, base=base, pair=pair))
        return self._finish(CheckReport.combine("theta and f quasi-periodicity", reports, order=N))

    def _data(self, cfg: RunConfig) -> genus.OrbifoldData:
        if not cfg.inputs:
            raise InputError(f"{cfg.command} needs an orbifold data file")
        return self.data_service.load_orbifold(cfg.inputs[0])

    def verify_lifts(self, cfg: RunConfig) -> CheckReport:
        """
        Sector values are unchanged when integer lifts move by multiples of n

        Args:
            cfg: RunConfig with one orbifold data file

        Returns:
            CheckReport with one subcheck per (component, shift)
        """
        data = self._data(cfg)
        report = genus.lift_independence_check(
            data, cfg.precision(data.n), degree=cfg.jet_order, tamper=cfg.inject_fault
        )
        if not data.has_normal_lines():
            report.detail = "no normal lines: nothing to shift"
            if cfg.inject_fault:
                report.ok = False
                report.first_mismatch = "injected fault on data without normal lines"
        return self._finish(report)

    def compare_analytic(self, cfg: RunConfig) -> CheckReport:
        """
        Analytic stalks at (g, h) against sector integrands at (g, -h), cyclic groups only

        Args:
            cfg: RunConfig with one orbifold data file over Z/n

        Returns:
            CheckReport with one subcheck per commuting pair
        """
        data = self._data(cfg)
        N = cfg.precision(data.n)
        pairs = commuting_pairs(data.group)
        reports = []
        for pair in tqdm(pairs, desc="pairs", disable=self.logger.getEffectiveLevel() > logging.INFO):
            reports.append(
                genus.analytic_compare(data, pair, N, degree=cfg.jet_order, tamper=cfg.inject_fault)
            )
        return self._finish(CheckReport.combine(f"analytic comparison on {data.name}", reports, order=N))

    def run(self, cfg: RunConfig) -> CheckReport:
        handlers = {
            "verify-theta": self.verify_theta,
            "verify-lifts": self.verify_lifts,
            "compare-analytic": self.compare_analytic,
        }
        if cfg.command not in handlers:
            raise StructureError(f"verification service does not handle {cfg.command}")
        return handlers[cfg.command](cfg)


_verification_instance = None


def get_verification_service() -> VerificationService:
    global _verification_instance
    if _verification_instance is None:
        _verification_instance = VerificationService()
    return _verification_instance
