"""
Tests for the theta product, the exponential f and their jets
Run: python scripts/test_jacobi.py
"""

import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.algebra import jacobi
from src.algebra.exactnum import YRational
from src.algebra.jacobi import (
    FractionPair,
    build_f_jet,
    cached_jet_keys,
    clear_caches,
    f_composition_check,
    f_fraction_check,
    f_jet,
    inverse_f_jet,
    numeric_agreement_check,
    numeric_f_eval,
    numeric_theta_eval,
    theta_reduced,
    theta_shift_check,
    x_over_f_jet,
)
from src.algebra.series import Jet
from src.config import Settings
from src.utils.errors import DomainError, PoleError

TAU = 0.9j
Y_HALF = YRational.y_power(Fraction(1, 2))
SEED = Settings.model_fields["seed"].default


def test_theta_matches_numeric_product():
    for x in (0.3, 0.2 + 0.4j):
        exact = theta_reduced(6).evaluate(TAU, x)
        assert abs(exact - numeric_theta_eval(TAU, x)) < 1e-9


def test_f_matches_numeric_quotient():
    pair = FractionPair.build(6)
    x, z = 0.25 + 0.1j, 0.4
    assert abs(pair.evaluate(TAU, x, z) - numeric_f_eval(TAU, x, z)) < 1e-9


def test_theta_is_odd():
    theta = theta_reduced(5)
    assert theta.invert_s() == theta.scale(-1)


def test_theta_quasi_periodicity():
    report = theta_shift_check(6)
    assert report.ok, report.lines()


def test_f_periodicity_identities():
    assert f_fraction_check(5).ok
    assert f_fraction_check(5, k=2).ok
    assert f_fraction_check(5, k=0, ell=1).ok
    assert f_fraction_check(4, k=1, base_shift=1).ok


def test_f_composition():
    report = f_composition_check(4)
    assert report.ok
    assert len(report.subchecks) == 3


def test_corrupted_theta_fails_shift_check():
    theta = theta_reduced(5)
    damaged = theta + type(theta).monomial(1, 2, Fraction(1, 2), theta.prec)
    report = theta_shift_check(5, base=damaged)
    assert not report.ok
    assert report.first_mismatch is not None


def test_order_guard():
    with pytest.raises(DomainError):
        theta_shift_check(1)
    with pytest.raises(DomainError):
        numeric_theta_eval(-0.5j, 0.1)


def test_x_over_f_leading_value():
    jet = x_over_f_jet(2, 2)
    constant = jet.extract_coefficient((0,))
    assert constant.coefficient(0) == Y_HALF.inverse() - Y_HALF


def test_x_over_f_matches_numeric():
    degree, x, z = 4, 0.02, 0.35
    jet = x_over_f_jet(degree, 4)
    approx = sum(
        (c.evaluate(TAU, z) * x ** k for k, c in enumerate(jet.univariate_coefficients())),
        0j,
    )
    assert abs(approx - x / numeric_f_eval(TAU, x, z)) < 1e-7


def test_inverse_f_jet_inverts_f_jet():
    for ell, k, n in ((1, 0, 2), (1, 1, 2), (0, 1, 3), (2, 2, 3)):
        product = f_jet(ell, k, n, 3, 3) * inverse_f_jet(ell, k, n, 3, 3)
        assert product == Jet.one(product.shape), (ell, k, n)


def test_lattice_point_is_a_pole():
    with pytest.raises(PoleError):
        f_jet(0, 0, 2, 2, 2)
    with pytest.raises(PoleError):
        inverse_f_jet(3, 3, 3, 2, 2)

def test_quasi_periodicity_to_order_twelve():
    assert theta_shift_check(12).ok
    assert f_fraction_check(12, k=1).ok
    assert f_fraction_check(12, k=2).ok


def test_f_jet_is_periodic_in_ell_and_quasi_periodic_in_k():
    degree, prec = 2, 3
    for ell, k, n in ((1, 0, 2), (1, 1, 2), (0, 1, 3), (2, 2, 3)):
        jet = f_jet(ell, k, n, degree, prec)
        assert build_f_jet(ell + n, k, n, degree, prec + 4) == jet, (ell, k, n)
        direct = build_f_jet(ell, k + n, n, degree, prec + 4)
        assert direct == jet.scale(YRational.y_power(-1, 2 * n)), (ell, k, n)
        assert f_jet(ell, k + n, n, degree, prec) == direct, (ell, k, n)
        assert f_jet(ell, k - n, n, degree, prec) == jet.scale(YRational.y_power(1, 2 * n))


def test_symbolic_values_agree_with_numeric_products():
    report = numeric_agreement_check(20, SEED)
    assert report.ok, report.lines()
    assert len(report.subchecks) == 10
    assert str(SEED) in report.name


def test_numeric_agreement_flags_a_corrupted_theta():
    theta = theta_reduced(8)
    damaged = theta + type(theta).monomial(1, 0, Fraction(1, 2), theta.prec)
    assert not numeric_agreement_check(8, SEED, base=damaged).ok


def test_jet_cache_keys_use_reduced_k():
    clear_caches()
    f_jet(1, 5, 3, 2, 2)
    inverse_f_jet(2, 7, 3, 2, 2)
    keys = cached_jet_keys()
    assert len(keys) == 2
    for label, ell, k, n, *_ in keys:
        assert 0 <= ell < n and 0 <= k < n, (label, ell, k, n)
    f_jet(1, 2, 3, 2, 2)
    assert len(cached_jet_keys()) == 2


def test_jet_cache_is_shared_across_threads_and_bounded():
    clear_caches()
    with ThreadPoolExecutor(max_workers=4) as pool:
        jets = list(pool.map(lambda _: f_jet(1, 1, 2, 2, 2), range(8)))
    assert all(jet == jets[0] for jet in jets)
    assert len(cached_jet_keys()) == 1
    limit = jacobi._JET_CACHE_LIMIT
    jacobi._JET_CACHE_LIMIT = 2
    try:
        for ell, k in ((0, 1), (1, 0), (1, 1)):
            f_jet(ell, k, 2, 1, 2)
        assert len(cached_jet_keys()) == 2
    finally:
        jacobi._JET_CACHE_LIMIT = limit
        clear_caches()


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("THETA AND f", dict(globals())))
