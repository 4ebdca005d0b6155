"""
Tests for truncated Puiseux series and jets
Run: python scripts/test_series.py
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.algebra.exactnum import CyclotomicNumber, YRational
from src.algebra.series import (
    Jet,
    JetShape,
    LinearForm,
    PuiseuxSeries,
    compose,
    exp_jet,
    parse_canonical,
)
from src.utils.errors import NonUnitError, StructureError

Y_HALF = YRational.y_power(Fraction(1, 2))


def test_geometric_inverse():
    one_minus_q = PuiseuxSeries({0: 1, 1: -1})
    inverse = one_minus_q.invert_unit(5)
    assert inverse == PuiseuxSeries({k: 1 for k in range(5)}, prec=5)
    assert inverse * one_minus_q == PuiseuxSeries.one(5)


def test_inverse_with_negative_valuation():
    series = PuiseuxSeries({-1: Y_HALF, 0: 1}, prec=3)
    inverse = series.invert_unit()
    assert inverse.prec == 5
    assert inverse.coefficient(1) == Y_HALF.inverse()
    assert (series * inverse).truncate(2) == PuiseuxSeries.one(2)


def test_zero_is_not_a_unit():
    with pytest.raises(NonUnitError):
        PuiseuxSeries.zero(3).invert_unit()


def test_precision_is_tracked():
    a = PuiseuxSeries({0: 1, 1: 2}, prec=4)
    b = PuiseuxSeries({0: 1}, prec=2)
    assert (a + b).prec == 2
    assert (a * b).prec == 2
    assert a.shift(Fraction(1, 2)).prec == Fraction(9, 2)
    assert a.shift(Fraction(1, 2)).ramification == 2
    with pytest.raises(ValueError):
        b.coefficient(3)


def test_dilate_and_twist():
    series = PuiseuxSeries({Fraction(1, 2): 1, 1: 1})
    assert series.dilate(2) == PuiseuxSeries({1: 1, 2: 1})
    twisted = series.twist_qroot(1)
    assert twisted.coefficient(Fraction(1, 2)) == -1
    assert twisted.coefficient(1) == 1


def test_canonical_rendering():
    series = PuiseuxSeries({0: Y_HALF + Y_HALF.inverse()}, prec=1)
    assert series.render_canonical().splitlines() == [
        "q^(0/1) * y^(-1/2) : 1",
        "q^(0/1) * y^(1/2) : 1",
        "O(q^(1/1))",
    ]


def test_canonical_round_trip_with_denominators():
    fraction = YRational({0: 1}) / YRational({0: 1, 2: CyclotomicNumber.zeta(3)})
    series = PuiseuxSeries({0: 2, Fraction(1, 3): fraction, 1: Y_HALF}, prec=2)
    text = series.render_canonical()
    assert " / y^(" in text
    assert parse_canonical(text) == series


def test_canonical_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_canonical("q^(0/1) + y^(1/2) : 1")


def test_exp_jet_is_multiplicative():
    shape = JetShape(("u", "v"), 3)
    u = LinearForm.of([1, 0])
    v = LinearForm.of([0, 1])
    both = LinearForm.of([1, 1])
    assert exp_jet(u, shape) * exp_jet(v, shape) == exp_jet(both, shape)
    assert exp_jet(u, shape) * exp_jet(-u, shape) == Jet.one(shape)


def test_jet_inverse():
    shape = JetShape(("u",), 4)
    jet = Jet(shape, {(0,): PuiseuxSeries({0: 1, 1: 1}, prec=3), (1,): 2, (3,): Y_HALF})
    assert (jet * jet.invert_unit()) == Jet.one(shape)


def test_nilpotent_jet_is_not_a_unit():
    shape = JetShape(("u",), 2)
    with pytest.raises(NonUnitError):
        Jet.from_linear(LinearForm.of([1]), shape).invert_unit()


def test_compose_matches_powers():
    shape = JetShape(("u", "v"), 3)
    linear = LinearForm.of([2, -1])
    coefficients = [1, 3, Fraction(1, 2), 5]
    x = Jet.from_linear(linear, shape)
    expected = sum((x ** k).scale(c) for k, c in enumerate(coefficients))
    assert compose(coefficients, linear, shape) == expected


def test_shape_mismatch():
    a = Jet.one(JetShape(("u",), 2))
    b = Jet.one(JetShape(("v",), 2))
    with pytest.raises(StructureError):
        a * b
    with pytest.raises(StructureError):
        Jet(JetShape(("u",), 2), {(1, 0): 1})


def test_degree_truncation():
    shape = JetShape(("u",), 2)
    u = Jet.from_linear(LinearForm.of([1]), shape)
    assert (u * u * u) == Jet.zero(shape)
    assert shape.monomials() == [(0,), (1,), (2,)]


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("PUISEUX SERIES AND JETS", dict(globals())))
