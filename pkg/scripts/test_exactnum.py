"""
Tests for exact cyclotomic and y-rational arithmetic
Run: python scripts/test_exactnum.py
"""

import cmath
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.algebra.exactnum import CyclotomicNumber, YRational, totient
from src.config import Settings
from src.utils.errors import ExactArithmeticError

SEED = Settings.model_fields["seed"].default


def zeta(m, k=1):
    return CyclotomicNumber.zeta(m, k)


def random_cyclotomic(rng: random.Random, m: int) -> CyclotomicNumber:
    return CyclotomicNumber(m, [rng.randint(-3, 3) for _ in range(totient(m))])


def test_zeta4_squared_is_minus_one():
    assert zeta(4) * zeta(4) == -1


def test_cyclotomic_relation():
    assert 1 + zeta(3) + zeta(3, 2) == 0
    assert (1 + zeta(3) + zeta(3, 2)).is_zero()


def test_inverse_of_one_minus_zeta3():
    a = 1 - zeta(3)
    assert a.inverse() * a == 1


def test_mixed_conductors_lift_to_lcm():
    assert zeta(4) * zeta(6) == zeta(12, 5)
    assert (zeta(4) + zeta(6)).conductor == 12


def test_field_axioms_randomized():
    rng = random.Random(SEED)
    for m in range(1, 8):
        for _ in range(6):
            a, b, c = (random_cyclotomic(rng, m) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            if not a.is_zero():
                assert a * a.inverse() == 1


def test_lift_is_a_ring_embedding():
    rng = random.Random(SEED + 1)
    for _ in range(5):
        a, b = random_cyclotomic(rng, 3), random_cyclotomic(rng, 3)
        assert (a * b).lift(12) == a.lift(12) * b.lift(12)
        assert (a + b).lift(12) == a.lift(12) + b.lift(12)


def test_render_and_parse():
    assert zeta(5).render() == "z5^1"
    assert zeta(4, 2).render() == "-1"
    x = Fraction(1, 2) + 3 * zeta(7, 2) - zeta(7, 5)
    assert CyclotomicNumber.parse(x.render()) == x


def test_from_powers_sums_roots_of_unity():
    assert CyclotomicNumber.from_powers(6, {0: 1, 2: 1, 4: 1}) == 0
    assert CyclotomicNumber.from_powers(4, {1: 2, 5: -1}) == zeta(4)
    assert CyclotomicNumber.from_powers(5, {}) == 0
    assert CyclotomicNumber.parse("z3^1 + z6^2") == 2 * zeta(3)
    assert CyclotomicNumber.parse("1 + z3^1 + z3^2") == 0


def test_division_by_zero():
    with pytest.raises(ExactArithmeticError):
        CyclotomicNumber.from_rational(0, 5).inverse()
    with pytest.raises(ZeroDivisionError):
        YRational.zero().inverse()


def test_sinh_factor_times_inverse():
    s = YRational({1: 1, -1: -1}, root=2)
    assert s * s.inverse() == 1


def test_inverse_of_one_minus_y_is_a_fraction():
    one_minus_y = YRational({0: 1, 2: -1}, root=2)
    inverse = one_minus_y.inverse()
    assert not inverse.is_laurent()
    assert inverse * one_minus_y == 1


def test_polynomial_division_reduces():
    quotient = YRational({0: 1, 4: -1}) / YRational({0: 1, 2: -1})
    assert quotient == YRational({0: 1, 2: 1})
    assert quotient.is_laurent()


def test_normalization_is_idempotent():
    x = YRational({0: 1, 1: zeta(3)}) / YRational({0: 2, 2: -1, 3: 5})
    again = YRational(x.num, dict(enumerate(x.den)), x.root)
    assert again == x
    assert again.den == x.den


def test_root_lifting():
    half = YRational.y_power(Fraction(1, 2))
    assert half.lift(6) == YRational.y_power(Fraction(1, 2), 6)
    assert half * half == YRational.y_power(1)


def test_numeric_evaluation():
    z = 0.3 + 0.1j
    value = (YRational.y_power(Fraction(1, 2)) + YRational.y_power(Fraction(-1, 2))).evaluate(z)
    assert abs(value - 2 * cmath.cosh(z / 2)) < 1e-12


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("EXACT ARITHMETIC", dict(globals())))
