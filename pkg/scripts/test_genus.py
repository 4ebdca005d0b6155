"""
Tests for sector integrals, orbifold sums, torsion twists and the genus variants
Run: python scripts/test_genus.py
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.algebra import genus
from src.algebra.cohom import EpsilonForm, cup_product_cocycle, epsilon
from src.algebra.exactnum import CyclotomicNumber, YRational
from src.algebra.groups import CommutingPair, FiniteGroup, gl2_action, gl2_matrices
from src.algebra.series import Jet, JetShape, LinearForm, PuiseuxSeries
from src.config import Settings
from src.services.data_service import DataService
from src.utils.errors import DomainError, PoleError, StructureError, UnsupportedGroupError

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
NO_ROOT = LinearForm.of([])
SEED = Settings.model_fields["seed"].default


def load(name: str) -> genus.OrbifoldData:
    return DataService().load_orbifold(str(FIXTURES / name))


def test_point_with_trivial_action():
    data = load("point_z2.orb")
    assert genus.orbifold_genus(data, 3) == 4
    assert genus.orbifold_genus(data, 3, "divide_by_G") == 2


def test_discrete_torsion_on_a_point():
    data = load("point_z2xz2.orb")
    e = epsilon(cup_product_cocycle(2))
    assert genus.orbifold_genus(data, 2, "divide_by_G") == 4
    assert genus.twisted_genus(data, e, 2, "divide_by_G") == 1
    trivial = EpsilonForm.trivial(e.group, 2)
    assert genus.twisted_genus(data, trivial, 2) == genus.orbifold_genus(data, 2)


def test_twist_needs_matching_group():
    data = load("point_z2.orb")
    with pytest.raises(StructureError):
        genus.twisted_genus(data, epsilon(cup_product_cocycle(2)), 2)


def test_nonabelian_point_counts_conjugacy_classes():
    S3 = FiniteGroup.symmetric_group(3)
    data = genus.OrbifoldData(S3, [genus.FixedComponent.point()], trivial_action=True)
    assert genus.orbifold_genus(data, 2) == 18
    assert genus.orbifold_genus(data, 2, "divide_by_G") == 3
    assert genus.orbifold_genus(data, 2, prime=2) == 10
    with pytest.raises(DomainError):
        g, h = next((g, h) for g in S3.elements for h in S3.elements if not S3.commute(g, h))
        data.sector(CommutingPair(g, h))


def test_cp1_identity_sector_leading_term():
    data = load("cp1_z2.orb")
    value = genus.pair_value(data, data.identity_pair, 2)
    half = YRational.y_power(Fraction(1, 2))
    assert value.coefficient(0) == half + half.inverse()


def test_threads_do_not_change_the_sum():
    data = load("cp1_z3.orb")
    assert genus.orbifold_genus(data, 2, threads=3) == genus.orbifold_genus(data, 2)


def test_lift_shift_needs_the_y_correction():
    comp = genus.FixedComponent.point("p", [genus.NormalLine(NO_ROOT, 1, 0)])
    reference = genus.sector_value(comp, 3, 3)
    shifted = [(1 + 3, 0 - 3)]
    assert genus.sector_value(comp, 3, 3, lifts=shifted) == reference
    assert genus.sector_value(comp, 3, 3, lifts=shifted, correction=False) != reference


def test_lift_must_reduce_to_character():
    comp = genus.FixedComponent.point("p", [genus.NormalLine(NO_ROOT, 1, 0)])
    with pytest.raises(StructureError):
        genus.sector_value(comp, 3, 2, lifts=[(2, 0)])


def test_lift_independence_on_cp1():
    data = load("cp1_z2.orb")
    report = genus.lift_independence_check(data, 2)
    assert report.ok, report.lines()
    assert report.subchecks
    assert not genus.lift_independence_check(data, 2, shifts=(1,), tamper=True).ok


def test_analytic_comparison_on_cp1():
    data = load("cp1_z2.orb")
    report = genus.analytic_compare_all(data, 2)
    assert report.ok, report.lines()
    assert not genus.analytic_compare(data, CommutingPair(1, 1), 2, tamper=True).ok


def test_analytic_comparison_needs_cyclic_group():
    data = load("point_z2xz2.orb")
    with pytest.raises(UnsupportedGroupError):
        genus.analytic_compare(data, CommutingPair(0, 0), 2)


def test_trivial_character_is_a_pole():
    comp = genus.FixedComponent.point("p", [genus.NormalLine(NO_ROOT, 2, 4)])
    with pytest.raises(PoleError):
        comp.validate(2)


def test_euler_characteristic():
    assert genus.orbifold_euler_characteristic(load("cp1_z2.orb")) == 4
    assert genus.orbifold_euler_characteristic(load("cp1_z3.orb")) == 6
    assert genus.orbifold_euler_characteristic(load("point_z2.orb")) == 2


def test_height_one_model():
    assert genus.height_one_genus(load("point_z2.orb")) == 2
    assert genus.height_one_genus(load("cp1_z2.orb")) == 2
    data = load("cp1_z3.orb")
    assert genus.height_one_genus(data) == 3
    assert genus.height_one_genus(data, p=2) == 1
    assert isinstance(genus.height_one_genus(data, p=3), CyclotomicNumber)


def test_witten_genus_of_cp1_vanishes():
    data = load("cp1_z2.orb")
    comp = data.ambient[0]
    assert genus.witten_genus(comp.tangent_roots, comp.integral, 3, comp.generators) == 0


def test_witten_genus_low_order_terms():
    h = LinearForm.of([1])
    value = genus.witten_genus([h, h], {(2,): Fraction(1)}, 2, ["h"])
    assert value.coefficient(0) == Fraction(-1, 12)
    assert value.coefficient(1) == 2


def test_checks_at_order_eight():
    for name, lift_count, pair_count in (("cp1_z2.orb", 24, 4), ("cp1_z3.orb", 64, 9)):
        data = load(name)
        N = Fraction(8, data.n)
        lifts = genus.lift_independence_check(data, N)
        assert lifts.ok, lifts.lines()
        assert len(lifts.subchecks) == lift_count
        analytic = genus.analytic_compare_all(data, N)
        assert analytic.ok, analytic.lines()
        assert len(analytic.subchecks) == pair_count


def test_has_normal_lines():
    assert load("cp1_z2.orb").has_normal_lines()
    assert not load("point_z2.orb").has_normal_lines()
    assert not genus.OrbifoldData(FiniteGroup.abelian([2]), [genus.FixedComponent.point()]).has_normal_lines()


def relabel(data: genus.OrbifoldData, M) -> genus.OrbifoldData:
    """Move sector (g, h) to M (g, h) and send each character (a, b) to M (a, b)"""
    n = data.n
    (a, b), (c, d) = M
    sectors = {}
    for pair, comps in data.sectors.items():
        sectors[gl2_action(M, pair, data.group)] = [
            comp._replace(normal_lines=tuple(
                genus.NormalLine(line.root, (a * line.a + b * line.b) % n, (c * line.a + d * line.b) % n)
                for line in comp.normal_lines
            ))
            for comp in comps
        ]
    return genus.OrbifoldData(data.group, data.ambient, sectors, name=data.name)


def characters(comps) -> list:
    return sorted(tuple(sorted(comp.characters())) for comp in comps)


def test_gl2_relabeling_leaves_the_sum_unchanged():
    for name in ("cp1_z2.orb", "cp1_z3.orb"):
        data = load(name)
        expected = genus.orbifold_genus(data, 2)
        for M in gl2_matrices(data.n):
            moved = relabel(data, M)
            moved.validate()
            for pair in data.sectors:
                assert characters(moved.sector(pair)) == characters(data.sector(pair)), (M, pair)
            assert genus.orbifold_genus(moved, 2) == expected, M


def test_height_one_point_term():
    for n in (2, 3, 4, 5):
        G = FiniteGroup.abelian([n])
        for a in (1, n - 1):
            sectors = {(g, 0): [] for g in range(1, n)}
            sectors[(1, 0)] = [genus.FixedComponent.point("p", [genus.NormalLine(NO_ROOT, a, 0)])]
            data = genus.OrbifoldData(G, [genus.FixedComponent.point()], sectors)
            term = genus.height_one_genus(data) - 1
            assert term == (1 - CyclotomicNumber.zeta(n, -a)).inverse(), (n, a)


def test_symmetric_power_is_exponential():
    shape = JetShape(("a", "b"), 2)
    for i in range(20):
        rng = random.Random(SEED + i)
        V = [LinearForm.of([rng.randint(-2, 2), rng.randint(-2, 2)]) for _ in range(rng.randint(1, 2))]
        W = [LinearForm.of([rng.randint(-2, 2), rng.randint(-2, 2)]) for _ in range(rng.randint(1, 2))]
        both = genus.symmetric_power(V + W, 3, shape)
        product = (genus.symmetric_power(V, 3, shape) * genus.symmetric_power(W, 3, shape)).truncate(3)
        assert both == product, (V, W)


def test_symmetric_power_of_trivial_line():
    shape = JetShape(("u",), 1)
    geometric = PuiseuxSeries({k: 1 for k in range(5)}, prec=5)
    assert genus.symmetric_power([LinearForm.of([0])], 5, shape) == Jet.constant(shape, geometric)


def test_witten_genus_constant_term_is_a_hat():
    h = LinearForm.of([1])
    a, b = LinearForm.of([1, 0]), LinearForm.of([0, 1])
    cases = (
        ([h, h], {(2,): Fraction(1)}, ["h"]),
        ([h, LinearForm.of([2])], {(2,): Fraction(3)}, ["h"]),
        ([a, b], {(1, 1): Fraction(1)}, ["a", "b"]),
    )
    for roots, integral, generators in cases:
        shape = JetShape(tuple(generators), len(roots))
        expected = genus.integrate(genus.a_hat(roots, shape), integral).coefficient(0)
        assert genus.witten_genus(roots, integral, 3, generators).coefficient(0) == expected, roots


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("GENUS", dict(globals())))
