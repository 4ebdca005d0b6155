"""
Tests for 2-cocycles, H^2, discrete torsion and the Weil pairing
Run: python scripts/test_cohom.py
"""

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.algebra.cohom import (
    Cocycle2,
    EpsilonForm,
    brute_force_h2_order,
    coboundary,
    cup_product_cocycle,
    delta_phase,
    enumerate_cocycles,
    epsilon,
    h2_compute,
    is_cocycle,
    lift_cocycle,
    weil_pairing,
)
from src.algebra.exactnum import CyclotomicNumber
from src.algebra.groups import CommutingPair, FiniteGroup, commuting_pairs
from src.config import Settings
from src.services.data_service import DataService
from src.utils.errors import DomainError, NotACocycleError, ResourceLimitError, StructureError

SEED = Settings.model_fields["seed"].default


def test_h2_of_klein_four():
    result = h2_compute(FiniteGroup.abelian([2, 2]), 2)
    assert result.order == 8
    assert result.render() == "Z/2 + Z/2 + Z/2"


def test_h2_of_cyclic_groups():
    assert h2_compute(FiniteGroup.abelian([3]), 3).invariant_factors == (3,)
    assert h2_compute(FiniteGroup.abelian([4]), 2).order == 2
    assert h2_compute(FiniteGroup.trivial(), 5).render() == "0"


def test_h2_of_s3_mod_two():
    assert h2_compute(FiniteGroup.symmetric_group(3), 2).order == 2


def test_h2_matches_brute_force():
    for G, n in ((FiniteGroup.abelian([2, 2]), 2), (FiniteGroup.abelian([3]), 3), (FiniteGroup.abelian([4]), 2)):
        assert brute_force_h2_order(G, n) == h2_compute(G, n).order, G.name


def test_size_guards():
    with pytest.raises(ResourceLimitError):
        h2_compute(FiniteGroup.symmetric_group(4), 2)
    with pytest.raises(ResourceLimitError):
        enumerate_cocycles(FiniteGroup.abelian([2, 2]), 2, limit=1000)


def test_cup_product_is_a_cocycle():
    u = cup_product_cocycle(3)
    assert is_cocycle(u) == (True, None)
    lifted = lift_cocycle(cup_product_cocycle(2), 4)
    assert lifted.modulus == 4
    assert is_cocycle(lifted)[0]


def test_non_cocycle_reports_a_witness():
    G = FiniteGroup.abelian([2])
    bad = Cocycle2(G, 2, [[0, 1], [0, 0]])
    ok, witness = is_cocycle(bad)
    assert not ok
    assert witness is not None
    with pytest.raises(NotACocycleError) as info:
        epsilon(bad)
    assert info.value.witness == witness


def test_coboundaries_have_trivial_epsilon():
    rng = random.Random(SEED)
    G = FiniteGroup.abelian([2, 4])
    for _ in range(3):
        f = [rng.randrange(4) for _ in G.elements]
        b = coboundary(f, G, 4)
        assert is_cocycle(b)[0]
        assert epsilon(b).is_trivial()


def test_epsilon_of_cup_product():
    u = cup_product_cocycle(2)
    G = u.group
    e = epsilon(u)
    a, b = G.from_coordinates([1, 0]), G.from_coordinates([0, 1])
    assert e(a, b) == 1
    assert e(b, a) == 1
    assert e(a, a) == 0
    assert e.violations() == []


def test_epsilon_is_class_invariant():
    G = FiniteGroup.abelian([3, 3])
    u = cup_product_cocycle(3)
    shifted = Cocycle2(u.group, 3, u.table + coboundary(list(range(G.order)), u.group, 3).table)
    assert epsilon(shifted).values == epsilon(u).values


def test_tampered_epsilon_has_violations():
    G = FiniteGroup.abelian([2, 2])
    values = {pair: 0 for pair in commuting_pairs(G)}
    values[CommutingPair(1, 2)] = 1
    assert EpsilonForm(G, 2, values).violations()


def test_cyclic_groups_carry_no_torsion():
    cocycles = enumerate_cocycles(FiniteGroup.abelian([2]), 2)
    assert len(cocycles) == 4
    for u in cocycles:
        assert epsilon(u).is_trivial()


def test_epsilon_only_on_commuting_pairs():
    D4 = FiniteGroup.dihedral_group(4)
    e = EpsilonForm.trivial(D4, 2)
    with pytest.raises(DomainError):
        e(*next((g, h) for g in D4.elements for h in D4.elements if not D4.commute(g, h)))


def test_weil_pairing():
    assert weil_pairing([1, 0], [0, 1], 5) == CyclotomicNumber.zeta(5, 1)
    assert weil_pairing([1, 0], [0, 1], 5).render() == "z5^1"
    assert weil_pairing([0, 1], [1, 0], 5) == CyclotomicNumber.zeta(5, 4)
    assert weil_pairing([2, 3], [2, 3], 7) == 1
    assert weil_pairing([1, 0], [0, 1], 5, primitive_root=2) == CyclotomicNumber.zeta(5, 2)


def test_weil_pairing_is_bilinear():
    n = 6
    a, b, c = [1, 2], [3, 5], [4, 1]
    left = weil_pairing([x + y for x, y in zip(a, b)], c, n)
    assert left == weil_pairing(a, c, n) * weil_pairing(b, c, n)


def test_delta_phase_and_root_guard():
    e = epsilon(cup_product_cocycle(2))
    G = e.group
    pair = CommutingPair(G.from_coordinates([1, 0]), G.from_coordinates([0, 1]))
    assert delta_phase(e, pair) == -1
    with pytest.raises(DomainError):
        delta_phase(e, pair, primitive_root=2)
    with pytest.raises(DomainError):
        weil_pairing([1, 0], [0, 1], 4, primitive_root=2)


def test_cochain_shape_is_checked():
    with pytest.raises(StructureError):
        Cocycle2(FiniteGroup.abelian([2]), 2, [[0, 0, 0]])


FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def klein_and_cyclic_cocycles():
    """Every cocycle of (Z/2)^2 mod 2 and Z/4 mod 2, plus their pushes to mod 4"""
    out = []
    for G in (FiniteGroup.abelian([2, 2]), FiniteGroup.abelian([4])):
        for u in enumerate_cocycles(G, 2):
            out.append(u)
            out.append(lift_cocycle(u, 4))
    return out


def z3_squared_cocycles():
    """c * cup + c' * transposed cup + a coboundary, all c, c' mod 3"""
    u = cup_product_cocycle(3)
    G = u.group
    transposed = Cocycle2(G, 3, u.table.T)
    rng = random.Random(SEED)
    out = []
    for c in range(3):
        for c2 in range(3):
            f = [rng.randrange(3) for _ in G.elements]
            out.append(u.scale(c) + transposed.scale(c2) + coboundary(f, G, 3))
    return out


def assert_delta_is_a_bicharacter(u: Cocycle2):
    e = epsilon(u)
    G, n = e.group, e.modulus
    delta = {pair: delta_phase(e, pair) for pair in commuting_pairs(G)}
    for (g, h), value in delta.items():
        assert value ** n == 1, (g, h)
        assert delta[(h, g)] * value == 1, (g, h)
        for j in G.elements:
            assert delta[(G.mul(g, j), h)] == value * delta[(j, h)], (g, j, h)
            assert delta[(g, G.mul(h, j))] == value * delta[(g, j)], (g, h, j)


def test_delta_is_a_bicharacter_on_small_abelian_groups():
    cocycles = klein_and_cyclic_cocycles() + z3_squared_cocycles()
    assert len(cocycles) > 9
    for u in cocycles:
        assert_delta_is_a_bicharacter(u)


def test_epsilon_of_every_enumerated_cocycle_is_consistent():
    for u in enumerate_cocycles(FiniteGroup.abelian([3]), 3):
        e = epsilon(u)
        assert e.violations() == []
        assert e.is_trivial()
    for u in z3_squared_cocycles():
        assert epsilon(u).violations() == []


def assert_delta_is_a_bicharacter_on_commuting(e: EpsilonForm):
    G = e.group
    for g, h in commuting_pairs(G):
        value = delta_phase(e, CommutingPair(g, h))
        assert value ** e.modulus == 1
        assert delta_phase(e, CommutingPair(h, g)) * value == 1


def test_d4_fixture_epsilon_is_consistent():
    u = DataService().load_cocycle(str(FIXTURES / "d4_cocycle.json"))
    assert is_cocycle(u)[0]
    e = epsilon(u)
    assert e.violations() == []
    assert_delta_is_a_bicharacter_on_commuting(e)


def test_delta_is_unchanged_by_pushing_the_coefficients():
    for u in klein_and_cyclic_cocycles()[::2] + z3_squared_cocycles():
        n = u.modulus
        e, wide = epsilon(u), epsilon(lift_cocycle(u, 2 * n))
        for pair in commuting_pairs(u.group):
            assert delta_phase(e, pair) == delta_phase(wide, pair), pair


def test_weil_pairing_is_a_perfect_alternating_form():
    for n in range(2, 7):
        vectors = [(a, b) for a in range(n) for b in range(n)]
        table = {(a, b): weil_pairing(a, b, n) for a in vectors for b in vectors}
        for a in vectors:
            assert table[(a, a)] == 1, (n, a)
            for b in vectors:
                ab = table[(a, b)]
                assert ab ** n == 1
                assert table[(b, a)] * ab == 1, (n, a, b)
                for c in vectors:
                    summed = tuple((x + y) % n for x, y in zip(a, c))
                    assert table[(summed, b)] == ab * table[(c, b)], (n, a, b, c)
            if a != (0, 0):
                assert any(table[(a, b)] != 1 for b in vectors), (n, a)


def test_h2_of_z2_mod_two():
    G = FiniteGroup.abelian([2])
    result = h2_compute(G, 2)
    assert result.invariant_factors == (2,)
    assert brute_force_h2_order(G, 2) == result.order == 2


if __name__ == "__main__":
    from runner import run_tests
    sys.exit(run_tests("COHOMOLOGY", dict(globals())))
