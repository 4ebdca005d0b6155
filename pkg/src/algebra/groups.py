"""
Finite groups, commuting pairs and the GL2(Z/n) action on pairs

Elements are the integers 0..|G|-1. An abelian presentation Z/n_1 x ... x Z/n_r
numbers its elements lexicographically by coordinates; a Cayley table keeps
the order its author gave.
"""

import math
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import sympy
from sympy.combinatorics.named_groups import DihedralGroup, SymmetricGroup

from src.utils.errors import DomainError, StructureError, UnsupportedGroupError

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]


class CommutingPair(NamedTuple):
    g: int
    h: int

    def swap(self) -> "CommutingPair":
        return CommutingPair(self.h, self.g)


class FiniteGroup:
    """Finite group given by a multiplication table on element indices"""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
        orders: Optional[Sequence[int]] = None,
        name: str = "G",
    ):
        self.table: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.order))
        self.orders = None if orders is None else tuple(int(n) for n in orders)
        self.name = name
        self.identity = self._find_identity()
        self.inverses = tuple(self._find_inverse(g) for g in range(self.order))

    # ---------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------
    @classmethod
    def abelian(cls, orders: Sequence[int], name: Optional[str] = None) -> "FiniteGroup":
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise StructureError(f"cyclic orders must be positive, got {list(orders)}")
        coordinates = list(product(*(range(n) for n in orders)))
        index = {c: i for i, c in enumerate(coordinates)}
        table = [
            [index[tuple((x + y) % n for x, y, n in zip(a, b, orders))] for b in coordinates]
            for a in coordinates
        ]
        labels = [",".join(str(x) for x in c) or "e" for c in coordinates]
        label = name or (" x ".join(f"Z/{n}" for n in orders) or "trivial")
        return cls(table, labels, orders, label)

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.abelian([])

    @classmethod
    def from_table(cls, elements: Sequence, mul: Sequence[Sequence], name: str = "G") -> "FiniteGroup":
        """Cayley table; entries are element labels or indices. Axioms are checked exhaustively."""
        labels = [str(e) for e in elements]
        size = len(labels)
        if len(set(labels)) != size:
            raise StructureError("element labels are not distinct")
        if len(mul) != size or any(len(row) != size for row in mul):
            raise StructureError(f"multiplication table must be {size} x {size}")
        position = {label: i for i, label in enumerate(labels)}
        table = []
        for i, row in enumerate(mul):
            out = []
            for j, entry in enumerate(row):
                if isinstance(entry, int) and not isinstance(entry, bool) and 0 <= entry < size:
                    out.append(entry)
                elif str(entry) in position:
                    out.append(position[str(entry)])
                else:
                    raise StructureError(f"table entry ({i}, {j}) = {entry!r} is not an element")
            table.append(out)
        for a in range(size):
            for b in range(size):
                ab = table[a][b]
                for c in range(size):
                    if table[ab][c] != table[a][table[b][c]]:
                        raise StructureError(
                            f"associativity fails at ({labels[a]}, {labels[b]}, {labels[c]})"
                        )
        return cls(table, labels, None, name)

    @classmethod
    def from_permutations(cls, permutations: Iterable, name: str) -> "FiniteGroup":
        elements = sorted(permutations, key=lambda p: p.array_form)
        index = {tuple(p.array_form): i for i, p in enumerate(elements)}
        table = [[index[tuple((a * b).array_form)] for b in elements] for a in elements]
        labels = [str(p.cyclic_form) for p in elements]
        return cls(table, labels, None, name)

    @classmethod
    def symmetric_group(cls, k: int) -> "FiniteGroup":
        return cls.from_permutations(SymmetricGroup(k).generate(), f"S{k}")

    @classmethod
    def dihedral_group(cls, m: int) -> "FiniteGroup":
        """Symmetries of the m-gon, order 2m"""
        return cls.from_permutations(DihedralGroup(m).generate(), f"D{m}")

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][g] == g == self.table[g][e] for g in range(self.order)):
                return e
        raise StructureError("table has no identity element")

    def _find_inverse(self, g: int) -> int:
        for h in range(self.order):
            if self.table[g][h] == self.identity == self.table[h][g]:
                return h
        raise StructureError(f"element {self.labels[g]} has no inverse")

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inverse(self, g: int) -> int:
        return self.inverses[g]

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverses[g], -k
        result = self.identity
        for _ in range(k):
            result = self.table[result][g]
        return result

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    @property
    def exponent(self) -> int:
        if self.orders is not None:
            return math.lcm(*self.orders) if self.orders else 1
        return math.lcm(*(self.element_order(g) for g in self.elements))

    def is_abelian(self) -> bool:
        return all(self.table[g][h] == self.table[h][g] for g in self.elements for h in self.elements)

    def is_cyclic(self) -> bool:
        return any(self.element_order(g) == self.order for g in self.elements)

    def commute(self, g: int, h: int) -> bool:
        return self.table[g][h] == self.table[h][g]

    def centralizer(self, g: int) -> List[int]:
        return [h for h in self.elements if self.commute(g, h)]

    def conjugacy_classes(self) -> List[List[int]]:
        seen = set()
        classes = []
        for g in self.elements:
            if g in seen:
                continue
            orbit = sorted({self.table[self.table[x][g]][self.inverses[x]] for x in self.elements})
            seen.update(orbit)
            classes.append(orbit)
        return classes

    # Additive notation for abelian presentations
    def coordinates(self, g: int) -> Tuple[int, ...]:
        self._require_presentation()
        out = []
        for n in reversed(self.orders):
            g, r = divmod(g, n)
            out.append(r)
        return tuple(reversed(out))

    def from_coordinates(self, coordinates: Sequence[int]) -> int:
        self._require_presentation()
        if len(coordinates) != len(self.orders):
            raise StructureError(f"{self.name} has rank {len(self.orders)}, got {list(coordinates)}")
        index = 0
        for x, n in zip(coordinates, self.orders):
            index = index * n + int(x) % n
        return index

    def _require_presentation(self) -> None:
        if self.orders is None:
            raise UnsupportedGroupError(f"{self.name} is not given by an abelian presentation")

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "order": self.order,
            "exponent": self.exponent,
            "abelian": self.is_abelian(),
            "classes": len(self.conjugacy_classes()),
        }

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def commuting_pairs(G: FiniteGroup) -> List[CommutingPair]:
    """All ordered commuting pairs, lexicographic by element index"""
    return [CommutingPair(g, h) for g in G.elements for h in G.elements if G.commute(g, h)]


def _is_p_power(order: int, p: int) -> bool:
    while order % p == 0:
        order //= p
    return order == 1


def p_power_pairs(G: FiniteGroup, p: int) -> List[CommutingPair]:
    if not sympy.isprime(p):
        raise DomainError(f"{p} is not prime")
    good = {g for g in G.elements if _is_p_power(G.element_order(g), p)}
    return [pair for pair in commuting_pairs(G) if pair.g in good and pair.h in good]


def _determinant(M: Matrix2) -> int:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def gl2_action(M: Matrix2, pair: CommutingPair, G: FiniteGroup) -> CommutingPair:
    """(g, h) -> (a g + b h, c g + d h) in additive notation"""
    if G.orders is None:
        raise UnsupportedGroupError(f"GL2 action needs an abelian presentation, {G.name} is a Cayley table")
    n = G.exponent
    if math.gcd(_determinant(M) % n, n) != 1:
        raise DomainError(f"matrix {M} is singular mod {n}")
    g, h = G.coordinates(pair.g), G.coordinates(pair.h)
    (a, b), (c, d) = M
    new_g = G.from_coordinates([a * x + b * y for x, y in zip(g, h)])
    new_h = G.from_coordinates([c * x + d * y for x, y in zip(g, h)])
    return CommutingPair(new_g, new_h)


@lru_cache(maxsize=None)
def gl2_matrices(n: int) -> Tuple[Matrix2, ...]:
    """GL2(Z/n), entries as least non-negative residues"""
    if n < 1:
        raise DomainError(f"modulus must be positive, got {n}")
    out = []
    for a, b, c, d in product(range(n), repeat=4):
        M = ((a, b), (c, d))
        if math.gcd(_determinant(M) % n, n) == 1:
            out.append(M)
    return tuple(out)


def pair_orbits(G: FiniteGroup, matrices: Optional[Sequence[Matrix2]] = None) -> List[List[CommutingPair]]:
    """Orbits of commuting pairs under GL2(Z/exponent)"""
    matrices = gl2_matrices(G.exponent) if matrices is None else matrices
    remaining = set(commuting_pairs(G))
    orbits = []
    for start in commuting_pairs(G):
        if start not in remaining:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            pair = frontier.pop()
            for M in matrices:
                image = gl2_action(M, pair, G)
                if image not in orbit:
                    orbit.add(image)
                    frontier.append(image)
        remaining -= orbit
        orbits.append(sorted(orbit))
    return orbits
