"""
Group cohomology with Z/n coefficients

2-cochains are |G| x |G| integer tables reduced mod n. The coboundaries are

    (d1 f)(g, h)    = f(h) - f(gh) + f(g)
    (d2 u)(g, h, j) = u(h, j) - u(gh, j) + u(g, hj) - u(g, h)

H^2(G; Z/n) is read off the Smith normal forms of d1 and d2 over Z.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form
from tqdm import tqdm

from src.algebra.exactnum import CyclotomicNumber
from src.algebra.groups import CommutingPair, FiniteGroup, commuting_pairs
from src.utils.errors import DomainError, NotACocycleError, ResourceLimitError, StructureError

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


class Cocycle2:
    """A 2-cochain G x G -> Z/n (a cocycle once is_cocycle says so)"""

    def __init__(self, group: FiniteGroup, modulus: int, table):
        if modulus < 1:
            raise DomainError(f"modulus must be positive, got {modulus}")
        array = np.asarray(table, dtype=np.int64)
        if array.shape != (group.order, group.order):
            raise StructureError(
                f"cochain table must be {group.order} x {group.order}, got {array.shape}"
            )
        self.group = group
        self.modulus = modulus
        self.table = np.mod(array, modulus)
        self.table.setflags(write=False)

    def __call__(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def __add__(self, other: "Cocycle2") -> "Cocycle2":
        if other.group is not self.group or other.modulus != self.modulus:
            raise StructureError("cochains live on different groups or moduli")
        return Cocycle2(self.group, self.modulus, self.table + other.table)

    def scale(self, c: int) -> "Cocycle2":
        return Cocycle2(self.group, self.modulus, self.table * c)

    def __eq__(self, other):
        if not isinstance(other, Cocycle2):
            return NotImplemented
        return (
            self.group is other.group
            and self.modulus == other.modulus
            and bool(np.array_equal(self.table, other.table))
        )

    __hash__ = None

    def __repr__(self):
        return f"Cocycle2({self.group.name}, mod {self.modulus})"


def _mul_array(G: FiniteGroup) -> np.ndarray:
    return np.asarray(G.table, dtype=np.int64)


def _coboundary_defect(G: FiniteGroup, table: np.ndarray) -> np.ndarray:
    """(d2 u)(g, h, j) as an |G|^3 array, not reduced"""
    M = _mul_array(G)
    idx = np.arange(G.order)
    t1 = table[np.newaxis, :, :]
    t2 = table[M[:, :, np.newaxis], idx[np.newaxis, np.newaxis, :]]
    t3 = table[idx[:, np.newaxis, np.newaxis], M[np.newaxis, :, :]]
    t4 = table[:, :, np.newaxis]
    return t1 - t2 + t3 - t4


def is_cocycle(c: Cocycle2) -> Tuple[bool, Optional[Triple]]:
    """Exhaustive check over all |G|^3 triples; returns the first violating (g, h, j)"""
    defect = np.mod(_coboundary_defect(c.group, c.table), c.modulus)
    bad = np.argwhere(defect != 0)
    if len(bad) == 0:
        return True, None
    g, h, j = (int(x) for x in bad[0])
    return False, (g, h, j)


def coboundary(f: Sequence[int], G: FiniteGroup, n: int) -> Cocycle2:
    """d1 of a 1-cochain f: G -> Z/n"""
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (G.order,):
        raise StructureError(f"1-cochain needs {G.order} values, got {f.shape}")
    M = _mul_array(G)
    return Cocycle2(G, n, f[np.newaxis, :] - f[M] + f[:, np.newaxis])


@lru_cache(maxsize=None)
def cup_product_cocycle(n: int) -> Cocycle2:
    """u((l1, k1), (l2, k2)) = l1 k2 on (Z/n)^2"""
    G = FiniteGroup.abelian([n, n])
    table = [
        [G.coordinates(a)[0] * G.coordinates(b)[1] for b in G.elements] for a in G.elements
    ]
    return Cocycle2(G, n, table)


def lift_cocycle(u: Cocycle2, m: int) -> Cocycle2:
    """Push u forward along Z/n -> Z/m, x -> (m/n) x"""
    if m % u.modulus:
        raise DomainError(f"{m} is not a multiple of {u.modulus}")
    return Cocycle2(u.group, m, u.table * (m // u.modulus))


# ---------------------------------------------------------
# H^2 by Smith normal form
# ---------------------------------------------------------
class H2Group(NamedTuple):
    """H^2(G; Z/n) as invariant factors d_1 | d_2 | ..."""
    invariant_factors: Tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def render(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)


def _d1_matrix(G: FiniteGroup) -> Matrix:
    size = G.order
    rows = []
    for g in G.elements:
        for h in G.elements:
            row = [0] * size
            row[h] += 1
            row[G.mul(g, h)] -= 1
            row[g] += 1
            rows.append(row)
    return Matrix(rows)


def _d2_matrix(G: FiniteGroup) -> Matrix:
    size = G.order
    rows = []
    for g in G.elements:
        for h in G.elements:
            for j in G.elements:
                row = [0] * (size * size)
                row[h * size + j] += 1
                row[G.mul(g, h) * size + j] -= 1
                row[g * size + G.mul(h, j)] += 1
                row[g * size + h] -= 1
                rows.append(row)
    return Matrix(rows)


def _diagonal(snf: Matrix) -> List[int]:
    return [abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0]


def _invariant_factors(cyclic_orders: Sequence[int]) -> Tuple[int, ...]:
    """Regroup a direct sum of cyclic groups into invariant factor form"""
    by_prime: Dict[int, List[int]] = {}
    for m in cyclic_orders:
        for p, e in sympy.factorint(m).items():
            by_prime.setdefault(p, []).append(p ** e)
    length = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * length
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            factors[i] *= q
    return tuple(sorted(f for f in factors if f > 1))


def h2_compute(G: FiniteGroup, n: int, max_order: int = 8) -> H2Group:
    """H^2(G; Z/n) = (H^2(G; Z) x Z/n) + Tor(H^3(G; Z), Z/n) from the integral cochain complex"""
    if n < 1:
        raise DomainError(f"modulus must be positive, got {n}")
    if G.order > max_order:
        raise ResourceLimitError(
            f"h2_compute is limited to |G| <= {max_order}, got {G.order}"
        )
    d1 = _diagonal(smith_normal_form(_d1_matrix(G), domain=ZZ))
    d2 = _diagonal(smith_normal_form(_d2_matrix(G), domain=ZZ))
    free = G.order ** 2 - len(d1) - len(d2)
    cyclic = [n] * free
    cyclic += [math.gcd(a, n) for a in d1]
    cyclic += [math.gcd(b, n) for b in d2]
    logger.debug(f"H2({G.name}; Z/{n}): ranks d1={len(d1)} d2={len(d2)}, free part {free}")
    return H2Group(_invariant_factors(cyclic))


# ---------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------
def _all_tables(n: int, cells: int, limit: int) -> np.ndarray:
    count = n ** cells
    if count > limit:
        raise ResourceLimitError(f"{count} cochains exceed the enumeration limit {limit}")
    index = np.arange(count, dtype=np.int64)
    digits = np.empty((count, cells), dtype=np.int64)
    for c in range(cells):
        digits[:, c] = index % n
        index //= n
    return digits


def _d2_dense(G: FiniteGroup) -> np.ndarray:
    return np.array(_d2_matrix(G).tolist(), dtype=np.int64)


def enumerate_cocycles(G: FiniteGroup, n: int, limit: int = 2 ** 20) -> List[Cocycle2]:
    size = G.order
    tables = _all_tables(n, size * size, limit)
    defects = np.mod(tables @ _d2_dense(G).T, n)
    keep = np.all(defects == 0, axis=1)
    return [Cocycle2(G, n, row.reshape(size, size)) for row in tables[keep]]


def brute_force_h2_order(G: FiniteGroup, n: int, limit: int = 2 ** 20) -> int:
    """|Z^2| / |B^2| by enumerating every 2-cochain and every 1-cochain"""
    size = G.order
    cocycle_count = 0
    d2 = _d2_dense(G).T
    tables = _all_tables(n, size * size, limit)
    chunk = 1 << 14
    for start in tqdm(range(0, len(tables), chunk), desc=f"cochains of {G.name}", leave=False, disable=len(tables) <= chunk):
        block = tables[start:start + chunk]
        cocycle_count += int(np.all(np.mod(block @ d2, n) == 0, axis=1).sum())
    d1 = np.array(_d1_matrix(G).tolist(), dtype=np.int64).T
    boundaries = np.mod(_all_tables(n, size, limit) @ d1, n)
    boundary_count = len(np.unique(boundaries, axis=0))
    if cocycle_count % boundary_count:
        raise ArithmeticError("coboundaries do not form a subgroup of cocycles")
    return cocycle_count // boundary_count


# ---------------------------------------------------------
# Antisymmetrization, discrete torsion, Weil pairing
# ---------------------------------------------------------
class EpsilonForm:
    """eps(g, h) = u(g, h) - u(h, g) mod n on commuting pairs"""

    def __init__(self, group: FiniteGroup, modulus: int, values: Dict[CommutingPair, int]):
        self.group = group
        self.modulus = modulus
        self.values = {CommutingPair(*k): int(v) % modulus for k, v in values.items()}

    @classmethod
    def trivial(cls, group: FiniteGroup, modulus: int) -> "EpsilonForm":
        return cls(group, modulus, {pair: 0 for pair in commuting_pairs(group)})

    def __call__(self, g: int, h: int) -> int:
        key = CommutingPair(g, h)
        if key not in self.values:
            raise DomainError(f"eps is only defined on commuting pairs, got {tuple(key)}")
        return self.values[key]

    def is_trivial(self) -> bool:
        return not any(self.values.values())

    def scale(self, c: int) -> "EpsilonForm":
        return EpsilonForm(self.group, self.modulus, {k: v * c for k, v in self.values.items()})

    def violations(self, limit: int = 10) -> List[str]:
        """Failures of antisymmetry, the cocycle relation and bilinearity in each slot"""
        G, n, eps = self.group, self.modulus, self.values
        found: List[str] = []

        def fail(message: str) -> bool:
            found.append(message)
            return len(found) >= limit

        for (g, h), v in eps.items():
            if (v + eps[(h, g)]) % n and fail(f"eps({g},{h}) != -eps({h},{g})"):
                return found
        for g in G.elements:
            for h in G.elements:
                for j in G.elements:
                    keys = [(h, j), (G.mul(g, h), j), (g, G.mul(h, j)), (g, h)]
                    if all(k in eps for k in keys):
                        a, b, c, d = (eps[k] for k in keys)
                        if (a - b + c - d) % n and fail(f"cocycle relation fails at ({g},{h},{j})"):
                            return found
                    left = [(G.mul(g, j), h), (g, h), (j, h)]
                    if all(k in eps for k in left):
                        a, b, c = (eps[k] for k in left)
                        if (a - b - c) % n and fail(f"eps({g}{j},{h}) != eps({g},{h}) + eps({j},{h})"):
                            return found
                    right = [(g, G.mul(h, j)), (g, h), (g, j)]
                    if all(k in eps for k in right):
                        a, b, c = (eps[k] for k in right)
                        if (a - b - c) % n and fail(f"eps({g},{h}{j}) != eps({g},{h}) + eps({g},{j})"):
                            return found
        return found

    def __repr__(self):
        return f"EpsilonForm({self.group.name}, mod {self.modulus})"


def _antisymmetrize(u: Cocycle2, g: int, h: int) -> int:
    return (int(u.table[g, h]) - int(u.table[h, g])) % u.modulus


def epsilon(u: Cocycle2) -> EpsilonForm:
    ok, witness = is_cocycle(u)
    if not ok:
        raise NotACocycleError(f"table is not a 2-cocycle mod {u.modulus}, fails at {witness}", witness)
    return EpsilonForm(
        u.group, u.modulus, {pair: _antisymmetrize(u, *pair) for pair in commuting_pairs(u.group)}
    )


def _check_root(primitive_root: int, n: int) -> None:
    if math.gcd(primitive_root, n) != 1:
        raise DomainError(f"zeta_{n}^{primitive_root} is not a primitive root of unity")


def delta_phase(e: EpsilonForm, pair: CommutingPair, primitive_root: int = 1) -> CyclotomicNumber:
    """x^eps(g,h) with x = zeta_n^primitive_root"""
    _check_root(primitive_root, e.modulus)
    return CyclotomicNumber.zeta(e.modulus, primitive_root * e(*pair))


def weil_pairing(a: Sequence[int], b: Sequence[int], n: int, primitive_root: int = 1) -> CyclotomicNumber:
    """delta of the cup-product class at (a, b) in (Z/n)^2"""
    _check_root(primitive_root, n)
    u = cup_product_cocycle(n)
    G = u.group
    value = _antisymmetrize(u, G.from_coordinates(a), G.from_coordinates(b))
    return CyclotomicNumber.zeta(n, primitive_root * value)
