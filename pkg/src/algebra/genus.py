"""
Fixed-point data and genus computations

A sector of a global quotient M // G is a commuting pair (g, h) together with
the components of M^g n M^h. Each component carries its own nilpotent
generators, tangent Chern roots u_j, normal lines (x_i, (a_i, b_i)) and an
integration table on top-degree monomials. The sector value is

    int prod_j u_j / f(u_j) * prod_i y^(B_i/n) / f(x_i + 2 pi i A_i/n - 2 pi i B_i tau/n)

with integer lifts (A_i, B_i) of the characters (a_i, b_i).
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple

import sympy

from src.algebra.cohom import EpsilonForm, delta_phase
from src.algebra.exactnum import ZERO, CyclotomicNumber, YRational
from src.algebra.groups import CommutingPair, FiniteGroup, commuting_pairs, p_power_pairs
from src.algebra.jacobi import f_jet, inverse_f_jet, x_over_f_jet
from src.algebra.series import Jet, JetShape, LinearForm, PuiseuxSeries, compose, exp_jet
from src.models.run_models import CheckReport
from src.utils.errors import DomainError, InputError, PoleError, StructureError, UnsupportedGroupError

logger = logging.getLogger(__name__)

Normalization = Literal["raw", "divide_by_G"]
Monomial = Tuple[int, ...]


class NormalLine(NamedTuple):
    """Normal line with Chern root `root` and character a e1 + b e2"""
    root: LinearForm
    a: int
    b: int
    lift: Optional[Tuple[int, int]] = None

    def lifts(self, n: int) -> Tuple[int, int]:
        if self.lift is None:
            return self.a % n, self.b % n
        A, B = self.lift
        if (A - self.a) % n or (B - self.b) % n:
            raise StructureError(f"lift ({A}, {B}) does not reduce to ({self.a}, {self.b}) mod {n}")
        return A, B

    def swapped(self) -> "NormalLine":
        lift = None if self.lift is None else (self.lift[1], self.lift[0])
        return NormalLine(self.root, self.b, self.a, lift)


class FixedComponent(NamedTuple):
    name: str
    dim: int
    generators: Tuple[str, ...]
    tangent_roots: Tuple[LinearForm, ...]
    normal_lines: Tuple[NormalLine, ...]
    integral: Dict[Monomial, Fraction]

    @classmethod
    def point(cls, name: str = "pt", normal_lines: Sequence[NormalLine] = ()) -> "FixedComponent":
        return cls(name, 0, (), (), tuple(normal_lines), {(): Fraction(1)})

    def shape(self, degree: Optional[int] = None) -> JetShape:
        return JetShape(self.generators, self.dim if degree is None else max(degree, self.dim))

    def without_lines(self) -> "FixedComponent":
        return self._replace(normal_lines=())

    def characters(self) -> List[Tuple[int, int]]:
        return [(line.a, line.b) for line in self.normal_lines]

    def validate(self, n: int) -> None:
        rank = len(self.generators)
        if len(self.tangent_roots) != self.dim:
            raise StructureError(
                f"component {self.name}: {len(self.tangent_roots)} tangent roots for dimension {self.dim}"
            )
        for form in list(self.tangent_roots) + [line.root for line in self.normal_lines]:
            if len(form.coefficients) != rank:
                raise StructureError(
                    f"component {self.name}: root {list(form.coefficients)} does not match generators {list(self.generators)}"
                )
            if form.constant:
                raise StructureError(f"component {self.name}: roots must be linear without constant term")
        for i, line in enumerate(self.normal_lines):
            if line.a % n == 0 and line.b % n == 0:
                raise PoleError(
                    f"component {self.name}: normal line {i} has trivial character (0, 0) mod {n}"
                )
            line.lifts(n)
        for monomial in self.integral:
            if len(monomial) != rank or sum(monomial) != self.dim:
                raise StructureError(
                    f"component {self.name}: integral entry {list(monomial)} is not a top-degree monomial"
                )


class OrbifoldData:
    """Sector data of M // G; pairs missing from `sectors` are looked up lazily"""

    def __init__(
        self,
        group: FiniteGroup,
        ambient: Sequence[FixedComponent],
        sectors: Optional[Dict[CommutingPair, Sequence[FixedComponent]]] = None,
        trivial_action: bool = False,
        name: str = "M",
    ):
        self.group = group
        self.n = group.exponent
        self.ambient = [c.without_lines() if trivial_action else c for c in ambient]
        self.sectors = {CommutingPair(*k): list(v) for k, v in (sectors or {}).items()}
        self.trivial_action = trivial_action
        self.name = name

    @property
    def identity_pair(self) -> CommutingPair:
        return CommutingPair(self.group.identity, self.group.identity)

    def sector(self, pair: CommutingPair) -> List[FixedComponent]:
        pair = CommutingPair(*pair)
        if not self.group.commute(*pair):
            raise DomainError(f"({pair.g}, {pair.h}) is not a commuting pair")
        if self.trivial_action or pair == self.identity_pair:
            return self.ambient
        if pair not in self.sectors:
            raise InputError(f"no sector data for the pair ({pair.g}, {pair.h})", location="sectors")
        return self.sectors[pair]

    def max_dim(self) -> int:
        comps = list(self.ambient) + [c for v in self.sectors.values() for c in v]
        return max((c.dim for c in comps), default=0)

    def has_normal_lines(self) -> bool:
        return not self.trivial_action and any(c.normal_lines for v in self.sectors.values() for c in v)

    def validate(self) -> None:
        for comp in self.ambient:
            comp.validate(self.n)
            if comp.normal_lines:
                raise StructureError(f"ambient component {comp.name} must not carry normal lines")
        identity = self.identity_pair
        for pair, comps in self.sectors.items():
            if not self.group.commute(*pair):
                raise StructureError(f"sector ({pair.g}, {pair.h}) is not a commuting pair")
            for comp in comps:
                comp.validate(self.n)
            if pair == identity and _signature(comps) != _signature(self.ambient):
                raise StructureError("the sector of the identity pair must equal the ambient data")
            twin = pair.swap()
            if twin in self.sectors:
                mirrored = [c._replace(normal_lines=tuple(l.swapped() for l in c.normal_lines)) for c in self.sectors[twin]]
                if _signature(comps, self.n) != _signature(mirrored, self.n):
                    raise StructureError(
                        f"swap symmetry: sectors ({pair.g}, {pair.h}) and ({twin.g}, {twin.h}) "
                        f"do not agree after exchanging a and b"
                    )


def _signature(comps: Sequence[FixedComponent], n: int = 0) -> List[tuple]:
    def reduce(x: int) -> int:
        return x % n if n else x
    return sorted(
        (c.dim, tuple(sorted((reduce(a), reduce(b)) for a, b in c.characters())))
        for c in comps
    )


# ---------------------------------------------------------
# Sector integrals
# ---------------------------------------------------------
def integrate(jet: Jet, integral: Dict[Monomial, Fraction]) -> PuiseuxSeries:
    """Apply the integration table to the top-degree part of a jet"""
    total = None
    for monomial, weight in integral.items():
        term = jet.extract_coefficient(monomial).scale(Fraction(weight))
        total = term if total is None else total + term
    if total is None:
        return PuiseuxSeries.zero(jet.precision())
    return total


def _tangent_factor(comp: FixedComponent, n: int, N, shape: JetShape) -> Jet:
    result = Jet.one(shape)
    if comp.tangent_roots:
        x_over_f = x_over_f_jet(shape.degree, N, 2 * n)
        for root in comp.tangent_roots:
            result = result * compose(x_over_f, root, shape)
    return result


def sector_integrand(
    comp: FixedComponent,
    n: int,
    N,
    degree: Optional[int] = None,
    lifts: Optional[Sequence[Tuple[int, int]]] = None,
    correction: bool = True,
) -> Jet:
    """The jet under the integral sign; `correction=False` drops the y^(B/n) factors"""
    shape = comp.shape(degree)
    if lifts is not None and len(lifts) != len(comp.normal_lines):
        raise StructureError(f"component {comp.name}: {len(lifts)} lifts for {len(comp.normal_lines)} lines")
    result = _tangent_factor(comp, n, N, shape)
    for i, line in enumerate(comp.normal_lines):
        if lifts is None:
            A, B = line.lifts(n)
        else:
            A, B = (int(v) for v in lifts[i])
            NormalLine(line.root, line.a, line.b, (A, B)).lifts(n)
        factor = compose(inverse_f_jet(A, -B, n, shape.degree, N), line.root, shape)
        if correction:
            factor = factor.scale(YRational.y_power(Fraction(B, n), 2 * n))
        result = result * factor
    return result


def sector_value(
    comp: FixedComponent,
    n: int,
    N,
    degree: Optional[int] = None,
    lifts: Optional[Sequence[Tuple[int, int]]] = None,
    correction: bool = True,
) -> PuiseuxSeries:
    target = Fraction(N)
    work = target
    for _ in range(6):
        value = integrate(sector_integrand(comp, n, work, degree, lifts, correction), comp.integral)
        if value.prec is None or value.prec >= target:
            return value.truncate(target)
        logger.warning(f"component {comp.name}: precision {value.prec} below {target}, raising working order")
        work += target - value.prec + 1
    raise StructureError(f"component {comp.name}: could not reach precision {target}")


def pair_value(data: OrbifoldData, pair: CommutingPair, N, degree: Optional[int] = None) -> PuiseuxSeries:
    """Phi_{g,h}: the sum of sector_value over the components of M^(g,h)"""
    comps = data.sector(pair)
    if not comps:
        logger.warning(f"{data.name}: empty fixed set for pair ({pair[0]}, {pair[1]}), contributes 0")
        return PuiseuxSeries.zero(N)
    start = time.perf_counter()
    total = PuiseuxSeries.zero(N)
    for comp in comps:
        total = total + sector_value(comp, data.n, N, degree)
    logger.debug(f"{data.name}: pair ({pair[0]}, {pair[1]}) in {(time.perf_counter() - start) * 1000:.1f} ms")
    return total


def sector_values(
    data: OrbifoldData,
    pairs: Sequence[CommutingPair],
    N,
    degree: Optional[int] = None,
    threads: int = 1,
) -> Dict[CommutingPair, PuiseuxSeries]:
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda pair: pair_value(data, pair, N, degree), pairs))
    else:
        values = [pair_value(data, pair, N, degree) for pair in pairs]
    return dict(zip(pairs, values))


def _pairs(data: OrbifoldData, prime: Optional[int]) -> List[CommutingPair]:
    if prime is None:
        return commuting_pairs(data.group)
    return p_power_pairs(data.group, prime)


def _normalize(total: PuiseuxSeries, data: OrbifoldData, normalization: Normalization) -> PuiseuxSeries:
    if normalization == "divide_by_G":
        return total.scale(Fraction(1, data.group.order))
    if normalization != "raw":
        raise DomainError(f"unknown normalization {normalization!r}")
    return total


def orbifold_genus(
    data: OrbifoldData,
    N,
    normalization: Normalization = "raw",
    prime: Optional[int] = None,
    degree: Optional[int] = None,
    threads: int = 1,
) -> PuiseuxSeries:
    """Sum of Phi_{g,h} over commuting pairs (p-power pairs when `prime` is set)"""
    values = sector_values(data, _pairs(data, prime), N, degree, threads)
    total = PuiseuxSeries.zero(N)
    for value in values.values():
        total = total + value
    return _normalize(total, data, normalization)


def _check_form(data: OrbifoldData, e: EpsilonForm, pairs: Sequence[CommutingPair]) -> None:
    if e.group.order != data.group.order or e.group.table != data.group.table:
        raise StructureError(f"eps is defined on {e.group.name}, data on {data.group.name}")
    missing = [p for p in pairs if p not in e.values]
    if missing:
        raise DomainError(f"eps is not defined on the pair {tuple(missing[0])}")


def twisted_genus(
    data: OrbifoldData,
    e: EpsilonForm,
    N,
    normalization: Normalization = "raw",
    prime: Optional[int] = None,
    primitive_root: int = 1,
    degree: Optional[int] = None,
    threads: int = 1,
) -> PuiseuxSeries:
    """Discrete-torsion twist: sum of delta(g, h) Phi_{g,h}"""
    pairs = _pairs(data, prime)
    _check_form(data, e, pairs)
    values = sector_values(data, pairs, N, degree, threads)
    total = PuiseuxSeries.zero(N)
    for pair in pairs:
        total = total + values[pair].scale(delta_phase(e, pair, primitive_root))
    return _normalize(total, data, normalization)


def _label(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else f"q^({value})"


def lift_independence_check(
    data: OrbifoldData,
    N,
    shifts: Sequence[int] = (-1, 1),
    degree: Optional[int] = None,
    correction: bool = True,
    tamper: bool = False,
) -> CheckReport:
    """Shift every lift (A_i, B_i) by (r n, r' n) and compare sector values exactly.

    `tamper` adds one to each reference value (negative control).
    """
    n = data.n
    reports = []
    for pair in commuting_pairs(data.group):
        for comp in data.sector(pair):
            if not comp.normal_lines:
                continue
            base_lifts = [line.lifts(n) for line in comp.normal_lines]
            reference = sector_value(comp, n, N, degree)
            if tamper:
                reference = reference + 1
            for r in shifts:
                for r2 in shifts:
                    lifts = [(A + r * n, B + r2 * n) for A, B in base_lifts]
                    value = sector_value(comp, n, N, degree, lifts, correction)
                    mismatch = reference.first_difference(value)
                    reports.append(CheckReport(
                        name=f"pair ({pair.g},{pair.h}) {comp.name}: lifts shifted by ({r}n, {r2}n)",
                        ok=mismatch is None,
                        order=N,
                        first_mismatch=_label(mismatch),
                    ))
    return CheckReport.combine(f"lift independence on {data.name}", reports, order=N)


# ---------------------------------------------------------
# Analytic stalk comparison (cyclic groups)
# ---------------------------------------------------------
def _require_cyclic(G: FiniteGroup) -> None:
    if G.orders is None or len(G.orders) > 1:
        raise UnsupportedGroupError(f"the analytic comparison needs a cyclic presentation Z/n, got {G.name}")


def _solve_weights(comp: FixedComponent, ell: int, k: int, n: int) -> List[int]:
    """Weights m with (ell m, -k m) = (a, b) mod n for every normal line"""
    weights = []
    for line in comp.normal_lines:
        found = [m for m in range(n) if (ell * m - line.a) % n == 0 and (-k * m - line.b) % n == 0]
        if not found:
            raise StructureError(
                f"component {comp.name}: character ({line.a}, {line.b}) is not a multiple of ({ell}, {-k}) mod {n}"
            )
        weights.append(found[0])
    return weights


def stalk_function(
    comp: FixedComponent, ell: int, k: int, weights: Sequence[int], n: int, N, shape: JetShape
) -> Jet:
    """F = y^(k sum(m)/n) prod_j f(x_j + 2 pi i m_j ell/n + 2 pi i tau m_j k/n)"""
    F = Jet.one(shape)
    for line, m in zip(comp.normal_lines, weights):
        F = F * compose(f_jet(ell * m, k * m, n, shape.degree, N), line.root, shape)
    return F.scale(YRational.y_power(Fraction(k * sum(weights), n), 2 * n))


def analytic_compare(
    data: OrbifoldData,
    pair: CommutingPair,
    N,
    m_lifts: Optional[Sequence[Sequence[int]]] = None,
    a_lift: Optional[Tuple[int, int]] = None,
    degree: Optional[int] = None,
    tamper: bool = False,
) -> CheckReport:
    """Stalk integrand at the torsion point (g, h) against the sector integrand of (g, -h)"""
    G = data.group
    _require_cyclic(G)
    n = data.n
    g, h = pair
    ell, k = (g, h) if a_lift is None else a_lift
    if (ell - g) % n or (k - h) % n:
        raise StructureError(f"lift ({ell}, {k}) does not reduce to ({g}, {h}) mod {n}")
    target = CommutingPair(g, G.inverse(h))
    reports = []
    for index, comp in enumerate(data.sector(target)):
        shape = comp.shape(degree)
        if m_lifts is not None:
            weights = [int(m) for m in m_lifts[index]]
            _check_weights(comp, weights, g, h, n)
        else:
            weights = _solve_weights(comp, g, h, n)
        F = stalk_function(comp, ell, k, weights, n, N, shape)
        stalk = _tangent_factor(comp, n, N, shape) * F.invert_unit()
        if tamper:
            stalk = stalk + 1
        integrand = sector_integrand(comp, n, N, degree)
        reports.append(CheckReport(
            name=f"{comp.name}: stalk at ({ell},{k}) = sector integrand at ({target.g},{target.h})",
            ok=stalk == integrand,
            order=N,
        ))
        for j in range(len(weights)):
            moved = list(weights)
            moved[j] += n
            reports.append(CheckReport(
                name=f"{comp.name}: F unchanged under m_{j} -> m_{j} + {n}",
                ok=stalk_function(comp, ell, k, moved, n, N, shape) == F,
                order=N,
            ))
        for dl, dk in ((n, 0), (0, n)):
            reports.append(CheckReport(
                name=f"{comp.name}: F unchanged under a -> a + ({dl}, {dk})",
                ok=stalk_function(comp, ell + dl, k + dk, weights, n, N, shape) == F,
                order=N,
            ))
    return CheckReport.combine(f"analytic comparison at ({g},{h})", reports, order=N)


def _check_weights(comp: FixedComponent, weights: Sequence[int], g: int, h: int, n: int) -> None:
    if len(weights) != len(comp.normal_lines):
        raise StructureError(f"component {comp.name}: {len(weights)} weights for {len(comp.normal_lines)} lines")
    for line, m in zip(comp.normal_lines, weights):
        if (g * m - line.a) % n or (-h * m - line.b) % n:
            raise StructureError(f"component {comp.name}: weight {m} does not produce ({line.a}, {line.b})")


def analytic_compare_all(data: OrbifoldData, N, degree: Optional[int] = None, tamper: bool = False) -> CheckReport:
    reports = [analytic_compare(data, pair, N, degree=degree, tamper=tamper) for pair in commuting_pairs(data.group)]
    return CheckReport.combine(f"analytic comparison on {data.name}", reports, order=N)


# ---------------------------------------------------------
# Witten genus
# ---------------------------------------------------------
def symmetric_power(roots: Sequence[LinearForm], t_order, shape: JetShape) -> Jet:
    """ch S_t(V) = prod_j (1 - t e^(x_j))^(-1), t written as q, below t^t_order"""
    t = PuiseuxSeries.monomial(1, 1)
    result = Jet.one(shape)
    for root in roots:
        factor = Jet.one(shape) - exp_jet(root, shape).scale(t)
        result = result * factor.invert_unit(precision=t_order)
    return result.truncate(t_order)


def a_hat(roots: Sequence[LinearForm], shape: JetShape) -> Jet:
    """prod_j x_j / (e^(x_j/2) - e^(-x_j/2))"""
    coefficients = [
        Fraction(1, 4 ** (m // 2) * math.factorial(m + 1)) if m % 2 == 0 else 0
        for m in range(shape.degree + 1)
    ]
    series = Jet.univariate(coefficients, shape.degree).invert_unit()
    result = Jet.one(shape)
    for root in roots:
        result = result * compose(series, root, shape)
    return result


def witten_genus(
    tangent_roots: Sequence[LinearForm],
    integral: Dict[Monomial, Fraction],
    N,
    generators: Optional[Sequence[str]] = None,
) -> PuiseuxSeries:
    """int A-hat(M) ch(tensor_{k>=1} S_{q^k}(T_C - 2d)) below q^N"""
    roots = list(tangent_roots)
    rank = len(roots[0].coefficients) if roots else 0
    generators = tuple(generators) if generators is not None else tuple(f"u{i}" for i in range(rank))
    shape = JetShape(generators, len(roots))
    integrand = a_hat(roots, shape)
    complexified = roots + [-r for r in roots]
    # ch S_t of the trivial rank-2d part: (1 - t)^(2d)
    trivial_part = PuiseuxSeries.one()
    for _ in complexified:
        trivial_part = trivial_part * (PuiseuxSeries.one() - PuiseuxSeries.monomial(1, 1))
    for k in range(1, math.ceil(N)):
        factor = symmetric_power(complexified, math.ceil(Fraction(N) / k), shape).scale(trivial_part)
        integrand = integrand * factor.map_series(lambda s, k=k: s.dilate(k)).truncate(N)
    return integrate(integrand, integral).truncate(N)


# ---------------------------------------------------------
# Height-one model
# ---------------------------------------------------------
def _todd_series(degree: int) -> Jet:
    """x / (1 - e^(-x)) as a univariate jet"""
    coefficients = [Fraction((-1) ** m, math.factorial(m + 1)) for m in range(degree + 1)]
    return Jet.univariate(coefficients, degree).invert_unit()


def height_one_genus(data: OrbifoldData, p: Optional[int] = None, degree: Optional[int] = None) -> CyclotomicNumber:
    """Phi(M) + sum over g != e of int Todd(M^g) / e(normal bundle), multiplicative formal group"""
    G, n = data.group, data.n
    if p is not None and not sympy.isprime(p):
        raise DomainError(f"{p} is not prime")
    total = ZERO
    for g in G.elements:
        if p is not None:
            order = G.element_order(g)
            while order % p == 0:
                order //= p
            if order != 1:
                continue
        for comp in data.sector(CommutingPair(g, G.identity)):
            shape = comp.shape(degree)
            todd = _todd_series(shape.degree)
            integrand = Jet.one(shape)
            for root in comp.tangent_roots:
                integrand = integrand * compose(todd, root, shape)
            for line in comp.normal_lines:
                a = line.a % n
                if a == 0:
                    raise PoleError(f"component {comp.name}: normal line with trivial character under {g}")
                euler = Jet.one(shape) - exp_jet(-line.root, shape).scale(CyclotomicNumber.zeta(n, -a))
                integrand = integrand * euler.invert_unit()
            value = integrate(integrand, comp.integral)
            total = total + value.coefficient(0).constant_value()
    return total


def orbifold_euler_characteristic(data: OrbifoldData, prime: Optional[int] = None) -> Fraction:
    """(1/|G|) sum over commuting pairs of the Euler numbers of the fixed components"""
    total = Fraction(0)
    for pair in _pairs(data, prime):
        for comp in data.sector(pair):
            shape = comp.shape()
            euler = Jet.one(shape)
            for root in comp.tangent_roots:
                euler = euler * Jet.from_linear(root, shape)
            value = integrate(euler, comp.integral)
            total += value.coefficient(0).constant_value().rational_value()
    return total / data.group.order
