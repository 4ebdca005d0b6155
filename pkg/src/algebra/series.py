"""
The series tower - truncated Puiseux q-series and nilpotent jets

A PuiseuxSeries is a finite map from exponents in (1/D)Z to YRational
coefficients together with a precision P: every coefficient below q^P is
known, nothing at or above q^P is reported. P = None marks an exact series
(a finite Laurent polynomial in q^(1/D)).

A Jet is a truncated polynomial in nilpotent generators whose coefficients
are PuiseuxSeries; monomials above the top degree are identically absent.
"""

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from src.algebra.exactnum import CyclotomicNumber, YRational, as_yrational
from src.utils.errors import DomainError, NonUnitError, StructureError


def _min_prec(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PuiseuxSeries:
    """Truncated series in q^(1/D) with YRational coefficients"""

    __slots__ = ("terms", "prec", "ramification")

    def __init__(self, terms: Optional[Mapping] = None, prec=None, ramification: int = 1):
        prec = None if prec is None else Fraction(prec)
        ramification = ramification if prec is None else math.lcm(ramification, prec.denominator)
        clean: Dict[Fraction, YRational] = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if prec is not None and e >= prec:
                continue
            c = as_yrational(c)
            if c.is_zero():
                continue
            clean[e] = c
            ramification = math.lcm(ramification, e.denominator)
        self.terms = clean
        self.prec = prec
        self.ramification = ramification

    @classmethod
    def _make(cls, terms: Dict[Fraction, YRational], prec: Optional[Fraction], ramification: int) -> "PuiseuxSeries":
        obj = object.__new__(cls)
        obj.terms = terms
        obj.prec = prec
        obj.ramification = ramification
        return obj

    # ---------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------
    @classmethod
    def constant(cls, value, prec=None) -> "PuiseuxSeries":
        return cls({0: value}, prec)

    @classmethod
    def zero(cls, prec=None) -> "PuiseuxSeries":
        return cls({}, prec)

    @classmethod
    def one(cls, prec=None) -> "PuiseuxSeries":
        return cls({0: 1}, prec)

    @classmethod
    def monomial(cls, coefficient, exponent, prec=None) -> "PuiseuxSeries":
        return cls({Fraction(exponent): coefficient}, prec)

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Optional[Fraction]:
        """Least stored exponent; None for the zero series"""
        return min(self.terms) if self.terms else None

    def _valuation_bound(self) -> Optional[Fraction]:
        if self.terms:
            return min(self.terms)
        return self.prec

    def coefficient(self, exponent) -> YRational:
        exponent = Fraction(exponent)
        if exponent in self.terms:
            return self.terms[exponent]
        if self.prec is not None and exponent >= self.prec:
            raise ValueError(f"coefficient of q^{exponent} is beyond precision {self.prec}")
        return YRational.zero()

    def truncate(self, prec) -> "PuiseuxSeries":
        prec = _min_prec(self.prec, Fraction(prec))
        terms = {e: c for e, c in self.terms.items() if e < prec}
        return PuiseuxSeries._make(terms, prec, math.lcm(self.ramification, prec.denominator))

    # ---------------------------------------------------------
    # Ring operations
    # ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        prec = _min_prec(self.prec, other.prec)
        terms = {e: c for e, c in self.terms.items() if prec is None or e < prec}
        for e, c in other.terms.items():
            if prec is not None and e >= prec:
                continue
            value = terms[e] + c if e in terms else c
            if value.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = value
        return PuiseuxSeries._make(terms, prec, math.lcm(self.ramification, other.ramification))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries._make({e: -c for e, c in self.terms.items()}, self.prec, self.ramification)

    def __sub__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        prec = _product_precision(self, other)
        ramification = math.lcm(self.ramification, other.ramification)
        if len(other.terms) == 1:
            return self._times_monomial(*next(iter(other.terms.items())), prec, ramification)
        if len(self.terms) == 1:
            return other._times_monomial(*next(iter(self.terms.items())), prec, ramification)
        out: Dict[Fraction, YRational] = {}
        right = sorted(other.terms.items())
        for e1, c1 in sorted(self.terms.items()):
            for e2, c2 in right:
                e = e1 + e2
                if prec is not None and e >= prec:
                    break
                term = c1 * c2
                out[e] = out[e] + term if e in out else term
        return PuiseuxSeries._make(
            {e: c for e, c in out.items() if not c.is_zero()}, prec, ramification
        )

    __rmul__ = __mul__

    def _times_monomial(self, exponent, coefficient, prec, ramification) -> "PuiseuxSeries":
        terms = {}
        for e, c in self.terms.items():
            e = e + exponent
            if prec is None or e < prec:
                value = c * coefficient
                if not value.is_zero():
                    terms[e] = value
        return PuiseuxSeries._make(terms, prec, ramification)

    def scale(self, value) -> "PuiseuxSeries":
        value = as_yrational(value)
        if value.is_zero():
            return PuiseuxSeries._make({}, self.prec, self.ramification)
        return PuiseuxSeries._make(
            {e: c * value for e, c in self.terms.items()}, self.prec, self.ramification
        )

    def shift(self, exponent) -> "PuiseuxSeries":
        """Multiply by q^exponent"""
        exponent = Fraction(exponent)
        prec = None if self.prec is None else self.prec + exponent
        return PuiseuxSeries._make(
            {e + exponent: c for e, c in self.terms.items()},
            prec,
            math.lcm(self.ramification, exponent.denominator),
        )

    def dilate(self, factor: int) -> "PuiseuxSeries":
        """Substitute q -> q^factor"""
        if factor < 1:
            raise DomainError(f"dilation factor must be positive, got {factor}")
        prec = None if self.prec is None else self.prec * factor
        return PuiseuxSeries._make(
            {e * factor: c for e, c in self.terms.items()}, prec, self.ramification
        )

    def invert_unit(self, precision=None) -> "PuiseuxSeries":
        """Inverse of a series with nonzero lowest coefficient.

        A truncated input with valuation v and precision P yields precision
        P - 2v. An exact input needs the target `precision` unless it is a
        monomial.
        """
        if not self.terms:
            raise NonUnitError("the zero series is not a unit")
        v = min(self.terms)
        lead_inverse = self.terms[v].inverse()
        if len(self.terms) == 1 and self.prec is None:
            return PuiseuxSeries._make({-v: lead_inverse}, None, self.ramification)
        relative = None if self.prec is None else self.prec - v
        if precision is not None:
            requested = Fraction(precision) + v
            relative = requested if relative is None else min(relative, requested)
        if relative is None:
            raise DomainError("inverting an exact series needs a target precision")
        D = self.ramification
        shifted = sorted((int((e - v) * D), c) for e, c in self.terms.items() if e != v)
        steps = max(math.ceil(relative * D), 0)
        coefficients: List[YRational] = [lead_inverse] if steps else []
        for j in range(1, steps):
            acc = None
            for i, a_i in shifted:
                if i > j:
                    break
                term = a_i * coefficients[j - i]
                acc = term if acc is None else acc + term
            coefficients.append(
                YRational.zero(lead_inverse.root) if acc is None else -(acc * lead_inverse)
            )
        terms = {
            -v + Fraction(j, D): c for j, c in enumerate(coefficients) if not c.is_zero()
        }
        return PuiseuxSeries._make(terms, -v + relative, D)

    def twist_qroot(self, root: int) -> "PuiseuxSeries":
        """Substitute q^(1/D) -> zeta_D^root q^(1/D)"""
        D = self.ramification
        terms = {}
        for e, c in self.terms.items():
            power = (root * int(e * D)) % D
            terms[e] = c if power == 0 else c * CyclotomicNumber.zeta(D, power)
        return PuiseuxSeries._make(terms, self.prec, D)

    # ---------------------------------------------------------
    # Comparison
    # ---------------------------------------------------------
    def first_difference(self, other, limit=None) -> Optional[Fraction]:
        """Least exponent below the common precision where the series differ"""
        other = _coerce_series(other)
        bound = _min_prec(_min_prec(self.prec, other.prec), None if limit is None else Fraction(limit))
        for e in sorted(set(self.terms) | set(other.terms)):
            if bound is not None and e >= bound:
                break
            left = self.terms.get(e)
            right = other.terms.get(e)
            if left is None or right is None or left != right:
                return e
        return None

    def __eq__(self, other):
        other = _coerce_series(other)
        if other is NotImplemented:
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    # ---------------------------------------------------------
    # Evaluation and rendering
    # ---------------------------------------------------------
    def evaluate(self, tau: complex, z: complex = 0j) -> complex:
        """Numeric value at q = exp(2 pi i tau), y = exp(z)"""
        return sum(
            (c.evaluate(z) * cmath.exp(2j * math.pi * tau * float(e)) for e, c in self.terms.items()),
            0j,
        )

    def render(self) -> str:
        if not self.terms:
            text = "0"
        else:
            parts = []
            for e in sorted(self.terms):
                c = self.terms[e].render()
                if e == 0:
                    parts.append(c)
                else:
                    parts.append(f"({c})*q^({e})")
            text = " + ".join(parts)
        return text if self.prec is None else f"{text} + O(q^({self.prec}))"

    def render_canonical(self) -> str:
        """One line per term: q^(a/D) * y^(c/R) : <cyclotomic>, then O(q^(a/D)).

        A coefficient with a nontrivial denominator adds q^(a/D) / y^(c/R) lines
        for the denominator terms.
        """
        D = self.ramification
        root = 1
        for c in self.terms.values():
            root = math.lcm(root, c.root)
        lines = []
        for e in sorted(self.terms):
            c = self.terms[e].lift(root)
            q = f"q^({int(e * D)}/{D})"
            for k in sorted(c.num):
                lines.append(f"{q} * y^({k}/{root}) : {c.num[k].render()}")
            if not c.is_laurent():
                for k, d in enumerate(c.den):
                    if not d.is_zero():
                        lines.append(f"{q} / y^({k}/{root}) : {d.render()}")
        if self.prec is not None:
            lines.append(f"O(q^({int(self.prec * D)}/{D}))")
        return "\n".join(lines)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"PuiseuxSeries({self.render()!r})"


_CANONICAL_LINE = re.compile(r"^q\^\((-?\d+)/(\d+)\) ([*/]) y\^\((-?\d+)/(\d+)\) : (.+)$")
_PRECISION_LINE = re.compile(r"^O\(q\^\((-?\d+)/(\d+)\)\)$")


def parse_canonical(text: str) -> PuiseuxSeries:
    """Read back the output of PuiseuxSeries.render_canonical()"""
    numerators: Dict[Fraction, Dict[int, CyclotomicNumber]] = {}
    denominators: Dict[Fraction, Dict[int, CyclotomicNumber]] = {}
    roots: Dict[Fraction, int] = {}
    prec = None
    ramification = 1
    for number, line in enumerate(text.strip().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        match = _PRECISION_LINE.match(line)
        if match:
            prec = Fraction(int(match.group(1)), int(match.group(2)))
            ramification = math.lcm(ramification, int(match.group(2)))
            continue
        match = _CANONICAL_LINE.match(line)
        if not match:
            raise ValueError(f"line {number}: not a canonical series term: {line!r}")
        q_num, D, kind, y_num, root, literal = match.groups()
        exponent = Fraction(int(q_num), int(D))
        ramification = math.lcm(ramification, int(D))
        if roots.setdefault(exponent, int(root)) != int(root):
            raise ValueError(f"line {number}: mixed y roots at q^({exponent})")
        target = numerators if kind == "*" else denominators
        bucket = target.setdefault(exponent, {})
        value = CyclotomicNumber.parse(literal)
        k = int(y_num)
        bucket[k] = bucket[k] + value if k in bucket else value
    terms = {
        e: YRational(numerators.get(e, {}), denominators.get(e), roots[e])
        for e in roots
    }
    return PuiseuxSeries(terms, prec, ramification)


def _coerce_series(value):
    if isinstance(value, PuiseuxSeries):
        return value
    if isinstance(value, (int, Fraction, CyclotomicNumber, YRational)):
        return PuiseuxSeries.constant(value)
    return NotImplemented


def _product_precision(a: PuiseuxSeries, b: PuiseuxSeries) -> Optional[Fraction]:
    va, vb = a._valuation_bound(), b._valuation_bound()
    candidates = []
    if a.prec is not None:
        candidates.append(a.prec + (min(vb, 0) if vb is not None else 0))
    if b.prec is not None:
        candidates.append(b.prec + (min(va, 0) if va is not None else 0))
    return min(candidates) if candidates else None


# ---------------------------------------------------------
# Jets
# ---------------------------------------------------------
class LinearForm(NamedTuple):
    """sum_i coefficients[i] * generator_i + constant"""
    coefficients: Tuple[Fraction, ...]
    constant: Fraction = Fraction(0)

    @classmethod
    def of(cls, coefficients: Iterable, constant=0) -> "LinearForm":
        return cls(tuple(Fraction(c) for c in coefficients), Fraction(constant))

    def is_zero(self) -> bool:
        return not any(self.coefficients) and not self.constant

    def __neg__(self):
        return LinearForm(tuple(-c for c in self.coefficients), -self.constant)


class JetShape(NamedTuple):
    generators: Tuple[str, ...]
    degree: int

    def monomials(self, degree: Optional[int] = None) -> List[Tuple[int, ...]]:
        """Exponent vectors of total degree <= top degree, or == degree when given"""
        return list(_monomials(len(self.generators), self.degree, degree))


UNIVARIATE = ("x",)


@lru_cache(maxsize=None)
def _monomials(rank: int, top: int, exact: Optional[int]) -> Tuple[Tuple[int, ...], ...]:
    out = []
    for index in product(range(top + 1), repeat=rank):
        total = sum(index)
        if total <= top and (exact is None or total == exact):
            out.append(index)
    return tuple(sorted(out, key=lambda m: (sum(m), tuple(-x for x in m))))


SeriesLike = Union[PuiseuxSeries, YRational, CyclotomicNumber, Fraction, int]


class Jet:
    """Truncated polynomial in nilpotent generators with PuiseuxSeries coefficients"""

    __slots__ = ("shape", "terms")

    def __init__(self, shape: JetShape, terms: Optional[Mapping[Tuple[int, ...], SeriesLike]] = None):
        rank = len(shape.generators)
        clean: Dict[Tuple[int, ...], PuiseuxSeries] = {}
        for index, value in (terms or {}).items():
            index = tuple(index)
            if len(index) != rank or any(x < 0 for x in index):
                raise StructureError(f"monomial {index} does not match generators {shape.generators}")
            if sum(index) > shape.degree:
                continue
            series = _coerce_series(value)
            if series is NotImplemented:
                raise TypeError(f"cannot use {value!r} as a jet coefficient")
            if series.terms or series.prec is not None:
                clean[index] = series
        self.shape = JetShape(tuple(shape.generators), shape.degree)
        self.terms = clean

    @classmethod
    def _make(cls, shape: JetShape, terms: Dict[Tuple[int, ...], PuiseuxSeries]) -> "Jet":
        obj = object.__new__(cls)
        obj.shape = shape
        obj.terms = terms
        return obj

    # ---------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------
    @classmethod
    def constant(cls, shape: JetShape, value: SeriesLike) -> "Jet":
        return cls(shape, {(0,) * len(shape.generators): value})

    @classmethod
    def zero(cls, shape: JetShape) -> "Jet":
        return cls(shape, {})

    @classmethod
    def one(cls, shape: JetShape) -> "Jet":
        return cls.constant(shape, 1)

    @classmethod
    def from_linear(cls, linear: LinearForm, shape: JetShape) -> "Jet":
        rank = len(shape.generators)
        if len(linear.coefficients) != rank:
            raise StructureError(
                f"linear form has {len(linear.coefficients)} coefficients, shape has {rank} generators"
            )
        terms: Dict[Tuple[int, ...], SeriesLike] = {}
        if linear.constant:
            terms[(0,) * rank] = linear.constant
        for i, c in enumerate(linear.coefficients):
            if c:
                index = [0] * rank
                index[i] = 1
                terms[tuple(index)] = c
        return cls(shape, terms)

    @classmethod
    def univariate(cls, coefficients: Sequence[SeriesLike], degree: Optional[int] = None) -> "Jet":
        """Jet in the single generator x from its coefficients of x^0, x^1, ..."""
        degree = len(coefficients) - 1 if degree is None else degree
        return cls(JetShape(UNIVARIATE, degree), {(k,): c for k, c in enumerate(coefficients) if k <= degree})

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    def _check(self, other: "Jet") -> None:
        if self.shape != other.shape:
            raise StructureError(f"jet shapes differ: {self.shape} vs {other.shape}")

    def _zero_index(self) -> Tuple[int, ...]:
        return (0,) * len(self.shape.generators)

    def extract_coefficient(self, index: Sequence[int]) -> PuiseuxSeries:
        index = tuple(index)
        if len(index) != len(self.shape.generators):
            raise StructureError(f"monomial {index} does not match generators {self.shape.generators}")
        return self.terms.get(index, PuiseuxSeries.zero())

    def degree_zero(self) -> PuiseuxSeries:
        return self.extract_coefficient(self._zero_index())

    def precision(self) -> Optional[Fraction]:
        prec = None
        for series in self.terms.values():
            prec = _min_prec(prec, series.prec)
        return prec

    def univariate_coefficients(self) -> List[PuiseuxSeries]:
        if len(self.shape.generators) != 1:
            raise StructureError("univariate coefficients need a single generator")
        return [self.extract_coefficient((k,)) for k in range(self.shape.degree + 1)]

    # ---------------------------------------------------------
    # Ring operations
    # ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.shape, other)
        self._check(other)
        terms = dict(self.terms)
        for index, c in other.terms.items():
            terms[index] = terms[index] + c if index in terms else c
        return Jet._make(self.shape, terms)

    __radd__ = __add__

    def __neg__(self):
        return Jet._make(self.shape, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.shape, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        top = self.shape.degree
        out: Dict[Tuple[int, ...], PuiseuxSeries] = {}
        right = [(index, sum(index), c) for index, c in other.terms.items()]
        for i1, c1 in self.terms.items():
            d1 = sum(i1)
            for i2, d2, c2 in right:
                if d1 + d2 > top:
                    continue
                index = tuple(a + b for a, b in zip(i1, i2))
                term = c1 * c2
                out[index] = out[index] + term if index in out else term
        return Jet._make(self.shape, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, value: SeriesLike) -> "Jet":
        series = _coerce_series(value)
        if series is NotImplemented:
            return NotImplemented
        return Jet._make(self.shape, {i: c * series for i, c in self.terms.items()})

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.invert_unit() ** (-exponent)
        result = Jet.one(self.shape)
        for _ in range(exponent):
            result = result * self
        return result

    def invert_unit(self, precision=None) -> "Jet":
        """Inverse of c0 (1 + u) as c0^-1 sum_k (-u)^k, u nilpotent"""
        zero_index = self._zero_index()
        if zero_index not in self.terms:
            raise NonUnitError("jet has no degree-0 part")
        c0 = self.terms[zero_index]
        c0_inverse = c0.invert_unit(precision)
        u = Jet._make(
            self.shape, {i: c * c0_inverse for i, c in self.terms.items() if i != zero_index}
        )
        result = Jet.one(self.shape)
        power = Jet.one(self.shape)
        for k in range(1, self.shape.degree + 1):
            power = power * u
            result = result + power if k % 2 == 0 else result - power
        return result.scale(c0_inverse)

    def truncate(self, prec) -> "Jet":
        return Jet._make(self.shape, {i: c.truncate(prec) for i, c in self.terms.items()})

    def twist_qroot(self, root: int) -> "Jet":
        return Jet._make(self.shape, {i: c.twist_qroot(root) for i, c in self.terms.items()})

    def map_series(self, fn) -> "Jet":
        return Jet._make(self.shape, {i: fn(c) for i, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        if self.shape != other.shape:
            return False
        for index in set(self.terms) | set(other.terms):
            if self.extract_coefficient(index) != other.extract_coefficient(index):
                return False
        return True

    __hash__ = None

    def render(self) -> str:
        parts = []
        for index in self.shape.monomials():
            if index not in self.terms:
                continue
            name = "*".join(
                g if k == 1 else f"{g}^{k}" for g, k in zip(self.shape.generators, index) if k
            ) or "1"
            parts.append(f"[{name}] {self.terms[index].render()}")
        return "\n".join(parts) if parts else "0"

    def __repr__(self):
        return f"Jet({self.shape}, {len(self.terms)} terms)"


def exp_jet(linear: LinearForm, shape: JetShape, scale: Optional[SeriesLike] = None) -> Jet:
    """sum_{k <= d} (scale * linear)^k / k!"""
    if linear.constant:
        raise DomainError("exp_jet needs a linear form without constant term")
    argument = Jet.from_linear(linear, shape)
    if scale is not None:
        argument = argument.scale(scale)
    result = Jet.one(shape)
    power = Jet.one(shape)
    for k in range(1, shape.degree + 1):
        power = power * argument
        result = result + power.scale(Fraction(1, math.factorial(k)))
    return result


def compose(coefficients: Union[Jet, Sequence[SeriesLike]], linear: LinearForm, shape: JetShape) -> Jet:
    """sum_k c_k L^k for a nilpotent linear form L"""
    if linear.constant:
        raise DomainError("substitution needs a linear form without constant term")
    if isinstance(coefficients, Jet):
        coefficients = coefficients.univariate_coefficients()
    argument = Jet.from_linear(linear, shape)
    result = Jet.zero(shape)
    power = Jet.one(shape)
    for k, c in enumerate(coefficients):
        if k > shape.degree:
            break
        if k:
            power = power * argument
        result = result + power.scale(c)
    return result
