"""
Exact arithmetic - rationals, cyclotomic numbers and rational functions in y

Cyclotomic numbers live in Q(zeta_m) and are stored in the power basis
1, zeta, ..., zeta^(phi(m)-1) reduced modulo the m-th cyclotomic polynomial,
so equal values at the same conductor have equal representations.

YRational is a reduced fraction of Laurent polynomials in t = y^(1/R) with
cyclotomic coefficients. R is the "root" of the value (R = 2n for an
n-torsion computation). The denominator is an ordinary polynomial in t with
constant term 1; every power of t lives in the numerator.
"""

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, cyclotomic_poly

from src.utils.errors import ExactArithmeticError

Rational = Fraction

_X = sympy.Symbol("x")


@lru_cache(maxsize=None)
def _cyclotomic_modulus(m: int) -> Poly:
    return Poly(cyclotomic_poly(m, _X), _X, domain=QQ)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


@lru_cache(maxsize=None)
def _power_table(m: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Row j holds zeta_m^j, 0 <= j < m, in the reduced power basis"""
    modulus = _cyclotomic_modulus(m)
    phi = modulus.degree()
    rows = []
    for j in range(m):
        remainder = Poly(_X ** j, _X, domain=QQ).rem(modulus)
        row = [Fraction(0)] * phi
        for (k,), c in remainder.terms():
            row[k] = _to_fraction(c)
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=4096)
def _cyclotomic_inverse(m: int, coeffs: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    modulus = _cyclotomic_modulus(m)
    rep = [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)]
    inverse = Poly.from_list(rep, _X, domain=QQ).invert(modulus)
    out = [Fraction(0)] * len(coeffs)
    for (k,), c in inverse.terms():
        out[k] = _to_fraction(c)
    return tuple(out)


def totient(m: int) -> int:
    return len(_power_table(m)[0])


class CyclotomicNumber:
    """Exact element of Q(zeta_m), zeta_m = exp(2 pi i / m)"""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence):
        if conductor < 1:
            raise ValueError(f"conductor must be positive, got {conductor}")
        values = tuple(Fraction(c) for c in coeffs)
        if len(values) != totient(conductor):
            raise ValueError(
                f"conductor {conductor} needs {totient(conductor)} coefficients, got {len(values)}"
            )
        self.conductor = conductor
        self.coeffs = values

    @classmethod
    def _make(cls, conductor: int, coeffs: Tuple[Fraction, ...]) -> "CyclotomicNumber":
        obj = object.__new__(cls)
        obj.conductor = conductor
        obj.coeffs = coeffs
        return obj

    # ---------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------
    @classmethod
    def from_rational(cls, value, conductor: int = 1) -> "CyclotomicNumber":
        coeffs = [Fraction(0)] * totient(conductor)
        coeffs[0] = Fraction(value)
        return cls._make(conductor, tuple(coeffs))

    @classmethod
    def zeta(cls, m: int, power: int = 1) -> "CyclotomicNumber":
        """zeta_m^power; the residue `power` is taken mod m"""
        return cls._make(m, _power_table(m)[power % m])

    @classmethod
    def from_powers(cls, m: int, powers: Mapping[int, object]) -> "CyclotomicNumber":
        """Sum of c * zeta_m^e over the mapping e -> c"""
        table = _power_table(m)
        out = [Fraction(0)] * len(table[0])
        for e, c in powers.items():
            c = Fraction(c)
            if c:
                for k, r in enumerate(table[e % m]):
                    if r:
                        out[k] += c * r
        return cls._make(m, tuple(out))

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ExactArithmeticError(f"{self.render()} is not rational")
        return self.coeffs[0]

    def lift(self, conductor: int) -> "CyclotomicNumber":
        """Embed Q(zeta_m) into Q(zeta_L) for a multiple L of m"""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ExactArithmeticError(
                f"cannot lift conductor {self.conductor} to {conductor}"
            )
        step = conductor // self.conductor
        table = _power_table(conductor)
        out = [Fraction(0)] * len(table[0])
        for i, c in enumerate(self.coeffs):
            if c:
                for k, r in enumerate(table[(i * step) % conductor]):
                    if r:
                        out[k] += c * r
        return CyclotomicNumber._make(conductor, tuple(out))

    def _scale(self, c: Fraction) -> "CyclotomicNumber":
        return CyclotomicNumber._make(self.conductor, tuple(x * c for x in self.coeffs))

    # ---------------------------------------------------------
    # Field operations
    # ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce_cyclotomic(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = _common_conductor(self, other)
        return CyclotomicNumber._make(
            a.conductor, tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._make(self.conductor, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        other = _coerce_cyclotomic(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_cyclotomic(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_rational():
            return self._scale(other.coeffs[0])
        if self.is_rational():
            return other._scale(self.coeffs[0])
        a, b = _common_conductor(self, other)
        m = a.conductor
        table = _power_table(m)
        phi = len(table[0])
        acc: Dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        acc[i + j] = acc.get(i + j, 0) + x * y
        out = [Fraction(0)] * phi
        for e, v in acc.items():
            if not v:
                continue
            if e < phi:
                out[e] += v
            else:
                for k, r in enumerate(table[e % m]):
                    if r:
                        out[k] += v * r
        return CyclotomicNumber._make(m, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ExactArithmeticError("inverse of zero cyclotomic number")
        if self.is_rational():
            return CyclotomicNumber.from_rational(1 / self.coeffs[0], self.conductor)
        return CyclotomicNumber._make(
            self.conductor, _cyclotomic_inverse(self.conductor, self.coeffs)
        )

    def __truediv__(self, other):
        other = _coerce_cyclotomic(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CyclotomicNumber.from_rational(1, self.conductor)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = _coerce_cyclotomic(other)
        if other is NotImplemented:
            return NotImplemented
        if self.conductor == other.conductor:
            return self.coeffs == other.coeffs
        if self.is_rational() and other.is_rational():
            return self.coeffs[0] == other.coeffs[0]
        a, b = _common_conductor(self, other)
        return a.coeffs == b.coeffs

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    # ---------------------------------------------------------
    # Rendering
    # ---------------------------------------------------------
    def to_complex(self) -> complex:
        m = self.conductor
        return sum(
            (float(c) * cmath.exp(2j * math.pi * k / m) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    def render(self) -> str:
        """Polynomial in the symbol z<m>, increasing exponent"""
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
                continue
            symbol = f"z{self.conductor}^{k}"
            if c == 1:
                parts.append(symbol)
            elif c == -1:
                parts.append(f"-{symbol}")
            else:
                parts.append(f"{c}*{symbol}")
        if not parts:
            return "0"
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    @classmethod
    def parse(cls, text: str) -> "CyclotomicNumber":
        """Inverse of render()"""
        text = text.strip()
        if not text:
            raise ValueError("empty cyclotomic literal")
        entries: List[Tuple[int, int, Fraction]] = []
        for term in text.replace(" - ", " + -").split(" + "):
            term = term.strip()
            if "z" in term:
                coefficient, _, symbol = term.rpartition("z")
                coefficient = coefficient.rstrip("*").strip()
                m_text, _, k_text = symbol.partition("^")
                if coefficient in ("", "+"):
                    value = Fraction(1)
                elif coefficient == "-":
                    value = Fraction(-1)
                else:
                    value = Fraction(coefficient)
                entries.append((int(m_text), int(k_text or 1), value))
            else:
                entries.append((1, 0, Fraction(term)))
        conductor = 1
        for m, _, _ in entries:
            conductor = math.lcm(conductor, m)
        powers: Dict[int, Fraction] = {}
        for m, k, value in entries:
            e = (k * (conductor // m)) % conductor
            powers[e] = powers.get(e, Fraction(0)) + value
        return cls.from_powers(conductor, powers)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"CyclotomicNumber({self.render()!r})"


def _coerce_cyclotomic(value):
    if isinstance(value, CyclotomicNumber):
        return value
    if isinstance(value, (int, Fraction)):
        return CyclotomicNumber.from_rational(value)
    return NotImplemented


def _common_conductor(a: CyclotomicNumber, b: CyclotomicNumber):
    if a.conductor == b.conductor:
        return a, b
    m = math.lcm(a.conductor, b.conductor)
    return a.lift(m), b.lift(m)


ZERO = CyclotomicNumber.from_rational(0)
ONE = CyclotomicNumber.from_rational(1)


# ---------------------------------------------------------
# Laurent and dense polynomials over Q(zeta)
# ---------------------------------------------------------
Laurent = Dict[int, CyclotomicNumber]


def _laurent_add(a: Laurent, b: Laurent) -> Laurent:
    out = dict(a)
    for e, c in b.items():
        value = out[e] + c if e in out else c
        if value.is_zero():
            out.pop(e, None)
        else:
            out[e] = value
    return out


def _laurent_mul(a: Laurent, b: Laurent) -> Laurent:
    out: Laurent = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            out[e] = out[e] + c1 * c2 if e in out else c1 * c2
    return {e: c for e, c in out.items() if not c.is_zero()}


def _to_dense(a: Laurent) -> Tuple[int, List[CyclotomicNumber]]:
    low, high = min(a), max(a)
    return low, [a.get(e, ZERO) for e in range(low, high + 1)]


def _from_dense(shift: int, coeffs: Sequence[CyclotomicNumber]) -> Laurent:
    return {shift + i: c for i, c in enumerate(coeffs) if not c.is_zero()}


def _strip(p: List[CyclotomicNumber]) -> List[CyclotomicNumber]:
    while p and p[-1].is_zero():
        p.pop()
    return p


def _poly_divmod(a: Sequence[CyclotomicNumber], b: Sequence[CyclotomicNumber]):
    a = _strip(list(a))
    b = _strip(list(b))
    if not b:
        raise ExactArithmeticError("polynomial division by zero")
    inverse_lead = b[-1].inverse()
    db = len(b) - 1
    quotient = [ZERO] * max(len(a) - db, 1)
    while a and len(a) - 1 >= db:
        shift = len(a) - 1 - db
        coef = a[-1] * inverse_lead
        quotient[shift] = coef
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - coef * c
        a.pop()
        _strip(a)
    return _strip(quotient), a


def _poly_gcd(a: Sequence[CyclotomicNumber], b: Sequence[CyclotomicNumber]) -> List[CyclotomicNumber]:
    a = _strip(list(a))
    b = _strip(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    inverse_lead = a[-1].inverse()
    return [c * inverse_lead for c in a]


def _poly_exact_div(a, b) -> List[CyclotomicNumber]:
    quotient, remainder = _poly_divmod(a, b)
    if remainder:
        raise ExactArithmeticError("inexact polynomial division")
    return quotient


def _dense_to_laurent(coeffs: Sequence[CyclotomicNumber]) -> Laurent:
    return _from_dense(0, coeffs)


# ---------------------------------------------------------
# Rational functions in t = y^(1/R)
# ---------------------------------------------------------
class YRational:
    """Reduced fraction num(t) / den(t) with t = y^(1/root)"""

    __slots__ = ("root", "num", "den")

    _ONE_DEN = (ONE,)

    def __init__(self, num: Mapping[int, object], den: Optional[Mapping[int, object]] = None, root: int = 2):
        if root < 1:
            raise ValueError(f"root must be positive, got {root}")
        numerator = {e: _coerce_cyclotomic(c) for e, c in num.items()}
        numerator = {e: c for e, c in numerator.items() if not c.is_zero()}
        denominator = {0: ONE} if den is None else {e: _coerce_cyclotomic(c) for e, c in den.items()}
        denominator = {e: c for e, c in denominator.items() if not c.is_zero()}
        reduced = _normalize(root, numerator, denominator)
        self.root = reduced.root
        self.num = reduced.num
        self.den = reduced.den

    @classmethod
    def _make(cls, root: int, num: Laurent, den: Tuple[CyclotomicNumber, ...]) -> "YRational":
        obj = object.__new__(cls)
        obj.root = root
        obj.num = num
        obj.den = den
        return obj

    # ---------------------------------------------------------
    # Constructors
    # ---------------------------------------------------------
    @classmethod
    def constant(cls, value, root: int = 2) -> "YRational":
        value = _coerce_cyclotomic(value)
        if value is NotImplemented:
            raise TypeError(f"cannot build a YRational from {value!r}")
        return cls._make(root, {} if value.is_zero() else {0: value}, cls._ONE_DEN)

    @classmethod
    def zero(cls, root: int = 2) -> "YRational":
        return cls._make(root, {}, cls._ONE_DEN)

    @classmethod
    def one(cls, root: int = 2) -> "YRational":
        return cls._make(root, {0: ONE}, cls._ONE_DEN)

    @classmethod
    def t_power(cls, exponent: int, root: int = 2, coefficient=1) -> "YRational":
        coefficient = _coerce_cyclotomic(coefficient)
        if coefficient.is_zero():
            return cls.zero(root)
        return cls._make(root, {exponent: coefficient}, cls._ONE_DEN)

    @classmethod
    def y_power(cls, exponent, root: int = 2, coefficient=1) -> "YRational":
        """coefficient * y^exponent; exponent * root must be an integer"""
        scaled = Fraction(exponent) * root
        if scaled.denominator != 1:
            raise ExactArithmeticError(f"y^{exponent} is not a power of y^(1/{root})")
        return cls.t_power(int(scaled), root, coefficient)

    # ---------------------------------------------------------
    # Structure
    # ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def is_monomial(self) -> bool:
        return len(self.den) == 1 and len(self.num) == 1

    def is_constant(self) -> bool:
        return len(self.den) == 1 and all(e == 0 for e in self.num)

    def constant_value(self) -> CyclotomicNumber:
        if not self.is_constant():
            raise ExactArithmeticError(f"{self.render()} depends on y")
        return self.num.get(0, ZERO)

    def lift(self, root: int) -> "YRational":
        if root == self.root:
            return self
        if root % self.root:
            raise ExactArithmeticError(f"cannot lift y^(1/{self.root}) to y^(1/{root})")
        step = root // self.root
        num = {e * step: c for e, c in self.num.items()}
        if len(self.den) == 1:
            return YRational._make(root, num, self.den)
        den = [ZERO] * ((len(self.den) - 1) * step + 1)
        for i, c in enumerate(self.den):
            den[i * step] = c
        return YRational._make(root, num, tuple(den))

    def _den_laurent(self) -> Laurent:
        return _dense_to_laurent(self.den)

    def scale(self, c) -> "YRational":
        c = _coerce_cyclotomic(c)
        if c.is_zero():
            return YRational.zero(self.root)
        return YRational._make(self.root, {e: v * c for e, v in self.num.items()}, self.den)

    # ---------------------------------------------------------
    # Field operations
    # ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce_yrational(other, self.root)
        if other is NotImplemented:
            return NotImplemented
        a, b = _common_root(self, other)
        if a.is_laurent() and b.is_laurent():
            return YRational._make(a.root, _laurent_add(a.num, b.num), YRational._ONE_DEN)
        if a.den == b.den:
            return _normalize(a.root, _laurent_add(a.num, b.num), a._den_laurent())
        num = _laurent_add(
            _laurent_mul(a.num, b._den_laurent()), _laurent_mul(b.num, a._den_laurent())
        )
        return _normalize(a.root, num, _laurent_mul(a._den_laurent(), b._den_laurent()))

    __radd__ = __add__

    def __neg__(self):
        return YRational._make(self.root, {e: -c for e, c in self.num.items()}, self.den)

    def __sub__(self, other):
        other = _coerce_yrational(other, self.root)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_yrational(other, self.root)
        if other is NotImplemented:
            return NotImplemented
        a, b = _common_root(self, other)
        if a.is_zero() or b.is_zero():
            return YRational.zero(a.root)
        if a.is_laurent() and b.is_laurent():
            return YRational._make(a.root, _laurent_mul(a.num, b.num), YRational._ONE_DEN)
        if a.is_monomial():
            return YRational._make(a.root, _laurent_mul(a.num, b.num), b.den)
        if b.is_monomial():
            return YRational._make(a.root, _laurent_mul(a.num, b.num), a.den)
        return _normalize(
            a.root, _laurent_mul(a.num, b.num), _laurent_mul(a._den_laurent(), b._den_laurent())
        )

    __rmul__ = __mul__

    def inverse(self) -> "YRational":
        if self.is_zero():
            raise ExactArithmeticError("inversion of zero YRational")
        if self.is_monomial():
            (e, c), = self.num.items()
            return YRational._make(self.root, {-e: c.inverse()}, YRational._ONE_DEN)
        return _normalize(self.root, self._den_laurent(), dict(self.num))

    def __truediv__(self, other):
        other = _coerce_yrational(other, self.root)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = YRational.one(self.root)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = _coerce_yrational(other, self.root)
        if other is NotImplemented:
            return NotImplemented
        a, b = _common_root(self, other)
        if a.num.keys() != b.num.keys() or len(a.den) != len(b.den):
            return False
        return all(a.num[e] == b.num[e] for e in a.num) and a.den == b.den

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    # ---------------------------------------------------------
    # Evaluation and rendering
    # ---------------------------------------------------------
    def evaluate(self, z: complex) -> complex:
        """Numeric value at y = exp(z), t = exp(z / root)"""
        t = cmath.exp(complex(z) / self.root)
        num = sum((c.to_complex() * t ** e for e, c in self.num.items()), 0j)
        den = sum((c.to_complex() * t ** i for i, c in enumerate(self.den)), 0j)
        return num / den

    def render(self) -> str:
        num = _render_laurent(self.num, self.root)
        if self.is_laurent():
            return num
        return f"({num}) / ({_render_laurent(self._den_laurent(), self.root)})"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"YRational({self.render()!r})"


def _render_laurent(terms: Laurent, root: int) -> str:
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms):
        c = terms[e].render()
        if e == 0:
            parts.append(c)
        elif c == "1":
            parts.append(f"y^({e}/{root})")
        else:
            parts.append(f"({c})*y^({e}/{root})")
    return " + ".join(parts)


def _normalize(root: int, num: Laurent, den: Laurent) -> YRational:
    if not den:
        raise ExactArithmeticError("zero denominator")
    if not num:
        return YRational.zero(root)
    den_shift, den_coeffs = _to_dense(den)
    num_shift, num_coeffs = _to_dense(num)
    shift = num_shift - den_shift
    if len(den_coeffs) > 1:
        g = _poly_gcd(num_coeffs, den_coeffs)
        if len(g) > 1:
            num_coeffs = _poly_exact_div(num_coeffs, g)
            den_coeffs = _poly_exact_div(den_coeffs, g)
    lead = den_coeffs[0]
    if lead != 1:
        inverse_lead = lead.inverse()
        num_coeffs = [c * inverse_lead for c in num_coeffs]
        den_coeffs = [c * inverse_lead for c in den_coeffs]
    return YRational._make(root, _from_dense(shift, num_coeffs), tuple(den_coeffs))


def _coerce_yrational(value, root: int):
    if isinstance(value, YRational):
        return value
    if isinstance(value, (int, Fraction, CyclotomicNumber)):
        return YRational.constant(value, root)
    return NotImplemented


def _common_root(a: YRational, b: YRational):
    if a.root == b.root:
        return a, b
    root = math.lcm(a.root, b.root)
    return a.lift(root), b.lift(root)


Scalar = Union[int, Fraction, CyclotomicNumber, YRational]


def as_yrational(value: Scalar, root: int = 2) -> YRational:
    coerced = _coerce_yrational(value, root)
    if coerced is NotImplemented:
        raise TypeError(f"cannot convert {value!r} to YRational")
    return coerced
