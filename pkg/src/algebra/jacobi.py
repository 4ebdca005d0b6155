"""
Reduced theta function and the two-variable exponential f

theta(x) = (s^(1/2) - s^(-1/2)) prod_{k>=1} (1 - q^k)(1 - q^k s)(1 - q^k / s),  s = e^x
f(x)     = theta(x) / theta(x - z),  y = e^z

ThetaSeries keeps s as a second formal variable and is used for the
functional-equation checks. The genus engines never see s: they use jets
in a nilpotent x, built from the half-power-free product

    P(s) = (s - 1) prod_{k>=1} (1 - q^k s)(1 - q^k / s)

so that f = y^(-1/2) P(s) / P(s / y). The (1 - q^k) factors cancel in every
ratio and are left out of P.
"""

import logging
import math
import threading
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from src.algebra.exactnum import CyclotomicNumber, YRational, as_yrational
from src.algebra.series import Jet, JetShape, PuiseuxSeries, UNIVARIATE
from src.models.run_models import CheckReport
from src.utils.errors import DomainError, PoleError, ResourceLimitError

logger = logging.getLogger(__name__)

TermKey = Tuple[Fraction, Fraction]


def _min_prec(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class ThetaSeries:
    """Truncated series in q with Laurent coefficients in s^(1/2) over Q(zeta)(y)"""

    __slots__ = ("terms", "prec")

    def __init__(self, terms: Optional[Dict] = None, prec=None):
        self.prec = None if prec is None else Fraction(prec)
        self.terms: Dict[TermKey, YRational] = {}
        for (a, b), c in (terms or {}).items():
            a, b = Fraction(a), Fraction(b)
            if self.prec is not None and a >= self.prec:
                continue
            c = as_yrational(c)
            if c.is_zero():
                continue
            key = (a, b)
            value = self.terms[key] + c if key in self.terms else c
            if value.is_zero():
                self.terms.pop(key, None)
            else:
                self.terms[key] = value

    @classmethod
    def _make(cls, terms: Dict[TermKey, YRational], prec: Optional[Fraction]) -> "ThetaSeries":
        obj = object.__new__(cls)
        obj.terms = terms
        obj.prec = prec
        return obj

    @classmethod
    def one(cls, prec=None) -> "ThetaSeries":
        return cls({(0, 0): 1}, prec)

    @classmethod
    def monomial(cls, coefficient, q_exponent, s_exponent, prec=None) -> "ThetaSeries":
        return cls({(q_exponent, s_exponent): coefficient}, prec)

    def _valuation_bound(self) -> Optional[Fraction]:
        if self.terms:
            return min(a for a, _ in self.terms)
        return self.prec

    def __add__(self, other: "ThetaSeries") -> "ThetaSeries":
        prec = _min_prec(self.prec, other.prec)
        terms = {k: c for k, c in self.terms.items() if prec is None or k[0] < prec}
        for key, c in other.terms.items():
            if prec is not None and key[0] >= prec:
                continue
            value = terms[key] + c if key in terms else c
            if value.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = value
        return ThetaSeries._make(terms, prec)

    def __neg__(self) -> "ThetaSeries":
        return ThetaSeries._make({k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other: "ThetaSeries") -> "ThetaSeries":
        return self + (-other)

    def __mul__(self, other: "ThetaSeries") -> "ThetaSeries":
        va, vb = self._valuation_bound(), other._valuation_bound()
        candidates = []
        if self.prec is not None:
            candidates.append(self.prec + (min(vb, 0) if vb is not None else 0))
        if other.prec is not None:
            candidates.append(other.prec + (min(va, 0) if va is not None else 0))
        prec = min(candidates) if candidates else None
        out: Dict[TermKey, YRational] = {}
        right = sorted(other.terms.items())
        for (a1, b1), c1 in sorted(self.terms.items()):
            for (a2, b2), c2 in right:
                a = a1 + a2
                if prec is not None and a >= prec:
                    break
                key = (a, b1 + b2)
                term = c1 * c2
                out[key] = out[key] + term if key in out else term
        return ThetaSeries._make({k: c for k, c in out.items() if not c.is_zero()}, prec)

    def scale(self, value) -> "ThetaSeries":
        value = as_yrational(value)
        if value.is_zero():
            return ThetaSeries._make({}, self.prec)
        return ThetaSeries._make({k: c * value for k, c in self.terms.items()}, self.prec)

    def shift(self, q_exponent, s_exponent=0) -> "ThetaSeries":
        """Multiply by q^a s^b"""
        a, b = Fraction(q_exponent), Fraction(s_exponent)
        prec = None if self.prec is None else self.prec + a
        return ThetaSeries._make({(k[0] + a, k[1] + b): c for k, c in self.terms.items()}, prec)

    def truncate(self, prec) -> "ThetaSeries":
        prec = _min_prec(self.prec, Fraction(prec))
        return ThetaSeries._make({k: c for k, c in self.terms.items() if k[0] < prec}, prec)

    def invert_s(self) -> "ThetaSeries":
        """Substitute s -> 1/s with y fixed"""
        return ThetaSeries._make({(a, -b): c for (a, b), c in self.terms.items()}, self.prec)

    def coefficient(self, q_exponent) -> Dict[Fraction, YRational]:
        """The Laurent polynomial in s sitting at q^a"""
        a = Fraction(q_exponent)
        if self.prec is not None and a >= self.prec:
            raise ValueError(f"coefficient of q^{a} is beyond precision {self.prec}")
        return {b: c for (e, b), c in self.terms.items() if e == a}

    def first_difference(self, other: "ThetaSeries", limit=None) -> Optional[Fraction]:
        """Least q-exponent below the common precision where the series differ"""
        bound = _min_prec(_min_prec(self.prec, other.prec), None if limit is None else Fraction(limit))
        for key in sorted(set(self.terms) | set(other.terms)):
            if bound is not None and key[0] >= bound:
                break
            left = self.terms.get(key)
            right = other.terms.get(key)
            if left is None or right is None or left != right:
                return key[0]
        return None

    def __eq__(self, other):
        if not isinstance(other, ThetaSeries):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def evaluate(self, tau: complex, x: complex, z: complex = 0j) -> complex:
        """Numeric value at q = exp(2 pi i tau), s = e^x, y = e^z"""
        tau, x = complex(tau), complex(x)
        total = 0j
        for (a, b), c in self.terms.items():
            total += c.evaluate(z) * np.exp(2j * np.pi * tau * float(a)) * np.exp(x * float(b))
        return complex(total)

    def render(self) -> str:
        lines = [f"q^({a}) * s^({b}) : {self.terms[(a, b)].render()}" for a, b in sorted(self.terms)]
        if self.prec is not None:
            lines.append(f"O(q^({self.prec}))")
        return "\n".join(lines)

    def __repr__(self):
        return f"ThetaSeries({len(self.terms)} terms, prec={self.prec})"


def _line(w: YRational, q_exponent: Fraction, s_exponent: int) -> ThetaSeries:
    """1 - w q^a s^b"""
    return ThetaSeries({(0, 0): 1, (q_exponent, s_exponent): -w})


def theta_product(N, q_shift: int = 0, y_shift: int = 0, ell_shift: int = 0) -> ThetaSeries:
    """Reduced theta at x + 2 pi i ell + a 2 pi i tau - b z, i.e. s -> q^a y^b s.

    The result is exact below q^N. The s^(1/2) factor picks up q^(a/2) y^(b/2)
    and the sign (-1)^ell.
    """
    N = Fraction(N)
    if N < 1:
        raise DomainError(f"theta order must be at least 1, got {N}")
    a, b = int(q_shift), int(y_shift)
    sign = -1 if ell_shift % 2 else 1
    half = YRational.y_power(Fraction(b, 2))
    y_b = YRational.y_power(b)
    y_minus_b = YRational.y_power(-b)

    mass = Fraction(abs(a), 2)
    for k in range(1, abs(a) + 1):
        mass += max(0, -(k + a)) + max(0, a - k)
    work = N + mass

    result = ThetaSeries.one(work)
    result = result * ThetaSeries({
        (Fraction(a, 2), Fraction(1, 2)): half * sign,
        (Fraction(-a, 2), Fraction(-1, 2)): -(half.inverse() * sign),
    })
    for k in range(1, math.ceil(work) + abs(a) + 1):
        if k < work:
            result = result * _line(YRational.one(), Fraction(k), 0)
        if k + a < work:
            result = result * _line(y_b, Fraction(k + a), 1)
        if k - a < work:
            result = result * _line(y_minus_b, Fraction(k - a), -1)
    return result.truncate(N)


_THETA_CACHE: Dict[int, ThetaSeries] = {}
_JET_CACHE: Dict[tuple, Jet] = {}
_JET_CACHE_LIMIT = 1024
_CACHE_LOCK = threading.Lock()


def theta_reduced(N: int) -> ThetaSeries:
    """theta expanded below q^N (memoized)"""
    with _CACHE_LOCK:
        cached = _THETA_CACHE.get(N)
    if cached is not None:
        return cached
    theta = theta_product(N)
    with _CACHE_LOCK:
        return _THETA_CACHE.setdefault(N, theta)


def clear_caches() -> None:
    with _CACHE_LOCK:
        _THETA_CACHE.clear()
        _JET_CACHE.clear()


def cached_jet_keys() -> List[tuple]:
    with _CACHE_LOCK:
        return list(_JET_CACHE)


class FractionPair(NamedTuple):
    """f = numerator / denominator with denominator = theta(s / y)"""
    numerator: ThetaSeries
    denominator: ThetaSeries

    @classmethod
    def build(cls, N, q_shift: int = 0, ell_shift: int = 0) -> "FractionPair":
        return cls(
            theta_product(N, q_shift, 0, ell_shift),
            theta_product(N, q_shift, -1, ell_shift),
        )

    def evaluate(self, tau: complex, x: complex, z: complex) -> complex:
        return self.numerator.evaluate(tau, x, z) / self.denominator.evaluate(tau, x, z)


def _exponent_label(exponent: Optional[Fraction]) -> Optional[str]:
    return None if exponent is None else f"q^({exponent})"


def theta_shift_check(N: int, base: Optional[ThetaSeries] = None) -> CheckReport:
    """theta(s) = -q^(1/2) s theta(q s), exact below q^N"""
    if N < 2:
        raise DomainError(f"theta shift check needs N >= 2, got {N}")
    base = theta_reduced(N) if base is None else base
    shifted = theta_product(N, q_shift=1).shift(Fraction(1, 2), 1).scale(-1)
    limit = _min_prec(base.prec, shifted.prec)
    if limit is not None and limit < N - 1:
        raise DomainError(f"series known only below q^{limit}, need q^{N - 1}")
    mismatch = base.first_difference(shifted, N)
    return CheckReport(
        name="theta(x + 2 pi i tau) = -q^(-1/2) s^(-1) theta(x)",
        ok=mismatch is None,
        order=N,
        first_mismatch=_exponent_label(mismatch),
    )


def fraction_order(N: int, shift: int) -> int:
    """Working order for a cross-multiplication involving s -> q^shift s"""
    return N + shift * shift + 1


def f_fraction_check(
    N: int,
    k: int = 1,
    ell: int = 0,
    base_shift: int = 0,
    base: Optional[FractionPair] = None,
) -> CheckReport:
    """f(x + 2 pi i ell + 2 pi i k tau) = y^(-k) f(x) by cross-multiplication.

    Both sides are taken relative to the base point s -> q^base_shift s.
    """
    if N < 2:
        raise DomainError(f"f fraction check needs N >= 2, got {N}")
    work = fraction_order(N, abs(base_shift) + abs(k))
    if base is None:
        base = FractionPair.build(work, q_shift=base_shift)
    shifted = FractionPair.build(work, q_shift=base_shift + k, ell_shift=ell)
    lhs = shifted.numerator * base.denominator
    rhs = (base.numerator * shifted.denominator).scale(YRational.y_power(-k))
    limit = _min_prec(lhs.prec, rhs.prec)
    if limit is not None and limit < N - 1:
        raise DomainError(f"cross products known only below q^{limit}, need q^{N - 1}")
    mismatch = lhs.first_difference(rhs, N)
    return CheckReport(
        name=f"f(x + 2 pi i {ell} + 2 pi i {k} tau) = y^({-k}) f(x) from shift {base_shift}",
        ok=mismatch is None,
        order=N,
        first_mismatch=_exponent_label(mismatch),
    )


def f_composition_check(N: int) -> CheckReport:
    """Two successive k=1 shifts against one direct k=2 shift"""
    reports = [
        f_fraction_check(N, 1, base_shift=0),
        f_fraction_check(N, 1, base_shift=1),
        f_fraction_check(N, 2, base_shift=0),
    ]
    return CheckReport.combine("f shift composition 1 + 1 = 2", reports, order=N)


# ---------------------------------------------------------
# Jets in the nilpotent variable x
# ---------------------------------------------------------
def _univariate_shape(degree: int) -> JetShape:
    return JetShape(UNIVARIATE, degree)


def _factor_jet(w: YRational, q_exponent: Fraction, direction: int, degree: int) -> Jet:
    """1 - w q^a e^(direction x)"""
    coefficients: List[PuiseuxSeries] = []
    if q_exponent == 0:
        coefficients.append(PuiseuxSeries({0: YRational.one(w.root) - w}))
    else:
        coefficients.append(PuiseuxSeries({0: 1, q_exponent: -w}))
    for m in range(1, degree + 1):
        c = -w * Fraction(direction ** m, math.factorial(m))
        coefficients.append(PuiseuxSeries({q_exponent: c}))
    return Jet.univariate(coefficients, degree)


def _theta_core(constant: YRational, exponent, degree: int, prec, divide_by_x: bool = False) -> Jet:
    """Jet of P(c q^e e^x) in x, exact below q^prec.

    With divide_by_x the leading factor (e^x - 1) is replaced by (e^x - 1)/x;
    this is only meaningful for c = 1, e = 0.
    """
    e = Fraction(exponent)
    prec = Fraction(prec)
    inverse = constant.inverse()
    mass = -min(e, Fraction(0))
    for j in range(1, math.floor(abs(e)) + 2):
        mass += max(Fraction(0), -(j + e)) + max(Fraction(0), -(j - e))
    work = prec + mass

    if divide_by_x:
        lead = Jet.univariate([Fraction(1, math.factorial(m + 1)) for m in range(degree + 1)], degree)
    else:
        head = PuiseuxSeries({0: -1}) + PuiseuxSeries({e: constant})
        lead = Jet.univariate(
            [head] + [PuiseuxSeries({e: constant * Fraction(1, math.factorial(m))}) for m in range(1, degree + 1)],
            degree,
        )

    result = Jet.constant(_univariate_shape(degree), PuiseuxSeries.one(work)) * lead
    j = 1
    while j - abs(e) < work:
        if j + e < work:
            result = result * _factor_jet(constant, j + e, 1, degree)
        if j - e < work:
            result = result * _factor_jet(inverse, j - e, -1, degree)
        j += 1
    return result.truncate(prec)


def _to_precision(build: Callable[[Fraction], Jet], target: Fraction, label: str) -> Jet:
    work = target
    for _ in range(8):
        jet = build(work)
        reached = jet.precision()
        if reached is None or reached >= target:
            return jet.truncate(target)
        logger.debug(f"{label}: precision {reached} below {target} at working order {work}, retrying")
        work += target - reached + 1
    raise ResourceLimitError(f"{label}: could not reach precision {target}")


def _cached(key: tuple, build: Callable[[], Jet]) -> Jet:
    # Built outside the lock; when two threads race, the first insert wins.
    with _CACHE_LOCK:
        cached = _JET_CACHE.get(key)
    if cached is not None:
        return cached
    jet = build()
    with _CACHE_LOCK:
        while len(_JET_CACHE) >= _JET_CACHE_LIMIT:
            _JET_CACHE.pop(next(iter(_JET_CACHE)))
        return _JET_CACHE.setdefault(key, jet)


def _torsion_point(ell: int, n: int) -> YRational:
    return YRational.constant(CyclotomicNumber.zeta(n, ell), 2 * n)


def _check_torsion(ell: int, k: int, n: int) -> None:
    if n < 1:
        raise DomainError(f"torsion order must be positive, got {n}")
    if ell % n == 0 and k % n == 0:
        raise PoleError(f"f has a zero at the lattice point (ell, k) = ({ell}, {k}) mod {n}; use x_over_f_jet")


def build_f_jet(ell: int, k: int, n: int, degree: int, work, inverse: bool = False) -> Jet:
    """f (or 1/f) at the torsion point straight from the product, uncached and without reducing k"""
    c = _torsion_point(ell, n)
    root = 2 * n
    top = _theta_core(c, Fraction(k, n), degree, work)
    bottom = _theta_core(c * YRational.y_power(-1, root), Fraction(k, n), degree, work)
    if inverse:
        return (bottom * top.invert_unit()).scale(YRational.y_power(Fraction(1, 2), root))
    return (top * bottom.invert_unit()).scale(YRational.y_power(Fraction(-1, 2), root))


def _torsion_jet(ell: int, k: int, n: int, degree: int, prec, inverse: bool) -> Jet:
    """Cached on (ell mod n, k mod n); f(x + 2 pi i r tau) = y^(-r) f(x) restores k"""
    _check_torsion(ell, k, n)
    target = Fraction(prec)
    r, k0 = divmod(k, n)
    label = "inverse_f_jet" if inverse else "f_jet"
    jet = _cached(
        (label, ell % n, k0, n, degree, target),
        lambda: _to_precision(lambda work: build_f_jet(ell, k0, n, degree, work, inverse), target, label),
    )
    if r == 0:
        return jet
    return jet.scale(YRational.y_power(r if inverse else -r, 2 * n))


def f_jet(ell: int, k: int, n: int, degree: int, prec) -> Jet:
    """f(x + 2 pi i ell / n + 2 pi i (k / n) tau) as a jet in x"""
    return _torsion_jet(ell, k, n, degree, prec, inverse=False)


def inverse_f_jet(ell: int, k: int, n: int, degree: int, prec) -> Jet:
    """1 / f(x + 2 pi i ell / n + 2 pi i (k / n) tau), a unit jet off the lattice"""
    return _torsion_jet(ell, k, n, degree, prec, inverse=True)


def x_over_f_jet(degree: int, prec, root: int = 2) -> Jet:
    """x / f(x) = y^(1/2) [P(e^x) / x]^(-1) P(e^x / y)"""
    target = Fraction(prec)

    def build(work: Fraction) -> Jet:
        regular = _theta_core(YRational.one(root), 0, degree, work, divide_by_x=True)
        shifted = _theta_core(YRational.y_power(-1, root), 0, degree, work)
        return (shifted * regular.invert_unit()).scale(YRational.y_power(Fraction(1, 2), root))

    return _cached(("x_over_f", degree, target, root), lambda: _to_precision(build, target, "x_over_f_jet"))


# ---------------------------------------------------------
# Floating oracles
# ---------------------------------------------------------
def numeric_theta_eval(tau: complex, x: complex, z: complex = 0j, N: int = 20) -> complex:
    """theta(x - z) from the product with factors k < N"""
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"tau must lie in the upper half plane, got {tau}")
    q = np.exp(2j * np.pi * tau)
    w = complex(x) - complex(z)
    powers = q ** np.arange(1, N)
    ew = np.exp(w)
    factors = (1 - powers) * (1 - powers * ew) * (1 - powers / ew)
    return complex((np.exp(w / 2) - np.exp(-w / 2)) * np.prod(factors))


def numeric_f_eval(tau: complex, x: complex, z: complex, N: int = 20) -> complex:
    return numeric_theta_eval(tau, x, 0j, N) / numeric_theta_eval(tau, x, z, N)


def random_points(seed: int, count: int = 5) -> List[Tuple[complex, complex, complex]]:
    """(tau, x, z) with Im tau in [0.8, 1.2] and x, x - z kept off the lattice"""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.2))
        x = complex(rng.uniform(0.2, 0.4), rng.uniform(-0.3, 0.3))
        z = complex(rng.uniform(-0.4, -0.2), rng.uniform(-0.3, 0.3))
        points.append((tau, x, z))
    return points


def numeric_agreement_check(
    N: int,
    seed: int,
    count: int = 5,
    base: Optional[ThetaSeries] = None,
    pair: Optional[FractionPair] = None,
) -> CheckReport:
    """Symbolic theta and f below q^N against the floating products at seeded random points"""
    if N < 1:
        raise DomainError(f"numeric check needs N >= 1, got {N}")
    base = theta_reduced(N) if base is None else base
    pair = FractionPair.build(N) if pair is None else pair
    reports = []
    for i, (tau, x, z) in enumerate(random_points(seed, count)):
        tolerance = max(1e-9, 1e4 * abs(np.exp(2j * np.pi * tau)) ** N)
        cases = (
            ("theta", base.evaluate(tau, x), numeric_theta_eval(tau, x, 0j, N)),
            ("f", pair.evaluate(tau, x, z), numeric_f_eval(tau, x, z, N)),
        )
        for label, symbolic, numeric in cases:
            error = abs(symbolic - numeric) / max(abs(numeric), 1e-300)
            reports.append(CheckReport(
                name=f"{label} at point {i}: tau={tau:.3f}, x={x:.3f}, z={z:.3f}",
                ok=bool(error <= tolerance),
                order=N,
                first_mismatch=None if error <= tolerance else f"relative error {error:.2e}",
            ))
    return CheckReport.combine(f"symbolic against numeric at {count} points (seed {seed})", reports, order=N)
