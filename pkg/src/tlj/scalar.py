"""
Exact coefficient arithmetic.

Three layers are stacked here:

* ``LaurentPoly``: integer Laurent polynomials in ``q``.
* ``Scalar``: the rational function field Q(q), stored as a reduced fraction of Laurent polynomials.
* ``TPoly``: polynomials in a second formal variable ``t`` with ``Scalar`` coefficients.

The loop value is ``delta = q + 1/q``. Quantum integers in a second parameter ``omega`` with ``omega + 1/omega = t``
are never formed from ``omega`` itself; they are integer polynomials in ``t`` produced by the three-term recurrence.

Integer polynomial arithmetic is delegated to FLINT (``python-flint``), which supplies fast multiplication and gcd.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

from flint import fmpz_poly

from .errors import DomainError, EvaluationError


def _strip(low: int, coeffs: list[int]) -> tuple[int, fmpz_poly]:
    start = 0
    while start < len(coeffs) and coeffs[start] == 0:
        start += 1
    if start == len(coeffs):
        return 0, fmpz_poly([])
    return low + start, fmpz_poly(coeffs[start:])


class LaurentPoly:
    """
    Integer Laurent polynomial ``q^low * poly(q)`` where ``poly`` has a nonzero constant term (or is zero).

    >>> LaurentPoly.from_dict({-1: 1, 1: 1})
    LaurentPoly('q + q^-1')
    """

    __slots__ = ("_low", "_poly", "_hash")

    def __init__(self, low: int = 0, poly: fmpz_poly | Iterable[int] | None = None, *, _normalized: bool = False):
        if poly is None:
            poly = fmpz_poly([])
        if _normalized:
            self._low, self._poly = low, poly
        else:
            coeffs = [int(c) for c in (poly.coeffs() if isinstance(poly, fmpz_poly) else poly)]
            self._low, self._poly = _strip(low, coeffs)
        self._hash = None

    @classmethod
    def from_dict(cls, coefficients: Mapping[int, int]) -> LaurentPoly:
        items = {int(k): int(v) for k, v in coefficients.items() if v != 0}
        if not items:
            return cls()
        low, high = min(items), max(items)
        return cls(low, [items.get(k, 0) for k in range(low, high + 1)])

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> LaurentPoly:
        return cls(exponent, [coeff])

    @classmethod
    def constant(cls, value: int) -> LaurentPoly:
        return cls(0, [value])

    @property
    def coefficients(self) -> dict[int, int]:
        return {self._low + k: int(c) for k, c in enumerate(self._poly.coeffs()) if c != 0}

    @property
    def low(self) -> int:
        return self._low

    @property
    def poly(self) -> fmpz_poly:
        return self._poly

    def is_zero(self) -> bool:
        return self._poly.degree() < 0

    def valuation(self) -> int:
        if self.is_zero():
            raise DomainError("the zero polynomial has no valuation")
        return self._low

    def degree(self) -> int:
        if self.is_zero():
            raise DomainError("the zero polynomial has no degree")
        return self._low + self._poly.degree()

    def is_constant(self) -> bool:
        return self.is_zero() or (self._low == 0 and self._poly.degree() == 0)

    def constant_value(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        return int(self._poly.coeffs()[0])

    def _aligned(self, other: LaurentPoly) -> tuple[int, fmpz_poly, fmpz_poly]:
        low = min(self._low, other._low)
        a = self._poly if self._low == low else self._poly * fmpz_poly([0] * (self._low - low) + [1])
        b = other._poly if other._low == low else other._poly * fmpz_poly([0] * (other._low - low) + [1])
        return low, a, b

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        low, a, b = self._aligned(other)
        return LaurentPoly(low, a + b)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self._low, -self._poly, _normalized=True)

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        # A product of polynomials with nonzero constant terms keeps a nonzero constant term.
        return LaurentPoly(self._low + other._low, self._poly * other._poly, _normalized=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> LaurentPoly:
        if exponent < 0:
            raise DomainError("negative powers of a Laurent polynomial are not Laurent polynomials in general")
        return LaurentPoly(self._low * exponent, self._poly ** exponent, _normalized=True)

    def __eq__(self, other) -> bool:
        other = _as_laurent(other)
        if other is NotImplemented:
            return False
        return self._low == other._low and self._poly == other._poly

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._low, tuple(int(c) for c in self._poly.coeffs())))
        return self._hash

    def evaluate(self, q: float) -> float:
        if self.is_zero():
            return 0.0
        acc = 0.0
        for c in reversed(self._poly.coeffs()):
            acc = acc * q + int(c)
        return acc * q ** self._low

    def evaluate_exact(self, q: Fraction | int) -> Fraction:
        q = Fraction(q)
        acc = Fraction(0)
        for c in reversed(self._poly.coeffs()):
            acc = acc * q + int(c)
        return acc * q ** self._low

    def __str__(self) -> str:
        return format_laurent(self.coefficients)

    def __repr__(self) -> str:
        return f"LaurentPoly('{self}')"


def _as_laurent(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, int):
        return LaurentPoly.constant(value)
    return NotImplemented


def _format_terms(terms: list[tuple[int, int]], var: str) -> str:
    if not terms:
        return "0"
    out = []
    for k, c in terms:
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            power = var if k == 1 else f"{var}^{k}"
            body = power if mag == 1 else f"{mag}*{power}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(out)


def format_laurent(coefficients: Mapping[int, int], var: str = "q") -> str:
    return _format_terms(sorted(coefficients.items(), reverse=True), var)


ScalarLike = Union["Scalar", LaurentPoly, int, Fraction]


class Scalar:
    """
    Element of Q(q) in canonical form.

    The denominator is an integer polynomial with nonzero constant term, coprime to the numerator, with positive
    constant term. Powers of ``q`` always live in the numerator since ``q`` is a unit. Zero is ``0/1``. Equality of
    canonical forms is therefore equality of rational functions.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly | int = 0, den: LaurentPoly | int = 1, *, _canonical: bool = False):
        num = _as_laurent(num)
        den = _as_laurent(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("Scalar expects Laurent polynomials or integers")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> Scalar:
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_constant() and self.den.constant_value() == 1

    def is_rational(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise DomainError(f"{self} is not a rational constant")
        return Fraction(self.num.constant_value(), self.den.constant_value())

    def __add__(self, other):
        other = as_scalar(other, strict=False)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = as_scalar(other, strict=False)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = as_scalar(other, strict=False)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        return Scalar(self.den, self.num)

    def __truediv__(self, other):
        other = as_scalar(other, strict=False)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Scalar(self.num ** exponent, self.den ** exponent, _canonical=True)

    def __eq__(self, other) -> bool:
        other = as_scalar(other, strict=False)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def evaluate(self, q: float) -> float:
        den = self.den.evaluate(q)
        if den == 0.0 or (q == 1.0 and self.den.evaluate_exact(1) == 0):
            raise EvaluationError(f"pole at q={q!r}: denominator factor ({self.den}) vanishes")
        return self.num.evaluate(q) / den

    def evaluate_exact(self, q: Fraction | int) -> Fraction:
        den = self.den.evaluate_exact(q)
        if den == 0:
            raise EvaluationError(f"pole at q={q}: denominator factor ({self.den}) vanishes")
        return self.num.evaluate_exact(q) / den

    def __str__(self) -> str:
        if self.is_laurent():
            return str(self.num)
        num = str(self.num)
        if len(self.num.coefficients) > 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self) -> str:
        return f"Scalar('{self}')"


def _canonicalize(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if den.is_zero():
        raise ZeroDivisionError("Scalar with zero denominator")
    if num.is_zero():
        return LaurentPoly(), _ONE_POLY
    low = num.low - den.low
    a, b = num.poly, den.poly
    if b.degree() > 0:
        g = a.gcd(b)
        if g.degree() > 0 or abs(int(g.coeffs()[0])) != 1:
            a, b = a // g, b // g
    else:
        g = math.gcd(int(b.coeffs()[0]), *[int(c) for c in a.coeffs()])
        if g != 1:
            a = fmpz_poly([int(c) // g for c in a.coeffs()])
            b = fmpz_poly([int(b.coeffs()[0]) // g])
    if int(b.coeffs()[0]) < 0:
        a, b = -a, -b
    return LaurentPoly(low, a, _normalized=True), LaurentPoly(0, b, _normalized=True)


_ONE_POLY = LaurentPoly.constant(1)


def as_scalar(value, strict: bool = True):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, LaurentPoly)):
        return Scalar(value)
    if isinstance(value, Fraction):
        return Scalar.from_fraction(value)
    if strict:
        raise TypeError(f"cannot interpret {value!r} as a Scalar")
    return NotImplemented


ZERO = Scalar(0)
ONE = Scalar(1)
Q = Scalar(LaurentPoly.monomial(1))
DELTA = Scalar(LaurentPoly.from_dict({1: 1, -1: 1}))


@functools.lru_cache(maxsize=None)
def qint(m: int) -> Scalar:
    """
    The quantum integer [m]_q = (q^m - q^-m)/(q - q^-1) = q^(m-1) + q^(m-3) + ... + q^(1-m).

    >>> str(qint(3))
    'q^2 + 1 + q^-2'
    """
    if m <= 0:
        raise DomainError(f"quantum integers are defined for m >= 1, got {m}")
    return Scalar(LaurentPoly.from_dict({m - 1 - 2 * k: 1 for k in range(m)}))


@functools.lru_cache(maxsize=None)
def delta_power(k: int) -> Scalar:
    return DELTA ** k


class TPoly:
    """
    Polynomial in ``t`` with ``Scalar`` coefficients; ``coefficients[k]`` multiplies ``t^k``.

    Trailing zero coefficients are trimmed, so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[ScalarLike] = ()):
        coeffs = [as_scalar(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coefficients: tuple[Scalar, ...] = tuple(coeffs)

    @classmethod
    def monomial(cls, power: int, coeff: ScalarLike = 1) -> TPoly:
        return cls([ZERO] * power + [as_scalar(coeff)])

    @classmethod
    def from_scalar(cls, value: ScalarLike) -> TPoly:
        return cls([value])

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> Scalar:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else ZERO

    def __add__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coefficients), len(other.coefficients))
        return TPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> TPoly:
        return TPoly(-c for c in self.coefficients)

    def __sub__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_tpoly(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return TPoly()
        out = [ZERO] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coefficients):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> TPoly:
        if exponent < 0:
            raise DomainError("negative powers of t-polynomials are not supported")
        result = TPoly([ONE])
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = _as_tpoly(other)
        if other is NotImplemented:
            return False
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def substitute(self, t: ScalarLike) -> Scalar:
        """Substitute an exact value for ``t``."""
        t = as_scalar(t)
        acc = ZERO
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def evaluate(self, q: float, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * t + c.evaluate(q)
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        if all(c.is_rational() and c.to_fraction().denominator == 1 for c in self.coefficients):
            terms = [(k, int(c.to_fraction())) for k, c in enumerate(self.coefficients) if not c.is_zero()]
            return _format_terms(sorted(terms, reverse=True), "t")
        parts = []
        for k in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[k]
            if c.is_zero():
                continue
            power = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if not power:
                parts.append(f"({c})")
            elif c == ONE:
                parts.append(power)
            else:
                parts.append(f"({c})*{power}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TPoly('{self}')"


def _as_tpoly(value):
    if isinstance(value, TPoly):
        return value
    scalar = as_scalar(value, strict=False)
    if scalar is NotImplemented:
        return NotImplemented
    return TPoly([scalar])


T = TPoly.monomial(1)


@functools.lru_cache(maxsize=None)
def qint_t(m: int) -> TPoly:
    """
    [m]_omega with omega + 1/omega = t, as an integer polynomial in ``t``.

    Uses P_1 = 1, P_2 = t, P_(k+1) = t * P_k - P_(k-1).
    """
    if m <= 0:
        raise DomainError(f"quantum integers are defined for m >= 1, got {m}")
    prev, cur = TPoly(), TPoly([ONE])
    for _ in range(m - 1):
        prev, cur = cur, T * cur - prev
    return cur


def qint_numeric(m: int, delta: float) -> float:
    """[m]_q at q + 1/q = delta, via the recurrence; equals m at delta = 2."""
    if m <= 0:
        raise DomainError(f"quantum integers are defined for m >= 1, got {m}")
    prev, cur = 0.0, 1.0
    for _ in range(m - 1):
        prev, cur = cur, delta * cur - prev
    return cur


@dataclasses.dataclass(frozen=True)
class NumericParams:
    """Numeric specialization point. ``q`` is the root >= 1 of q + 1/q = delta."""

    delta: float
    t: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta < 2:
            raise DomainError(f"delta must be >= 2, got {self.delta}")
        if self.t is not None and not (0 < self.t <= self.delta):
            raise DomainError(f"t must satisfy 0 < t <= delta, got t={self.t}, delta={self.delta}")

    @property
    def q(self) -> float:
        return q_from_delta(self.delta)

    def with_t(self, t: float) -> NumericParams:
        return NumericParams(self.delta, t)


def q_from_delta(delta: float) -> float:
    if delta < 2:
        raise DomainError(f"delta must be >= 2, got {delta}")
    if delta == 2:
        return 1.0
    return (delta + math.sqrt(delta * delta - 4.0)) / 2.0


def evaluate(x, params: NumericParams) -> float:
    """Numeric value of a Scalar, TPoly or LaurentPoly at ``params``."""
    if isinstance(x, TPoly):
        if params.t is None:
            raise DomainError("evaluating a t-polynomial needs params.t")
        return x.evaluate(params.q, params.t)
    if isinstance(x, (Scalar, LaurentPoly)):
        return x.evaluate(params.q)
    if isinstance(x, (int, Fraction)):
        return float(x)
    raise TypeError(f"cannot evaluate {type(x).__name__}")


def scalar_to_json(x: Scalar) -> dict:
    return {
        "num": {str(k): str(v) for k, v in sorted(x.num.coefficients.items())},
        "den": {str(k): str(v) for k, v in sorted(x.den.coefficients.items())},
    }


def scalar_from_json(data: Mapping) -> Scalar:
    num = LaurentPoly.from_dict({int(k): int(v) for k, v in data["num"].items()})
    den = LaurentPoly.from_dict({int(k): int(v) for k, v in data["den"].items()})
    return Scalar(num, den)


def tpoly_to_json(x: TPoly) -> list[dict]:
    return [scalar_to_json(c) for c in x.coefficients]


def tpoly_from_json(data: list) -> TPoly:
    return TPoly(scalar_from_json(c) for c in data)
