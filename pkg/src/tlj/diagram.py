"""
The Temperley-Lieb algebra TL_m over Q(q).

Boundary points of an m-strand rectangle are numbered circularly: top points ``0..m-1`` left to right, then bottom
points ``m..2m-1`` right to left. Bottom column ``c`` (counted from the left) is therefore point ``2m-1-c``. With this
numbering a diagram is just a non-crossing matching of ``2m`` circular points.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import os
import random
import threading
from typing import Iterable, Mapping

import numba
import numpy as np

from . import matching
from .errors import DomainError, ResourceCapError, SizeMismatchError
from .scalar import (
    ONE,
    ZERO,
    LaurentPoly,
    Scalar,
    ScalarLike,
    as_scalar,
    delta_power,
    scalar_from_json,
    scalar_to_json,
)
from flint import fmpz_poly

DEFAULT_MAX_STRANDS = 8
DENSE_LIMIT = 8


def max_strands() -> int:
    """Strand cap for the expensive constructions; ``TLJ_MAX_STRANDS`` overrides the default of 8."""
    value = os.environ.get("TLJ_MAX_STRANDS")
    return int(value) if value else DEFAULT_MAX_STRANDS


def check_cap(m: int) -> None:
    cap = max_strands()
    if m > cap:
        raise ResourceCapError(f"{m} strands exceeds the strand cap {cap} (set TLJ_MAX_STRANDS to raise it)")


@dataclasses.dataclass(frozen=True, order=True)
class TLDiagram:
    size: int
    pairing: tuple[int, ...]

    def __post_init__(self):
        if len(self.pairing) != 2 * self.size or not matching.is_noncrossing_matching(self.pairing):
            raise DomainError(f"not a non-crossing matching on {2 * self.size} points: {self.pairing}")

    @classmethod
    def identity(cls, m: int) -> TLDiagram:
        return cls(m, tuple(2 * m - 1 - p for p in range(2 * m)))

    @classmethod
    def generator(cls, i: int, m: int) -> TLDiagram:
        """e_i joins strands i and i+1 (1-based) at the top and at the bottom."""
        if not 1 <= i < m:
            raise DomainError(f"e_{i} is not defined in TL_{m}")
        pairing = list(cls.identity(m).pairing)
        a, b = i - 1, i
        pairing[a], pairing[b] = b, a
        ba, bb = 2 * m - 1 - a, 2 * m - 1 - b
        pairing[ba], pairing[bb] = bb, ba
        return cls(m, tuple(pairing))

    def flip(self) -> TLDiagram:
        """Top-bottom reflection: point p goes to 2m-1-p."""
        n = 2 * self.size
        out = [0] * n
        for p, r in enumerate(self.pairing):
            out[n - 1 - p] = n - 1 - r
        return TLDiagram(self.size, tuple(out))

    def include(self, m: int) -> TLDiagram:
        """Add vertical strands on the right."""
        if m < self.size:
            raise DomainError(f"cannot include TL_{self.size} into TL_{m}")
        k, extra = self.size, m - self.size

        def remap(p: int) -> int:
            return p if p < k else p + 2 * extra

        out = [0] * (2 * m)
        for p, r in enumerate(self.pairing):
            out[remap(p)] = remap(r)
        for c in range(k, m):
            out[c], out[2 * m - 1 - c] = 2 * m - 1 - c, c
        return TLDiagram(m, tuple(out))

    def through_strands(self) -> int:
        return sum(1 for p in range(self.size) if self.pairing[p] >= self.size)

    def __str__(self) -> str:
        return f"TL{self.size}{list(self.pairing)}"


@functools.lru_cache(maxsize=None)
def enumerate_basis(m: int) -> tuple[TLDiagram, ...]:
    """All diagrams of TL_m, lexicographic in the pairing tuple; there are Catalan(m) of them."""
    if m < 0:
        raise DomainError("strand count must be non-negative")
    return tuple(TLDiagram(m, p) for p in matching.noncrossing_matchings(2 * m))


@functools.lru_cache(maxsize=None)
def basis_index(m: int) -> dict[TLDiagram, int]:
    return {d: k for k, d in enumerate(enumerate_basis(m))}


def compose(d1: TLDiagram, d2: TLDiagram) -> tuple[TLDiagram, int]:
    """Stack ``d1`` above ``d2``; return the resulting diagram and the number of closed loops removed."""
    if d1.size != d2.size:
        raise SizeMismatchError(f"cannot compose TL_{d1.size} with TL_{d2.size}")
    m = d1.size
    n = 2 * m
    p1, p2 = d1.pairing, d2.pairing
    out = [-1] * n
    seen_mid = [False] * m
    for start in range(n):
        if out[start] >= 0:
            continue
        # Walk from a result point; side 1 is d1, side 2 is d2.
        if start < m:
            side, node = 1, start
        else:
            side, node = 2, start
        while True:
            if side == 1:
                node = p1[node]
                if node < m:
                    end = node
                    break
                col = n - 1 - node
                seen_mid[col] = True
                side, node = 2, col
            else:
                node = p2[node]
                if node >= m:
                    end = node
                    break
                seen_mid[node] = True
                side, node = 1, n - 1 - node
        out[start], out[end] = end, start
    loops = 0
    for col in range(m):
        if seen_mid[col]:
            continue
        loops += 1
        c = col
        while not seen_mid[c]:
            seen_mid[c] = seen_mid[p2[c]] = True
            c = n - 1 - p1[n - 1 - p2[c]]
    return TLDiagram(m, tuple(out)), loops


def closure_loops(d: TLDiagram) -> int:
    """Loops in the Markov closure: top point i joined to bottom point i around the right."""
    m = d.size
    n = 2 * m
    seen = [False] * n
    loops = 0
    for start in range(n):
        if seen[start]:
            continue
        loops += 1
        p = start
        while not seen[p]:
            seen[p] = True
            r = d.pairing[p]
            seen[r] = True
            p = n - 1 - r
    return loops


class _ComposeTable:
    """Dense composition table for TL_m: result index and loop count for every ordered pair of basis diagrams."""

    def __init__(self, m: int):
        self.m = m
        basis = enumerate_basis(m)
        n = 2 * m
        size = len(basis)
        pairings = np.array([d.pairing for d in basis], dtype=np.int64).reshape(size, n)
        weights = 1 << np.arange(n, dtype=np.int64)
        lookup = np.full(1 << n, -1, dtype=np.int64)
        lookup[(pairings > np.arange(n)) @ weights] = np.arange(size)
        codes, loops = _compose_all(pairings, m)
        self.result = lookup[codes].astype(np.int32)
        self.loops = loops


@numba.njit(cache=True)
def _compose_all(pairings, m):
    size = pairings.shape[0]
    n = 2 * m
    codes = np.zeros((size, size), dtype=np.int64)
    loops = np.zeros((size, size), dtype=np.int8)
    out = np.empty(n, dtype=np.int64)
    seen = np.empty(m, dtype=np.bool_)
    for i in range(size):
        p1 = pairings[i]
        for j in range(size):
            p2 = pairings[j]
            out[:] = -1
            seen[:] = False
            for start in range(n):
                if out[start] >= 0:
                    continue
                side = 1 if start < m else 2
                node = start
                end = -1
                while True:
                    if side == 1:
                        node = p1[node]
                        if node < m:
                            end = node
                            break
                        node = n - 1 - node
                        seen[node] = True
                        side = 2
                    else:
                        node = p2[node]
                        if node >= m:
                            end = node
                            break
                        seen[node] = True
                        node = n - 1 - node
                        side = 1
                out[start] = end
                out[end] = start
            count = 0
            for col in range(m):
                if seen[col]:
                    continue
                count += 1
                c = col
                while not seen[c]:
                    seen[c] = True
                    seen[p2[c]] = True
                    c = n - 1 - p1[n - 1 - p2[c]]
            code = 0
            for p in range(n):
                if out[p] > p:
                    code |= 1 << p
            codes[i, j] = code
            loops[i, j] = count
    return codes, loops


_table_lock = threading.Lock()
_tables: dict[int, _ComposeTable] = {}


def compose_table(m: int) -> _ComposeTable:
    table = _tables.get(m)
    if table is None:
        with _table_lock:
            table = _tables.get(m)
            if table is None:
                table = _tables[m] = _ComposeTable(m)
    return table


class TLElement:
    """A Q(q)-linear combination of TL_m diagrams, stored sparsely; zero coefficients are never stored."""

    __slots__ = ("size", "terms")

    def __init__(self, size: int, terms: Mapping[TLDiagram, ScalarLike] | Iterable = ()):
        self.size = size
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[TLDiagram, Scalar] = {}
        for d, c in items:
            if d.size != size:
                raise SizeMismatchError(f"diagram of size {d.size} in an element of TL_{size}")
            c = as_scalar(c)
            if d in clean:
                c = clean[d] + c
            if c.is_zero():
                clean.pop(d, None)
            else:
                clean[d] = c
        self.terms = clean

    @classmethod
    def from_diagram(cls, d: TLDiagram, coeff: ScalarLike = ONE) -> TLElement:
        return cls(d.size, {d: coeff})

    @classmethod
    def identity(cls, m: int) -> TLElement:
        return cls.from_diagram(TLDiagram.identity(m))

    @classmethod
    def generator(cls, i: int, m: int) -> TLElement:
        return cls.from_diagram(TLDiagram.generator(i, m))

    @classmethod
    def zero(cls, m: int) -> TLElement:
        return cls(m)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, d: TLDiagram) -> Scalar:
        return self.terms.get(d, ZERO)

    def _check(self, other: TLElement) -> None:
        if self.size != other.size:
            raise SizeMismatchError(f"TL_{self.size} and TL_{other.size} elements cannot be combined")

    def __add__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms[d] + c if d in terms else c
        return TLElement(self.size, terms)

    def __neg__(self) -> TLElement:
        return TLElement(self.size, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        return self + (-other)

    def scale(self, s: ScalarLike) -> TLElement:
        s = as_scalar(s)
        if s.is_zero():
            return TLElement(self.size)
        return TLElement(self.size, {d: c * s for d, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TLElement):
            return multiply(self, other)
        if isinstance(other, (Scalar, LaurentPoly, int)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Scalar, LaurentPoly, int)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, TLElement):
            return NotImplemented
        return self.size == other.size and self.terms == other.terms

    def __hash__(self):
        return hash((self.size, frozenset(self.terms.items())))

    def adjoint(self) -> TLElement:
        return adjoint(self)

    def include(self, m: int) -> TLElement:
        return TLElement(m, {d.include(m): c for d, c in self.terms.items()})

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return f"0 in TL_{self.size}"
        return " + ".join(f"({c})*{d}" for d, c in sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"TLElement(size={self.size}, terms={len(self.terms)})"


def _common_form(x: TLElement) -> tuple[LaurentPoly, list[tuple[TLDiagram, int, fmpz_poly]], int]:
    """
    Write ``x = (1/D) * sum_d q^low * N_d(q) d`` with one integer polynomial ``N_d`` per diagram sharing one ``low``.
    """
    den = None
    for c in x.terms.values():
        if den is None:
            den = c.den
        elif c.den != den:
            g = den.poly.gcd(c.den.poly)
            den = LaurentPoly(0, den.poly * (c.den.poly // g))
    if den is None:
        den = LaurentPoly.constant(1)
    nums = []
    for d, c in x.terms.items():
        factor = den.poly // c.den.poly
        nums.append((d, c.num.low, c.num.poly * factor))
    low = min((lw for _, lw, _ in nums), default=0)
    out = []
    for d, lw, poly in nums:
        if lw > low:
            poly = poly * fmpz_poly([0] * (lw - low) + [1])
        out.append((d, poly))
    return den, out, low


@functools.lru_cache(maxsize=None)
def _loop_polys(max_loops: int) -> tuple[fmpz_poly, ...]:
    """(1 + q^2)^L * q^(max_loops - L), i.e. delta^L shifted by q^max_loops."""
    return tuple(
        fmpz_poly([1, 0, 1]) ** k * fmpz_poly([0] * (max_loops - k) + [1]) for k in range(max_loops + 1)
    )


def multiply(x: TLElement, y: TLElement) -> TLElement:
    """Algebra product ``x * y`` (``x`` on top); each removed loop contributes a factor delta."""
    x._check(y)
    m = x.size
    if x.is_zero() or y.is_zero():
        return TLElement(m)
    if len(x.terms) * len(y.terms) <= 16:
        return _multiply_small(x, y)
    den_x, xs, low_x = _common_form(x)
    den_y, ys, low_y = _common_form(y)
    loop_poly = _loop_polys(m)
    acc: dict[int | TLDiagram, fmpz_poly] = {}
    if m <= DENSE_LIMIT:
        table = compose_table(m)
        index = basis_index(m)
        basis = enumerate_basis(m)
        y_idx = np.array([index[d] for d, _ in ys], dtype=np.int64)
        y_scaled = [[poly * lp for lp in loop_poly] for _, poly in ys]
        for dx, px in xs:
            i = index[dx]
            res_row = table.result[i, y_idx].tolist()
            loop_row = table.loops[i, y_idx].tolist()
            bucket: dict[int, fmpz_poly] = {}
            for j, (r, lp) in enumerate(zip(res_row, loop_row)):
                term = y_scaled[j][lp]
                prev = bucket.get(r)
                bucket[r] = term if prev is None else prev + term
            for r, poly in bucket.items():
                term = px * poly
                prev = acc.get(r)
                acc[r] = term if prev is None else prev + term
        keyed = {basis[r]: poly for r, poly in acc.items()}
    else:
        for dx, px in xs:
            bucket = {}
            for dy, py in ys:
                r, lp = compose(dx, dy)
                term = py * loop_poly[lp]
                prev = bucket.get(r)
                bucket[r] = term if prev is None else prev + term
            for r, poly in bucket.items():
                term = px * poly
                prev = acc.get(r)
                acc[r] = term if prev is None else prev + term
        keyed = acc
    den = den_x * den_y
    low = low_x + low_y - m
    terms = {}
    for d, poly in keyed.items():
        if poly.degree() < 0:
            continue
        terms[d] = Scalar(LaurentPoly(low, poly), den)
    return TLElement(m, terms)


def _multiply_small(x: TLElement, y: TLElement) -> TLElement:
    terms: dict[TLDiagram, Scalar] = {}
    for dx, cx in x.terms.items():
        for dy, cy in y.terms.items():
            r, loops = compose(dx, dy)
            c = cx * cy * delta_power(loops)
            terms[r] = terms[r] + c if r in terms else c
    return TLElement(x.size, terms)


def adjoint(x: TLElement) -> TLElement:
    """Top-bottom reflection of every diagram; coefficients are real rational functions and stay unchanged."""
    return TLElement(x.size, {d.flip(): c for d, c in x.terms.items()})


def markov_trace(x: TLElement) -> Scalar:
    """Non-normalized Markov trace: close top point i to bottom point i around the right; every loop is delta."""
    by_loops: dict[int, list[Scalar]] = {}
    for d, c in x.terms.items():
        by_loops.setdefault(closure_loops(d), []).append(c)
    return _sum_weighted(by_loops)


def _sum_weighted(by_loops: Mapping[int, list[Scalar]]) -> Scalar:
    total = ZERO
    for k, coeffs in sorted(by_loops.items()):
        total = total + sum_scalars(coeffs) * delta_power(k)
    return total


def sum_scalars(values: Iterable[Scalar]) -> Scalar:
    """Sum many Scalars with a single reduction at the end."""
    values = [v for v in values if not v.is_zero()]
    if not values:
        return ZERO
    if len(values) == 1:
        return values[0]
    den, polys, low = _common_form(_Stub(values))
    total = fmpz_poly([])
    for _, poly in polys:
        total += poly
    return Scalar(LaurentPoly(low, total), den)


class _Stub:
    """Adapter letting ``_common_form`` run over a bare list of scalars."""

    def __init__(self, values: list[Scalar]):
        self.terms = {k: v for k, v in enumerate(values)}


def inner(x: TLElement, y: TLElement) -> Scalar:
    """<x, y> = tr(y^* x)."""
    x._check(y)
    return markov_trace(multiply(adjoint(y), x))


def random_element(m: int, rng: random.Random, terms: int = 3, coeff_range: int = 3) -> TLElement:
    """Uniformly chosen diagrams with nonzero integer coefficients in [-coeff_range, coeff_range]."""
    basis = enumerate_basis(m)
    out = TLElement(m)
    while out.is_zero():
        picks = []
        for _ in range(terms):
            c = 0
            while c == 0:
                c = rng.randint(-coeff_range, coeff_range)
            picks.append((rng.choice(basis), c))
        out = TLElement(m, picks)
    return out


def element_to_json(x: TLElement) -> dict:
    return {
        "size": x.size,
        "terms": [{"pairing": list(d.pairing), "coeff": scalar_to_json(c)} for d, c in sorted(x.terms.items())],
    }


def element_from_json(data: Mapping) -> TLElement:
    m = int(data["size"])
    return TLElement(m, [(TLDiagram(m, tuple(t["pairing"])), scalar_from_json(t["coeff"])) for t in data["terms"]])


def dumps(x: TLElement) -> str:
    return json.dumps(element_to_json(x), sort_keys=True, separators=(",", ":"))


def loads(text: str) -> TLElement:
    return element_from_json(json.loads(text))
