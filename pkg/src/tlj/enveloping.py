"""
Degree-0 graded symmetric enveloping algebra over TLJ and its pi_0 action on the lowest-weight-0 modules.

A box in D(n, m) is a TL_(n+m) matching whose 2(n+m) points are read in *box order*: positions ``0 .. 2n-1`` run up the
left side (bottom to top), positions ``2n .. 2n+2m-1`` run down the right side (top to bottom). This is a circular
order, so box matchings are ordinary non-crossing matchings and are stored as ``TLDiagram`` values.

Product ``x * y`` for x in D(n, m), y in D(i, j): put x above y and, for every a <= min(2n, 2i) and b <= min(2m, 2j),
join the a lowest left strings of x to the a highest left strings of y by nested caps, likewise b strings on the right.
Closed loops count delta. The summand lands in D(n + i - a, m + j - b).
"""

from __future__ import annotations

import dataclasses
import functools
import json
import random
from typing import Iterable, Mapping

import numpy as np

from . import matching
from .annular import AnnularDiagram, AnnularVector, annular_inner
from .diagram import TLDiagram, TLElement, enumerate_basis, sum_scalars
from .errors import DomainError, SizeMismatchError, TruncationOverflow
from .jones_wenzl import jones_wenzl
from .matching import Gluing
from .scalar import ONE, ZERO, Scalar, TPoly, delta_power, scalar_from_json, scalar_to_json

DEFAULT_N_MAX = 6

Grade = tuple[int, int]


@dataclasses.dataclass(frozen=True)
class _Stacked:
    pairing: tuple[int, ...]
    parity: list[int]
    loops: list[tuple[int, int]]
    grade: Grade


def _stack(upper: tuple[int, ...], ug: Grade, lower: tuple[int, ...], lg: Grade, a: int, b: int,
           upper_crossed=(), lower_crossed=()) -> _Stacked:
    (n, m), (i, j) = ug, lg
    glue = Gluing()
    glue.add_piece("u", upper, upper_crossed)
    glue.add_piece("l", lower, lower_crossed)
    for k in range(a):
        glue.add_wire(("u", k), ("l", 2 * i - 1 - k))
    for k in range(b):
        glue.add_wire(("u", 2 * n + 2 * m - 1 - k), ("l", 2 * i + k))
    outer = (
        [("l", p) for p in range(2 * i - a)]
        + [("u", p) for p in range(a, 2 * n + 2 * m - b)]
        + [("l", p) for p in range(2 * i + b, 2 * i + 2 * j)]
    )
    pairing, parity, loops = glue.run(outer)
    return _Stacked(pairing, parity, loops, (n + i - a, m + j - b))


def cap_range(x_grade: Grade, y_grade: Grade) -> list[tuple[int, int]]:
    (n, m), (i, j) = x_grade, y_grade
    return [(a, b) for a in range(min(2 * n, 2 * i) + 1) for b in range(min(2 * m, 2 * j) + 1)]


def support_rule(x_grade: Grade, y_grade: Grade) -> set[Grade]:
    """Grades a product D(n,m) * D(i,j) can reach."""
    (n, m), (i, j) = x_grade, y_grade
    return {(n + i - a, m + j - b) for a, b in cap_range(x_grade, y_grade)}


@functools.lru_cache(maxsize=65536)
def _diagram_product(dx: TLDiagram, xg: Grade, dy: TLDiagram, yg: Grade) -> tuple[tuple[Grade, TLDiagram, int], ...]:
    out = []
    for a, b in cap_range(xg, yg):
        s = _stack(dx.pairing, xg, dy.pairing, yg, a, b)
        out.append((s.grade, TLDiagram(sum(s.grade), s.pairing), len(s.loops)))
    return tuple(out)


class BoxElement:
    """Finitely supported family of D(n, m) components; each component is a ``TLElement`` of size n + m."""

    __slots__ = ("components",)

    def __init__(self, components: Mapping[Grade, TLElement] | Iterable = ()):
        items = components.items() if isinstance(components, Mapping) else components
        clean: dict[Grade, TLElement] = {}
        for grade, x in items:
            grade = (int(grade[0]), int(grade[1]))
            if min(grade) < 0 or x.size != sum(grade):
                raise SizeMismatchError(f"component {grade} must have TL size {sum(grade)}, got {x.size}")
            if grade in clean:
                x = clean[grade] + x
            if x.is_zero():
                clean.pop(grade, None)
            else:
                clean[grade] = x
        self.components = clean

    @classmethod
    def unit(cls) -> BoxElement:
        return cls({(0, 0): TLElement.identity(0)})

    @classmethod
    def zero(cls) -> BoxElement:
        return cls()

    @classmethod
    def from_pairing(cls, n: int, m: int, pairing: Iterable[int], coeff=ONE) -> BoxElement:
        d = TLDiagram(n + m, tuple(pairing))
        return cls({(n, m): TLElement.from_diagram(d, coeff)})

    @classmethod
    def from_tl(cls, x: TLElement, n: int, m: int) -> BoxElement:
        """Read a TL_(n+m) element as a box: top points become the left side, bottom points the right side."""
        if x.size != n + m:
            raise SizeMismatchError(f"TL_{x.size} cannot be read as a D({n},{m}) box")
        return cls({(n, m): x})

    def is_zero(self) -> bool:
        return not self.components

    def terms(self) -> Iterable[tuple[Grade, TLDiagram, Scalar]]:
        for grade, x in sorted(self.components.items()):
            for d, c in sorted(x.terms.items()):
                yield grade, d, c

    def degree(self) -> int:
        return max((n + m for n, m in self.components), default=0)

    def __add__(self, other):
        if not isinstance(other, BoxElement):
            return NotImplemented
        return BoxElement(list(self.components.items()) + list(other.components.items()))

    def __neg__(self) -> BoxElement:
        return BoxElement({g: -x for g, x in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> BoxElement:
        return BoxElement({g: x.scale(s) for g, x in self.components.items()})

    def __mul__(self, other):
        if isinstance(other, BoxElement):
            return bacher_mul(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoxElement):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def __repr__(self) -> str:
        return f"BoxElement({sorted(self.components)})"


def bacher_mul(x: BoxElement, y: BoxElement) -> BoxElement:
    buckets: dict[tuple[Grade, TLDiagram], dict[int, list[Scalar]]] = {}
    for xg, dx, cx in x.terms():
        for yg, dy, cy in y.terms():
            c = cx * cy
            for grade, d, loops in _diagram_product(dx, xg, dy, yg):
                buckets.setdefault((grade, d), {}).setdefault(loops, []).append(c)
    out: dict[Grade, list] = {}
    for (grade, d), by_loops in buckets.items():
        total = ZERO
        for loops, coeffs in sorted(by_loops.items()):
            total = total + sum_scalars(coeffs) * delta_power(loops)
        out.setdefault(grade, []).append((d, total))
    return BoxElement({g: TLElement(sum(g), terms) for g, terms in out.items()})


def _reflect(n: int, m: int):
    left = 2 * n

    def r(p: int) -> int:
        return left - 1 - p if p < left else 2 * left + 2 * m - 1 - p

    return r


def dagger_diagram(d: TLDiagram, n: int, m: int) -> TLDiagram:
    r = _reflect(n, m)
    out = [0] * len(d.pairing)
    for p, s in enumerate(d.pairing):
        out[r(p)] = r(s)
    return TLDiagram(d.size, tuple(out))


def dagger(x: BoxElement) -> BoxElement:
    """Reflection in a horizontal line; coefficients are real, so conjugation is trivial."""
    return BoxElement(
        {(n, m): TLElement(n + m, {dagger_diagram(d, n, m): c for d, c in comp.terms.items()})
         for (n, m), comp in x.components.items()}
    )


def tau(x: BoxElement) -> Scalar:
    comp = x.components.get((0, 0))
    if comp is None:
        return ZERO
    return comp.coefficient(TLDiagram(0, ()))


def embed_jw(n: int) -> BoxElement:
    """g_n = p_(2n) read as a D(n, n) box."""
    if n > 4:
        raise DomainError(f"embed_jw is limited to n <= 4, got {n}")
    return BoxElement.from_tl(jones_wenzl(2 * n), n, n)


def box_basis(max_degree: int) -> list[BoxElement]:
    out = []
    for total in range(max_degree + 1):
        for n in range(total + 1):
            for d in enumerate_basis(total):
                out.append(BoxElement({(n, total - n): TLElement.from_diagram(d)}))
    return out


def random_box(rng: random.Random, max_degree: int = 2, terms: int = 3, coeff_range: int = 3) -> BoxElement:
    """Random integer combination of basis boxes of degree at most ``max_degree``; never zero."""
    grades = [(n, total - n) for total in range(max_degree + 1) for n in range(total + 1)]
    out = BoxElement()
    while out.is_zero():
        parts = []
        for _ in range(terms):
            n, m = rng.choice(grades)
            d = rng.choice(enumerate_basis(n + m))
            c = 0
            while c == 0:
                c = rng.randint(-coeff_range, coeff_range)
            parts.append(((n, m), TLElement.from_diagram(d, c)))
        out = BoxElement(parts)
    return out


def tau_gram(max_degree: int, q: float) -> np.ndarray:
    """Numeric matrix [tau(b_i^dagger * b_j)] over the basis boxes of degree at most ``max_degree``."""
    basis = box_basis(max_degree)
    size = len(basis)
    out = np.zeros((size, size))
    for i, bi in enumerate(basis):
        left = dagger(bi)
        for j, bj in enumerate(basis):
            out[i, j] = tau(bacher_mul(left, bj)).evaluate(q)
    return out


# ---------------------------------------------------------------------------------------------------------- pi_0


class ModuleVector:
    """
    Vector of the truncated module: H_(i,j) components, each an ``AnnularVector`` of weight i + j <= n_max.

    Terms that an action pushes above ``n_max`` are kept apart in ``overflow`` and poison inner products.
    """

    __slots__ = ("components", "n_max", "overflow")

    def __init__(self, components: Mapping[Grade, AnnularVector] | Iterable = (), n_max: int = DEFAULT_N_MAX,
                 overflow: Mapping[Grade, AnnularVector] | None = None):
        self.n_max = n_max
        items = components.items() if isinstance(components, Mapping) else components
        clean: dict[Grade, AnnularVector] = {}
        spill: dict[Grade, AnnularVector] = dict(overflow or {})
        for grade, v in items:
            if v.n != sum(grade):
                raise SizeMismatchError(f"H{grade} holds weight {sum(grade)}, got {v.n}")
            target = clean if sum(grade) <= n_max else spill
            if grade in target:
                v = target[grade] + v
            if v.is_zero():
                target.pop(grade, None)
            else:
                target[grade] = v
        self.components = clean
        self.overflow = spill

    @classmethod
    def xi(cls, n_max: int = DEFAULT_N_MAX) -> ModuleVector:
        return cls({(0, 0): AnnularVector.xi()}, n_max)

    @property
    def truncated(self) -> bool:
        return bool(self.overflow)

    def is_zero(self) -> bool:
        return not self.components and not self.overflow

    def __add__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        n_max = min(self.n_max, other.n_max)
        spill = list(self.overflow.items()) + list(other.overflow.items())
        merged = ModuleVector(list(self.components.items()) + list(other.components.items()) + spill, n_max)
        return merged

    def __neg__(self) -> ModuleVector:
        return ModuleVector({g: -v for g, v in self.components.items()}, self.n_max,
                            {g: -v for g, v in self.overflow.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.components == other.components and self.overflow == other.overflow

    def __repr__(self) -> str:
        flag = ", truncated" if self.truncated else ""
        return f"ModuleVector({sorted(self.components)}{flag})"


def module_inner(v: ModuleVector, w: ModuleVector) -> TPoly:
    """The H_(i,j) are mutually orthogonal; within one the pairing is the V(t) Gram form."""
    for vec in (v, w):
        if vec.truncated:
            raise TruncationOverflow(
                f"vector has terms above N_max={vec.n_max} at grades {sorted(vec.overflow)}", vec.overflow
            )
    total = TPoly()
    for grade, a in v.components.items():
        b = w.components.get(grade)
        if b is not None:
            total = total + annular_inner(a, b)
    return total


def _annular_result(s: _Stacked, gap_of) -> AnnularDiagram:
    size = len(s.pairing)
    if size == 0:
        return AnnularDiagram(0, (), 0)
    flipped = {k for k, p in enumerate(s.pairing) if k < p and s.parity[k]}
    face = matching.locate_face(s.pairing, gap_of(s.grade, size), flipped)
    return AnnularDiagram(size // 2, s.pairing, face)


def _loop_weight(loops) -> TPoly:
    winding = sum(p for p, _ in loops)
    return TPoly.monomial(winding, delta_power(len(loops) - winding))


def _bottom_gap(grade: Grade, size: int) -> int:
    return size - 1


def _top_gap(grade: Grade, size: int) -> int:
    return (2 * grade[0] - 1) % size


def _act(x: BoxElement, v: ModuleVector, left: bool, n_max: int | None, strict: bool) -> ModuleVector:
    n_max = v.n_max if n_max is None else n_max
    out: list[tuple[Grade, AnnularVector]] = []
    for vg, vec in v.components.items():
        for y, cy in vec.terms.items():
            size_y = 2 * y.n
            for xg, dx, cx in x.terms():
                if left:
                    exit_gap = size_y - 1
                    pairs = cap_range(xg, vg)
                else:
                    exit_gap = (2 * vg[0] - 1) % size_y if size_y else 0
                    pairs = cap_range(vg, xg)
                crossed = y.crossed_to(exit_gap) if size_y else set()
                for a, b in pairs:
                    if left:
                        s = _stack(dx.pairing, xg, y.matching, vg, a, b, (), crossed)
                        result = _annular_result(s, _bottom_gap)
                    else:
                        s = _stack(y.matching, vg, dx.pairing, xg, a, b, crossed, ())
                        result = _annular_result(s, _top_gap)
                    coeff = cy * _loop_weight(s.loops) * TPoly([cx])
                    out.append((s.grade, AnnularVector(result.n, {result: coeff})))
    res = ModuleVector(out, n_max, {g: w for g, w in v.overflow.items()})
    if strict and res.truncated:
        raise TruncationOverflow(f"action leaves N_max={n_max} at grades {sorted(res.overflow)}", res.overflow)
    return res


def pi0_act_left(x: BoxElement, v: ModuleVector, n_max: int | None = None, strict: bool = False) -> ModuleVector:
    """x above v. Terms above N_max are flagged in ``overflow`` (or raise when ``strict``)."""
    return _act(x, v, True, n_max, strict)


def pi0_act_right(x: BoxElement, v: ModuleVector, n_max: int | None = None, strict: bool = False) -> ModuleVector:
    """v above x."""
    return _act(x, v, False, n_max, strict)


def split_element(x: TLElement, y: TLElement) -> BoxElement:
    """x (x) y^op: x read in D(n, 0) and y in D(0, m), placed side by side."""
    if x.size < 0 or y.size < 0:
        raise DomainError("negative size")
    return bacher_mul(BoxElement.from_tl(x, x.size, 0), BoxElement.from_tl(y, 0, y.size))


def sandwich(n: int) -> TPoly:
    """<g_n . (xi . g_n), xi>, computed through the module action."""
    g = embed_jw(n)
    n_max = 4 * n
    inner_vec = pi0_act_right(g, ModuleVector.xi(n_max), n_max, strict=True)
    outer_vec = pi0_act_left(g, inner_vec, n_max, strict=True)
    return module_inner(outer_vec, ModuleVector.xi(n_max))


# ---------------------------------------------------------------------------------------------------------- golden


def _box_json(grade: Grade, d: TLDiagram) -> dict:
    return {"n": grade[0], "m": grade[1], "pairing": list(d.pairing)}


def multiplication_table(max_degree: int = 2) -> dict:
    """Products of basis boxes b_x * b_y with deg(b_x) + deg(b_y) <= max_degree, in a stable order."""
    basis = box_basis(max_degree)
    rows = []
    for bx in basis:
        ((xg, dx, _),) = list(bx.terms())
        for by in basis:
            ((yg, dy, _),) = list(by.terms())
            if sum(xg) + sum(yg) > max_degree:
                continue
            prod = bacher_mul(bx, by)
            rows.append({
                "x": _box_json(xg, dx),
                "y": _box_json(yg, dy),
                "support": sorted([list(g) for g in support_rule(xg, yg)]),
                "product": [dict(_box_json(g, d), coeff=scalar_to_json(c)) for g, d, c in prod.terms()],
            })
    return {"schema": 1, "max_degree": max_degree, "rows": rows}


def table_product(row: Mapping) -> BoxElement:
    return BoxElement(
        [((t["n"], t["m"]), TLElement.from_diagram(TLDiagram(t["n"] + t["m"], tuple(t["pairing"])),
                                                   scalar_from_json(t["coeff"])))
         for t in row["product"]]
    )


def dump_table(max_degree: int = 2) -> str:
    return json.dumps(multiplication_table(max_degree), indent=1, sort_keys=True)
