"""
Lowest-weight-0 annular modules V(t).

A basis diagram of V(t)_n is a non-crossing matching of the ``2n`` outer points together with the face of that
matching holding the inner hole. Faces are numbered by their smallest gap (see ``matching.gap_faces``).

Loops are weighted ``delta`` when contractible and ``t`` when they wind around the hole. Which loops wind is decided
combinatorially: a reference path from the hole to a chosen boundary gap crosses exactly the arcs separating the hole
face from that gap, and a closed curve winds iff the path crosses it an odd number of times.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import matching
from .diagram import TLDiagram, TLElement, sum_scalars
from .errors import DomainError, ResourceCapError, SizeMismatchError
from .matching import Gluing
from .scalar import ONE, Scalar, TPoly, delta_power, tpoly_to_json

DEFAULT_MAX_WEIGHT = 4


@dataclasses.dataclass(frozen=True, order=True)
class AnnularDiagram:
    n: int
    matching: tuple[int, ...]
    hole_face: int

    def __post_init__(self):
        if len(self.matching) != 2 * self.n or not matching.is_noncrossing_matching(self.matching):
            raise DomainError(f"not a non-crossing matching on {2 * self.n} points: {self.matching}")
        if not 0 <= self.hole_face <= self.n:
            raise DomainError(f"hole face {self.hole_face} out of range for n={self.n}")

    @property
    def hole_gap(self) -> int | None:
        """Smallest boundary gap in the hole face, or None when there are no boundary points."""
        if self.n == 0:
            return None
        return matching.gap_faces(self.matching).index(self.hole_face)

    def crossed_to(self, gap: int) -> set[int]:
        """Arcs (by lower endpoint) a path from the hole to ``gap`` must cross."""
        if self.n == 0:
            return set()
        return matching.separating_arcs(self.matching, self.hole_gap, gap)

    def to_json(self) -> dict:
        return {"matching": list(self.matching), "hole_face": self.hole_face}


@dataclasses.dataclass(frozen=True)
class LoopWeight:
    contractible: int
    noncontractible: int

    def value(self) -> TPoly:
        return TPoly.monomial(self.noncontractible, delta_power(self.contractible))


@functools.lru_cache(maxsize=None)
def enumerate_annular_basis(n: int) -> tuple[AnnularDiagram, ...]:
    """(matching, hole face) pairs in lexicographic order; there are binom(2n, n) of them."""
    if n < 0:
        raise DomainError("weight must be non-negative")
    return tuple(
        AnnularDiagram(n, m, f) for m in matching.noncrossing_matchings(2 * n) for f in range(n + 1)
    )


@functools.lru_cache(maxsize=None)
def annular_index(n: int) -> dict[AnnularDiagram, int]:
    return {d: k for k, d in enumerate(enumerate_annular_basis(n))}


def _locate(pairing: Sequence[int], gap: int | None, parity: Sequence[int]) -> int:
    if not pairing:
        return 0
    flipped = {k for k, p in enumerate(pairing) if k < p and parity[k]}
    return matching.locate_face(pairing, gap, flipped)


def gram_loops(a: AnnularDiagram, b: AnnularDiagram) -> LoopWeight:
    """
    Glue ``a`` to the mirror image of ``b`` along the outer circle.

    The result is a collection of loops on a sphere with two holes. The reference path runs from the hole of ``a`` to
    gap 0, through the gluing circle, and on to the hole of ``b``.
    """
    if a.n != b.n:
        raise SizeMismatchError(f"cannot pair weight {a.n} with weight {b.n}")
    if a.n == 0:
        return LoopWeight(0, 0)
    glue = Gluing()
    glue.add_piece("a", a.matching, a.crossed_to(0))
    glue.add_piece("b", b.matching, b.crossed_to(0))
    for k in range(2 * a.n):
        glue.add_wire(("a", k), ("b", k))
    _, _, loops = glue.run([])
    winding = sum(p for p, _ in loops)
    return LoopWeight(len(loops) - winding, winding)


def gram_entry(a: AnnularDiagram, b: AnnularDiagram) -> TPoly:
    return gram_loops(a, b).value()


def _check_weight(n: int, max_n: int | None) -> None:
    cap = DEFAULT_MAX_WEIGHT if max_n is None else max_n
    if n > cap:
        raise ResourceCapError(f"weight {n} exceeds the Gram cap {cap}")


@functools.lru_cache(maxsize=None)
def gram_exponents(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer matrices (contractible, winding) with Gram entry delta^C * t^K."""
    basis = enumerate_annular_basis(n)
    size = len(basis)
    c = np.zeros((size, size), dtype=np.int64)
    k = np.zeros((size, size), dtype=np.int64)
    for i, a in enumerate(basis):
        for j in range(i, size):
            w = gram_loops(a, basis[j])
            c[i, j] = c[j, i] = w.contractible
            k[i, j] = k[j, i] = w.noncontractible
    c.flags.writeable = False
    k.flags.writeable = False
    return c, k


def gram_matrix(n: int, max_n: int | None = None) -> list[list[TPoly]]:
    _check_weight(n, max_n)
    c, k = gram_exponents(n)
    size = c.shape[0]
    return [[TPoly.monomial(int(k[i, j]), delta_power(int(c[i, j]))) for j in range(size)] for i in range(size)]


def gram_numeric(n: int, delta: float, t: float, max_n: int | None = None) -> np.ndarray:
    _check_weight(n, max_n)
    c, k = gram_exponents(n)
    return np.power(float(delta), c) * np.power(float(t), k)


def gram_spectrum(n: int, delta: float, t: float) -> np.ndarray:
    return np.linalg.eigvalsh(gram_numeric(n, delta, t))


def closure_loop_data(d: TLDiagram) -> list[tuple[int, int]]:
    """
    Loops of the annular closure of ``d``: (parity, signed traversals of closure arcs) per loop.

    Closure arcs join top point i to bottom point i around the hole; each crosses a fixed radial cut once.
    """
    if d.size % 2:
        raise DomainError(f"annular closure needs an even strand count, got {d.size}")
    m = d.size
    glue = Gluing()
    glue.add_piece("x", d.pairing)
    for i in range(m):
        glue.add_wire(("x", i), ("x", 2 * m - 1 - i), parity=1, sign=1)
    _, _, loops = glue.run([])
    return loops


def annular_trace(x: TLElement) -> TPoly:
    """
    Close every diagram around the annulus. Loops with net winding 0 contribute delta, loops winding once contribute t.
    """
    if x.size % 2:
        raise DomainError(f"annular trace needs an even strand count, got {x.size}")
    buckets: dict[tuple[int, int], list[Scalar]] = {}
    for d, coeff in x.terms.items():
        loops = closure_loop_data(d)
        winding = 0
        for parity, signed in loops:
            if signed not in (-1, 0, 1) or parity != abs(signed):
                raise AssertionError(f"loop with winding {signed} in the closure of {d}")
            winding += parity
        buckets.setdefault((len(loops) - winding, winding), []).append(coeff)
    total = TPoly()
    for (contractible, winding), coeffs in sorted(buckets.items()):
        total = total + TPoly.monomial(winding, sum_scalars(coeffs) * delta_power(contractible))
    return total


class AnnularVector:
    """Element of V(t)_n: annular basis diagrams with ``TPoly`` coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[AnnularDiagram, TPoly] | Iterable = ()):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[AnnularDiagram, TPoly] = {}
        for d, c in items:
            if d.n != n:
                raise SizeMismatchError(f"weight {d.n} diagram in a weight {n} vector")
            c = c if isinstance(c, TPoly) else TPoly([c])
            if d in clean:
                c = clean[d] + c
            if c.is_zero():
                clean.pop(d, None)
            else:
                clean[d] = c
        self.terms = clean

    @classmethod
    def basis_vector(cls, d: AnnularDiagram) -> AnnularVector:
        return cls(d.n, {d: TPoly([ONE])})

    @classmethod
    def xi(cls) -> AnnularVector:
        """The lowest weight vector: the empty diagram around the hole."""
        return cls.basis_vector(AnnularDiagram(0, (), 0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, AnnularVector):
            return NotImplemented
        if other.n != self.n:
            raise SizeMismatchError(f"weights {self.n} and {other.n}")
        return AnnularVector(self.n, list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return AnnularVector(self.n, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> AnnularVector:
        s = s if isinstance(s, TPoly) else TPoly([s])
        return AnnularVector(self.n, {d: c * s for d, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnnularVector):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def coefficients(self) -> list[TPoly]:
        index = annular_index(self.n)
        out = [TPoly()] * len(index)
        for d, c in self.terms.items():
            out[index[d]] = c
        return out

    def __repr__(self) -> str:
        return f"AnnularVector(n={self.n}, terms={len(self.terms)})"


def annular_inner(v: AnnularVector, w: AnnularVector) -> TPoly:
    """Bilinear pairing through the Gram matrix (all coefficients are real)."""
    if v.n != w.n:
        raise SizeMismatchError(f"weights {v.n} and {w.n}")
    total = TPoly()
    for a, ca in v.terms.items():
        for b, cb in w.terms.items():
            total = total + ca * cb * gram_entry(a, b)
    return total


def _apply(v: AnnularVector, fn, target_n: int) -> AnnularVector:
    out: list[tuple[AnnularDiagram, TPoly]] = []
    for d, c in v.terms.items():
        image, weight = fn(d)
        out.append((image, c * weight))
    return AnnularVector(target_n, out)


def _finish(glue: Gluing, outer: list, gap: int | None, n_out: int) -> tuple[AnnularDiagram, TPoly]:
    pairing, parity, loops = glue.run(outer)
    winding = sum(p for p, _ in loops)
    face = _locate(pairing, gap, parity)
    return AnnularDiagram(n_out, pairing, face), LoopWeight(len(loops) - winding, winding).value()


def cap_diagram(i: int, d: AnnularDiagram) -> tuple[AnnularDiagram, TPoly]:
    """
    Join points i and i+1 (mod 2n) of ``d`` with a cap. The surviving points keep their circular order, starting from
    point 0 (from point 1 when i = 2n-1).
    """
    size = 2 * d.n
    if d.n < 1 or not 0 <= i < size:
        raise DomainError(f"cap({i}) is not defined at weight {d.n}")
    j = (i + 1) % size
    outer_points = [p for p in range(size) if p not in (i, j)]
    exit_gap = d.hole_gap if d.hole_gap != i else j
    glue = Gluing()
    glue.add_piece("d", d.matching, d.crossed_to(exit_gap))
    glue.add_wire(("d", i), ("d", j))
    gap = None
    if outer_points:
        # Walk back from the exit gap's left point to the nearest surviving point.
        p = exit_gap
        while p in (i, j):
            p = (p - 1) % size
        gap = outer_points.index(p)
    return _finish(glue, [("d", p) for p in outer_points], gap, d.n - 1)


def _cup_positions(i: int, size_out: int) -> list[int]:
    """Outer position of each inner point for a cup at outer positions i, i+1 (mod size_out)."""
    size_in = size_out - 2
    if i == size_out - 1:
        return [k + 1 for k in range(size_in)]
    return [k if k < i else k + 2 for k in range(size_in)]


def cup_diagram(i: int, d: AnnularDiagram) -> tuple[AnnularDiagram, TPoly]:
    """Insert an arc joining new outer points i and i+1 (mod 2n+2); the adjoint of ``cap(i)``."""
    size_out = 2 * d.n + 2
    if not 0 <= i < size_out:
        raise DomainError(f"cup({i}) is not defined at weight {d.n}")
    position = _cup_positions(i, size_out)
    outer: list = [None] * size_out
    for k, pos in enumerate(position):
        outer[pos] = ("d", k)
    outer[i] = ("c", 0)
    outer[(i + 1) % size_out] = ("c", 1)
    glue = Gluing()
    glue.add_piece("d", d.matching)
    glue.add_piece("c", (1, 0))
    gap = (i + 1) % size_out if d.n == 0 else position[d.hole_gap]
    return _finish(glue, outer, gap, d.n + 1)


def rotate_diagram(d: AnnularDiagram, k: int = 1) -> tuple[AnnularDiagram, TPoly]:
    """Inner point p is joined to outer point p + k (mod 2n)."""
    size = 2 * d.n
    if size == 0:
        return d, TPoly([ONE])
    k %= size
    pairing = [0] * size
    for p, r in enumerate(d.matching):
        pairing[(p + k) % size] = (r + k) % size
    face = matching.gap_faces(pairing)[(d.hole_gap + k) % size]
    return AnnularDiagram(d.n, tuple(pairing), face), TPoly([ONE])


def cap(i: int, v: AnnularVector) -> AnnularVector:
    return _apply(v, functools.partial(cap_diagram, i), v.n - 1)


def cup(i: int, v: AnnularVector) -> AnnularVector:
    return _apply(v, functools.partial(cup_diagram, i), v.n + 1)


def rotate(v: AnnularVector, k: int = 1) -> AnnularVector:
    return _apply(v, lambda d: rotate_diagram(d, k), v.n)


@dataclasses.dataclass(frozen=True)
class AnnularTangle:
    """Elementary annular tangle: ``cap``/``cup`` with a point index, ``rotate`` with a click count, or ``identity``."""

    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("cap", "cup", "rotate", "identity"):
            raise DomainError(f"unknown annular tangle {self.kind!r}")

    def target(self, n: int) -> int:
        return {"cap": n - 1, "cup": n + 1}.get(self.kind, n)

    def adjoint(self) -> AnnularTangle:
        """Reflection in the middle circle."""
        if self.kind == "cap":
            return AnnularTangle("cup", self.index)
        if self.kind == "cup":
            return AnnularTangle("cap", self.index)
        if self.kind == "rotate":
            return AnnularTangle("rotate", -self.index)
        return self

    def on_diagram(self, d: AnnularDiagram) -> tuple[AnnularDiagram, TPoly]:
        if self.kind == "cap":
            return cap_diagram(self.index, d)
        if self.kind == "cup":
            return cup_diagram(self.index, d)
        if self.kind == "rotate":
            return rotate_diagram(d, self.index)
        return d, TPoly([ONE])

    def __call__(self, v: AnnularVector) -> AnnularVector:
        return _apply(v, self.on_diagram, self.target(v.n))


def elementary_tangles(n: int) -> list[AnnularTangle]:
    """Every cap, cup and one-click rotation with source weight n."""
    out = [AnnularTangle("cap", i) for i in range(2 * n)] if n >= 1 else []
    out += [AnnularTangle("cup", i) for i in range(2 * n + 2)]
    out += [AnnularTangle("rotate", 1), AnnularTangle("rotate", -1)]
    return out


def action_matrix(tangle: AnnularTangle, n: int) -> list[list[TPoly]]:
    """Matrix of ``tangle``: column j is the image of source basis vector j in the target basis."""
    m = tangle.target(n)
    if m < 0:
        raise DomainError(f"{tangle.kind} cannot act at weight {n}")
    source = enumerate_annular_basis(n)
    index = annular_index(m)
    out = [[TPoly() for _ in source] for _ in range(len(index))]
    for j, d in enumerate(source):
        image, weight = tangle.on_diagram(d)
        out[index[image]][j] = out[index[image]][j] + weight
    return out


def matmul(a: list[list[TPoly]], b: list[list[TPoly]]) -> list[list[TPoly]]:
    inner_dim = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new_row = []
        for j in range(cols):
            acc = TPoly()
            for k in range(inner_dim):
                if not row[k].is_zero() and not b[k][j].is_zero():
                    acc = acc + row[k] * b[k][j]
            new_row.append(acc)
        out.append(new_row)
    return out


def transpose(a: list[list[TPoly]]) -> list[list[TPoly]]:
    return [list(col) for col in zip(*a)] if a else []


def adjoint_law_holds(tangle: AnnularTangle, n: int) -> bool:
    """transpose(M(a)) G_m == G_n M(a^dagger), exactly."""
    m = tangle.target(n)
    lhs = matmul(transpose(action_matrix(tangle, n)), gram_matrix(m, max_n=max(m, n)))
    rhs = matmul(gram_matrix(n, max_n=max(m, n)), action_matrix(tangle.adjoint(), m))
    return lhs == rhs


def rotation_period(n: int) -> int:
    """Smallest k >= 1 with rotation^k acting as the identity on the basis of V(t)_n."""
    basis = enumerate_annular_basis(n)
    for k in range(1, 2 * n + 1):
        if all(rotate_diagram(d, k)[0] == d for d in basis):
            return k
    return 1


def gram_to_json(n: int, max_n: int | None = None) -> dict:
    matrix = gram_matrix(n, max_n)
    return {
        "schema": 1,
        "n": n,
        "basis": [d.to_json() for d in enumerate_annular_basis(n)],
        "entries": [[tpoly_to_json(e) for e in row] for row in matrix],
    }


def spectrum_rows(n_values: Iterable[int], delta: float, t_values: Iterable[float]) -> list[dict]:
    rows = []
    t_values = list(t_values)
    for n in n_values:
        for t in t_values:
            eig = gram_spectrum(n, delta, t)
            rows.append({"n": n, "t": t, "delta": delta, "min_eig": float(eig[0]), "max_eig": float(eig[-1])})
    return rows


def spectrum_csv(rows: Iterable[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n", "t", "delta", "min_eig", "max_eig"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def annular_dimension(n: int) -> int:
    return comb(2 * n, n)
