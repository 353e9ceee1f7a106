"""
Non-crossing perfect matchings on points of a circle, and a small engine for gluing matchings together.

A matching on ``2N`` points is a tuple ``P`` with ``P[P[i]] == i`` and ``P[i] != i``; the points are numbered in
circular order. Gap ``k`` is the stretch of boundary between point ``k`` and point ``k + 1`` (mod ``2N``); the faces of
a non-crossing matching are unions of gaps.
"""

from __future__ import annotations

import functools
from typing import Hashable, Iterable, Sequence

from .errors import DomainError


def is_noncrossing_matching(pairing: Sequence[int]) -> bool:
    n = len(pairing)
    if n % 2:
        return False
    if not all(0 <= pairing[i] < n and pairing[i] != i and pairing[pairing[i]] == i for i in range(n)):
        return False
    stack = []
    for i in range(n):
        if i < pairing[i]:
            stack.append(pairing[i])
        elif stack.pop() != i:
            return False
    return True


@functools.lru_cache(maxsize=None)
def noncrossing_matchings(points: int) -> tuple[tuple[int, ...], ...]:
    """All non-crossing perfect matchings of ``points`` circular points, sorted lexicographically."""
    if points < 0 or points % 2:
        raise DomainError(f"need an even, non-negative number of points, got {points}")
    out = []
    seq = [-1] * points

    def place(start: int, pairs: int):
        if pairs == 0:
            yield
            return
        for inner in range(pairs):
            end = start + 1 + 2 * inner
            seq[start], seq[end] = end, start
            for _ in place(start + 1, inner):
                for _ in place(end + 1, pairs - inner - 1):
                    yield

    for _ in place(0, points // 2):
        out.append(tuple(seq))
    return tuple(sorted(out))


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


def gap_faces(pairing: Sequence[int]) -> list[int]:
    """
    Face index of every gap. Faces are numbered by their smallest gap, so the face holding gap 0 is face 0.

    For the empty matching there are no gaps and a single face.
    """
    n = len(pairing)
    face_of = [-1] * n
    count = 0
    for g in range(n):
        if face_of[g] >= 0:
            continue
        k = g
        while face_of[k] < 0:
            face_of[k] = count
            # Leaving gap k we reach point k+1 and follow its arc to the gap after the partner.
            k = pairing[(k + 1) % n]
        count += 1
    return face_of


def face_count(pairing: Sequence[int]) -> int:
    return len(pairing) // 2 + 1


def face_gaps(pairing: Sequence[int], face: int) -> list[int]:
    return [g for g, f in enumerate(gap_faces(pairing)) if f == face]


def gap_side(arc: tuple[int, int], gap: int) -> bool:
    a, b = sorted(arc)
    return a <= gap < b


def arcs(pairing: Sequence[int]) -> list[tuple[int, int]]:
    return [(i, p) for i, p in enumerate(pairing) if i < p]


def separating_arcs(pairing: Sequence[int], gap_from: int, gap_to: int) -> set[int]:
    """Points (lower endpoint) of arcs separating two gaps; a path in the disc between them crosses exactly these."""
    return {a for a, b in arcs(pairing) if gap_side((a, b), gap_from) != gap_side((a, b), gap_to)}


def locate_face(pairing: Sequence[int], gap: int, flipped: Iterable[int]) -> int:
    """
    Face reached from ``gap`` by crossing each arc whose lower endpoint is in ``flipped`` an odd number of times.

    Faces of a non-crossing matching are determined by which side of every arc they lie on.
    """
    if not pairing:
        return 0
    flipped = set(flipped)
    all_arcs = arcs(pairing)
    target = tuple(gap_side(arc, gap) != (arc[0] in flipped) for arc in all_arcs)
    faces = gap_faces(pairing)
    for g in range(len(pairing)):
        if tuple(gap_side(arc, g) for arc in all_arcs) == target:
            return faces[g]
    raise DomainError("inconsistent crossing data: no face lies on the requested sides")


class Gluing:
    """
    Planar gluing of matchings.

    Pieces are matchings whose points become nodes ``(piece, point)``. Wires join two nodes. Every node that is not
    wired is an outer node, listed in circular order of the result. Arcs and wires may carry an integer weight: the
    parity weight marks crossings with a reference path, the signed weight counts oriented traversals of wires.
    """

    def __init__(self):
        self.partner: dict[Hashable, Hashable] = {}
        self.arc_parity: dict[Hashable, int] = {}
        self.wire: dict[Hashable, Hashable] = {}
        self.wire_parity: dict[Hashable, int] = {}
        self.wire_sign: dict[Hashable, int] = {}

    def add_piece(self, name: Hashable, pairing: Sequence[int], crossed: Iterable[int] = ()) -> None:
        crossed = set(crossed)
        for i, p in enumerate(pairing):
            self.partner[(name, i)] = (name, p)
            self.arc_parity[(name, i)] = 1 if min(i, p) in crossed else 0

    def add_wire(self, u: Hashable, v: Hashable, parity: int = 0, sign: int = 0) -> None:
        if u in self.wire or v in self.wire:
            raise DomainError(f"node wired twice: {u!r} or {v!r}")
        self.wire[u], self.wire[v] = v, u
        self.wire_parity[u] = self.wire_parity[v] = parity
        self.wire_sign[u], self.wire_sign[v] = sign, -sign

    def run(self, outer: Sequence[Hashable]) -> tuple[tuple[int, ...], list[int], list[tuple[int, int]]]:
        """
        Trace every strand.

        Returns ``(pairing, strand_parity, loops)``: the matching induced on the outer nodes, the parity weight of
        the strand starting at each outer index, and ``(parity, signed)`` for every closed loop.
        """
        index = {node: k for k, node in enumerate(outer)}
        if len(index) != len(outer):
            raise DomainError("outer node listed twice")
        for node in self.partner:
            if (node in index) == (node in self.wire):
                raise DomainError(f"node {node!r} must be either outer or wired, exactly once")
        visited = set()
        pairing = [-1] * len(outer)
        parity = [0] * len(outer)
        for k, start in enumerate(outer):
            if pairing[k] >= 0:
                continue
            node, acc = start, 0
            while True:
                visited.add(node)
                acc += self.arc_parity[node]
                node = self.partner[node]
                visited.add(node)
                if node in index:
                    break
                acc += self.wire_parity[node]
                node = self.wire[node]
            end = index[node]
            pairing[k], pairing[end] = end, k
            parity[k] = parity[end] = acc % 2
        loops = []
        for start in self.partner:
            if start in visited:
                continue
            node, par, signed = start, 0, 0
            while True:
                visited.add(node)
                par += self.arc_parity[node]
                node = self.partner[node]
                visited.add(node)
                par += self.wire_parity[node]
                signed += self.wire_sign[node]
                node = self.wire[node]
                if node == start:
                    break
            loops.append((par % 2, signed))
        return tuple(pairing), parity, loops
