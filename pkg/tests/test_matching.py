from __future__ import annotations

import itertools

import pytest

from tlj.errors import DomainError
from tlj.matching import (
    Gluing,
    catalan,
    face_count,
    gap_faces,
    is_noncrossing_matching,
    locate_face,
    noncrossing_matchings,
    separating_arcs,
)


def _all_perfect_matchings(points):
    if not points:
        yield {}
        return
    a = points[0]
    for k in range(1, len(points)):
        b = points[k]
        rest = points[1:k] + points[k + 1:]
        for m in _all_perfect_matchings(rest):
            yield {**m, a: b, b: a}


@pytest.mark.parametrize("n", range(6))
def test_counts_against_brute_force(n):
    brute = set()
    for m in _all_perfect_matchings(list(range(2 * n))):
        pairing = tuple(m[i] for i in range(2 * n))
        if not any(a < b < c < d and m[a] == c and m[b] == d for a, b, c, d in itertools.combinations(range(2 * n), 4)):
            brute.add(pairing)
    assert set(noncrossing_matchings(2 * n)) == brute
    assert len(brute) == catalan(n)


def test_order_is_lexicographic():
    ms = noncrossing_matchings(8)
    assert list(ms) == sorted(ms)


def test_validity():
    assert is_noncrossing_matching((1, 0, 3, 2))
    assert not is_noncrossing_matching((2, 3, 0, 1))
    assert not is_noncrossing_matching((0, 1))
    with pytest.raises(DomainError):
        noncrossing_matchings(3)


def test_faces():
    nested = (3, 2, 1, 0)
    assert gap_faces(nested) == [0, 1, 0, 2]
    assert face_count(nested) == 3
    assert separating_arcs(nested, 1, 3) == {0, 1}
    assert locate_face(nested, 0, {1}) == 1
    assert locate_face(nested, 0, {0}) == 2


def test_gluing_two_caps_make_one_loop():
    g = Gluing()
    g.add_piece("a", (1, 0), crossed={0})
    g.add_piece("b", (1, 0))
    g.add_wire(("a", 0), ("b", 0), sign=1)
    g.add_wire(("a", 1), ("b", 1), sign=-1)
    pairing, _, loops = g.run([])
    assert pairing == ()
    assert len(loops) == 1 and loops[0][0] == 1 and abs(loops[0][1]) in (0, 2)


def test_gluing_rejects_bad_wiring():
    g = Gluing()
    g.add_piece("a", (1, 0))
    g.add_wire(("a", 0), ("a", 1))
    with pytest.raises(DomainError):
        g.add_wire(("a", 0), ("a", 1))
    with pytest.raises(DomainError):
        g.run([("a", 0)])
