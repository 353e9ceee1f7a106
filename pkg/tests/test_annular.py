from __future__ import annotations

import json

import numpy as np
import pytest

from tlj.annular import (
    AnnularDiagram,
    AnnularTangle,
    AnnularVector,
    action_matrix,
    adjoint_law_holds,
    annular_dimension,
    annular_inner,
    annular_trace,
    cap,
    cap_diagram,
    cup,
    cup_diagram,
    elementary_tangles,
    enumerate_annular_basis,
    gram_exponents,
    gram_matrix,
    gram_numeric,
    gram_spectrum,
    gram_to_json,
    rotate,
    rotate_diagram,
    rotation_period,
    spectrum_csv,
    spectrum_rows,
)
from tlj.diagram import TLElement, markov_trace, random_element
from tlj.errors import DomainError, ResourceCapError, SizeMismatchError
from tlj.jones_wenzl import jones_wenzl
from tlj.matching import Gluing
from tlj.scalar import DELTA, ONE, T, TPoly, qint_t

from oracles import disc_loops


@pytest.mark.parametrize("n,dim", [(0, 1), (1, 2), (2, 6), (3, 20), (4, 70)])
def test_basis_dimension(n, dim):
    basis = enumerate_annular_basis(n)
    assert len(basis) == dim == annular_dimension(n)
    assert len(set(basis)) == dim


def test_gram_small():
    assert gram_matrix(0) == [[TPoly([ONE])]]
    assert gram_matrix(1) == [[TPoly([DELTA]), T], [T, TPoly([DELTA])]]


def test_t_counts_per_loop():
    # n=1: diagrams whose holes sit on opposite sides of the glued circle see one winding loop
    a, b = enumerate_annular_basis(1)
    assert annular_inner(AnnularVector.basis_vector(a), AnnularVector.basis_vector(b)) == T
    c, k = gram_exponents(2)
    assert k.max() == 2  # two nested winding loops give t^2, not t
    assert set(np.unique(c + k)) <= {1, 2}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_total_loops_match_disc_oracle(n):
    basis = enumerate_annular_basis(n)
    c, k = gram_exponents(n)
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            assert c[i, j] + k[i, j] == disc_loops(a.matching, b.matching)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_winding_is_independent_of_reference_gap(n):
    basis = enumerate_annular_basis(n)
    _, k = gram_exponents(n)
    for gap in range(2 * n):
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                glue = Gluing()
                glue.add_piece("a", a.matching, a.crossed_to(gap))
                glue.add_piece("b", b.matching, b.crossed_to(gap))
                for p in range(2 * n):
                    glue.add_wire(("a", p), ("b", p))
                _, _, loops = glue.run([])
                assert sum(parity for parity, _ in loops) == k[i, j]


@pytest.mark.parametrize("delta", [2.0, 2.5, 3.0])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_gram_is_psd_on_the_interval(n, delta):
    for t in np.linspace(0.0, delta, 12)[1:]:
        assert gram_spectrum(n, delta, t)[0] >= -1e-9 * max(1.0, delta ** n)


def test_gram_full_rank_generic():
    for n in (1, 2, 3):
        assert np.linalg.matrix_rank(gram_numeric(n, 2.5, 1.3)) == annular_dimension(n)


def test_gram_n1_spectrum():
    eig = gram_spectrum(1, 2.5, 1.0)
    assert eig == pytest.approx([1.5, 3.5])


def test_gram_symmetric():
    for n in (1, 2, 3):
        g = gram_numeric(n, 2.5, 1.7)
        assert np.array_equal(g, g.T)


def test_annular_trace_identity():
    for n in range(1, 5):
        assert annular_trace(jones_wenzl(2 * n)) == qint_t(2 * n + 1)


def test_annular_trace_reduces_to_markov_trace(rng):
    for m in (2, 4, 6):
        for _ in range(10):
            x = random_element(m, rng)
            assert annular_trace(x).substitute(DELTA) == markov_trace(x)


def test_annular_trace_examples():
    assert annular_trace(TLElement.identity(2)) == T * T
    assert annular_trace(TLElement.generator(1, 2)) == TPoly([DELTA])
    with pytest.raises(DomainError):
        annular_trace(TLElement.identity(3))


def test_cap_cup_examples():
    face0, face1 = enumerate_annular_basis(1)
    assert cap_diagram(0, face0) == (AnnularDiagram(0, (), 0), T)
    assert cap_diagram(0, face1) == (AnnularDiagram(0, (), 0), TPoly([DELTA]))
    xi = AnnularVector.xi()
    up = cup(0, xi)
    assert up == AnnularVector.basis_vector(face1)
    assert cap(0, up) == xi.scale(DELTA)
    # capping across gap 1 closes the loop around the hole, which sits in face 1
    assert cap(1, up) == xi.scale(T)
    assert cup_diagram(1, AnnularDiagram(0, (), 0))[0] == face0
    with pytest.raises(DomainError):
        cap_diagram(2, face0)


def test_rotation():
    for n, period in [(1, 2), (2, 4), (3, 6)]:
        assert rotation_period(n) == period
    v = AnnularVector.basis_vector(enumerate_annular_basis(2)[0])
    assert rotate(rotate(v, 1), -1) == v
    assert rotate(v, 4) == v
    assert rotate_diagram(AnnularDiagram(0, (), 0), 3)[0] == AnnularDiagram(0, (), 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rotation_is_an_isometry(n):
    basis = enumerate_annular_basis(n)
    image = [rotate_diagram(d, 1)[0] for d in basis]
    assert sorted(image) == list(basis)
    g = gram_matrix(n)
    index = {d: k for k, d in enumerate(basis)}
    for i in range(len(basis)):
        for j in range(len(basis)):
            assert g[index[image[i]]][index[image[j]]] == g[i][j]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_adjoint_law(n):
    for tangle in elementary_tangles(n):
        assert adjoint_law_holds(tangle, n), (tangle, n)


def test_action_matrix_shape():
    m = action_matrix(AnnularTangle("cup", 0), 1)
    assert len(m) == 6 and len(m[0]) == 2
    assert all(sum(0 if e.is_zero() else 1 for e in (row[j] for row in m)) == 1 for j in range(2))
    with pytest.raises(DomainError):
        action_matrix(AnnularTangle("cap", 0), 0)
    with pytest.raises(DomainError):
        AnnularTangle("twist")


def test_tangle_adjoints():
    assert AnnularTangle("cap", 3).adjoint() == AnnularTangle("cup", 3)
    assert AnnularTangle("rotate", 2).adjoint() == AnnularTangle("rotate", -2)
    assert AnnularTangle("identity").adjoint() == AnnularTangle("identity")


def test_errors_and_caps():
    with pytest.raises(ResourceCapError):
        gram_matrix(5)
    with pytest.raises(SizeMismatchError):
        annular_inner(AnnularVector.xi(), cup(0, AnnularVector.xi()))
    with pytest.raises(DomainError):
        AnnularDiagram(1, (1, 0), 2)


def test_exports():
    data = json.loads(json.dumps(gram_to_json(2)))
    assert data["schema"] == 1 and data["n"] == 2
    assert len(data["basis"]) == 6 and len(data["entries"]) == 6
    rows = spectrum_rows([1, 2], 2.5, [1.0, 2.0])
    text = spectrum_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "n,t,delta,min_eig,max_eig"
    assert len(lines) == 5
    assert float(lines[1].split(",")[3]) == pytest.approx(1.5)
