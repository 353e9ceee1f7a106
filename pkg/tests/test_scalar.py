from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlj.errors import DomainError, EvaluationError
from tlj.scalar import (
    DELTA,
    ONE,
    Q,
    ZERO,
    LaurentPoly,
    NumericParams,
    Scalar,
    T,
    TPoly,
    evaluate,
    q_from_delta,
    qint,
    qint_numeric,
    qint_t,
    scalar_from_json,
    scalar_to_json,
    tpoly_from_json,
    tpoly_to_json,
)

QINV = Q.inverse()


def test_qint_examples():
    assert qint(1) == ONE
    assert qint(2) == Q + QINV
    assert qint(2) == DELTA
    assert qint(3).evaluate(2.0) == pytest.approx(5.25, abs=1e-15)
    assert all(qint(m).is_laurent() for m in range(1, 15))


@pytest.mark.parametrize("m", [0, -1])
def test_qint_domain(m):
    with pytest.raises(DomainError):
        qint(m)
    with pytest.raises(DomainError):
        qint_t(m)


def test_qint_t_examples():
    assert qint_t(1) == TPoly([1])
    assert qint_t(2) == T
    assert qint_t(3) == T * T - 1
    assert str(qint_t(3)) == "t^2 - 1"


def test_eval_examples():
    assert evaluate(qint(3), NumericParams(2.0)) == 3.0
    assert evaluate(qint(3), NumericParams(2.5)) == pytest.approx(5.25)
    assert evaluate(qint_t(3), NumericParams(2.5, 2.4)) == pytest.approx(4.76)


def test_field_examples():
    assert (Q - QINV) * qint(3) == Q ** 3 - Q ** -3
    x = (Q + 3) / (Q * Q - 2)
    diff = x - x
    assert diff == ZERO and diff.is_zero()
    assert qint(2) * qint(2) - qint(3) == ONE
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_recurrence():
    for m in range(2, 25):
        assert qint(m + 1) == qint(2) * qint(m) - qint(m - 1)


@pytest.mark.parametrize("delta", [2.0, 2.5, 3.0])
def test_qint_t_matches_qint_numerically(delta):
    params = NumericParams(delta)
    for m in range(1, 26):
        expected = qint(m).evaluate(params.q)
        assert qint_t(m).evaluate(params.q, delta) == pytest.approx(expected, rel=1e-12)
        assert qint_numeric(m, delta) == pytest.approx(expected, rel=1e-12)


def test_canonical_form():
    x = Scalar(LaurentPoly.from_dict({2: 2, 0: 2}), LaurentPoly.from_dict({1: -4}))
    # (2q^2 + 2) / (-4q) reduces to -(q^2 + 1) / (2q)
    assert x.den.coefficients == {0: 2}
    assert x.num.coefficients == {1: -1, -1: -1}
    assert Scalar(x.num, x.den) == x
    assert Scalar(x.num, x.den).num == x.num and Scalar(x.num, x.den).den == x.den
    assert Scalar(0, 7) == ZERO


def test_pole_detection():
    bad = ONE / (Q - 1)
    with pytest.raises(EvaluationError):
        bad.evaluate(1.0)
    assert (ONE / (Q - 2)).evaluate(3.0) == 1.0


def test_numeric_params():
    with pytest.raises(DomainError):
        NumericParams(1.9)
    with pytest.raises(DomainError):
        NumericParams(2.5, 2.6)
    with pytest.raises(DomainError):
        NumericParams(2.5, 0.0)
    for delta in (2.0, 2.1, 2.5, 3.0, 10.0):
        q = q_from_delta(delta)
        assert q >= 1 and abs(q + 1 / q - delta) < 1e-12


def test_exact_evaluation():
    assert qint(3).evaluate_exact(Fraction(2)) == Fraction(21, 4)


def test_json_round_trip():
    x = (Q ** 5 - 7 * Q + 3) / (Q ** 2 + 1)
    assert scalar_from_json(scalar_to_json(x)) == x
    p = qint_t(5) * x + T
    assert tpoly_from_json(tpoly_to_json(p)) == p


def test_tpoly_substitute():
    for m in range(1, 10):
        assert qint_t(m).substitute(DELTA) == qint(m)


laurent = st.dictionaries(st.integers(-3, 3), st.integers(-5, 5), max_size=4).map(LaurentPoly.from_dict)
nonzero = laurent.filter(lambda p: not p.is_zero())
scalars = st.builds(Scalar, laurent, nonzero)


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-10)


@settings(max_examples=200, deadline=None)
@given(scalars, scalars, st.floats(1.1, 3.0))
def test_evaluation_is_a_ring_homomorphism(a, b, q):
    try:
        va, vb = a.evaluate(q), b.evaluate(q)
    except EvaluationError:
        return
    assert _close((a + b).evaluate(q), va + vb)
    assert _close((a * b).evaluate(q), va * vb)
    assert _close((a - b).evaluate(q), va - vb)


@settings(max_examples=100, deadline=None)
@given(scalars, scalars)
def test_field_axioms(a, b):
    assert a + b == b + a
    assert a * b == b * a
    if not b.is_zero():
        assert (a / b) * b == a
    assert Scalar(a.num, a.den) == a
