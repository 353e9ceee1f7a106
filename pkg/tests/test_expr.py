from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlj.diagram import TLElement
from tlj.errors import ExprEvalError, ExprTypeError, ParseError, ResourceCapError
from tlj.expr import (
    JW,
    Ascribe,
    BinOp,
    Call,
    Gen,
    Ident,
    Neg,
    Num,
    Pow,
    Sym,
    evaluate,
    format_value,
    parse,
    to_source,
    tokenize,
)
from tlj.scalar import NumericParams, TPoly, qint, qint_t

CORPUS = Path(__file__).parent / "data" / "expr_corpus.txt"


def corpus() -> list[str]:
    return [line.strip() for line in CORPUS.read_text().splitlines() if line.strip()]


def test_corpus_size():
    assert len(corpus()) == 50


@pytest.mark.parametrize("text", corpus())
def test_corpus_round_trip(text):
    tree = parse(text)
    printed = to_source(tree)
    assert parse(printed) == tree
    assert to_source(parse(printed)) == printed


@pytest.mark.parametrize("text", corpus())
def test_corpus_evaluates(text):
    evaluate(text)


def test_examples():
    assert evaluate("tr(jw(4))") == qint(5)
    zero = evaluate("e_1*e_1 - d*e_1")
    assert isinstance(zero, TLElement) and zero.is_zero() and zero.size == 2
    assert evaluate("atr(jw(2))") == qint_t(3)
    assert str(evaluate("atr(jw(2))")) == "t^2 - 1"
    assert format_value(evaluate("e_1*e_1 - d*e_1")) == "0"


def test_numeric_evaluation():
    assert evaluate("atr(jw(2))", NumericParams(2.5, 2.0)) == pytest.approx(3.0)
    assert evaluate("tr(jw(2))", NumericParams(2.5)) == pytest.approx(5.25)
    values = evaluate("jw(2)", NumericParams(2.5))
    assert sorted(values.values()) == pytest.approx([-0.4, 1.0])


def test_precedence():
    assert parse("1 + 2 * 3") == BinOp("+", Num(1), BinOp("*", Num(2), Num(3)))
    assert parse("1 - 2 - 3") == BinOp("-", BinOp("-", Num(1), Num(2)), Num(3))
    assert parse("-d^2") == Neg(Pow(Sym("d"), Num(2)))
    assert parse("e_1@3^2") == Pow(Ascribe(Gen(1), 3), Num(2))
    assert to_source(BinOp("-", Num(1), BinOp("-", Num(2), Num(3)))) == "1 - (2 - 3)"


def test_spans():
    tree = parse("tr(e_1) + 2")
    assert tree.span == (0, 11)
    assert tree.left.span == (0, 7)
    assert [t.kind for t in tokenize("e_1*jw(2)")] == ["gen", "op", "name", "op", "num", "op", "eof"]


@pytest.mark.parametrize(
    "text,error,span",
    [
        ("e_1 +", ParseError, (5, 5)),
        ("2 $ 3", ParseError, (2, 3)),
        ("(1", ParseError, (2, 2)),
        ("foo(1)", ParseError, (0, 3)),
        ("inner(e_1)", ParseError, (0, 10)),
        ("id_2 + id_3", ExprTypeError, (0, 11)),
        ("tr(d)", ExprTypeError, (3, 4)),
        ("e_3@2", ExprTypeError, (0, 5)),
        ("atr(id_3)", ExprTypeError, (4, 8)),
        ("d^t", ExprTypeError, (2, 3)),
        ("e_0", ExprTypeError, (0, 3)),
        ("1/0", ExprEvalError, (2, 3)),
    ],
)
def test_errors_carry_spans(text, error, span):
    with pytest.raises(error) as info:
        evaluate(text)
    assert info.value.span == span
    assert f"at {span[0]}:{span[1]}" in str(info.value)


def test_cap_is_reported():
    with pytest.raises(ResourceCapError):
        evaluate("jw(9)")


def test_scalar_times_identity():
    assert evaluate("d@2 - d*id_2").is_zero()
    assert evaluate("t*atr(id_2)") == TPoly.monomial(3, 1)
    # TL coefficients live in Q(q), so t cannot scale a TL element
    with pytest.raises(ExprTypeError):
        evaluate("atr(t*id_2)")


leaves = st.one_of(
    st.integers(0, 50).map(Num),
    st.sampled_from(["d", "q", "t"]).map(Sym),
    st.integers(1, 6).map(Gen),
    st.integers(0, 6).map(Ident),
    st.integers(0, 6).map(JW),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda a: BinOp(*a)),
        st.tuples(children, children).map(lambda a: Pow(*a)),
        st.tuples(children, st.integers(0, 8)).map(lambda a: Ascribe(*a)),
        st.tuples(st.sampled_from(["tr", "atr", "adj"]), children).map(lambda a: Call(a[0], (a[1],))),
        st.tuples(children, children).map(lambda a: Call("inner", a)),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_printer_round_trips_arbitrary_trees(tree):
    text = to_source(tree)
    assert parse(text) == tree
