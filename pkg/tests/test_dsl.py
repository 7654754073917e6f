import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from adakit.dsl import (
    Bin,
    BigO,
    DSLError,
    Dop,
    Exp,
    Gen,
    Imag,
    Name,
    Neg,
    Num,
    Pow,
    Var,
    canonical,
    evaluate,
    parse,
    parse_diffpoly,
    parse_lambda,
    parse_mono,
    to_text,
)
from adakit.hfield import Mono

from helpers import QCTX, T2, TCTX, rng_strategy, tf, tp


def rand_ast(r: random.Random, depth: int = 3):
    if depth == 0 or r.random() < 0.3:
        return r.choice(
            [
                lambda: Num(r.randint(0, 20)),
                lambda: Gen(r.randint(0, 2)),
                lambda: Imag(),
                lambda: Dop(),
                lambda: Var(r.choice("YZV"), r.randint(0, 4)),
                lambda: Name(r.choice(["l1", "l2", "mu"])),
            ]
        )()
    kind = r.randint(0, 5)
    if kind == 0:
        return Neg(rand_ast(r, depth - 1))
    if kind == 1:
        q = Fraction(r.randint(-5, 5), r.choice([1, 1, 2, 3]))
        return Pow(rand_ast(r, depth - 1), q)
    if kind == 2:
        return Exp(rand_ast(r, depth - 1))
    if kind == 3:
        return BigO(rand_ast(r, depth - 1))
    return Bin(r.choice("+-*/"), rand_ast(r, depth - 1), rand_ast(r, depth - 1))


@given(rng_strategy(rand_ast))
@settings(max_examples=500, deadline=None)
def test_round_trip(a):
    text = to_text(a)
    assert parse(text) == a
    assert canonical(text) == text


def test_round_trip_examples():
    for text in ["x^(1/2)", "Y^(3)", "Y''^2", "-(x + 1)", "E(l1 - 2*l2)*x", "a - (b - c)", "O(x^-3)"]:
        assert to_text(parse(text)) == text
    assert canonical("x^( 1 / 2 )") == "x^(1/2)"
    assert canonical("( x )  *  e(1)") == "x*e(1)"


def test_syntax_errors_carry_spans():
    with pytest.raises(DSLError) as exc:
        parse("x^(1/0)")
    assert exc.value.span is not None
    with pytest.raises(DSLError) as exc:
        parse("x + * 2")
    assert exc.value.span[0] == 4
    assert "^" in str(exc.value)
    for bad in ["(x", "x)", "e(", "Y^(", ""]:
        with pytest.raises(DSLError):
            parse(bad)


def test_evaluation_examples():
    P = tp("e(1)^-1*Y'' - Y + x^-1 + e(1)^-4*Y^5")
    assert P.order == 2 and P.deg == 5
    assert tf("x^(1/2)")**2 == T2.x
    assert parse_mono("x^2*e(1)^-1", TCTX) == Mono.from_exps((2, -1))
    assert parse_lambda("2*l1", TCTX) == TCTX.basis.unit(0, 2)
    assert evaluate("Y^(3)", TCTX).order == 3


def test_realm_and_kind_errors():
    with pytest.raises(DSLError):
        tf("e(1)", QCTX)  # rational functions have no exponential level
    with pytest.raises(DSLError):
        tf("Y + 1")
    with pytest.raises(DSLError):
        parse_diffpoly("D + 1", TCTX)
    with pytest.raises(DSLError):
        tf("e(3)")
    with pytest.raises(DSLError):
        tf("nope")
    with pytest.raises(DSLError):
        evaluate("Y*D", TCTX)
