import random

import pytest
from hypothesis import given, settings

from adakit.errors import DivByZero, NotLogDerivShape, VerificationError
from adakit.hfield import preceq, sim
from adakit.linop import (
    LinOp,
    compose_order2,
    conj_op,
    lclm,
    lclm_certify,
    make_split,
    order1_values,
    polya_kernel,
    polya_operator,
    polya_split,
    riccati_dominance_check,
    right_divide,
    split_compconj,
    split_twist,
    strong_check,
    verify_real,
)
from adakit.valgroup import ValVec

from helpers import (
    Q,
    QC,
    T2,
    qf,
    qop,
    rand_linop,
    rand_nonconst_rat,
    rand_poly,
    rand_rat,
    rng_strategy,
    tf,
    top,
)

V = ValVec


def test_compose_apply_adjoint_examples():
    assert qop("(D - x)*(D + x)") == qop("D^2 + 1 - x^2")
    assert qop("D + x").adjoint() == qop("-D + x")
    assert qop("D^2").apply(qf("x^3")) == qf("6*x")


def test_twist_examples():
    a = qf("x^2 + 1/x")
    D = LinOp.D(Q)
    assert D.twist(a) == LinOp(Q, [a, 1])
    A = qop("x*D^2 - D + 3")
    assert A.twist(a).twist(-a) == A
    assert qop("D^2").twist(a) == LinOp(Q, [a.derive() + a * a, 2 * a, 1])


def test_twist_matches_riccati_route():
    # A_a via Ri(A)_{+a}: Ri(A_a) = Ri(A)_{+a}
    A = qop("x*D^2 - D + 3")
    a = qf("1/(x+1)")
    assert A.twist(a).riccati() == A.riccati().conj_add(a)


def test_comp_conj_examples():
    phi = qf("x^2 + 1")
    assert qop("D").comp_conj(phi).coeffs == (Q.zero, phi)
    A = qop("D^2").comp_conj(Q.x)
    assert A.apply(qf("x^3")) == qf("6*x")
    assert A.order == 2
    with pytest.raises(DivByZero):
        qop("D").comp_conj(Q.zero)


def test_riccati_examples():
    assert qop("D^2").riccati().to_dsl() == "Z^2 + Z'"
    assert qop("x").riccati().terms == {(): Q.x}
    for z in (Q.x, tf("x"), tf("e(1)"), tf("x^2*e(1)")):
        assert riccati_dominance_check(z, 3)
    with pytest.raises(ValueError):
        riccati_dominance_check(qf("1/x"), 2)


def test_span_examples():
    assert qop("D + x").span()[0] == qf("1/x")
    assert qop("D + 1/x").span()[0] == Q.one
    d = qop("D").dwm_at(V((0,)))
    assert d["exceptional"] and d["dwm"] == 1
    assert not qop("D - x").dwm_at(V((0,)))["exceptional"]
    with pytest.raises(ValueError):
        LinOp(Q, []).span()


def test_split_verify_and_transforms():
    S = make_split(Q, 1, [Q.x, -Q.x])
    assert S.verify(qop("D^2 + 1 - x^2"))
    with pytest.raises(VerificationError) as exc:
        S.check(qop("D^2"))
    assert exc.value.residual is not None
    n = Q.x
    St = split_twist(S, n)
    assert St.factors == (Q.x - qf("1/x"), -Q.x - qf("1/x"))
    A = qop("D^2 + D")
    Sa = make_split(Q, 1, [Q.zero, qf("-1")])
    assert Sa.verify(A)
    Sc = split_compconj(Sa, Q.x)
    assert Sc.verify(A.comp_conj(Q.x))


def test_polya_examples():
    bs = [Q.x, qf("x^2 + 1")]
    A = polya_operator(Q, bs)
    assert polya_split(Q, bs).verify(A)
    gs = [Q.one, Q.x]
    for y in polya_kernel(gs):
        assert polya_operator(Q, gs).apply(y).is_zero()


def test_real_split_examples():
    assert compose_order2(Q.zero, Q.one, QC) == qop("D^2 + 1")
    A = compose_order2(Q.x, Q.x, QC)
    assert A.coeff(1) == -(2 * Q.x + qf("1/x"))
    S = make_split(QC, 1, [QC.make(Q.x, -Q.x) + Q.x.logderiv(), QC.make(Q.x, Q.x)])
    assert verify_real(A, S)
    with pytest.raises(ValueError):
        compose_order2(Q.x, Q.zero, QC)
    # strong: A = d - e^x, g = e^x, span e^-x
    g = tf("e(1)")
    S1 = make_split(T2, 1, [g])
    assert strong_check(S1, tf("e(1)^-1"))
    assert not strong_check(make_split(T2, 1, [tf("-x^-2")]), tf("e(1)^-1"))


def test_division_and_lclm_examples():
    a = qf("1/x")
    assert lclm(qop("D") - a, qop("D")) == qop("D^2")
    Qt, R = right_divide(qop("D^2"), qop("D - 1/x"))
    assert Qt == qop("D + 1/x") and R.is_zero()
    b = qf("x^2 + 2")
    A = LinOp(QC, [-QC.coerce(b), 1])
    assert lclm(A, conj_op(A)) == A
    with pytest.raises(DivByZero):
        lclm(qop("D"), LinOp(Q, []))


def test_lclm_of_conjugate_pair_is_real():
    a = QC.make(Q.x, Q.one)
    A = LinOp(QC, [-a, 1])
    L = lclm(A, conj_op(A))
    assert L.order == 2
    assert all(c.im.is_zero() for c in L.coeffs)
    lclm_certify(L, A, conj_op(A))


@given(rng_strategy(lambda r: (QC.make(rand_rat(r), rand_rat(r, nonzero=True)), QC.make(rand_rat(r), rand_rat(r)))))
@settings(max_examples=30, deadline=None)
def test_lclm_real_part_witness(t):
    # L = B A real, A(f) = b  =>  L(Re f) = Re(B(b))
    a, f = t
    A = LinOp(QC, [-a, 1])
    L = lclm(A, conj_op(A))
    assert all(c.im.is_zero() for c in L.coeffs)
    B, _ = lclm_certify(L, A, conj_op(A))
    b = A.apply(f)
    assert L.apply(QC.coerce(f.re)) == QC.coerce(B.apply(b).re)


def test_order1_values_examples():
    A = top("D") - tf("x*e(1)").logderiv()
    out = order1_values(A)
    assert out["exceptional"] == out["ultimate"] == V((-1, -1))
    z = order1_values(top("D"))
    assert z["exceptional"] == z["ultimate"] == V((0, 0))
    with pytest.raises(NotLogDerivShape):
        order1_values(qop("D - x"))
    with pytest.raises(ValueError):
        order1_values(top("D^2"))


# ------------------------------------------------------------------ properties


ops3 = rng_strategy(lambda r: (rand_linop(r), rand_linop(r), rand_linop(r), rand_rat(r, nonzero=True)))


@given(ops3)
@settings(max_examples=50, deadline=None)
def test_ring_laws(t):
    A, B, C, y = t
    assert A.compose(B).compose(C) == A.compose(B.compose(C))
    assert A.compose(B).apply(y) == A.apply(B.apply(y))
    assert A.compose(B).adjoint() == B.adjoint().compose(A.adjoint())
    assert A.adjoint().adjoint() == A


@given(rng_strategy(lambda r: (rand_linop(r), rand_nonconst_rat(r), rand_rat(r, nonzero=True))))
@settings(max_examples=50, deadline=None)
def test_conjugation_and_riccati_laws(t):
    A, phi, y = t
    assert A.comp_conj(phi).apply(y) == A.apply(y)
    assert A.riccati().evaluate(y.logderiv()) == A.apply(y) / y


@given(rng_strategy(lambda r: (rand_linop(r), rand_rat(r), rand_rat(r))))
@settings(max_examples=50, deadline=None)
def test_twist_group_law(t):
    A, a, b = t
    assert A.twist(a).twist(b) == A.twist(a + b)
    assert A.twist(Q.zero) == A


@given(rng_strategy(lambda r: (rand_linop(r), rand_rat(r, nonzero=True))))
@settings(max_examples=50, deadline=None)
def test_span_scale_invariant(t):
    A, a = t
    assert A.scale(a).span()[0] == A.span()[0]
    v = A.span()[0]
    assert preceq(v, Q.one)
    assert (v == Q.one) == (A.span()[2] == A.order)


@given(rng_strategy(lambda r: (rand_linop(r), V((r.randint(-3, 3),)))))
@settings(max_examples=50, deadline=None)
def test_dwm_fast_path_matches_oracle(t):
    A, g = t
    assert A.dwm_at(g) == A.dwm_at_oracle(g)


@given(rng_strategy(lambda r: (rand_linop(r, 2), rand_linop(r, 2))))
@settings(max_examples=50, deadline=None)
def test_lclm_properties(t):
    A, B = t
    L = lclm(A, B)
    assert L.is_monic()
    lclm_certify(L, A, B)
    assert max(A.order, B.order) <= L.order <= A.order + B.order


def _perturbed(r: random.Random):
    # A composed from a splitting; B tiny against v(A) A
    A = make_split(Q, 1, [rand_poly(r, 1) for _ in range(r.randint(1, 3))]).expand()
    v = A.span()[0]
    cs = [c * v * qf("1/x^3") for c in A.coeffs[:-1]]
    return A, LinOp(Q, cs)


@given(rng_strategy(_perturbed))
@settings(max_examples=40, deadline=None)
def test_span_of_perturbed_operator(t):
    A, B = t
    assert sim((A + B).span()[0], A.span()[0])
