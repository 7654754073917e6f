from fractions import Fraction

import pytest
from hypothesis import given, settings

from adakit.errors import PreconditionError
from adakit.hfield import Mono, sim
from adakit.linop import make_split
from adakit.slotcheck import (
    SlotData,
    SplitWitness,
    canonical_chain,
    check_active,
    comp_conj,
    is_attractive,
    is_cut_repulsive,
    is_deep,
    is_gamma_repulsive,
    is_isolated,
    is_normal,
    is_repulsive,
    is_steep,
    is_strictly_normal,
    is_ultimate,
    make_repulsive_witness,
    mult_conj,
    refine,
    verify_split_normal,
    witness_from_linear_part,
)
from adakit.univexp import LambdaBasis
from adakit.valgroup import All, ConvexSubgroup, DownOf, ValVec

from helpers import T2, T2C, rand_order1_slot, rand_slot, rng_strategy, tf, tp

ONE = Mono.one(2)
V = ValVec


def slot(text, m=ONE, cut=None):
    return SlotData(tp(text), m, All() if cut is None else cut)


# ------------------------------------------------------------------ steep / normal


def test_normal_golden():
    s = slot("e(1)^-1*Y'' - Y + x^-1 + e(1)^-4*Y^5")
    rep = is_normal(s)
    assert rep.verdict
    assert rep.span == tf("-e(1)^-1") and rep.weight == 2
    assert not is_strictly_normal(s).verdict  # the constant term is not small enough


def test_normal_fails_when_nonlinear_part_is_too_big():
    s = slot("e(1)^-1*Y'' - Y + x^-1 + e(1)^-3*Y^5")
    assert is_steep(s).verdict
    assert not is_normal(s).verdict


def test_strictly_normal_example():
    s = slot("e(1)^-1*Y'' - Y + e(1)^-4 + e(1)^-4*Y^5")
    assert is_strictly_normal(s).verdict


def test_steep_examples():
    assert is_steep(slot("Y' + e(1)*Y")).verdict
    assert not is_steep(slot("Y' + x*Y")).verdict
    # order of the linear part drops below r
    rep = is_steep(slot("Y'^2 + Y"))
    assert not rep.verdict and rep.details["order_L"] == 0


@pytest.mark.parametrize(
    "g,u,steep,deep",
    [
        ("e(1)", "x^-1", True, True),
        ("e(1)", "e(1)^2", True, False),
        ("x", "x^-1", False, False),
        ("x", "e(1)^2", False, False),
        ("x^-1", "x^-1", False, False),
        ("x^-1", "e(1)^2", False, False),
    ],
)
def test_deep_table(g, u, steep, deep):
    # order 1 linear: P = Y' + g Y - u
    s = slot(f"Y' + {g}*Y - {u}")
    assert is_steep(s).verdict == steep
    assert is_deep(s).verdict == deep


def test_deep_rows_and_chain():
    s = slot("Y' + e(1)*Y - x^-1")
    rep = is_deep(s)
    assert [r["phi"] for r in rep.details["rows"]] == ["1", "x^-1"]
    assert all(r["separant auto"] for r in rep.details["rows"])
    assert len(canonical_chain(T2)) == 2
    with pytest.raises(PreconditionError):
        check_active(tf("x^-2"))
    with pytest.raises(PreconditionError):
        check_active(tf("x"))
    with pytest.raises(PreconditionError):
        is_deep(s, [])


# ------------------------------------------------------------------ transforms


def test_mult_conj_shifts_cut():
    s = slot("Y' + e(1)*Y", Mono.from_exps((0, -1)), DownOf(ConvexSubgroup(1, 2)))
    n = Mono.from_exps((-1, 0))
    t = mult_conj(s, n)
    assert t.m == s.m / n
    assert t.cut == s.cut.shift(-n.v())
    assert t.P == s.P.conj_mul(T2.mono(n))


def test_refine_and_comp_conj():
    s = slot("Y' + e(1)*Y", Mono.from_exps((-1, 0)))
    with pytest.raises(PreconditionError):
        refine(s, T2.zero, ONE)
    t = refine(s, tf("x^-2"), Mono.from_exps((-2, 0)))
    assert t.P == s.P.conj_add(tf("x^-2")) and t.notes
    c = comp_conj(s, tf("x^-1"))
    assert c.cut == s.cut and c.m == s.m
    assert c.P.phi == tf("x^-1")


def test_slot_validation():
    with pytest.raises(ValueError):
        SlotData(tp("x"), ONE, All())
    with pytest.raises(ValueError):
        SlotData(tp("Y'"), ONE, All(), realm="C")
    with pytest.raises(ValueError):
        SlotData(tp("Y'"), Mono.one(1), All())


# ------------------------------------------------------------------ repulsion


def test_repulsion_examples():
    assert is_repulsive(tf("e(1)")) and not is_attractive(tf("e(1)"))
    assert is_attractive(tf("-x")) and not is_repulsive(tf("-x"))
    assert not is_repulsive(tf("x^-1")) and not is_attractive(tf("x^-1"))
    # negative but dominating psi at the top level
    assert is_gamma_repulsive(tf("-e(1)"), V((0, 1)))
    assert not is_gamma_repulsive(tf("-x^-1"), V((1, 0)))
    assert not is_gamma_repulsive(tf("-x^-1"), V((0, 1)))
    assert not is_gamma_repulsive(tf("-x^-1"), V((0, 2)))  # ties with psi
    assert is_gamma_repulsive(tf("-1"), V((0, 2)))
    assert not is_gamma_repulsive(tf("-x^-2"), V((0, 1)))
    assert is_gamma_repulsive(tf("x^-5"), V((1, 0)))
    with pytest.raises(ValueError):
        is_gamma_repulsive(tf("x"), V((0, 0)))


def test_cut_repulsion():
    down1 = DownOf(ConvexSubgroup(1, 2))
    assert is_cut_repulsive(tf("-x^-2"), DownOf(ConvexSubgroup(0, 2)))  # no positive element
    assert not is_cut_repulsive(tf("-x^-1"), down1)
    assert is_cut_repulsive(tf("-1"), down1)
    assert not is_cut_repulsive(tf("-1"), All())
    assert is_cut_repulsive(tf("-e(1)"), All())


def test_repulsive_witness():
    m = Mono.from_exps((-1, 0))
    assert make_repulsive_witness(tf("3*x^-1"), m) == 1
    assert make_repulsive_witness(tf("-3*x^-1"), m) == 4
    assert make_repulsive_witness(tf("x^-3"), m) == 1
    with pytest.raises(PreconditionError):
        make_repulsive_witness(tf("x"), m)
    with pytest.raises(PreconditionError):
        make_repulsive_witness(tf("x^-1"), ONE)


# ------------------------------------------------------------------ split-normal


def test_split_normal_order1_strong():
    s = slot("Y' - e(1)*Y")
    S = make_split(T2, 1, [tf("e(1)")])
    wit = witness_from_linear_part(s, S)
    for mode in ("SN2", "SN2as", "SN2s"):
        assert verify_split_normal(s, wit, mode).verdict, mode


def test_repulsive_normal_fails_on_attractive_factor():
    # factor -1/x is negative and too small to beat psi at level 1
    s = slot("Y' + x^-1*Y + e(1)^-2*Y^3", ONE, DownOf(ConvexSubgroup(1, 2)))
    S = make_split(T2, 1, [tf("-x^-1")])
    rep = verify_split_normal(s, witness_from_linear_part(s, S), "RN2")
    assert not rep.verdict
    assert rep.details["not repulsive"] == [1]


def test_split_normal_order2():
    # e^-x (D - e^x)(D + e^x) = e^-x D^2 + 1 - e^x, plus a tiny quintic term
    s = slot("e(1)^-1*Y'' + Y - e(1)*Y + e(1)^-8*Y^5", ONE, DownOf(ConvexSubgroup(1, 2)))
    assert is_normal(s).verdict
    S = make_split(T2, tf("e(1)^-1"), [tf("e(1)"), tf("-e(1)")])
    wit = witness_from_linear_part(s, S)
    for mode in ("SN2", "SN2as", "RN2", "RN2as"):
        assert verify_split_normal(s, wit, mode).verdict, mode
    # the whole-polynomial modes need the constant term inside Q + R
    assert verify_split_normal(s, wit, "SN2s").verdict


def test_split_normal_rejects_bad_witness():
    s = slot("Y' - e(1)*Y")
    bad = make_split(T2, 1, [tf("e(1) + 1")])
    rep = verify_split_normal(s, witness_from_linear_part(s, bad), "SN2")
    assert not rep.verdict and not rep.details["splitting expands to L_Q"]
    wit = SplitWitness(tp("Y' - e(1)*Y"), tp("Y^2"), make_split(T2, 1, [tf("e(1)")]))
    assert not verify_split_normal(s, wit, "SN2").verdict
    with pytest.raises(ValueError):
        verify_split_normal(s, wit, "XX")


# ------------------------------------------------------------------ isolated / ultimate


def test_ultimate_order1():
    assert is_ultimate(slot("Y' - Y")).verdict
    assert is_ultimate(slot("Y' - x^-2*Y")).verdict
    # g = x^-2 with g-dagger = -2/x: the value lies inside the cut and above v(m)
    assert not is_ultimate(slot("Y' + 2*x^-1*Y")).verdict


def test_ultimate_needs_normal_or_linear():
    with pytest.raises(PreconditionError):
        is_ultimate(slot("Y' + x*Y + Y^2"))


def test_isolated_and_ultimate_order2():
    # D^2 + 1 splits as (D - i)(D + i); kernel values are 0
    s = slot("Y'' + Y")
    S = make_split(T2C, 1, [T2C.i, -T2C.i])
    B = LambdaBasis(T2C, [T2C.i])
    assert is_ultimate(s, splitting=S, basis=B).verdict
    iso = is_isolated(s, splitting=S, basis=B)
    assert iso.verdict and iso.details["values"] == []
    big = SlotData(s.P, Mono.from_exps((1, 0)), All())
    assert not is_ultimate(big, splitting=S, basis=B).verdict
    with pytest.raises(PreconditionError):
        is_ultimate(s)


# ------------------------------------------------------------------ properties


slots = rng_strategy(rand_slot)


@given(slots)
@settings(max_examples=80, deadline=None)
def test_strict_normal_steep_chain(s):
    st, n, sn = is_steep(s).verdict, is_normal(s).verdict, is_strictly_normal(s).verdict
    assert not sn or n
    assert not n or st


def _order1_witness(s, whole):
    Pm = s.P_m
    Q = Pm.homogeneous_part(1)
    R = (Pm - Q) if whole else Pm.degree_filter(lambda d: d > 1)
    a0, a1 = Q.linear_part().coeffs
    S = make_split(T2, a1, [-a0 / a1])
    return SplitWitness(Q, R, S)


@given(rng_strategy(rand_slot, max_order=1))
@settings(max_examples=80, deadline=None)
def test_split_normal_mode_chain(s):
    sn2 = verify_split_normal(s, _order1_witness(s, False), "SN2").verdict
    sn2as = verify_split_normal(s, _order1_witness(s, False), "SN2as").verdict
    sn2s = verify_split_normal(s, _order1_witness(s, True), "SN2s").verdict
    assert not sn2s or sn2as
    assert not sn2as or sn2
    # order-1 normal slots always split
    assert sn2 == is_normal(s).verdict


@given(rng_strategy(rand_order1_slot))
@settings(max_examples=80, deadline=None)
def test_ultimate_implies_isolated(s):
    u, i = is_ultimate(s).verdict, is_isolated(s).verdict
    assert not u or i


@given(rng_strategy(lambda r: (rand_slot(r), Fraction(r.choice([1, -2, 3, Fraction(1, 2)])))))
@settings(max_examples=60, deadline=None)
def test_normality_invariant_under_scaling(t):
    s, b = t
    scaled = SlotData(s.P * T2.const(b), s.m, s.cut)
    assert is_normal(scaled).verdict == is_normal(s).verdict
    assert is_strictly_normal(scaled).verdict == is_strictly_normal(s).verdict


@given(rng_strategy(lambda r: (rand_slot(r), Mono.from_exps((r.randint(-1, 1), r.randint(-1, 1))))))
@settings(max_examples=60, deadline=None)
def test_normality_invariant_under_mult_conj(t):
    s, n = t
    assert is_normal(mult_conj(s, n)).verdict == is_normal(s).verdict
    assert is_steep(mult_conj(s, n)).verdict == is_steep(s).verdict


@given(slots)
@settings(max_examples=60, deadline=None)
def test_normality_under_compositional_conjugation(s):
    if not is_normal(s).verdict:
        return
    for phi in canonical_chain(s.ring):
        assert is_normal(comp_conj(s, phi)).verdict


@given(slots)
@settings(max_examples=60, deadline=None)
def test_span_of_linear_part_matches_witness(s):
    if not is_normal(s).verdict:
        return
    span = is_normal(s).span
    L = s.P_m.linear_part()
    assert sim(L.span()[0], span)
    # dropping the nonlinear tail leaves the span unchanged
    assert sim(s.P_m.homogeneous_part(1).linear_part().span()[0], span)
