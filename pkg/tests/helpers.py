"""Seeded random generators shared by the unit, property and acceptance tests.

Every generator takes a ``random.Random`` so the same code serves both
hypothesis (via a drawn integer seed) and fixed-count loops in the acceptance run.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from adakit.diffpoly import DiffPoly
from adakit.dsl import Context, parse_diffpoly, parse_field, parse_gr, parse_op
from adakit.hfield import ComplexField, RatFuncField, TransField
from adakit.linop import LinOp
from adakit.univexp import LambdaBasis

Q = RatFuncField()
QC = ComplexField(Q)
T2 = TransField(2)
T2C = ComplexField(T2)


def trans_ctx(lams: dict | None = None) -> Context:
    """Two-level transseries context with a Lambda basis (default l1 = i)."""
    lams = {"l1": "i"} if lams is None else lams
    base = Context(T2, LambdaBasis(T2C, []))
    names = list(lams)
    elems = [T2C.coerce(parse_field(lams[n], base)) for n in names]
    return Context(T2, LambdaBasis(T2C, elems, names))


def rat_ctx(lams: dict | None = None) -> Context:
    lams = {"l1": "i"} if lams is None else lams
    base = Context(Q, LambdaBasis(QC, []))
    names = list(lams)
    elems = [QC.coerce(parse_field(lams[n], base)) for n in names]
    return Context(Q, LambdaBasis(QC, elems, names))


TCTX = trans_ctx()
QCTX = rat_ctx()


def tf(text: str, ctx: Context = TCTX):
    return parse_field(text, ctx)


def qf(text: str):
    return parse_field(text, QCTX)


def tp(text: str, ctx: Context = TCTX) -> DiffPoly:
    return parse_diffpoly(text, ctx)


def qp(text: str) -> DiffPoly:
    return parse_diffpoly(text, QCTX)


def top(text: str, ctx: Context = TCTX) -> LinOp:
    return parse_op(text, ctx)


def qop(text: str) -> LinOp:
    return parse_op(text, QCTX)


def tgr(text: str, ctx: Context = TCTX):
    return parse_gr(text, ctx)


# ------------------------------------------------------------ plain generators


def _small(rng: random.Random, lo=-4, hi=4, nonzero=False) -> int:
    while True:
        c = rng.randint(lo, hi)
        if c or not nonzero:
            return c


def rand_poly(rng: random.Random, deg: int = 2):
    return Q.poly([_small(rng) for _ in range(rng.randint(0, deg) + 1)])


def rand_rat(rng: random.Random, nonzero: bool = False):
    """A small element of Q(x): polynomial over (x + c) or over 1."""
    while True:
        num = rand_poly(rng, 2)
        if rng.random() < 0.5:
            den = Q.poly([_small(rng, 1, 3), 1])
            val = num / den
        else:
            val = num
        if not nonzero or not val.is_zero():
            return val


def rand_nonconst_rat(rng: random.Random):
    while True:
        a = rand_rat(rng, nonzero=True)
        if not a.derive().is_zero():
            return a


def rand_index(rng: random.Random, order: int, deg: int) -> tuple:
    d = rng.randint(0, deg)
    idx = [0] * (order + 1)
    for _ in range(d):
        idx[rng.randint(0, order)] += 1
    return tuple(idx)


def rand_diffpoly(rng: random.Random, order: int = 3, deg: int = 3, terms: int = 4, ring=Q) -> DiffPoly:
    """Random P of order <= order and degree <= deg that is not in K."""
    while True:
        tm = {}
        for _ in range(rng.randint(1, terms)):
            tm[rand_index(rng, order, deg)] = rand_rat(rng, nonzero=True) if ring is Q else ring.const(_small(rng, nonzero=True))
        P = DiffPoly(ring, tm)
        if not P.in_K():
            return P


def rand_homogeneous(rng: random.Random, d: int, order: int = 3, terms: int = 3) -> DiffPoly:
    tm = {}
    for _ in range(rng.randint(1, terms)):
        idx = [0] * (order + 1)
        for _ in range(d):
            idx[rng.randint(0, order)] += 1
        tm[tuple(idx)] = rand_rat(rng, nonzero=True)
    P = DiffPoly(Q, tm)
    return P if not P.is_zero() else rand_homogeneous(rng, d, order, terms)


def rand_linop(rng: random.Random, order: int = 3) -> LinOp:
    r = rng.randint(0, order)
    cs = [rand_rat(rng) for _ in range(r)] + [rand_rat(rng, nonzero=True)]
    return LinOp(Q, cs)


def rand_split_factors(rng: random.Random, r: int):
    return [rand_rat(rng) for _ in range(r)]


def rng_strategy(gen, *args, **kw):
    """Strategy drawing a seed and running ``gen`` on a Random seeded with it."""
    return st.integers(0, 2**32 - 1).map(lambda s: gen(random.Random(s), *args, **kw))


# ------------------------------------------------------------ slots over T2


def rand_mono(rng: random.Random, x_lo=-2, x_hi=2, e_lo=-2, e_hi=1):
    from adakit.hfield import Mono

    return Mono.from_exps((rng.randint(x_lo, x_hi), rng.randint(e_lo, e_hi)))


def rand_slot(rng: random.Random, max_order: int = 2):
    """A slot over the two-level field: a dominant low-order linear term, a
    small leading coefficient and a few sparse nonlinear terms, so that
    steep, normal and strictly normal instances all occur."""
    from adakit.hfield import Mono
    from adakit.slotcheck import SlotData
    from adakit.valgroup import All, Below, ConvexSubgroup, DownOf, ValVec

    order = rng.randint(1, max_order)
    terms = {
        (0,) * order + (1,): T2.mono(rand_mono(rng, -1, 1, -2, 0), rng.choice([1, -1, 2])),
        (1,): T2.mono(rand_mono(rng, -1, 1, 0, 0), rng.choice([1, -1, 3])),
    }
    if order == 2 and rng.random() < 0.5:
        terms[(0, 1)] = T2.mono(rand_mono(rng, -1, 1, -1, 0), rng.choice([1, -2]))
    if rng.random() < 0.7:
        terms[()] = T2.mono(rand_mono(rng, -2, 0, -2, 0), rng.choice([1, -1]))
    for _ in range(rng.randint(0, 2)):
        idx = [0] * (order + 1)
        for _ in range(rng.randint(2, 4)):
            idx[rng.randint(0, order)] += 1
        terms[tuple(idx)] = T2.mono(rand_mono(rng, -2, 2, -5, 0), rng.choice([1, -1]))
    P = DiffPoly(T2, terms)
    m = Mono.from_exps((rng.randint(-1, 0), rng.randint(-1, 0))) if rng.random() < 0.5 else Mono.one(2)
    cuts = [All(), DownOf(ConvexSubgroup(1, 2)), Below(ValVec((0, 1))), DownOf(ConvexSubgroup(0, 2))]
    return SlotData(P, m, rng.choice(cuts))


def rand_order1_slot(rng: random.Random):
    """Linear order-1 slot whose slope c + k/x + small has a representable
    exponential integral, so its ultimate values are computable."""
    from adakit.hfield import Mono
    from adakit.slotcheck import SlotData
    from adakit.valgroup import All, ConvexSubgroup, DownOf

    g = tf(f"{rng.randint(-2, 2)} + {rng.randint(-3, 3)}*x^-1 + {rng.choice([0, 1, -1])}*x^-{rng.randint(2, 3)}")
    m = Mono.from_exps((rng.randint(-2, 1), rng.randint(-1, 1)))
    cuts = [All(), DownOf(ConvexSubgroup(1, 2)), DownOf(ConvexSubgroup(0, 2))]
    return SlotData(tp("Y'") - tp("Y") * g + tf("x^-3"), m, rng.choice(cuts))


# ------------------------------------------------------------ group ring

QB = LambdaBasis(QC, [QC.i, QC.make(Q.zero, Q.x)], ["l1", "l2"])


def rand_gr(rng: random.Random, basis=QB, slots: int = 3):
    from adakit.univexp import GrElem, LambdaVec

    terms = {}
    for _ in range(rng.randint(1, slots)):
        lam = LambdaVec(tuple(rng.randint(-2, 2) for _ in range(basis.k)))
        terms[lam] = QC.make(rand_rat(rng), rand_rat(rng))
    f = GrElem(basis, terms)
    return f if not f.is_zero() else rand_gr(rng, basis, slots)


def rand_unit(rng: random.Random, basis=QB):
    from adakit.univexp import LambdaVec

    lam = LambdaVec(tuple(rng.randint(-2, 2) for _ in range(basis.k)))
    return basis.e(lam, QC.make(rand_rat(rng, nonzero=True), rand_rat(rng)))


def rand_trans_gr(rng: random.Random):
    """Group-ring element over the two-level field with monomial coefficients."""
    from adakit.hfield import Mono
    from adakit.univexp import GrElem, LambdaVec

    terms = {}
    for _ in range(rng.randint(1, 3)):
        lam = LambdaVec((rng.randint(-2, 2),))
        m = Mono.from_exps((rng.randint(-2, 2), rng.randint(-1, 1)))
        terms[lam] = T2C.coerce(T2.mono(m, rng.choice([1, 2, 3, -1])))
    return GrElem(TCTX.basis, terms)
