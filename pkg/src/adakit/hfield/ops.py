"""Asymptotic comparisons, psi-map data, I(K) membership, logarithmic
derivatives and integration over the concrete fields."""

from __future__ import annotations

from fractions import Fraction

from ..errors import InsufficientPrecision, LogDivergent, NotLogDerivShape
from ..valgroup import ConvexSubgroup, ValVec
from .complexfield import ComplexElem
from .mono import Mono, gen_dagger
from .ratfunc import RatFunc
from .trans import Trans

RELATIONS = ("<", "<=", "~=", "~", "<_D", "<=_D", "~=_D", "<_flat")


# ---------------------------------------------------------------- psi data


def psi(gamma: ValVec) -> ValVec:
    """psi(gamma) = v(m-dagger) for any monomial m of value gamma."""
    if gamma.is_inf or gamma.is_zero():
        raise ValueError("psi needs a nonzero finite argument")
    return gen_dagger(gamma.L, gamma.top_level()).v()


def psi_of_level(L: int, level: int) -> ValVec:
    return gen_dagger(L, level).v()


def in_flat(gamma: ValVec) -> bool:
    """gamma lies in the flattening subgroup {psi > 0} (with 0 included)."""
    if gamma.is_zero():
        return True
    return psi(gamma) > ValVec.zero(gamma.L)


def flat_subgroup(L: int) -> ConvexSubgroup:
    return ConvexSubgroup(1, L)


def max_psi(L: int) -> ValVec:
    """Largest element of the (finite) Psi set: v(x^-1)."""
    return psi_of_level(L, 0)


def delta_of(gamma: ValVec) -> ConvexSubgroup:
    """Delta(m): the values of strictly smaller archimedean class than gamma."""
    return ConvexSubgroup.of(gamma)


# ---------------------------------------------------------------- comparisons


def _bounds(f, D: ConvexSubgroup | None):
    lo, hi = f.v_bounds()
    if D is None:
        return lo, hi
    return D.project(lo), D.project(hi)


def _gt(a, b) -> bool:
    """Decide (value interval a) > (value interval b)."""
    (alo, ahi), (blo, bhi) = a, b
    if alo > bhi:
        return True
    if ahi <= blo:
        return False
    raise InsufficientPrecision("comparison depends on terms below the error bound")


def _ge(a, b) -> bool:
    (alo, ahi), (blo, bhi) = a, b
    if alo >= bhi:
        return True
    if ahi < blo:
        return False
    raise InsufficientPrecision("comparison depends on terms below the error bound")


def _eq(a, b) -> bool:
    (alo, ahi), (blo, bhi) = a, b
    if alo == ahi == blo == bhi:
        return True
    if ahi < blo or bhi < alo:
        return False
    raise InsufficientPrecision("comparison depends on terms below the error bound")


def asym_cmp(rel: str, f, g, delta: ConvexSubgroup | None = None) -> bool:
    """Decide f rel g for rel in ``RELATIONS``.

    ``<`` is f below g (vf > vg), ``<=`` is f dominated by g, ``~=`` same
    valuation, ``~`` asymptotic equivalence; the ``_D`` forms compare in the
    quotient by ``delta``; ``<_flat`` uses the flattening subgroup.
    """
    if rel.endswith("_D"):
        if delta is None:
            raise ValueError("coarsened relation needs a convex subgroup")
        base = rel[:-2]
    elif rel == "<_flat":
        delta = flat_subgroup(_L(f, g))
        base = "<"
    else:
        delta = None
        base = rel
    if base == "~":
        if delta is not None:
            raise ValueError("no coarsened form of ~")
        return _gt(_bounds(f - g, None), _bounds(f, None))
    a, b = _bounds(f, delta), _bounds(g, delta)
    if base == "<":
        return _gt(a, b)
    if base == "<=":
        return _ge(a, b)
    if base == "~=":
        return _eq(a, b)
    raise ValueError(f"unknown relation {rel!r}")


def _L(*xs) -> int:
    for x in xs:
        if hasattr(x, "field"):
            return x.field.L
    raise ValueError("cannot infer level count")


def prec_(f, g) -> bool:
    return asym_cmp("<", f, g)


def preceq(f, g) -> bool:
    return asym_cmp("<=", f, g)


def asymp(f, g) -> bool:
    return asym_cmp("~=", f, g)


def sim(f, g) -> bool:
    return asym_cmp("~", f, g)


# ---------------------------------------------------------------- I(K), K-dagger


def in_I(f) -> bool:
    """f = 0, or v(f) > max Psi (equivalently v f >= gamma + psi(gamma), gamma > 0)."""
    if f.is_zero():
        return True
    m = max_psi(f.field.L)
    lo, hi = f.v_bounds()
    if lo > m:
        return True
    if hi <= m:
        return False
    raise InsufficientPrecision("I(K) membership depends on terms below the error bound")


def logderiv(f):
    return f.derive() / f


def logderiv_solve(g) -> tuple[Mono, object]:
    """Write real g as m-dagger + eps with eps small and without an x^-1 term."""
    if isinstance(g, ComplexElem):
        raise TypeError("logderiv_solve takes a real element; split off the imaginary part first")
    F = g.field
    L = F.L
    if isinstance(g, RatFunc):
        if not g.poly_part().is_zero():
            raise NotLogDerivShape(f"{g.to_dsl()} has a non-small part outside Q x^-1")
        q = g.coeff(Mono((-1,)))
        if q.denominator != 1:
            raise NotLogDerivShape(f"x^{q} is not a rational function")
        m = Mono((q,))
        return m, g - F.mono(m).logderiv()
    one = Mono.one(L)
    xinv = gen_dagger(L, 0)
    if g.err is not None and not g.err < xinv:
        raise InsufficientPrecision("the x^-1 coefficient is hidden below the error bound")
    daggers = {gen_dagger(L, lvl): lvl for lvl in range(L)}
    exps = [Fraction(0)] * L
    for m, c in g.terms.items():
        if m in daggers:
            exps[daggers[m]] = c
        elif m >= one:
            raise NotLogDerivShape(f"term {m.to_dsl()} of {g.to_dsl()} is not a generator log-derivative")
    mono = Mono.from_exps(exps)
    eps = Trans(F, {m: c for m, c in g.terms.items() if m not in daggers}, g.err)
    return mono, eps


def dagger_decompose(g) -> tuple[Mono, object]:
    """Write g (real or complex) as m-dagger + eps with eps in I(K); eps may be
    complex.  Raises NotLogDerivShape when g is not in K-dagger's shape."""
    if isinstance(g, ComplexElem):
        m, eps_re = logderiv_solve(g.re)
        eps = ComplexElem(g.field, eps_re, g.im)
        if not in_I(eps_re) or not in_I(g.im):
            raise NotLogDerivShape(f"{g.to_dsl()} differs from a log-derivative by a non-I(K) element")
        return m, eps
    m, eps = logderiv_solve(g)
    if not in_I(eps):
        raise NotLogDerivShape(f"{g.to_dsl()} differs from a log-derivative by a non-I(K) element")
    return m, eps


# ---------------------------------------------------------------- integration


def _int_err_bound(e: Mono) -> Mono:
    lvl = e.top_level()
    if lvl is None or lvl == 0:
        q = e.exp_at(0)
        if q >= -1:
            raise InsufficientPrecision("integral of the error term may involve a logarithm")
        return e * Mono.gen(e.L, 0, 1)
    return e / gen_dagger(e.L, lvl)


def antiderivative(f: Trans, prec: Mono | None = None) -> Trans:
    """Distinguished antiderivative (constant 0) of a truncated transseries.

    Level-0 terms integrate exactly; a term h(x)*n with exponential part n is
    integrated as u*n where u' + n-dagger u = h, solved by the contraction
    u <- (h - u') / n-dagger.
    """
    if not isinstance(f, Trans):
        raise TypeError("antiderivative is available on truncated transseries")
    F = f.field
    L = F.L
    groups: dict = {}
    for m, c in f.terms.items():
        n = Mono((*m[:-1], 0))
        groups.setdefault(n, {})[Mono((0,) * (L - 1) + (m[-1],))] = c
    result = F.zero if f.err is None else F.big_o(_int_err_bound(f.err))
    for n, hterms in groups.items():
        if n.is_one():
            terms = {}
            for m, c in hterms.items():
                a = m[-1]
                if a == -1:
                    raise LogDivergent("x^-1 has no antiderivative in the field")
                terms[Mono((0,) * (L - 1) + (a + 1,))] = c / (a + 1)
            result = result + Trans(F, terms, None)
        else:
            h = Trans(F, hterms, None)
            target = None
            if result.err is not None:
                target = result.err / n
            elif prec is not None:
                target = prec / n
            u = _solve_twisted(F.mono(n).logderiv(), h, target)
            result = result + u.scale_mono(n)
    if prec is not None:
        result = result.truncate(prec)
    return result


def _solve_twisted(xi: Trans, h: Trans, target: Mono | None) -> Trans:
    """u with u' + xi u = h, for xi of exponential size (xi >= 1).

    Successive updates shrink strictly, so once the term budget is spent the
    last update's dominant monomial bounds the remainder."""
    F = h.field
    if target is None:
        target = h.dom_mono() * F.rel_prec
    inv = xi.inverse(target / h.dom_mono() if h.terms else None)
    u = (h * inv).truncate(target)
    d = u
    for _ in range(F.max_terms):
        nu = ((h - u.derive()) * inv).truncate(target)
        d = nu - u
        u = nu
        if not d.terms:
            return u.with_err(d.err)
    return u.with_err(d.dom_mono())


# ---------------------------------------------------------------- formulas


def wr(a, b):
    """Wronskian-type form a b' - a' b."""
    return a * b.derive() - a.derive() * b


def omega(z):
    return -(2 * z.derive() + z * z)


def sigma(y):
    if y.is_zero():
        raise ValueError("sigma needs a nonzero argument")
    z = -logderiv(y)
    return omega(z) + y * y


def complex_dagger_formula(a, b, CF):
    """((a^2+b^2)-dagger)/2 + wr(a,b)/(a^2+b^2) * i, for a, b in H."""
    n = a * a + b * b
    return ComplexElem(CF, logderiv(n) / 2, wr(a, b) / n)
