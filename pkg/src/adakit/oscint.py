"""Order-1 oscillatory integration: the integration-by-parts ladder, its
partial-sum approximants and a fixed-point solver for y' + xi y = f."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .diffpoly import DiffPoly, DiffPolyRing
from .errors import DominanceFailure, NonConvergence, NotLogDerivShape
from .hfield import QQ, Mono, dagger_decompose, prec_, preceq, sim
from .hfield.mono import gen_dagger
from .linop import negligible

ZRING = DiffPolyRing(QQ, "Z")


@lru_cache(maxsize=None)
def _ladder(m: int) -> tuple:
    Z = ZRING.coerce(DiffPoly.gen(QQ, 0, "Z"))
    P = [DiffPoly.gen(ZRING, 0, "V")]
    for j in range(m):
        P.append(P[j] * Z * (j + 1) - P[j].derive())
    return tuple(P)


def pj_ladder(m: int) -> list[DiffPoly]:
    """P_0 = V, P_{j+1} = (j+1) Z P_j - P_j' in Q{Z}{V}."""
    if m < 0:
        raise ValueError("ladder length must be non-negative")
    return list(_ladder(m))


def eval_ladder(P: DiffPoly, zeta, f):
    """P(zeta, f): coefficients evaluated at Z = zeta, V-derivatives at f."""
    fs = [f]
    for _ in range(max(P.order, 0)):
        fs.append(fs[-1].derive())
    total = None
    for k, c in P.terms.items():
        t = c.evaluate(zeta)
        for j, e in enumerate(k):
            if e:
                t = t * fs[j] ** e
        total = t if total is None else total + t
    return f * 0 if total is None else total


def byparts_coeff_residual(f, xi, m: int):
    """The ladder identity with e divided out, using (g e)' = (g' + xi g) e.

    Works for f in K and for a generic f given as a differential polynomial."""
    zeta = xi.logderiv()
    P = pj_ladder(m + 1)
    S = None
    xin = xi
    for j in range(m + 1):
        t = eval_ladder(P[j], zeta, f) * xin.inverse()
        S = t if S is None else S + t
        xin = xin * xi
    tail = eval_ladder(P[m + 1], zeta, f) * (xin / xi).inverse()
    return f - (S.derive() + S * xi) - tail


def byparts_check(f, xi, m: int, basis, lam_e):
    """f e - (sum_{j<=m} P_j(zeta, f) e / xi^(j+1))' - P_{m+1}(zeta, f) e / xi^(m+1)
    in the group ring, with e = e(lam_e) and e-dagger = xi."""
    CF = basis.field
    if not (basis.as_field_elem(lam_e) - CF.coerce(xi)).is_zero():
        raise ValueError("lambda for e must equal xi")
    zeta = xi.logderiv()
    e = basis.e(lam_e)
    P = pj_ladder(m + 1)
    S = basis.const(0)
    xin = xi
    for j in range(m + 1):
        S = S + e * (eval_ladder(P[j], zeta, f) / xin)
        xin = xin * xi
    tail = e * (eval_ladder(P[m + 1], zeta, f) / (xin / xi))
    return e * f - S.derive() - tail


def approximants(xi, f, m: int) -> list:
    """f_k = sum_{j<=k} P_j(zeta, f) / xi^j for k = 0..m."""
    zeta = xi.logderiv()
    P = pj_ladder(m)
    out = []
    acc = None
    xin = xi.field.one
    for j in range(m + 1):
        t = eval_ladder(P[j], zeta, f) / xin
        acc = t if acc is None else acc + t
        out.append(acc)
        xin = xin * xi
    return out


def is_flat_large(xi) -> bool:
    """xi > 1 and xi-dagger >= 1 (flat-dominance of xi over 1)."""
    one = xi.field.one
    return prec_(one, xi) and preceq(one, xi.logderiv())


@dataclass
class Order1Solution:
    y: object
    u: object
    approximants: list
    residual: object
    checks: dict
    xi_outside_I_plus_dagger: bool


def solve_order1(xi, f, prec: Mono | None = None, m: int = 3, max_iter: int = 64) -> Order1Solution:
    """Solve y' + xi y = f by y <- (f - y')/xi; u = xi y solves (u e/xi)' = f e.

    ``prec`` is relative to f: the residual y' + xi y - f ends up below
    prec * dom(f).  Checks cover u - f_k < xi^-k for k <= m and y ~ f/xi
    when f is asymptotic to 1.
    """
    F = xi.field
    if not is_flat_large(xi):
        raise DominanceFailure(f"{xi.to_dsl()} does not flat-dominate 1")
    if prec is None:
        prec = F.rel_prec
    f = F.coerce(f)
    if f.is_zero():
        y = F.zero
    else:
        x_inv = gen_dagger(F.L, 0)
        target = prec * f.dom_mono() / xi.dom_mono() * x_inv
        inv = xi.inverse(target / f.dom_mono())
        y = (f * inv).truncate(target)
        for _ in range(max_iter):
            ny = ((f - y.derive()) * inv).truncate(target)
            if negligible(ny - y):
                y = ny
                break
            y = ny
        else:
            raise NonConvergence("fixed point did not settle within the iteration cap")
    u = xi * y
    residual = y.derive() + xi * y - f
    fs = approximants(xi, f, m) if not f.is_zero() else [F.zero] * (m + 1)
    checks = {}
    if not f.is_zero():
        bound = prec * f.dom_mono()
        checks["residual"] = residual.is_zero() or residual.v_bounds()[0] > bound.v()
        for k, fk in enumerate(fs):
            checks[f"u-f_{k}"] = prec_(u - fk, xi ** (-k) * f) if not (u - fk).is_zero() else True
        one = F.one
        if preceq(f, one) and preceq(one, f):
            checks["y~f/xi"] = sim(y, f / xi)
    try:
        dagger_decompose(xi)
        outside = False
    except NotLogDerivShape:
        outside = True
    return Order1Solution(y, u, fs, residual, checks, outside)


def deriv_expansion_check(l: int, n: int, xi, basis, lam_e, sign: int = 1) -> bool:
    """(xi^l e)^(n) has dominant coefficient xi^(l+n) (times (-1)^n for e(-lam))."""
    if not is_flat_large(xi):
        raise DominanceFailure(f"{xi.to_dsl()} does not flat-dominate 1")
    lam = lam_e if sign > 0 else -lam_e
    y = basis.e(lam, xi ** l)
    for _ in range(n):
        y = y.derive()
    c = y.slot(lam)
    expected = xi ** (l + n) * ((-1) ** n if sign < 0 else 1)
    return sim(c.re, expected) and (c.im.is_zero() or prec_(c.im, expected))
