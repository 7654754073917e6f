"""The group ring U = K[e(Lambda)] over a complexified field K, for a finitely
generated Lambda with a user-declared basis.

Elements are sparse maps from exponent vectors (rational coordinates over
the basis) to nonzero coefficients in K, with e(l)' = l e(l).
"""

from __future__ import annotations

from fractions import Fraction

import flint

from .errors import InsufficientPrecision, NonConvergence, NotLogDerivShape
from .hfield import (
    ComplexElem,
    ComplexField,
    Mono,
    Trans,
    antiderivative,
    in_I,
    prec_,
)
from .hfield.mono import gen_dagger
from .linop import LinOp, Splitting, negligible
from .textfmt import wrap
from .valgroup import INF, ValVec


class LambdaVec(tuple):
    """Rational coordinates over the basis of Lambda."""

    __slots__ = ()

    def __new__(cls, coords):
        return tuple.__new__(cls, (Fraction(c) for c in coords))

    @classmethod
    def zero(cls, k: int) -> "LambdaVec":
        return cls((0,) * k)

    @classmethod
    def unit(cls, k: int, j: int, q=1) -> "LambdaVec":
        c = [0] * k
        c[j] = q
        return cls(c)

    def __add__(self, o):
        return LambdaVec(a + b for a, b in zip(self, o))

    def __sub__(self, o):
        return LambdaVec(a - b for a, b in zip(self, o))

    def __neg__(self):
        return LambdaVec(-a for a in self)

    def scale(self, q) -> "LambdaVec":
        return LambdaVec(a * q for a in self)

    def is_zero(self) -> bool:
        return not any(self)

    def to_dsl(self, names) -> str:
        parts = []
        for q, n in zip(self, names):
            if not q:
                continue
            if q == 1:
                body, sign = n, "+"
            elif q == -1:
                body, sign = n, "-"
            else:
                sign = "-" if q < 0 else "+"
                a = abs(q)
                body = f"{a}*{n}" if a.denominator == 1 else f"({a})*{n}"
            parts.append(f"{sign} {body}")
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


class LambdaBasis:
    """Named basis elements l_1..l_k of Lambda inside the complex field CF."""

    def __init__(self, CF: ComplexField, elems, names=None):
        if not isinstance(CF, ComplexField):
            raise TypeError("Lambda lives in a complexified field")
        self.field = CF
        self.elems = tuple(CF.coerce(e) for e in elems)
        self.names = tuple(names) if names else tuple(f"l{j + 1}" for j in range(len(self.elems)))
        self._conj_sign = []
        for e in self.elems:
            if negligible(e.re):
                self._conj_sign.append(-1)
            elif negligible(e.im):
                self._conj_sign.append(1)
            else:
                self._conj_sign.append(0)

    @property
    def k(self) -> int:
        return len(self.elems)

    def vec(self, coords) -> LambdaVec:
        return LambdaVec(coords)

    def unit(self, j: int, q=1) -> LambdaVec:
        return LambdaVec.unit(self.k, j, q)

    def zero(self) -> LambdaVec:
        return LambdaVec.zero(self.k)

    def as_field_elem(self, lam: LambdaVec):
        total = self.field.zero
        for q, e in zip(lam, self.elems):
            if q:
                total = total + e * q
        return total

    def conj_vec(self, lam: LambdaVec) -> LambdaVec:
        if any(s == 0 for q, s in zip(lam, self._conj_sign) if q):
            raise ValueError("conjugation needs basis elements that are real or purely imaginary")
        return LambdaVec(q * s for q, s in zip(lam, self._conj_sign))

    def e(self, lam, coeff=None) -> "GrElem":
        lam = lam if isinstance(lam, LambdaVec) else LambdaVec(lam)
        c = self.field.one if coeff is None else self.field.coerce(coeff)
        return GrElem(self, {lam: c})

    def const(self, c) -> "GrElem":
        return GrElem(self, {self.zero(): self.field.coerce(c)})


class GrElem:
    __slots__ = ("basis", "terms")

    def __init__(self, basis: LambdaBasis, terms: dict, _norm: bool = True):
        self.basis = basis
        if _norm:
            terms = {lam: c for lam, c in terms.items() if not c.is_zero()}
        self.terms = terms

    @property
    def field(self):
        return self.basis.field

    def _coerce(self, o):
        if isinstance(o, GrElem):
            return o
        try:
            c = self.field.coerce(o)
        except (TypeError, AttributeError):
            return None
        return GrElem(self.basis, {self.basis.zero(): c})

    def is_zero(self) -> bool:
        return not self.terms

    def is_negligible(self) -> bool:
        return all(negligible(c) for c in self.terms.values())

    def is_unit(self) -> bool:
        return len(self.terms) == 1

    def slot(self, lam):
        return self.terms.get(LambdaVec(lam), self.field.zero)

    def spectrum(self) -> list[LambdaVec]:
        return sorted(self.terms)

    # ring operations
    def __add__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for lam, c in o.terms.items():
            terms[lam] = terms[lam] + c if lam in terms else c
        return GrElem(self.basis, terms)

    __radd__ = __add__

    def __neg__(self):
        return GrElem(self.basis, {lam: -c for lam, c in self.terms.items()}, _norm=False)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, o):
        if not isinstance(o, GrElem):
            try:
                c = self.field.coerce(o)
            except (TypeError, AttributeError):
                return NotImplemented
            return GrElem(self.basis, {lam: a * c for lam, a in self.terms.items()})
        terms: dict = {}
        for l1, c1 in self.terms.items():
            for l2, c2 in o.terms.items():
                lam = l1 + l2
                p = c1 * c2
                terms[lam] = terms[lam] + p if lam in terms else p
        return GrElem(self.basis, terms)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, GrElem):
            return self * o.inverse()
        inv = self.field.coerce(o).inverse()
        return GrElem(self.basis, {lam: a * inv for lam, a in self.terms.items()})

    def inverse(self) -> "GrElem":
        """Only units (single-slot elements) are invertible."""
        if not self.is_unit():
            raise ValueError("only single-slot elements are units of the group ring")
        ((lam, c),) = self.terms.items()
        return GrElem(self.basis, {-lam: c.inverse()}, _norm=False)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.basis.const(1)
        for _ in range(n):
            result = result * self
        return result

    def derive(self) -> "GrElem":
        terms = {}
        for lam, c in self.terms.items():
            d = c.derive()
            if not lam.is_zero():
                d = d + self.basis.as_field_elem(lam) * c
            terms[lam] = d
        return GrElem(self.basis, terms)

    def logderiv(self):
        """u-dagger for a unit u = c e(l): c-dagger + l, an element of K."""
        if not self.is_unit():
            raise ValueError("logarithmic derivative of a non-unit")
        ((lam, c),) = self.terms.items()
        return c.logderiv() + self.basis.as_field_elem(lam)

    # involutions
    def star(self) -> "GrElem":
        """f* = sum conj(f_l) e(-l)."""
        return GrElem(self.basis, {-lam: c.conj() for lam, c in self.terms.items()}, _norm=False)

    def conj(self) -> "GrElem":
        """Complex conjugate; e(l) maps to e(conj l)."""
        b = self.basis
        return GrElem(b, {b.conj_vec(lam): c.conj() for lam, c in self.terms.items()}, _norm=False)

    def re(self) -> "GrElem":
        return (self + self.conj()) * Fraction(1, 2)

    def im(self) -> "GrElem":
        return (self - self.conj()) * self.field.const(0, Fraction(-1, 2))

    # valuation, trace, norms
    def v_g(self) -> ValVec:
        if not self.terms:
            return INF
        known, unknown = [], []
        for c in self.terms.values():
            lo, hi = c.v_bounds()
            (known if lo == hi else unknown).append(lo)
        if not known:
            raise InsufficientPrecision("every spectral coefficient is hidden below its error term")
        vmin = min(known)
        if any(lo <= vmin for lo in unknown):
            raise InsufficientPrecision("a hidden coefficient could attain the gaussian valuation")
        return vmin

    def trace(self):
        return self.slot(self.basis.zero())

    def norm_sq(self):
        total = self.field.base.zero
        for c in self.terms.values():
            total = total + c.abs_sq()
        return total

    def norm1(self, prec=None):
        """sum |f_l|; needs square roots of the coefficient norms."""
        total = self.field.base.zero
        for c in self.terms.values():
            n = c.abs_sq()
            if not hasattr(n, "sqrt"):
                raise TypeError("the 1-norm needs a truncated instance with square roots")
            total = total + n.sqrt(prec)
        return total

    def char_action(self, chi) -> "GrElem":
        """f_chi = sum f_l chi(l) e(l), chi given on the basis (integer exponents)."""
        CF = self.field
        chi = [CF.coerce(c) for c in chi]
        terms = {}
        for lam, c in self.terms.items():
            factor = CF.one
            for q, x in zip(lam, chi):
                if q.denominator != 1:
                    raise ValueError("character values on rational multiples are not determined")
                factor = factor * x ** int(q)
            terms[lam] = c * factor
        return GrElem(self.basis, terms)

    # identity, printing
    def __eq__(self, other):
        if not isinstance(other, GrElem):
            o = self._coerce(other)
            if o is None:
                return NotImplemented
            other = o
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_dsl(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        names = self.basis.names
        for lam in sorted(self.terms, reverse=True):
            c = self.terms[lam]
            cs = c.to_dsl()
            if lam.is_zero():
                parts.append(wrap(cs))
                continue
            e = f"E({lam.to_dsl(names)})"
            if cs == "1":
                parts.append(e)
            else:
                parts.append(f"{wrap(cs)}*{e}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"<GrElem {self.to_dsl()}>"


def inner(f: GrElem, g: GrElem):
    """<f, g> = tr(f g*)."""
    return (f * g.star()).trace()


def preceq_g(f: GrElem, g_val: ValVec) -> bool:
    """v_g(f) >= g_val."""
    return f.v_g() >= g_val


# ---------------------------------------------------------------- operators on U


def op_spectral(A: LinOp, basis: LambdaBasis, lam: LambdaVec) -> LinOp:
    """A_l = e(-l) A e(l) = twist of A by l."""
    return _complexify(A, basis.field).twist(basis.as_field_elem(lam))


def _complexify(A: LinOp, CF) -> LinOp:
    if isinstance(A.ring, ComplexField):
        return A
    return LinOp(CF, [CF.coerce(c) for c in A.coeffs], A.phi)


def apply_gr(A: LinOp, f: GrElem) -> GrElem:
    return _complexify(A, f.field).apply(f)


def apply_spectral(A: LinOp, f: GrElem) -> GrElem:
    """sum_l A_l(f_l) e(l), the slotwise route to A(f)."""
    b = f.basis
    total = GrElem(b, {})
    for lam, c in f.terms.items():
        total = total + b.e(lam, op_spectral(A, b, lam).apply(c))
    return total


# ---------------------------------------------------------------- splittings and kernels


def split_from_kernel(ys) -> tuple[list, LinOp]:
    """a_i := f_i-dagger with f_i = A_{i-1}(y_i), A_i = (d - a_i) A_{i-1}.

    Stops at the first y_i that the previous operator annihilates; returns the
    factors (a_1, ..., a_n) and the monic A_n.
    """
    if not ys:
        raise ValueError("empty kernel list")
    basis = ys[0].basis
    CF = basis.field
    for y in ys:
        if not y.is_unit():
            raise ValueError("split_from_kernel needs units (single spectral slot)")
    A = LinOp(CF, [CF.one])
    a = []
    for y in ys:
        f = A.apply(y)
        if f.is_negligible():
            break
        if not f.is_unit():
            raise ValueError("intermediate image is not a unit")
        ai = f.logderiv()
        a.append(ai)
        A = LinOp(CF, [-ai, CF.one]).compose(A)
    return a, A


def kernel_check(A: LinOp, ys) -> bool:
    return all(apply_gr(A, y).is_negligible() for y in ys)


def decompose(a, basis: LambdaBasis) -> tuple[object, LambdaVec]:
    """Write a in K as b-dagger + l with b in K^x and l in the span of the basis.

    The non-small part of a (terms >= x^-1 outside the real generator
    log-derivatives) is matched exactly against the basis; the real
    generator-log-derivative coefficients give a monomial; the small rest is
    integrated and exponentiated.
    """
    CF = basis.field
    a = CF.coerce(a)
    if not isinstance(a.re, Trans):
        raise TypeError("decomposition relative to Lambda is available on truncated transseries")
    F = CF.base
    L = F.L
    daggers = {gen_dagger(L, lvl): lvl for lvl in range(L)}
    xinv = gen_dagger(L, 0)

    def big(c: ComplexElem, skip_real_daggers: bool) -> dict:
        out = {}
        for part, t in (("re", c.re), ("im", c.im)):
            if t.err is not None and not t.err < xinv:
                raise InsufficientPrecision("the non-small part is hidden below the error bound")
            for m, q in t.terms.items():
                if m >= xinv and not (skip_real_daggers and part == "re" and m in daggers):
                    out[(part, m)] = q
        return out

    target = big(a, True)
    cols = [big(e, True) for e in basis.elems]
    keys = sorted(set(target) | {k for c in cols for k in c})
    q = _solve_exact(cols, target, keys)
    if q is None:
        raise NotLogDerivShape(f"{a.to_dsl()} is not in K-dagger + span(Lambda)")
    lam = LambdaVec(q)
    rest = a - basis.as_field_elem(lam)
    exps = [Fraction(0)] * L
    for m, c in rest.re.terms.items():
        if m in daggers:
            exps[daggers[m]] = c
    mono = Mono.from_exps(exps)
    eps = rest - CF.coerce(F.mono(mono).logderiv())
    if not (in_I(eps.re) and in_I(eps.im)):
        raise NotLogDerivShape(f"{a.to_dsl()} leaves a non-small remainder")
    if eps.is_zero():
        return CF.coerce(F.mono(mono)), lam
    integral = CF.make(antiderivative(eps.re), antiderivative(eps.im))
    b = exp_small(integral) * CF.coerce(F.mono(mono))
    return b, lam


def _solve_exact(cols, target, keys):
    """Rational q with sum q_j cols_j = target on keys, or None."""
    k = len(cols)
    if not keys:
        return [Fraction(0)] * k
    rows = len(keys)
    M = flint.fmpq_mat(rows, k + 1)
    for i, key in enumerate(keys):
        for j, c in enumerate(cols):
            v = c.get(key, 0)
            M[i, j] = flint.fmpq(v.numerator, v.denominator) if v else 0
        v = target.get(key, 0)
        M[i, k] = flint.fmpq(v.numerator, v.denominator) if v else 0
    R, rank = M.rref()
    q = [Fraction(0)] * k
    for i in range(rank):
        pivot = next(j for j in range(k + 1) if R[i, j] != 0)
        if pivot == k:
            return None
        val = R[i, k]
        q[pivot] = Fraction(int(val.p), int(val.q))
    return q


def exp_small(u):
    """exp(u) for u < 1, as a series truncated at the field's relative precision."""
    CF = u.field
    if u.is_zero():
        return CF.one
    for t in (u.re, u.im):
        if not t.is_zero() and not prec_(t, CF.base.one):
            raise ValueError("exp_small needs a small argument")
    target = CF.base.rel_prec
    total = CF.one
    term = CF.one
    for k in range(1, CF.base.max_terms + 1):
        term = (term * u * Fraction(1, k)).truncate(target)
        if term.is_zero():
            return total
        total = total + term
        if negligible(term):
            break
    return total.truncate(target)


def kernel_from_splitting(S: Splitting, basis: LambdaBasis, max_iter: int = 64) -> list[GrElem]:
    """Kernel elements y_i of c(d - g_1)...(d - g_r), peeled from the right."""
    CF = basis.field
    factors = [CF.coerce(g) for g in S.factors]
    if not factors:
        return []
    a1 = factors[-1]
    b, lam = decompose(a1, basis)
    y1 = basis.e(lam, b)
    if len(factors) == 1:
        return [y1]
    inner_split = Splitting(CF, CF.coerce(S.lead), tuple(factors[:-1]), S.phi)
    ws = kernel_from_splitting(inner_split, basis, max_iter)
    ys = [y1]
    y1_inv = y1.inverse()
    for w in ws:
        ys.append(y1 * integrate_gr(w * y1_inv, max_iter))
    return ys


def integrate_gr(h: GrElem, max_iter: int = 64) -> GrElem:
    """Slotwise antiderivative: the zero slot by integration, others by v' + l v = h_l."""
    b = h.basis
    CF = b.field
    total = GrElem(b, {})
    for lam, c in h.terms.items():
        if lam.is_zero():
            u = CF.make(antiderivative(c.re), antiderivative(c.im))
        else:
            u = solve_twisted_complex(b.as_field_elem(lam), c, max_iter)
        total = total + b.e(lam, u)
    return total


def solve_twisted_complex(mu, h, max_iter: int = 64):
    """v with v' + mu v = h via the contraction v <- (h - v')/mu.

    No flatness precondition is imposed; the iteration must settle within
    ``max_iter`` steps or NonConvergence is raised.
    """
    CF = h.field if isinstance(h, ComplexElem) else mu.field
    h = CF.coerce(h)
    mu = CF.coerce(mu)
    if h.is_zero():
        return CF.zero
    hd = _dom(h)
    target = hd * CF.base.rel_prec
    inv = mu.inverse(target / hd)
    v = (h * inv).truncate(target)
    for _ in range(max_iter):
        nv = ((h - v.derive()) * inv).truncate(target)
        if negligible(nv - v):
            return nv
        v = nv
    raise NonConvergence("twisted integration did not settle")


def _dom(c: ComplexElem) -> Mono:
    ms = [t.dom_mono() for t in (c.re, c.im) if t.terms]
    if not ms:
        raise InsufficientPrecision("element has no known term")
    return max(ms)


def spectrum_from_splitting(S: Splitting, basis: LambdaBasis) -> dict:
    """Multiplicities of the classes [g_j] modulo K-dagger, keyed by Lambda vectors."""
    out: dict = {}
    for g in S.factors:
        _, lam = decompose(g, basis)
        out[lam] = out.get(lam, 0) + 1
    return out
