"""Truncated multi-level transseries: finite sums of monomials over the tower
x, e^x, e^{e^x}, ... with rational coefficients and a single big-O bound."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from ..errors import DivByZero, InsufficientPrecision
from ..valgroup import INF, ValVec, frac
from .base import FieldElem
from .mono import Mono, gen_dagger, mono_max

_ZERO = Fraction(0)
_ONE = Fraction(1)


class TransField:
    """The field of truncated transseries with ``levels`` generators.

    ``rel_prec`` is the relative precision (a monomial below 1) used when an
    exact operation needs an infinite expansion and no absolute target was
    given; ``max_terms`` caps any such expansion.
    """

    kind = "multitrans"

    def __init__(self, levels: int = 2, rel_prec: Mono | None = None, max_terms: int = 24):
        if levels < 1:
            raise ValueError("need at least one level")
        self.L = levels
        if rel_prec is None:
            rel_prec = Mono.gen(levels, 0, -12) if levels == 1 else Mono.gen(levels, 1, -8)
        if not rel_prec < Mono.one(levels):
            raise ValueError("relative precision must be a monomial below 1")
        self.rel_prec = rel_prec
        self.max_terms = max_terms
        self.zero = Trans(self, {}, None)
        self.one = self.const(1)
        self.x = self.gen(0)

    @property
    def name(self) -> str:
        return f"multitrans(L={self.L})"

    def __eq__(self, other):
        return (
            isinstance(other, TransField)
            and other.L == self.L
            and other.rel_prec == self.rel_prec
            and other.max_terms == self.max_terms
        )

    def __hash__(self):
        return hash(("multitrans", self.L, self.rel_prec, self.max_terms))

    def __repr__(self):
        return f"TransField(levels={self.L})"

    # constructors
    def const(self, q) -> "Trans":
        q = frac(q)
        return Trans(self, {Mono.one(self.L): q} if q else {}, None, _norm=False)

    def mono(self, m: Mono, c=1) -> "Trans":
        c = frac(c)
        return Trans(self, {m: c} if c else {}, None, _norm=False)

    def gen(self, level: int, q=1) -> "Trans":
        return self.mono(Mono.gen(self.L, level, q))

    def big_o(self, m: Mono) -> "Trans":
        return Trans(self, {}, m, _norm=False)

    def monomial(self, exps) -> Mono:
        return Mono.from_exps(exps)

    # coefficient-ring protocol
    def coerce(self, c):
        if isinstance(c, Trans):
            return c
        if isinstance(c, (int, Fraction, str)):
            return self.const(c)
        raise TypeError(f"cannot coerce {c!r} into {self.name}")

    def derive(self, c):
        return c.derive()

    def is_zero(self, c):
        return c.is_zero()

    def fmt(self, c) -> str:
        return c.to_dsl()


class Trans(FieldElem):
    """sum c_m m + O(err) with every listed m strictly above err."""

    __slots__ = ("field", "terms", "err", "_dom")

    def __init__(self, field: TransField, terms: dict, err: Mono | None = None, _norm: bool = True):
        self.field = field
        if _norm:
            if err is None:
                terms = {m: c for m, c in terms.items() if c}
            else:
                terms = {m: c for m, c in terms.items() if c and m > err}
        self.terms = terms
        self.err = err
        self._dom = None

    # structure
    def is_zero(self) -> bool:
        return not self.terms and self.err is None

    @property
    def is_exact(self) -> bool:
        return self.err is None

    def dom_mono(self) -> Mono:
        if self._dom is None:
            if not self.terms:
                if self.err is None:
                    raise ValueError("zero has no dominant monomial")
                raise InsufficientPrecision(f"dominant term of {self.to_dsl()} is hidden below its error term")
            self._dom = max(self.terms)
        return self._dom

    def dominant_term(self) -> tuple[Mono, Fraction]:
        m = self.dom_mono()
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Mono, Fraction]]:
        return sorted(self.terms.items(), reverse=True)

    def v_bounds(self) -> tuple[ValVec, ValVec]:
        if self.terms:
            v = self.dom_mono().v()
            return v, v
        if self.err is None:
            return INF, INF
        return self.err.v(), INF

    def sign(self) -> int:
        if self.is_zero():
            return 0
        return 1 if self.dominant_term()[1] > 0 else -1

    def coeff(self, m: Mono) -> Fraction:
        """Coefficient of ``m``; raises when ``m`` lies at or below err."""
        if self.err is not None and not m > self.err:
            raise InsufficientPrecision(f"coefficient of {m.to_dsl()} is hidden below the error term")
        return self.terms.get(m, _ZERO)

    def truncate(self, t: Mono) -> "Trans":
        """Drop terms at or below ``t`` and record O(t) if anything was lost."""
        if self.err is not None and self.err >= t:
            return self
        kept = {m: c for m, c in self.terms.items() if m > t}
        if len(kept) == len(self.terms):
            return self
        return Trans(self.field, kept, mono_max(self.err, t), _norm=False)

    def with_err(self, e: Mono | None) -> "Trans":
        return Trans(self.field, self.terms, mono_max(self.err, e))

    # arithmetic
    def _add(self, o: "Trans") -> "Trans":
        if not o.terms and o.err is None:
            return self
        if not self.terms and self.err is None:
            return o
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, _ZERO) + c
        return Trans(self.field, terms, mono_max(self.err, o.err))

    def __neg__(self) -> "Trans":
        return Trans(self.field, {m: -c for m, c in self.terms.items()}, self.err, _norm=False)

    def _mul(self, o: "Trans") -> "Trans":
        if self.is_zero() or o.is_zero():
            return self.field.zero
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = m1 * m2
                terms[m] = terms.get(m, _ZERO) + c1 * c2
        err = None
        if self.err is not None:
            err = self.err * (o.dom_mono() if o.terms else o.err)
        if o.err is not None:
            err = mono_max(err, o.err * (self.dom_mono() if self.terms else self.err))
        return Trans(self.field, terms, err)

    def scale_mono(self, m: Mono, c=_ONE) -> "Trans":
        """Exact multiplication by c*m."""
        c = frac(c)
        if not c:
            return self.field.zero
        return Trans(
            self.field,
            {k * m: v * c for k, v in self.terms.items()},
            None if self.err is None else self.err * m,
            _norm=False,
        )

    def _unit_part(self):
        """Split self as c*m*(1 + eps) with eps small."""
        m, c = self.dominant_term()
        eps = self.scale_mono(m.inv(), 1 / c) - 1
        return m, c, eps

    def _power_series(self, eps: "Trans", coeff, t: Mono) -> "Trans":
        """sum_k coeff(k) eps^k truncated at relative precision t (eps small)."""
        F = self.field
        total = F.const(coeff(0))
        p = F.one
        k = 0
        for k in range(1, F.max_terms + 1):
            p = (p * eps).truncate(t)
            ck = coeff(k)
            if ck:
                total = total + p.scale_mono(Mono.one(F.L), ck)
            if not p.terms:
                return total.with_err(t if p.err is not None else None)
        if eps.terms:
            return total.with_err(mono_max(t, eps.dom_mono() ** (k + 1)))
        return total.with_err(t)

    def _rel_target(self, m: Mono, prec: Mono | None) -> Mono:
        return self.field.rel_prec if prec is None else prec / m

    def inverse(self, prec: Mono | None = None) -> "Trans":
        """1/self; ``prec`` is an absolute error target for the result."""
        if self.is_zero():
            raise DivByZero("division by exact zero")
        m, c, eps = self._unit_part()
        mi = m.inv()
        if eps.is_zero():
            return self.field.mono(mi, 1 / c)
        t = self._rel_target(mi, prec)
        if not t < Mono.one(self.field.L):
            return self.field.big_o(prec)
        s = self._power_series(eps, lambda k: _ONE if k % 2 == 0 else -_ONE, t)
        return s.scale_mono(mi, 1 / c)

    def div(self, o, prec: Mono | None = None) -> "Trans":
        o = self._coerce(o)
        if self.is_zero():
            if o.is_zero():
                raise DivByZero("division by exact zero")
            return self
        inner = None
        if prec is not None and self.terms:
            inner = prec / self.dom_mono()
        q = self * o.inverse(inner)
        return q if prec is None else q.truncate(prec)

    def sqrt(self, prec: Mono | None = None) -> "Trans":
        """Square root of a positive element whose dominant coefficient is a
        rational square."""
        if self.is_zero():
            return self
        m, c, eps = self._unit_part()
        if c < 0:
            raise ValueError("square root of a negative element")
        rc = _rational_sqrt(c)
        if rc is None:
            raise ValueError(f"dominant coefficient {c} is not a rational square")
        half = m ** Fraction(1, 2)
        t = self._rel_target(half, prec)
        s = self._power_series(eps, _binom_half, t)
        return s.scale_mono(half, rc)

    def derive(self) -> "Trans":
        terms: dict = {}
        for m, c in self.terms.items():
            for gm, q in m.dagger_terms():
                k = m * gm
                terms[k] = terms.get(k, _ZERO) + c * q
        err = None if self.err is None else derive_err_bound(self.err)
        return Trans(self.field, terms, err)

    # identity and printing
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.const(other)
        if not isinstance(other, Trans):
            return NotImplemented
        return self.terms == other.terms and self.err == other.err

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.err))

    def to_dsl(self) -> str:
        parts = [_term_str(m, c) for m, c in self.sorted_terms()]
        if self.err is not None:
            parts.append(f"+ O({self.err.to_dsl()})")
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:] if s.startswith("- ") else s


def derive_err_bound(e: Mono) -> Mono:
    """Dominant monomial bounding f' for an unknown f below e."""
    lvl = e.top_level()
    if lvl is None:
        return gen_dagger(e.L, 0)
    return e * gen_dagger(e.L, lvl)


def _binom_half(k: int) -> Fraction:
    r = _ONE
    for j in range(k):
        r = r * (Fraction(1, 2) - j) / (j + 1)
    return r


def _rational_sqrt(c: Fraction) -> Fraction | None:
    n, d = c.numerator, c.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _term_str(m: Mono, c: Fraction) -> str:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if m.is_one():
        body = str(a)
    elif a == 1:
        body = m.to_dsl()
    else:
        body = f"{a}*{m.to_dsl()}"
    return f"{sign} {body}"
