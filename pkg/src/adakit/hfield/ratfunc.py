"""Exact rational functions Q(x) with d/dx, valued at +infinity."""

from __future__ import annotations

from fractions import Fraction

import flint

from ..errors import DivByZero
from ..valgroup import INF, ValVec, frac
from .base import FieldElem
from .mono import Mono


def _fq(c: Fraction) -> flint.fmpq:
    return flint.fmpq(c.numerator, c.denominator)


def _tofrac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class RatFuncField:
    kind = "ratfunc"
    L = 1
    name = "ratfunc"

    def __init__(self):
        self.zero = RatFunc(self, flint.fmpq_poly([]), flint.fmpq_poly([1]), _norm=False)
        self.one = self.const(1)
        self.x = RatFunc(self, flint.fmpq_poly([0, 1]), flint.fmpq_poly([1]), _norm=False)

    def __eq__(self, other):
        return isinstance(other, RatFuncField)

    def __hash__(self):
        return hash("ratfunc")

    def __repr__(self):
        return "RatFuncField()"

    def const(self, q) -> "RatFunc":
        return RatFunc(self, flint.fmpq_poly([_fq(frac(q))]), flint.fmpq_poly([1]), _norm=False)

    def poly(self, coeffs) -> "RatFunc":
        """Polynomial from coefficients, constant term first."""
        return RatFunc(self, flint.fmpq_poly([_fq(frac(c)) for c in coeffs]), flint.fmpq_poly([1]))

    def mono(self, m: Mono, c=1) -> "RatFunc":
        (q,) = m
        if q.denominator != 1:
            raise ValueError(f"x^{q} is not a rational function")
        n = int(q)
        c = _fq(frac(c))
        if n >= 0:
            return RatFunc(self, flint.fmpq_poly([0] * n + [c]), flint.fmpq_poly([1]), _norm=False)
        return RatFunc(self, flint.fmpq_poly([c]), flint.fmpq_poly([0] * (-n) + [1]), _norm=False)

    def gen(self, level: int, q=1) -> "RatFunc":
        if level != 0:
            raise ValueError("rational functions have only the x level")
        return self.mono(Mono((q,)))

    def monomial(self, exps) -> Mono:
        return Mono.from_exps(exps)

    def big_o(self, m: Mono):
        raise ValueError("rational functions are exact; O(...) is not available")

    def coerce(self, c):
        if isinstance(c, RatFunc):
            return c
        if isinstance(c, (int, Fraction, str)):
            return self.const(c)
        raise TypeError(f"cannot coerce {c!r} into ratfunc")

    def derive(self, c):
        return c.derive()

    def is_zero(self, c):
        return c.is_zero()

    def fmt(self, c) -> str:
        return c.to_dsl()


class RatFunc(FieldElem):
    __slots__ = ("field", "num", "den")

    err = None
    is_exact = True

    def __init__(self, field, num, den, _norm=True):
        if _norm:
            if den.is_zero():
                raise DivByZero("zero denominator")
            if num.is_zero():
                den = flint.fmpq_poly([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num // g
                    den = den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
        self.field = field
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree() == 0

    def v_bounds(self):
        if self.num.is_zero():
            return INF, INF
        v = ValVec((self.den.degree() - self.num.degree(),))
        return v, v

    def dom_mono(self) -> Mono:
        if self.num.is_zero():
            raise ValueError("zero has no dominant monomial")
        return Mono((self.num.degree() - self.den.degree(),))

    def dominant_term(self):
        return self.dom_mono(), _tofrac(self.num.leading_coefficient())

    def sign(self) -> int:
        if self.num.is_zero():
            return 0
        return 1 if self.num.leading_coefficient() > 0 else -1

    def _add(self, o):
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RatFunc(self.field, self.num + o.num, self.den)
        return RatFunc(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den, _norm=False)

    def _mul(self, o):
        if self.num.is_zero() or o.num.is_zero():
            return self.field.zero
        return RatFunc(self.field, self.num * o.num, self.den * o.den)

    def inverse(self, prec=None):
        if self.num.is_zero():
            raise DivByZero("division by exact zero")
        return RatFunc(self.field, self.den, self.num)

    def div(self, o, prec=None):
        return self / o

    def derive(self):
        n, d = self.num, self.den
        if d.degree() == 0:
            return RatFunc(self.field, n.derivative(), d, _norm=False)
        return RatFunc(self.field, n.derivative() * d - n * d.derivative(), d * d)

    def truncate(self, t):
        return self

    def with_err(self, e):
        if e is not None:
            raise ValueError("rational functions are exact")
        return self

    def poly_part(self) -> "RatFunc":
        q, _ = divmod(self.num, self.den)
        return RatFunc(self.field, q, flint.fmpq_poly([1]), _norm=False)

    def coeff(self, m: Mono) -> Fraction:
        """Coefficient of x^k in the expansion at +infinity (k integer)."""
        (q,) = m
        if q.denominator != 1:
            return Fraction(0)
        k = int(q)
        quo, rem = divmod(self.num, self.den)
        if k >= 0:
            return _tofrac(quo[k]) if k <= quo.degree() else Fraction(0)
        # expand rem/den in powers of 1/x: rem/den = sum_j s_j x^{-j}
        n = -k
        if rem.is_zero():
            return Fraction(0)
        dd = self.den.degree()
        rc = rem.coeffs()
        rrev = flint.fmpq_poly(list(reversed(rc + [0] * (dd - len(rc)))))
        drev = flint.fmpq_poly(list(reversed(self.den.coeffs())))
        s = _series_div(rrev, drev, n)
        return _tofrac(s[n - 1]) if n - 1 <= s.degree() else Fraction(0)

    def integral(self) -> "RatFunc":
        if self.den.degree() != 0:
            raise ValueError("only polynomial integrands are integrated exactly in Q(x)")
        return RatFunc(self.field, (self.num / self.den[0]).integral(), flint.fmpq_poly([1]), _norm=False)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def to_dsl(self) -> str:
        n = _poly_str(self.num)
        if self.den.degree() == 0:
            return n
        d = _poly_str(self.den)
        if self.num.degree() > 0 and len([c for c in self.num.coeffs() if c != 0]) > 1:
            n = f"({n})"
        return f"{n}/({d})"


def _series_div(a, b, n):
    """First n coefficients of a/b as power series (b(0) != 0)."""
    b0 = b[0]
    out = []
    rem = [a[i] if i <= a.degree() else flint.fmpq(0) for i in range(n)]
    bc = [b[i] if i <= b.degree() else flint.fmpq(0) for i in range(n)]
    for i in range(n):
        c = rem[i] / b0
        out.append(c)
        if c != 0:
            for j in range(i, n):
                rem[j] -= c * bc[j - i]
    return flint.fmpq_poly(out)


def _poly_str(p) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree(), -1, -1):
        c = _tofrac(p[k])
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        xs = "" if k == 0 else "x" if k == 1 else f"x^{k}"
        if not xs:
            body = str(a)
        elif a == 1:
            body = xs
        else:
            body = f"{a}*{xs}"
        parts.append(f"{sign} {body}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]
