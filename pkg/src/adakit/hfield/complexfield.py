"""The complexification H[i] of a real coefficient field."""

from __future__ import annotations

from fractions import Fraction

from ..errors import DivByZero
from ..valgroup import ValVec
from ..textfmt import wrap
from .base import FieldElem


class ComplexField:
    kind = "complex"

    def __init__(self, base):
        self.base = base
        self.L = base.L
        self.zero = ComplexElem(self, base.zero, base.zero)
        self.one = ComplexElem(self, base.one, base.zero)
        self.i = ComplexElem(self, base.zero, base.one)

    @property
    def name(self) -> str:
        return f"{self.base.name}[i]"

    def __eq__(self, other):
        return isinstance(other, ComplexField) and other.base == self.base

    def __hash__(self):
        return hash(("complex", self.base))

    def __repr__(self):
        return f"ComplexField({self.base!r})"

    def const(self, q, qi=0) -> "ComplexElem":
        return ComplexElem(self, self.base.const(q), self.base.const(qi))

    def make(self, re, im=None) -> "ComplexElem":
        return ComplexElem(self, self.base.coerce(re), self.base.zero if im is None else self.base.coerce(im))

    def coerce(self, c):
        if isinstance(c, ComplexElem):
            return c
        return ComplexElem(self, self.base.coerce(c), self.base.zero)

    def derive(self, c):
        return c.derive()

    def is_zero(self, c):
        return c.is_zero()

    def fmt(self, c) -> str:
        return c.to_dsl()


class ComplexElem:
    __slots__ = ("field", "re", "im")

    def __init__(self, field: ComplexField, re, im):
        self.field = field
        self.re = re
        self.im = im

    def _coerce(self, o):
        if isinstance(o, ComplexElem):
            return o
        if isinstance(o, (FieldElem, int, Fraction)):
            return self.field.coerce(o)
        return None

    def __add__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return ComplexElem(self.field, self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexElem(self.field, -self.re, -self.im)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return ComplexElem(self.field, self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        if isinstance(o, (FieldElem, int, Fraction)):
            return ComplexElem(self.field, self.re * o, self.im * o)
        if not isinstance(o, ComplexElem):
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if b.is_zero():
            return ComplexElem(self.field, a * c, a * d)
        if d.is_zero():
            return ComplexElem(self.field, a * c, b * c)
        return ComplexElem(self.field, a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def abs_sq(self):
        if self.im.is_zero():
            return self.re * self.re
        return self.re * self.re + self.im * self.im

    def inverse(self, prec=None) -> "ComplexElem":
        if self.is_zero():
            raise DivByZero("division by exact zero")
        if self.im.is_zero():
            return ComplexElem(self.field, self.re.inverse(prec), self.im)
        n = self.abs_sq().inverse(prec)
        return ComplexElem(self.field, self.re * n, -self.im * n)

    def __truediv__(self, o):
        if isinstance(o, (FieldElem, int, Fraction)):
            inv = self.field.base.coerce(o).inverse()
            return ComplexElem(self.field, self.re * inv, self.im * inv)
        if not isinstance(o, ComplexElem):
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def div(self, o, prec=None):
        o = self._coerce(o)
        return self * o.inverse(prec)

    def derive(self) -> "ComplexElem":
        return ComplexElem(self.field, self.re.derive(), self.im.derive())

    def logderiv(self):
        return self.derive() / self

    def conj(self) -> "ComplexElem":
        return ComplexElem(self.field, self.re, -self.im)

    def real(self):
        return self.re

    def imag(self):
        return self.im

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    @property
    def is_exact(self) -> bool:
        return self.re.is_exact and self.im.is_exact

    def v_bounds(self) -> tuple[ValVec, ValVec]:
        a_lo, a_hi = self.re.v_bounds()
        b_lo, b_hi = self.im.v_bounds()
        return min(a_lo, b_lo), min(a_hi, b_hi)

    def v(self) -> ValVec:
        lo, hi = self.v_bounds()
        if lo != hi:
            from ..errors import InsufficientPrecision

            raise InsufficientPrecision(f"valuation of {self.to_dsl()} is hidden below its error term")
        return lo

    def truncate(self, t):
        return ComplexElem(self.field, self.re.truncate(t), self.im.truncate(t))

    def __eq__(self, other):
        if isinstance(other, (FieldElem, int, Fraction)):
            other = self.field.coerce(other)
        if not isinstance(other, ComplexElem):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def to_dsl(self) -> str:
        if self.im.is_zero():
            return self.re.to_dsl()
        ims = self.im.to_dsl()
        imag = "i" if ims == "1" else "-i" if ims == "-1" else f"{wrap(ims)}*i"
        if self.re.is_zero():
            return imag
        if imag.startswith("-"):
            return f"{self.re.to_dsl()} - {imag[1:]}"
        return f"{self.re.to_dsl()} + {imag}"

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"<ComplexElem {self.to_dsl()}>"
