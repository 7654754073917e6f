"""Shared plumbing for field elements and coefficient rings."""

from __future__ import annotations

from fractions import Fraction

from ..errors import InsufficientPrecision
from ..valgroup import INF, ValVec


class FieldElem:
    """Arithmetic dispatch common to real field elements.

    Subclasses implement ``_add``, ``_mul``, ``__neg__``, ``inverse``,
    ``derive``, ``v_bounds``, ``is_zero``, ``sign`` and ``dominant_term``.
    """

    __slots__ = ()

    def _coerce(self, o):
        if isinstance(o, FieldElem):
            if o.field is not self.field and o.field != self.field:
                raise TypeError("elements of different fields")
            return o
        if isinstance(o, (int, Fraction)):
            return self.field.const(o)
        return None

    def __add__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else self._add(o)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else self._add(-o)

    def __rsub__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else o._add(-self)

    def __mul__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else self._mul(o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else self._mul(o.inverse())

    def __rtruediv__(self, o):
        o = self._coerce(o)
        return NotImplemented if o is None else o._mul(self.inverse())

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers of field elements")
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

    def v(self) -> ValVec:
        lo, hi = self.v_bounds()
        if lo != hi:
            raise InsufficientPrecision(f"valuation of {self.to_dsl()} is hidden below its error term")
        return lo

    def is_nonzero_known(self) -> bool:
        return self.v_bounds()[1] != INF

    def logderiv(self):
        return self.derive() / self

    # complex-compatible surface
    def conj(self):
        return self

    def real(self):
        return self

    def imag(self):
        return self.field.zero

    def abs_sq(self):
        return self * self

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"<{type(self).__name__} {self.to_dsl()}>"


class Rationals:
    """The constant ring Q, used for universal polynomials such as R_n."""

    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, c):
        return Fraction(c)

    def const(self, c):
        return Fraction(c)

    def derive(self, c):
        return Fraction(0)

    def is_zero(self, c):
        return c == 0

    def fmt(self, c) -> str:
        return str(c)


QQ = Rationals()
