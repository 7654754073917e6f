"""Monomials prod g_l^{q_l} over the generator tower g_0 = x, g_l = exp(g_{l-1}).

A ``Mono`` is a tuple of exponents stored top level first:
``(q_{L-1}, ..., q_1, q_0)``.  With that layout plain tuple comparison is the
dominance order (a larger tuple is the more dominant monomial) and the
valuation is the coordinatewise negation.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..valgroup import ValVec, frac

_ZERO = Fraction(0)


class Mono(tuple):
    __slots__ = ()

    def __new__(cls, top_first):
        return tuple.__new__(cls, (frac(q) for q in top_first))

    @classmethod
    def from_exps(cls, exps) -> "Mono":
        """Build from (q_0, ..., q_{L-1}), the x exponent first."""
        return cls(reversed(list(exps)))

    @classmethod
    def one(cls, L: int) -> "Mono":
        return _one(L)

    @classmethod
    def gen(cls, L: int, level: int, q=1) -> "Mono":
        e = [_ZERO] * L
        e[L - 1 - level] = frac(q)
        return cls(e)

    @classmethod
    def from_val(cls, gamma: ValVec) -> "Mono":
        return cls(-c for c in gamma.coords)

    @property
    def L(self) -> int:
        return len(self)

    @property
    def exps(self) -> tuple:
        """(q_0, ..., q_{L-1})."""
        return tuple(reversed(self))

    def exp_at(self, level: int) -> Fraction:
        return self[len(self) - 1 - level]

    def v(self) -> ValVec:
        return ValVec(-q for q in self)

    def is_one(self) -> bool:
        return not any(self)

    def top_level(self) -> int | None:
        for i, q in enumerate(self):
            if q:
                return len(self) - 1 - i
        return None

    def __mul__(self, other: "Mono") -> "Mono":
        return tuple.__new__(Mono, [a + b for a, b in zip(self, other)])

    def __truediv__(self, other: "Mono") -> "Mono":
        return tuple.__new__(Mono, [a - b for a, b in zip(self, other)])

    def inv(self) -> "Mono":
        return tuple.__new__(Mono, [-a for a in self])

    def __pow__(self, q) -> "Mono":
        q = frac(q)
        return tuple.__new__(Mono, [a * q for a in self])

    def dagger_terms(self) -> list[tuple["Mono", Fraction]]:
        """m-dagger as a list of (monomial, coefficient): sum q_l g_l-dagger."""
        L = len(self)
        return [(gen_dagger(L, L - 1 - i), q) for i, q in enumerate(self) if q]

    def __repr__(self):
        return f"Mono.from_exps({[str(q) for q in self.exps]})"

    def to_dsl(self) -> str:
        parts = []
        L = len(self)
        for i in range(L - 1, -1, -1):
            q = self[i]
            if not q:
                continue
            level = L - 1 - i
            base = "x" if level == 0 else f"e({level})"
            parts.append(base + _exp_str(q))
        return "*".join(parts) if parts else "1"


def _exp_str(q: Fraction) -> str:
    if q == 1:
        return ""
    if q.denominator == 1:
        return f"^{q.numerator}"
    return f"^({q})"


@lru_cache(maxsize=None)
def _one(L: int) -> Mono:
    return Mono((0,) * L)


@lru_cache(maxsize=None)
def gen_dagger(L: int, level: int) -> Mono:
    """g_level-dagger as a monomial: x^-1 for level 0, prod_{1<=j<level} g_j above."""
    e = [_ZERO] * L
    if level == 0:
        e[L - 1] = Fraction(-1)
    else:
        for j in range(1, level):
            e[L - 1 - j] = Fraction(1)
    return Mono(e)


def mono_max(a: Mono | None, b: Mono | None) -> Mono | None:
    """The more dominant of two optional monomials (None means absent)."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a >= b else b
