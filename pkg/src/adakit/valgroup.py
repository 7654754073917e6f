"""Value group arithmetic for the concrete fields: rational vectors under
lexicographic order, archimedean classes, level-cut convex subgroups and the
cut descriptors that stand in for sets of the form v(a - H).

Coordinates are stored most-significant first.  A vector of length ``L``
lives at *levels* ``L-1, ..., 0`` from left to right, so coordinate index
``i`` corresponds to level ``L-1-i``.  Level 0 is the polynomial (``x``)
level; deeper exponential levels are more significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

__all__ = [
    "ValVec",
    "INF",
    "cmp",
    "arch_cmp",
    "ConvexSubgroup",
    "Below",
    "DownOf",
    "All",
    "CutSpec",
    "cut_tests",
    "frac",
]


def frac(q) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, str):
        return Fraction(q.strip())
    return Fraction(q)


class ValVec:
    """An element of Q^L with lexicographic order, or the top element INF."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable | None):
        if coords is None:
            object.__setattr__(self, "coords", None)
        else:
            object.__setattr__(self, "coords", tuple(frac(c) for c in coords))

    def __setattr__(self, name, value):
        raise AttributeError("ValVec is immutable")

    @classmethod
    def zero(cls, L: int) -> "ValVec":
        return cls((0,) * L)

    @classmethod
    def unit(cls, L: int, level: int, q=1) -> "ValVec":
        """The vector with ``q`` at ``level`` and zeros elsewhere."""
        c = [Fraction(0)] * L
        c[L - 1 - level] = frac(q)
        return cls(c)

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    @property
    def L(self) -> int:
        if self.coords is None:
            raise ValueError("INF has no length")
        return len(self.coords)

    def is_zero(self) -> bool:
        return self.coords is not None and not any(self.coords)

    def top_level(self) -> int | None:
        """Level of the leading nonzero coordinate; None for 0 and INF."""
        if self.coords is None:
            return None
        for i, c in enumerate(self.coords):
            if c:
                return len(self.coords) - 1 - i
        return None

    def leading(self) -> Fraction:
        for c in self.coords or ():
            if c:
                return c
        return Fraction(0)

    def at_level(self, level: int) -> Fraction:
        return self.coords[len(self.coords) - 1 - level]

    def _check(self, other: "ValVec"):
        if not isinstance(other, ValVec):
            raise TypeError(f"expected ValVec, got {type(other).__name__}")
        if (
            self.coords is not None
            and other.coords is not None
            and len(self.coords) != len(other.coords)
        ):
            raise ValueError(
                f"value vectors of different length: {len(self.coords)} vs {len(other.coords)}"
            )

    def __add__(self, other: "ValVec") -> "ValVec":
        self._check(other)
        if self.coords is None or other.coords is None:
            return INF
        return ValVec(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "ValVec":
        if self.coords is None:
            raise ValueError("cannot negate INF")
        return ValVec(-a for a in self.coords)

    def __sub__(self, other: "ValVec") -> "ValVec":
        return self + (-other)

    def scale(self, q) -> "ValVec":
        if self.coords is None:
            raise ValueError("cannot scale INF")
        q = frac(q)
        return ValVec(q * a for a in self.coords)

    def __abs__(self) -> "ValVec":
        return -self if self < ValVec.zero(self.L) else self

    def __eq__(self, other):
        if not isinstance(other, ValVec):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other):
        return cmp(self, other) < 0

    def __le__(self, other):
        return cmp(self, other) <= 0

    def __gt__(self, other):
        return cmp(self, other) > 0

    def __ge__(self, other):
        return cmp(self, other) >= 0

    def to_json(self):
        if self.coords is None:
            return "inf"
        return [str(c) for c in self.coords]

    @classmethod
    def from_json(cls, data) -> "ValVec":
        if data == "inf":
            return INF
        return cls(data)

    def __repr__(self):
        if self.coords is None:
            return "ValVec(inf)"
        return "ValVec(" + ", ".join(str(c) for c in self.coords) + ")"


INF = ValVec(None)


def cmp(a: ValVec, b: ValVec) -> int:
    """Three-way lexicographic comparison with INF on top."""
    a._check(b)
    if a.coords is None:
        return 0 if b.coords is None else 1
    if b.coords is None:
        return -1
    if a.coords < b.coords:
        return -1
    return 1 if a.coords > b.coords else 0


def arch_cmp(a: ValVec, b: ValVec) -> int:
    """Compare archimedean classes [a] and [b] of nonzero finite vectors."""
    a._check(b)
    if a.is_inf or b.is_inf or a.is_zero() or b.is_zero():
        raise ValueError("archimedean classes need nonzero finite arguments")
    la, lb = a.top_level(), b.top_level()
    return (la > lb) - (la < lb)


@dataclass(frozen=True)
class ConvexSubgroup:
    """The convex subgroup of vectors whose coordinates at levels >= ``level``
    vanish; level 0 is {0} and level L is everything."""

    level: int
    L: int

    def __post_init__(self):
        if not 0 <= self.level <= self.L:
            raise ValueError(f"level {self.level} outside 0..{self.L}")

    @classmethod
    def of(cls, gamma: ValVec) -> "ConvexSubgroup":
        """Delta(m) for v(m) = gamma: everything of strictly smaller class."""
        lvl = gamma.top_level()
        return cls(0 if lvl is None else lvl, gamma.L)

    def contains(self, gamma: ValVec) -> bool:
        if gamma.is_inf:
            return False
        return not any(gamma.coords[: self.L - self.level])

    def project(self, gamma: ValVec) -> ValVec:
        """Image in the quotient by this subgroup (as a shorter vector)."""
        if gamma.is_inf:
            return INF
        return ValVec(gamma.coords[: self.L - self.level])

    def to_json(self):
        return {"level": self.level, "L": self.L}


@dataclass(frozen=True)
class Below:
    """{gamma : gamma < bound}."""

    bound: ValVec

    def contains(self, gamma: ValVec) -> bool:
        return gamma < self.bound

    def shift(self, delta: ValVec) -> "Below":
        return Below(self.bound + delta)

    def has_positive_at_level(self, level: int) -> bool:
        top = self.bound.top_level()
        return self.bound > ValVec.zero(self.bound.L) and level <= top

    def to_json(self):
        return {"below": self.bound.to_json()}


@dataclass(frozen=True)
class DownOf:
    """Downward closure of ``offset + subgroup``; offset defaults to 0."""

    subgroup: ConvexSubgroup
    offset: ValVec | None = field(default=None)

    def _off(self) -> ValVec:
        return self.offset if self.offset is not None else ValVec.zero(self.subgroup.L)

    def contains(self, gamma: ValVec) -> bool:
        if gamma.is_inf:
            return False
        p = self.subgroup.project(gamma - self._off())
        return p <= ValVec.zero(p.L)

    def shift(self, delta: ValVec) -> "DownOf":
        return DownOf(self.subgroup, self._off() + delta)

    def has_positive_at_level(self, level: int) -> bool:
        off = self.subgroup.project(self._off())
        z = ValVec.zero(off.L)
        if level < self.subgroup.level:
            return off >= z
        if off <= z:
            return False
        return off.top_level() + self.subgroup.level >= level

    def to_json(self):
        d = {"down_of": self.subgroup.to_json()}
        if self.offset is not None and not self.offset.is_zero():
            d["offset"] = self.offset.to_json()
        return d


@dataclass(frozen=True)
class All:
    """The whole value group."""

    def contains(self, gamma: ValVec) -> bool:
        return not gamma.is_inf

    def shift(self, delta: ValVec) -> "All":
        return self

    def has_positive_at_level(self, level: int) -> bool:
        return True

    def to_json(self):
        return "all"


CutSpec = Below | DownOf | All


def cut_from_json(data, L: int) -> CutSpec:
    if data == "all":
        return All()
    if "below" in data:
        return Below(ValVec.from_json(data["below"]))
    sub = data["down_of"]
    level = sub["level"] if isinstance(sub, dict) else int(sub)
    off = ValVec.from_json(data["offset"]) if "offset" in data else None
    return DownOf(ConvexSubgroup(level, L), off)


def cut_tests(S: Iterable[ValVec], cut: CutSpec, gamma: ValVec) -> tuple[bool, bool]:
    """Return (gamma in cut, every element of S inside the cut is <= gamma)."""
    member = cut.contains(gamma)
    bound = all(s <= gamma for s in S if cut.contains(s))
    return member, bound
