"""Differential polynomials K{Y} as sparse maps from multi-indices to
coefficients, with conjugations, separants, linear parts, the Riccati
transform and dominant (Newton) quantities.

A multi-index ``i = (i_0, ..., i_r)`` stands for prod_k (Y^(k))^(i_k) and is
stored without trailing zeros, so the constant monomial is ``()``.  A
polynomial may live over ``K^phi`` (derivation ``phi^-1 d/dx``); then
``phi`` is set and ``Y^(k)`` means the k-th derivative for that derivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import InsufficientPrecision
from .hfield.base import QQ
from .textfmt import is_atomic, wrap
from .valgroup import INF, ValVec

Index = tuple


def _trim(k) -> Index:
    k = list(k)
    while k and not k[-1]:
        k.pop()
    return tuple(k)


def _add_idx(a: Index, b: Index) -> Index:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for j, e in enumerate(b):
        out[j] += e
    return tuple(out)


def idx_deg(i: Index) -> int:
    """|i| = sum i_k."""
    return sum(i)


def idx_weight(i: Index) -> int:
    """||i|| = sum k i_k."""
    return sum(k * e for k, e in enumerate(i))


def idx_factorial(i: Index) -> int:
    r = 1
    for e in i:
        r *= factorial(e)
    return r


class DiffPolyRing:
    """Coefficient-ring adapter so differential polynomials can themselves be
    coefficients (used for polynomials in two indeterminates)."""

    kind = "diffpoly"

    def __init__(self, base, var: str):
        self.base = base
        self.var = var
        self.zero = DiffPoly(base, {}, var)
        self.one = DiffPoly(base, {(): base.one}, var)

    @property
    def L(self):
        return self.base.L

    def coerce(self, c):
        if isinstance(c, DiffPoly):
            return c
        return DiffPoly(self.base, {(): self.base.coerce(c)}, self.var)

    def const(self, c):
        return self.coerce(c)

    def derive(self, c):
        return c.derive()

    def is_zero(self, c):
        return c.is_zero()

    def fmt(self, c) -> str:
        return c.to_dsl()


class DiffPoly:
    __slots__ = ("ring", "terms", "var", "phi")

    def __init__(self, ring, terms: dict, var: str = "Y", phi=None, _norm: bool = True):
        self.ring = ring
        if _norm:
            terms = {_trim(k): c for k, c in terms.items() if not ring.is_zero(c)}
        self.terms = terms
        self.var = var
        self.phi = phi

    # constructors
    @classmethod
    def const(cls, ring, c, var="Y", phi=None) -> "DiffPoly":
        return cls(ring, {(): ring.coerce(c)}, var, phi)

    @classmethod
    def gen(cls, ring, n: int = 0, var="Y", phi=None) -> "DiffPoly":
        """Y^(n)."""
        return cls(ring, {(0,) * n + (1,): ring.one}, var, phi, _norm=False)

    def _like(self, terms, _norm=True) -> "DiffPoly":
        return DiffPoly(self.ring, terms, self.var, self.phi, _norm)

    def _coerce(self, o):
        if isinstance(o, DiffPoly) and o.var == self.var:
            return o
        try:
            c = self.ring.coerce(o)
        except TypeError:
            return None
        return self._like({(): c})

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def in_K(self) -> bool:
        return all(k == () for k in self.terms)

    def coeff(self, i: Index):
        return self.terms.get(_trim(i), self.ring.zero)

    @property
    def order(self) -> int:
        """Largest n with Y^(n) occurring; -1 for elements of K."""
        return max((len(k) - 1 for k in self.terms), default=-1)

    @property
    def deg(self):
        return max((sum(k) for k in self.terms), default=float("-inf"))

    @property
    def mul(self):
        return min((sum(k) for k in self.terms), default=float("inf"))

    @property
    def wt(self):
        return max((idx_weight(k) for k in self.terms), default=float("-inf"))

    def complexity(self) -> tuple[int, int, int]:
        """(order, degree in Y^(order), total degree); (0,0,0) on K."""
        if self.in_K():
            return (0, 0, 0)
        r = self.order
        s = max(k[r] for k in self.terms if len(k) == r + 1)
        return (r, s, self.deg)

    def stats(self) -> dict:
        return {
            "order": self.order,
            "deg": self.deg,
            "mul": self.mul,
            "wt": self.wt,
            "complexity": self.complexity(),
        }

    def homogeneous_part(self, d: int) -> "DiffPoly":
        return self._like({k: c for k, c in self.terms.items() if sum(k) == d}, False)

    def isobaric_part(self, w: int) -> "DiffPoly":
        return self._like({k: c for k, c in self.terms.items() if idx_weight(k) == w}, False)

    def degree_filter(self, pred) -> "DiffPoly":
        """Sum of the homogeneous parts P_d with pred(d)."""
        return self._like({k: c for k, c in self.terms.items() if pred(sum(k))}, False)

    def homogeneous_parts(self) -> dict[int, "DiffPoly"]:
        out: dict = {}
        for k, c in self.terms.items():
            out.setdefault(sum(k), {})[k] = c
        return {d: self._like(t, False) for d, t in sorted(out.items())}

    def is_homogeneous(self) -> bool:
        return len({sum(k) for k in self.terms}) <= 1

    # arithmetic
    def __add__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, c in o.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()}, False)

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
        if not isinstance(o, DiffPoly) or o.var != self.var:
            try:
                c = self.ring.coerce(o)
            except TypeError:
                return NotImplemented
            return self._like({k: v * c for k, v in self.terms.items()})
        o = self._coerce(o)
        terms: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                k = _add_idx(k1, k2)
                p = c1 * c2
                terms[k] = terms[k] + p if k in terms else p
        return self._like(terms)

    def __rmul__(self, o):
        return self.__mul__(o)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a differential polynomial")
        result = self._like({(): self.ring.one}, False)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "DiffPoly":
        return self * c

    # derivation
    def _coeff_derive(self, c):
        d = self.ring.derive(c)
        return d if self.phi is None else d / self.phi

    def index_shift(self) -> "DiffPoly":
        """The part of the derivation acting on Y-monomials only."""
        terms: dict = {}
        for k, c in self.terms.items():
            for j, e in enumerate(k):
                if not e:
                    continue
                nk = list(k) + [0]
                nk[j] -= 1
                nk[j + 1] += 1
                nk = _trim(nk)
                v = c * e
                terms[nk] = terms[nk] + v if nk in terms else v
        return self._like(terms)

    def derive(self) -> "DiffPoly":
        coeff_part = self._like({k: self._coeff_derive(c) for k, c in self.terms.items()})
        return coeff_part + self.index_shift()

    # evaluation
    def _derivs(self, y, n: int) -> list:
        ys = [y]
        for _ in range(n):
            d = ys[-1].derive()
            # a substituted polynomial already carries the phi-derivation
            if self.phi is not None and not isinstance(y, DiffPoly):
                d = d / self.phi
            ys.append(d)
        return ys

    def with_phi(self, phi) -> "DiffPoly":
        return DiffPoly(self.ring, self.terms, self.var, phi, _norm=False)

    def evaluate(self, y):
        """P(y) for y a field element, a group-ring element or a differential
        polynomial (substitution)."""
        if isinstance(y, DiffPoly) and y.phi is not self.phi:
            if not (y.phi is None and self.phi is None):
                raise ValueError("substitution needs matching derivations")
        ys = self._derivs(y, max(self.order, 0))
        cache: dict = {}

        def power(j, e):
            key = (j, e)
            if key not in cache:
                cache[key] = ys[j] ** e
            return cache[key]

        total = None
        for k, c in self.terms.items():
            t = None
            for j, e in enumerate(k):
                if e:
                    p = power(j, e)
                    t = p if t is None else t * p
            t = c if t is None else c * t
            total = t if total is None else total + t
        if total is None:
            return y * 0 if not isinstance(y, DiffPoly) else y._like({})
        if isinstance(y, DiffPoly) and not isinstance(total, DiffPoly):
            return y._like({(): total})
        if isinstance(total, (int, Fraction)) and hasattr(y, "field"):
            return y.field.coerce(total)
        return total

    __call__ = evaluate

    # conjugations
    def conj_add(self, a) -> "DiffPoly":
        """P_{+a}(Y) = P(a + Y)."""
        Y = DiffPoly.gen(self.ring, 0, self.var, self.phi)
        return self.evaluate(Y + a)

    def conj_mul(self, a) -> "DiffPoly":
        """P_{*a}(Y) = P(aY)."""
        Y = DiffPoly.gen(self.ring, 0, self.var, self.phi)
        return self.evaluate(Y * a)

    def conj_comp(self, phi) -> "DiffPoly":
        """P^phi in K^phi{Y}: rewrite Y^(n) as G_n, G_0 = Y, G_{n+1} = phi*delta(G_n)."""
        if self.ring.is_zero(phi):
            raise ValueError("compositional conjugation by zero")
        new_phi = phi if self.phi is None else self.phi * phi
        G = [DiffPoly(self.ring, {(1,): self.ring.one}, self.var, new_phi, _norm=False)]
        for _ in range(max(self.order, 0)):
            g = G[-1]
            coeff_part = g._like({k: self._coeff_derive(c) for k, c in g.terms.items()})
            G.append(coeff_part + g.index_shift() * phi)
        total = DiffPoly(self.ring, {}, self.var, new_phi)
        for k, c in self.terms.items():
            t = DiffPoly(self.ring, {(): c}, self.var, new_phi, _norm=False)
            for j, e in enumerate(k):
                if e:
                    t = t * G[j] ** e
            total = total + t
        return total

    # partials, separant, linear part
    def partial(self, i: Index) -> "DiffPoly":
        """P_(i) = P^(i) / i!, the normalized partial derivative."""
        i = _trim(i)
        terms: dict = {}
        for k, c in self.terms.items():
            if len(k) < len(i) or any(k[j] < e for j, e in enumerate(i)):
                continue
            b = 1
            for j, e in enumerate(i):
                b *= comb(k[j], e)
            nk = list(k)
            for j, e in enumerate(i):
                nk[j] -= e
            nk = _trim(nk)
            v = c * b
            terms[nk] = terms[nk] + v if nk in terms else v
        return self._like(terms)

    def partial_var(self, n: int) -> "DiffPoly":
        """dP / dY^(n)."""
        return self.partial((0,) * n + (1,))

    def separant(self) -> "DiffPoly":
        if self.in_K():
            raise ValueError("separant of an element of K")
        return self.partial_var(self.order)

    def linear_part(self):
        """L_P = sum_n (dP/dY^(n))(0) d^n as an operator."""
        from .linop import LinOp

        P1 = self.homogeneous_part(1)
        r = max(P1.order, 0)
        coeffs = [self.ring.zero] * (r + 1)
        for k, c in P1.terms.items():
            coeffs[len(k) - 1] = c
        return LinOp(self.ring, coeffs, self.phi)

    # Riccati
    def riccati(self) -> "DiffPoly":
        """Ri(P) in K{Z} for homogeneous P of degree d: Ri(P)(y-dagger) = P(y)/y^d."""
        if not self.is_homogeneous():
            raise ValueError("the Riccati transform needs a homogeneous polynomial")
        total = DiffPoly(self.ring, {}, "Z", self.phi)
        for k, c in self.terms.items():
            prod = DiffPoly(QQ, {(): Fraction(1)}, "Z")
            for j, e in enumerate(k):
                if e:
                    prod = prod * riccati_poly(j) ** e
            total = total + change_ring(prod, self.ring, self.phi) * c
        return total

    # valuation data
    def gaussian_v(self) -> ValVec:
        """min over coefficients of their valuations; raises on hidden ties."""
        if not self.terms:
            return INF
        vmin, _ = _gauss_min([(k, c) for k, c in self.terms.items()])
        return vmin

    def dominant(self) -> dict:
        """Gaussian valuation together with ddeg, dval and dwt (one scan)."""
        if not self.terms:
            raise ValueError("dominant quantities of the zero polynomial")
        vmin, hits = _gauss_min(list(self.terms.items()))
        degs = [sum(k) for k in hits]
        return {
            "v": vmin,
            "ddeg": max(degs),
            "dval": min(degs),
            "dwt": max(idx_weight(k) for k in hits),
        }

    def ddeg(self) -> int:
        return self.dominant()["ddeg"]

    def dval(self) -> int:
        return self.dominant()["dval"]

    def dwt(self) -> int:
        return self.dominant()["dwt"]

    def dominant_part(self) -> "DiffPoly":
        """Terms whose coefficient attains the gaussian valuation."""
        _, hits = _gauss_min(list(self.terms.items()))
        return self._like({k: self.terms[k] for k in hits}, False)

    # identity and printing
    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.var == other.var and self.terms == other.terms

    def __hash__(self):
        return hash((self.var, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kc: (sum(kc[0]), idx_weight(kc[0]), kc[0][::-1]), reverse=True)

    def to_dsl(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            mono = _mono_str(k, self.var)
            cs = _coeff_str(c, self.ring)
            if not mono:
                body = cs
                sign = "+"
                if body.startswith("-") and is_atomic(body[1:]):
                    sign, body = "-", body[1:]
            elif cs == "1":
                sign, body = "+", mono
            elif cs == "-1":
                sign, body = "-", mono
            else:
                sign = "+"
                if cs.startswith("-") and is_atomic(cs[1:]):
                    sign, cs = "-", cs[1:]
                body = f"{cs}*{mono}"
            parts.append(f"{sign} {body}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"<DiffPoly {self.to_dsl()}>"


def _coeff_str(c, ring) -> str:
    return wrap(ring.fmt(c))


def deriv_name(var: str, n: int) -> str:
    if n == 0:
        return var
    if n <= 2:
        return var + "'" * n
    return f"{var}^({n})"


def _mono_str(k: Index, var: str) -> str:
    parts = []
    for j in range(len(k) - 1, -1, -1):
        e = k[j]
        if e:
            name = deriv_name(var, j)
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _gauss_min(items):
    """(v_min, keys attaining it) with honest handling of error terms."""
    known = []
    unknown = []
    for k, c in items:
        lo, hi = c.v_bounds() if hasattr(c, "v_bounds") else _qq_bounds(c)
        (known if lo == hi else unknown).append((k, lo, hi))
    if not known:
        raise InsufficientPrecision("every coefficient is hidden below its error term")
    vmin = min(lo for _, lo, _ in known)
    for _, lo, _ in unknown:
        if lo <= vmin:
            raise InsufficientPrecision("a coefficient below its error term could attain the minimum")
    return vmin, [k for k, lo, _ in known if lo == vmin]


def _qq_bounds(c):
    v = INF if c == 0 else ValVec(())
    return v, v


def change_ring(P: DiffPoly, ring, phi=None) -> DiffPoly:
    """Map a polynomial with rational coefficients into ``ring``."""
    return DiffPoly(ring, {k: ring.const(c) for k, c in P.terms.items()}, P.var, phi)


@lru_cache(maxsize=None)
def riccati_poly(n: int) -> DiffPoly:
    """R_n in Q{Z}: R_0 = 1, R_1 = Z, R_{n+1} = Z R_n + R_n'."""
    if n == 0:
        return DiffPoly(QQ, {(): Fraction(1)}, "Z")
    if n == 1:
        return DiffPoly.gen(QQ, 0, "Z")
    R = riccati_poly(n - 1)
    return DiffPoly.gen(QQ, 0, "Z") * R + R.derive()


def dominant_oracle(P: DiffPoly) -> dict:
    """Definition scan: v(P) from all P_i, then each homogeneous and isobaric
    part's own gaussian valuation compared against it."""
    vP = min(_single_v(c) for c in P.terms.values())
    parts = {}
    for k, c in P.terms.items():
        parts.setdefault(sum(k), []).append(c)
    dset = [d for d, cs in parts.items() if min(_single_v(c) for c in cs) == vP]
    wparts = {}
    for k, c in P.terms.items():
        wparts.setdefault(idx_weight(k), []).append(c)
    wset = [w for w, cs in wparts.items() if min(_single_v(c) for c in cs) == vP]
    return {"v": vP, "ddeg": max(dset), "dval": min(dset), "dwt": max(wset)}


def _single_v(c):
    return c.v()


@dataclass
class SweepRow:
    phi: object
    dval: int
    ddeg: int
    dwt: int


def newton_sweep(P: DiffPoly, chain: list) -> dict:
    """Dominant triple of P^phi along a supplied chain of active phi.

    The ``stabilized`` flag only reports whether the last three rows agree; it
    does not certify an eventual value.
    """
    if not chain:
        raise ValueError("empty phi chain")
    rows = []
    for phi in chain:
        d = P.conj_comp(phi).dominant()
        rows.append(SweepRow(phi, d["dval"], d["ddeg"], d["dwt"]))
    tail = [(r.dval, r.ddeg, r.dwt) for r in rows[-3:]]
    stable = len(tail) == 3 and len(set(tail)) == 1
    return {"rows": rows, "stabilized": stable, "heuristic": True}
