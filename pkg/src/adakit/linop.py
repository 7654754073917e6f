"""Linear differential operators K[d] and their splittings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .diffpoly import DiffPoly, riccati_poly, change_ring
from .errors import DivByZero, InsufficientPrecision, NotLogDerivShape, VerificationError
from .hfield import (
    ComplexElem,
    ComplexField,
    Mono,
    dagger_decompose,
    in_I,
    logderiv_solve,
    preceq,
    sim,
)
from .textfmt import wrap
from .valgroup import INF, ValVec


def negligible(c) -> bool:
    """True when c carries no known term (exact zero or a bare error term)."""
    if isinstance(c, ComplexElem):
        return negligible(c.re) and negligible(c.im)
    if isinstance(c, (int, Fraction)):
        return c == 0
    if hasattr(c, "terms"):
        return not c.terms
    return c.is_zero()


class LinOp:
    __slots__ = ("ring", "coeffs", "phi")

    def __init__(self, ring, coeffs, phi=None):
        cs = [ring.coerce(c) for c in coeffs]
        while cs and ring.is_zero(cs[-1]):
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)
        self.phi = phi

    @classmethod
    def D(cls, ring, phi=None) -> "LinOp":
        return cls(ring, [ring.zero, ring.one], phi)

    @classmethod
    def const(cls, ring, c, phi=None) -> "LinOp":
        return cls(ring, [c], phi)

    def _like(self, coeffs) -> "LinOp":
        return LinOp(self.ring, coeffs, self.phi)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("zero operator has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.ring.one

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ring.zero

    def _coerce(self, o):
        if isinstance(o, LinOp):
            return o
        try:
            return self._like([o])
        except TypeError:
            return None

    # ring structure
    def __add__(self, o):
        o = self._coerce(o)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return self._like([self.coeff(i) + o.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs])

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

    def _d(self, c):
        d = self.ring.derive(c)
        return d if self.phi is None else d / self.phi

    def left_d(self) -> "LinOp":
        """d * A, using d b = b d + b'."""
        out = [self.ring.zero] * (len(self.coeffs) + 1)
        for j, b in enumerate(self.coeffs):
            out[j] = out[j] + self._d(b)
            out[j + 1] = out[j + 1] + b
        return self._like(out)

    def compose(self, o: "LinOp") -> "LinOp":
        """The product self * o (apply o first)."""
        total = self._like([])
        T = o
        for i, a in enumerate(self.coeffs):
            if i:
                T = T.left_d()
            if not self.ring.is_zero(a):
                total = total + T.scale(a)
        return total

    def __mul__(self, o):
        if isinstance(o, LinOp):
            return self.compose(o)
        try:
            c = self.ring.coerce(o)
        except TypeError:
            return NotImplemented
        return self.compose(self._like([c]))

    def __rmul__(self, o):
        try:
            c = self.ring.coerce(o)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    def scale(self, c) -> "LinOp":
        """c * A (left multiplication by a coefficient)."""
        return self._like([c * a for a in self.coeffs])

    def __pow__(self, n: int) -> "LinOp":
        result = self._like([self.ring.one])
        for _ in range(n):
            result = result.compose(self)
        return result

    def apply(self, y):
        total = None
        dy = y
        for n, a in enumerate(self.coeffs):
            if n:
                dy = dy.derive()
                if self.phi is not None:
                    dy = dy / self.phi
            t = dy * a
            total = t if total is None else total + t
        return y * 0 if total is None else total

    __call__ = apply

    def adjoint(self) -> "LinOp":
        """A* = sum (-d)^i a_i."""
        minus_d = -LinOp.D(self.ring, self.phi)
        total = self._like([])
        P = self._like([self.ring.one])
        for i, a in enumerate(self.coeffs):
            if i:
                P = P.compose(minus_d)
            total = total + P.compose(self._like([a]))
        return total

    def twist(self, a) -> "LinOp":
        """A_a = sum a_i (d + a)^i, i.e. u^-1 A u for u-dagger = a."""
        base = LinOp(self.ring, [a, self.ring.one], self.phi)
        total = self._like([])
        P = self._like([self.ring.one])
        for i, c in enumerate(self.coeffs):
            if i:
                P = base.compose(P)
            total = total + P.scale(c)
        return total

    def comp_conj(self, phi) -> "LinOp":
        """A^phi in K^phi[delta], where d = phi * delta."""
        if self.ring.is_zero(phi):
            raise DivByZero("compositional conjugation by zero")
        new_phi = phi if self.phi is None else self.phi * phi
        zero = self.ring.zero
        P = [self.ring.one]
        total = [zero] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if i:
                nxt = [zero] * (len(P) + 1)
                for j, b in enumerate(P):
                    nxt[j] = nxt[j] + self._d(b)
                    nxt[j + 1] = nxt[j + 1] + phi * b
                P = nxt
            for j, b in enumerate(P):
                total[j] = total[j] + a * b
        return LinOp(self.ring, total, new_phi)

    # Riccati
    def riccati(self) -> DiffPoly:
        """Ri(A) = sum a_n R_n, with Ri(A)(y-dagger) = A(y)/y."""
        total = DiffPoly(self.ring, {}, "Z", self.phi)
        for n, a in enumerate(self.coeffs):
            total = total + change_ring(riccati_poly(n), self.ring, self.phi) * a
        return total

    def as_diffpoly(self, var: str = "Y") -> DiffPoly:
        return DiffPoly(self.ring, {(0,) * n + (1,): a for n, a in enumerate(self.coeffs)}, var, self.phi)

    # valuation data
    def gaussian_v(self) -> ValVec:
        return _vdata(self.coeffs)[0]

    def span(self):
        """(v(A), dwm(A), dwt(A)) where v(A) = a_r / a_dwt."""
        if self.is_zero():
            raise ValueError("span of the zero operator")
        _, dwm, dwt = _vdata(self.coeffs)
        return self.coeffs[-1] / self.coeffs[dwt], dwm, dwt

    def twisted_coeffs(self, m):
        """Coefficients of A*m via m^(k) = m R_k(m-dagger)."""
        z = m.logderiv() if self.phi is None else m.derive() / self.phi / m
        derivs = [m]
        for k in range(1, len(self.coeffs)):
            derivs.append(m * riccati_poly(k).with_phi(self.phi).evaluate(z))
        out = []
        for j in range(len(self.coeffs)):
            s = self.ring.zero
            for n in range(j, len(self.coeffs)):
                if not self.ring.is_zero(self.coeffs[n]):
                    s = s + self.coeffs[n] * derivs[n - j] * comb(n, j)
            out.append(s)
        return out

    def dwm_at(self, gamma: ValVec) -> dict:
        """dwm and dwt of A*m for a monomial m of value gamma."""
        if self.is_zero():
            raise ValueError("dwm of the zero operator")
        m = _monomial_of(self.ring, gamma)
        _, dwm, dwt = _vdata(self.twisted_coeffs(m))
        return {"dwm": dwm, "dwt": dwt, "exceptional": dwm > 0}

    def dwm_at_oracle(self, gamma: ValVec) -> dict:
        """Same data by explicit skew multiplication A * m."""
        m = _monomial_of(self.ring, gamma)
        _, dwm, dwt = _vdata(self.compose(self._like([m])).coeffs)
        return {"dwm": dwm, "dwt": dwt, "exceptional": dwm > 0}

    # identity, printing
    def __eq__(self, other):
        if not isinstance(other, LinOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def to_dsl(self, var: str = "D") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for n in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[n]
            if self.ring.is_zero(c):
                continue
            cs = self.ring.fmt(c)
            d = "" if n == 0 else var if n == 1 else f"{var}^{n}"
            if not d:
                body = wrap(cs)
            elif cs == "1":
                body = d
            elif cs == "-1":
                body = "-" + d
            else:
                body = f"{wrap(cs)}*{d}"
            if body.startswith("-"):
                parts.append(f"- {body[1:]}")
            else:
                parts.append(f"+ {body}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.to_dsl()

    def __repr__(self):
        return f"<LinOp {self.to_dsl()}>"


def _monomial_of(ring, gamma: ValVec):
    base = ring.base if isinstance(ring, ComplexField) else ring
    m = base.mono(Mono.from_val(gamma))
    return ring.coerce(m)


def _vdata(coeffs):
    """(v, dwm, dwt): gaussian valuation and the least/greatest index attaining it."""
    known, unknown = [], []
    for i, c in enumerate(coeffs):
        lo, hi = c.v_bounds()
        if lo == INF and hi == INF:
            continue
        (known if lo == hi else unknown).append((i, lo))
    if not known:
        raise InsufficientPrecision("no coefficient has a known valuation")
    vmin = min(lo for _, lo in known)
    if any(lo <= vmin for _, lo in unknown):
        raise InsufficientPrecision("a coefficient hidden below its error term could attain the minimum")
    hits = [i for i, lo in known if lo == vmin]
    return vmin, min(hits), max(hits)


def right_divide(A: LinOp, B: LinOp) -> tuple[LinOp, LinOp]:
    """(Q, R) with A = Q B + R and order R < order B."""
    if B.is_zero():
        raise DivByZero("right division by the zero operator")
    ring = A.ring
    r = B.order
    lead_inv = B.lead.inverse()
    q = [ring.zero] * max(A.order - r + 1, 0)
    R = list(A.coeffs)
    while len(R) - 1 >= r and R:
        k = len(R) - 1 - r
        c = R[-1] * lead_inv
        q[k] = c
        shifted = LinOp(ring, [ring.zero] * k + [ring.one], A.phi).compose(B).scale(c)
        top = len(R) - 1
        R = [R[i] - shifted.coeff(i) for i in range(top)]
        while R and negligible(R[-1]):
            if not ring.is_zero(R[-1]):
                if len(R) - 1 >= r:
                    R.pop()
                    continue
                raise InsufficientPrecision("remainder coefficient is hidden below its error term")
            R.pop()
    return LinOp(ring, q, A.phi), LinOp(ring, R, A.phi)


def lclm(A: LinOp, B: LinOp) -> LinOp:
    """Monic least common left multiple via the extended right Euclid scheme."""
    if A.is_zero() or B.is_zero():
        raise DivByZero("lclm with the zero operator")
    ring = A.ring
    one = LinOp(ring, [ring.one], A.phi)
    zero = LinOp(ring, [], A.phi)
    r0, r1 = A, B
    s0, s1 = one, zero
    while not r1.is_zero():
        Q, R = right_divide(r0, r1)
        r0, r1 = r1, R
        s0, s1 = s1, s0 - Q.compose(s1)
    L = s1.compose(A)
    return L.scale(L.lead.inverse())


def lclm_certify(L: LinOp, A: LinOp, B: LinOp) -> tuple[LinOp, LinOp]:
    """Left cofactors (Q_A, Q_B) with L = Q_A A = Q_B B, checked by remainder 0."""
    QA, RA = right_divide(L, A)
    QB, RB = right_divide(L, B)
    if not (RA.is_zero() and RB.is_zero()):
        raise VerificationError("lclm is not a left multiple", RA if not RA.is_zero() else RB)
    return QA, QB


def conj_op(A: LinOp) -> LinOp:
    """Coefficientwise complex conjugate."""
    return LinOp(A.ring, [c.conj() for c in A.coeffs], A.phi)


def real_part_op(A: LinOp):
    """A with coefficients moved into the real field (requires real coefficients)."""
    if not isinstance(A.ring, ComplexField):
        return A
    if any(not negligible(c.im) for c in A.coeffs):
        raise ValueError("operator has non-real coefficients")
    return LinOp(A.ring.base, [c.re for c in A.coeffs], A.phi)


def riccati_dominance_check(z, n: int) -> bool:
    """R_n(z) ~ z^n for z > 1 (dominant)."""
    if not preceq(z.field.one, z) or preceq(z, z.field.one):
        raise ValueError("the check needs z dominating 1")
    return sim(riccati_poly(n).evaluate(z), z ** n)


# ---------------------------------------------------------------- splittings


@dataclass(frozen=True)
class Splitting:
    """lead * (d - g_1) ... (d - g_r)."""

    ring: object
    lead: object
    factors: tuple
    phi: object = None

    def expand(self) -> LinOp:
        A = LinOp(self.ring, [self.lead], self.phi)
        for g in self.factors:
            A = A.compose(LinOp(self.ring, [-g, self.ring.one], self.phi))
        return A

    def residual(self, A: LinOp) -> LinOp:
        return self.expand() - A

    def verify(self, A: LinOp) -> bool:
        return all(negligible(c) for c in self.residual(A).coeffs)

    def check(self, A: LinOp) -> None:
        R = self.residual(A)
        if not all(negligible(c) for c in R.coeffs):
            raise VerificationError("splitting does not expand to the operator", R)

    @property
    def order(self) -> int:
        return len(self.factors)


def make_split(ring, lead, factors, phi=None) -> Splitting:
    return Splitting(ring, ring.coerce(lead), tuple(ring.coerce(g) for g in factors), phi)


def split_twist(S: Splitting, n) -> Splitting:
    """Splitting of A_{x n} = n^-1 A n from one of A."""
    nd = n.logderiv() if S.phi is None else n.derive() / S.phi / n
    return Splitting(S.ring, S.lead, tuple(g - nd for g in S.factors), S.phi)


def split_compconj(S: Splitting, phi) -> Splitting:
    """Splitting of A^phi: b_j = phi^-1 (a_j - (r-j) phi-dagger), lead c phi^r."""
    r = len(S.factors)
    d = phi.derive() if S.phi is None else phi.derive() / S.phi
    pd = d / phi
    new_phi = phi if S.phi is None else S.phi * phi
    inv = phi.inverse()
    facs = tuple((a - pd * (r - j)) * inv for j, a in enumerate(S.factors, start=1))
    return Splitting(S.ring, S.lead * phi ** r, facs, new_phi)


def polya_operator(ring, bs, phi=None) -> LinOp:
    """b_1...b_r (d b_r^-1) ... (d b_1^-1)."""
    D = LinOp.D(ring, phi)
    A = LinOp(ring, [ring.one], phi)
    for b in bs:
        A = D.compose(LinOp(ring, [b.inverse()], phi)).compose(A)
    prod = ring.one
    for b in bs:
        prod = prod * b
    return A.scale(prod)


def polya_split(ring, bs, phi=None) -> Splitting:
    """The splitting (a_r, ..., a_1), a_j = (b_1...b_j)-dagger, of the Polya form."""
    a = []
    prod = ring.one
    for b in bs:
        prod = prod * b
        a.append(prod.logderiv() if phi is None else prod.derive() / phi / prod)
    return Splitting(ring, ring.one, tuple(reversed(a)), phi)


def polya_kernel(gs) -> list:
    """y_1 = g_1, y_{k+1} = g_1 int(g_2 int(... g_{k+1})) for polynomial g's over Q(x);
    these lie in the kernel of the Polya operator built from the same g's."""
    ys = []
    for k in range(1, len(gs) + 1):
        acc = gs[k - 1]
        for j in range(k - 2, -1, -1):
            acc = gs[j] * acc.integral()
        ys.append(acc)
    return ys


# ---------------------------------------------------------------- real splittings


def compose_order2(a, b, CF: ComplexField) -> LinOp:
    """(d - (a - bi + b-dagger)) (d - (a + bi)) as an operator over H."""
    if b.is_zero():
        raise ValueError("compose_order2 needs b != 0")
    i = CF.i
    g1 = CF.coerce(a) - i * b + CF.coerce(b.logderiv())
    g2 = CF.coerce(a) + i * b
    A = make_split(CF, CF.one, (g1, g2)).expand()
    return real_part_op(A)


def verify_real(A: LinOp, S: Splitting) -> bool:
    """S expands to A and is induced by monic real blocks of order 1 or 2."""
    CF = S.ring
    if not isinstance(CF, ComplexField):
        return S.verify(A)
    Ac = LinOp(CF, [CF.coerce(c) for c in A.coeffs], A.phi)
    if not S.verify(Ac):
        return False
    fs = list(S.factors)
    j = 0
    while j < len(fs):
        if negligible(fs[j].im):
            j += 1
            continue
        if j + 1 >= len(fs):
            return False
        block = make_split(CF, CF.one, fs[j : j + 2], S.phi).expand()
        if any(not negligible(c.im) for c in block.coeffs):
            return False
        j += 2
    return True


def strong_check(S: Splitting, span) -> bool:
    """Re g_j dominates-or-equals span-dagger for every factor."""
    sd = span.logderiv()
    return all(preceq(sd, g.real()) for g in S.factors)


# ---------------------------------------------------------------- order 1


def order1_values(A: LinOp) -> dict:
    """Exceptional and ultimate values of an order-1 operator c(d - g).

    Uses the surrogate v(eps) > max Psi for the grounded instances at hand;
    the result is flagged as instance-relative.
    """
    if A.order != 1:
        raise ValueError("order1_values needs an order-1 operator")
    g = -A.coeffs[0] / A.coeffs[1]
    try:
        exc = dagger_decompose(g)[0].v()
    except NotLogDerivShape:
        exc = None
    re = g.real()
    m, eps = logderiv_solve(re)
    ult = m.v() if in_I(eps) else None
    return {"exceptional": exc, "ultimate": ult, "instance_relative": True}
