"""Slots (P, m, cut) as plain data, their transforms, and the predicates
that are decidable from that data alone: steep, deep, normal, strictly
normal, the split-normal and repulsive-normal families, the repulsion
calculus, and isolated/ultimate via their normal-or-linear equivalences.

The cut stands for the downward closed set v(a - H) of an unrepresented
element a; nothing here needs a itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor

from .diffpoly import DiffPoly
from .errors import PreconditionError, VerificationError
from .hfield import ComplexField, Mono, asym_cmp, gen_dagger, preceq, psi, real_field
from .hfield.ops import psi_of_level
from .linop import LinOp, Splitting, negligible, order1_values
from .valgroup import INF, ConvexSubgroup, CutSpec, ValVec, cut_tests

REALMS = ("H", "K")
MODES = {
    # mode: (decompose the whole of P_xm, strong factors, repulsive factors)
    "SN2": (False, False, False),
    "SN2as": (False, True, False),
    "SN2s": (True, True, False),
    "RN2": (False, False, True),
    "RN2as": (False, True, True),
    "RN2s": (True, True, True),
}


def mono_elem(ring, m: Mono):
    """The monomial m as an element of ``ring`` (complexified rings included)."""
    return ring.coerce(real_field(ring).mono(m))


@dataclass(frozen=True)
class Comparison:
    name: str
    lhs: ValVec
    rhs: ValVec
    relation: str
    holds: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "relation": self.relation,
            "holds": self.holds,
        }


@dataclass
class Report:
    predicate: str
    verdict: bool
    basis: str
    span: object = None
    weight: int | None = None
    comparisons: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_json(self) -> dict:
        out = {
            "predicate": self.predicate,
            "verdict": self.verdict,
            "basis": self.basis,
            "v": None if self.span is None else self.span.to_dsl(),
            "w": self.weight,
            "comparisons": [c.to_json() for c in self.comparisons],
        }
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        if self.caveats:
            out["caveats"] = list(self.caveats)
        return out


def _jsonable(x):
    if isinstance(x, ValVec):
        return x.to_json()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "to_dsl"):
        return x.to_dsl()
    return x


# ---------------------------------------------------------------- slot data


@dataclass(frozen=True)
class SlotData:
    P: DiffPoly
    m: Mono
    cut: CutSpec
    realm: str = "H"
    notes: tuple = ()

    def __post_init__(self):
        if self.realm not in REALMS:
            raise ValueError(f"realm must be one of {REALMS}")
        if self.P.order < 1:
            raise ValueError("a slot needs a polynomial of order at least 1")
        if self.m.L != real_field(self.P.ring).L:
            raise ValueError("monomial and coefficient field have different level counts")
        if self.realm == "H" and isinstance(self.P.ring, ComplexField):
            if any(not c.im.is_zero() for c in self.P.terms.values()):
                raise ValueError("realm H needs real coefficients")

    @property
    def r(self) -> int:
        return self.P.order

    @property
    def w(self) -> int:
        return self.P.wt

    @property
    def ring(self):
        return self.P.ring

    @cached_property
    def m_elem(self):
        return mono_elem(self.P.ring, self.m)

    @cached_property
    def P_m(self) -> DiffPoly:
        return self.P.conj_mul(self.m_elem)

    def to_json(self) -> dict:
        return {"P": self.P.to_dsl(), "m": self.m.to_dsl(), "cut": self.cut.to_json(), "realm": self.realm}


@dataclass(frozen=True)
class SplitWitness:
    Q: DiffPoly
    R: DiffPoly
    splitting: Splitting


def refine(s: SlotData, a, n: Mono | None = None) -> SlotData:
    """(P_{+a}, n, cut).  The caller vouches that a is compatible with the cut."""
    n = s.m if n is None else n
    if n > s.m:
        raise PreconditionError(f"{n.to_dsl()} is not dominated by {s.m.to_dsl()}")
    a = s.ring.coerce(a)
    note = f"refined by {a.to_dsl()} (compatibility with the cut declared, not checked)"
    return SlotData(s.P.conj_add(a), n, s.cut, s.realm, s.notes + (note,))


def mult_conj(s: SlotData, n: Mono) -> SlotData:
    """(P_{xn}, m/n, cut - vn)."""
    return SlotData(s.P.conj_mul(mono_elem(s.ring, n)), s.m / n, s.cut.shift(-n.v()), s.realm, s.notes)


def comp_conj(s: SlotData, phi) -> SlotData:
    return SlotData(s.P.conj_comp(s.ring.coerce(phi)), s.m, s.cut, s.realm, s.notes)


def slot_transform(kind: str, s: SlotData, **kw) -> SlotData:
    if kind == "refine":
        return refine(s, kw.get("a", 0), kw.get("n"))
    if kind == "mult_conj":
        return mult_conj(s, kw["n"])
    if kind == "comp_conj":
        return comp_conj(s, kw["phi"])
    raise ValueError(f"unknown transform {kind!r}")


# ---------------------------------------------------------------- steep / normal


def _linear_data(s: SlotData):
    """L := L_{P_xm}, whether its order is r, and its span (None if order drops)."""
    L = s.P_m.linear_part()
    if L.order != s.r:
        return L, False, None
    return L, True, L.span()[0]


def _steep(s: SlotData, rep: Report):
    L, order_ok, span = _linear_data(s)
    rep.details["order_L"] = L.order
    if not order_ok:
        rep.details["failed"] = "order of the linear part is below r"
        return None
    rep.span = span
    one = s.ring.one
    flat = asym_cmp("<_flat", span, one)
    rep.comparisons.append(Comparison("span below the flattening", span.v(), ValVec.zero(span.v().L), ">flat", flat))
    return span if flat else None


def _coarse(name: str, part: DiffPoly, span, w: int, P1: DiffPoly) -> Comparison:
    """part <_{Delta(span)} span^(w+1) P1 on gaussian valuations."""
    D = ConvexSubgroup.of(span.v())
    rhs = span.v().scale(w + 1) + P1.gaussian_v()
    lhs = part.gaussian_v() if not part.is_zero() else INF
    holds = D.project(lhs) > D.project(rhs)
    return Comparison(name, lhs, rhs, f">mod level {D.level}", holds)


def is_steep(s: SlotData) -> Report:
    rep = Report("steep", False, "definition: order of L_{P_xm} is r and span below the flattening", weight=s.w)
    rep.verdict = _steep(s, rep) is not None
    return rep


def _normal(s: SlotData, strict: bool) -> Report:
    name = "strictly normal" if strict else "normal"
    rep = Report(name, False, "definition: steep plus the coarsened dominance of the nonlinear part", weight=s.w)
    span = _steep(s, rep)
    if span is None:
        return rep
    Pm = s.P_m
    P1 = Pm.homogeneous_part(1)
    rest = Pm.degree_filter((lambda d: d != 1) if strict else (lambda d: d > 1))
    if s.P.deg == 1 and not strict:
        rep.basis = "linear case: the nonlinear condition holds trivially"
    c = _coarse("P_xm outside degree 1" if strict else "P_xm above degree 1", rest, span, s.w, P1)
    rep.comparisons.append(c)
    rep.verdict = c.holds
    return rep


def is_normal(s: SlotData) -> Report:
    return _normal(s, strict=False)


def is_strictly_normal(s: SlotData) -> Report:
    return _normal(s, strict=True)


# ---------------------------------------------------------------- deep


def canonical_chain(ring) -> list:
    """Default phi-chain: 1 and x^-1 (the active phi <= 1 available at finite precision)."""
    F = real_field(ring)
    return [ring.one, mono_elem(ring, gen_dagger(F.L, 0))]


def check_active(phi) -> None:
    """phi > 0, phi <= 1 and phi >= x^-1; raises PreconditionError otherwise."""
    ring = phi.field
    re = phi.real()
    xinv = mono_elem(ring, gen_dagger(real_field(ring).L, 0))
    if not negligible(phi.imag()) or re.sign() <= 0:
        raise PreconditionError(f"phi = {phi.to_dsl()} is not a positive real element")
    if not preceq(phi, ring.one):
        raise PreconditionError(f"phi = {phi.to_dsl()} is not dominated by 1")
    if not preceq(xinv, phi):
        raise PreconditionError(f"phi = {phi.to_dsl()} is not active")


def is_deep(s: SlotData, chain: list | None = None) -> Report:
    chain = canonical_chain(s.ring) if chain is None else [s.ring.coerce(p) for p in chain]
    if not chain:
        raise PreconditionError("empty phi-chain")
    for phi in chain:
        check_active(phi)
    rep = Report("deep", False, "definition: steep plus dominant degrees along the phi-chain", weight=s.w)
    rep.caveats.append("relative to the supplied phi-chain")
    rep.details["chain"] = [p.to_dsl() for p in chain]
    if _steep(s, rep) is None:
        return rep
    linear = s.P.deg == 1
    rows = []
    ok = True
    for phi in chain:
        Q = s.P.conj_comp(phi).conj_mul(s.m_elem)
        d1 = True if linear else Q.separant().ddeg() == 0
        d2 = Q.ddeg() == 1
        rows.append({"phi": phi.to_dsl(), "separant ddeg 0": d1, "ddeg 1": d2, "separant auto": linear})
        ok = ok and d1 and d2
    rep.details["rows"] = rows
    rep.verdict = ok
    return rep


# ---------------------------------------------------------------- repulsion


def _re(f):
    return f.real()


def is_attractive(f) -> bool:
    re = _re(f)
    return not re.is_zero() and preceq(re.field.one, re) and re.sign() < 0


def is_repulsive(f) -> bool:
    re = _re(f)
    return not re.is_zero() and preceq(re.field.one, re) and re.sign() > 0


def _beats_psi(re, level_psi: ValVec) -> bool:
    """v(Re f) < level_psi."""
    return asym_cmp("<", mono_elem(re.field, Mono.from_val(level_psi)), re)


def is_gamma_repulsive(f, gamma: ValVec) -> bool:
    if not gamma > ValVec.zero(gamma.L):
        raise ValueError("gamma-repulsion needs gamma > 0")
    re = _re(f)
    if re.is_zero():
        return False
    if re.sign() > 0:
        return True
    return _beats_psi(re, psi(gamma))


def is_cut_repulsive(f, cut: CutSpec) -> bool:
    """f is gamma-repulsive for every positive gamma in the cut.

    psi depends only on the top level and decreases with it, so the binding
    constraint comes from the highest level carrying a positive element."""
    re = _re(f)
    L = real_field(re.field).L
    levels = [k for k in range(L) if cut.has_positive_at_level(k)]
    if not levels:
        return True
    if re.is_zero():
        return False
    if re.sign() > 0:
        return True
    return _beats_psi(re, psi_of_level(L, max(levels)))


def repulsion(f, query: str, gamma: ValVec | None = None, cut: CutSpec | None = None) -> bool:
    if query == "attractive":
        return is_attractive(f)
    if query == "repulsive":
        return is_repulsive(f)
    if query == "gamma-repulsive":
        if gamma is None:
            raise ValueError("gamma-repulsive needs gamma")
        return is_gamma_repulsive(f, gamma)
    if query == "cut-repulsive":
        if cut is None:
            raise ValueError("cut-repulsive needs a cut")
        return is_cut_repulsive(f, cut)
    raise ValueError(f"unknown repulsion query {query!r}")


def make_repulsive_witness(g, m: Mono) -> Fraction:
    """A rational c > 0 with Re g - c m-dagger > 0, for m < 1 and v(Re g) >= v(m-dagger)."""
    if not m.v() > ValVec.zero(m.L):
        raise PreconditionError("the monomial must be infinitesimal")
    re = _re(g)
    md = mono_elem(re.field, m).logderiv()
    if not preceq(re, md):
        raise PreconditionError("Re g dominates m-dagger")
    if re.is_zero() or asym_cmp("<", re, md):
        c = Fraction(1)
    else:
        c0 = re.dominant_term()[1] / md.dominant_term()[1]
        c = max(Fraction(1), Fraction(floor(c0) + 1))
    if (re - md * c).sign() <= 0:
        raise VerificationError("witness does not make Re g - c m-dagger positive")
    return c


# ---------------------------------------------------------------- split-normal


def _as_ring(A: LinOp, ring) -> LinOp:
    if A.ring == ring:
        return A
    return LinOp(ring, [ring.coerce(c) for c in A.coeffs], A.phi)


def verify_split_normal(s: SlotData, wit: SplitWitness, mode: str = "SN2") -> Report:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {sorted(MODES)}")
    whole, strong, repulsive = MODES[mode]
    rep = Report(mode, False, "definition: steep plus a verified degree-1 witness", weight=s.w)
    span = _steep(s, rep)
    Pm = s.P_m
    target = Pm if whole else Pm.degree_filter(lambda d: d >= 1)
    residual = target - (wit.Q + wit.R)
    decomp = all(negligible(c) for c in residual.terms.values())
    rep.details["decomposition"] = decomp
    if not decomp:
        rep.details["residual"] = residual.to_dsl()
    shape = wit.Q.is_homogeneous() and wit.Q.deg == 1 and wit.Q.order == s.r
    rep.details["Q shape"] = shape
    LQ = wit.Q.linear_part()
    S = wit.splitting
    splits = S.verify(_as_ring(LQ, S.ring))
    rep.details["splitting expands to L_Q"] = splits
    ok = span is not None and decomp and shape and splits
    if span is not None:
        c = _coarse("R against the linear part", wit.R, span, s.w, Pm.homogeneous_part(1))
        rep.comparisons.append(c)
        ok = ok and c.holds
    offending = []
    if strong and shape:
        sd = LQ.span()[0].logderiv()
        bad = [j for j, g in enumerate(S.factors, 1) if not preceq(sd, _re(g))]
        rep.details["not strong"] = bad
        offending += bad
    if repulsive:
        cut = s.cut.shift(-s.m.v())
        bad = [j for j, g in enumerate(S.factors, 1) if not is_cut_repulsive(g, cut)]
        rep.details["not repulsive"] = bad
        offending += bad
    rep.details["offending factors"] = sorted(set(offending))
    rep.verdict = bool(ok and not offending)
    return rep


def witness_from_linear_part(s: SlotData, splitting: Splitting) -> SplitWitness:
    """Q = (P_xm)_1, R = (P_xm)_{>1}: the witness every normal slot offers once L splits."""
    Pm = s.P_m
    return SplitWitness(Pm.homogeneous_part(1), Pm.degree_filter(lambda d: d > 1), splitting)


# ---------------------------------------------------------------- isolated / ultimate


def is_isolated_or_ultimate(s: SlotData, which: str = "ultimate", splitting=None, basis=None) -> Report:
    """Value-set test against the cut, valid for normal or linear slots.

    Order 1 uses the exceptional/ultimate value of L_P directly and
    cross-checks the closed form (g >= m or g beyond the cut).  Higher order
    needs a splitting of L_P and a Lambda basis; values are the gaussian
    valuations of the kernel basis built from that splitting.
    """
    if which not in ("isolated", "ultimate"):
        raise ValueError("which must be 'isolated' or 'ultimate'")
    linear = s.P.deg == 1
    if not linear and not is_normal(s).verdict:
        raise PreconditionError("needs a normal slot or a linear polynomial")
    basis_tag = "linear-case equivalence" if linear else "normal-case equivalence"
    rep = Report(which, False, basis_tag, weight=s.w)
    A = s.P.linear_part()
    vm = s.m.v()
    if A.order == 1:
        vals = order1_values(A)
        key = "ultimate" if which == "ultimate" else "exceptional"
        value = vals[key]
        values = [] if value is None else [value]
        rep.caveats.append("order-1 values use the finite-Psi surrogate for I(K)")
        if value is None:
            rep.caveats.append(f"no {key} value: the value set is empty")
    else:
        if splitting is None or basis is None:
            raise PreconditionError("order above 1 needs a splitting of L_P and a Lambda basis")
        from .univexp import kernel_from_splitting

        S = splitting.splitting if isinstance(splitting, SplitWitness) else splitting
        S.check(_as_ring(A, S.ring))
        ker = kernel_from_splitting(S, basis)
        if which == "isolated":
            ker = [y for y in ker if all(lam.is_zero() for lam in y.spectrum())]
        values = [y.v_g() for y in ker]
        rep.caveats.append("values come from the kernel basis built from the splitting")
    member, bound = cut_tests(values, s.cut, vm)
    rep.details["values"] = values
    rep.details["v(m) in cut"] = member
    for val in values:
        inside = s.cut.contains(val)
        rep.comparisons.append(Comparison("value inside the cut vs v(m)", val, vm, "<=", (not inside) or val <= vm))
    rep.verdict = bound
    if A.order == 1 and values:
        closed = _closed_form_order1(s, values[0])
        rep.details["closed form"] = closed
        if closed != bound:
            raise VerificationError("closed form and value-set test disagree")
    return rep


def _closed_form_order1(s: SlotData, value: ValVec) -> bool:
    """g >= m, or g lies strictly beyond every value of the cut."""
    g = mono_elem(real_field(s.ring), Mono.from_val(value))
    m = mono_elem(real_field(s.ring), s.m)
    return preceq(m, g) or not s.cut.contains(value)


def is_isolated(s: SlotData, **kw) -> Report:
    return is_isolated_or_ultimate(s, "isolated", **kw)


def is_ultimate(s: SlotData, **kw) -> Report:
    return is_isolated_or_ultimate(s, "ultimate", **kw)


def check(s: SlotData, predicate: str, **kw) -> Report:
    """Dispatch by predicate name."""
    table = {
        "steep": is_steep,
        "normal": is_normal,
        "strictly-normal": is_strictly_normal,
        "deep": is_deep,
        "isolated": is_isolated,
        "ultimate": is_ultimate,
    }
    if predicate in MODES:
        return verify_split_normal(s, kw["witness"], predicate)
    if predicate not in table:
        raise ValueError(f"unknown predicate {predicate!r}")
    return table[predicate](s, **kw)


__all__ = [
    "SlotData",
    "SplitWitness",
    "Report",
    "Comparison",
    "MODES",
    "refine",
    "mult_conj",
    "comp_conj",
    "slot_transform",
    "is_steep",
    "is_normal",
    "is_strictly_normal",
    "is_deep",
    "canonical_chain",
    "check_active",
    "is_attractive",
    "is_repulsive",
    "is_gamma_repulsive",
    "is_cut_repulsive",
    "repulsion",
    "make_repulsive_witness",
    "verify_split_normal",
    "witness_from_linear_part",
    "is_isolated_or_ultimate",
    "is_isolated",
    "is_ultimate",
    "check",
]
