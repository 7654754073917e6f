"""Command-line front end.  Every command computes a JSON-ready payload;
``main`` prints it (text by default, JSON with ``--json``) and exits with
0 (ok), 1 (a predicate came out false) or 2 (error)."""

from __future__ import annotations

import glob
import json
import sys

import click

from . import linop as lo
from . import oscint, slotcheck, univexp
from .diffpoly import DiffPoly, riccati_poly
from .dsl import Context, parse_diffpoly, parse_field, parse_gr, parse_lambda, parse_mono, parse_op, show
from .errors import AdakitError
from .hfield import ComplexElem, ComplexField
from .linop import LinOp
from .session import Session
from .valgroup import All, Below, ConvexSubgroup, DownOf, ValVec

SCHEMA = "adakit/1"


# ---------------------------------------------------------------- helpers


def _val(v: ValVec):
    return v.to_json() if isinstance(v, ValVec) else v


def _op_ring(*ops: LinOp):
    """Move operators into a common ring (the complexification if any is complex)."""
    complex_ = [A.ring for A in ops if isinstance(A.ring, ComplexField)]
    if not complex_:
        return ops
    CF = complex_[0]
    return tuple(A if A.ring == CF else LinOp(CF, [CF.coerce(c) for c in A.coeffs], A.phi) for A in ops)


def _elems(sess: Session, texts, complex_: bool = False):
    out = [parse_field(t, sess.ctx) for t in texts]
    if complex_ or any(isinstance(e, ComplexElem) for e in out):
        out = [sess.cfield.coerce(e) for e in out]
    return out


def _splitting(sess: Session, lead: str, factors, complex_: bool = False) -> lo.Splitting:
    if not factors:
        raise click.UsageError("a splitting needs at least one --factor")
    vals = _elems(sess, [lead, *factors], complex_)
    ring = vals[0].field
    return lo.make_split(ring, vals[0], vals[1:])


def parse_cut(text: str, L: int, ctx: Context):
    """``all``, ``below:<monomial>``, ``down:<level>`` or ``down:<level>:<monomial>``."""
    text = text.strip()
    if text == "all":
        return All()
    kind, _, rest = text.partition(":")
    if kind == "below" and rest:
        return Below(parse_mono(rest, ctx).v())
    if kind == "down" and rest:
        level, _, off = rest.partition(":")
        sub = ConvexSubgroup(int(level), L)
        return DownOf(sub, parse_mono(off, ctx).v() if off else None)
    raise click.BadParameter(f"cannot read cut {text!r}")


def _set(ctx: click.Context, payload: dict):
    payload = {"schema": SCHEMA, "command": ctx.info_name, **payload}
    ctx.find_root().obj["payload"] = payload
    return payload


def _sess(ctx: click.Context) -> Session:
    obj = ctx.find_root().obj
    if obj.get("session") is None:
        obj["session"] = Session.resolve(obj.get("session_path"))
    return obj["session"]


# ---------------------------------------------------------------- group


@click.group()
@click.option("--session", "session_path", default=None, help="Session TOML file (else $ADAKIT_SESSION).")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def cli(ctx, session_path, as_json):
    """Exact workbench for asymptotic differential algebra."""
    ctx.ensure_object(dict)
    if session_path:
        ctx.obj["session_path"] = session_path
    ctx.obj["as_json"] = ctx.obj.get("as_json", False) or as_json


# ---------------------------------------------------------------- differential polynomials


@cli.command("eval")
@click.option("--expr", required=True, help="Any expression.")
@click.option("--at", default=None, help="Evaluate a differential polynomial or operator at this element.")
@click.pass_context
def eval_cmd(ctx, expr, at):
    from .dsl import _kind, evaluate

    s = _sess(ctx)
    val = evaluate(expr, s.ctx)
    out = {"kind": _kind(val), "value": show(val)}
    if at is not None:
        y = parse_gr(at, s.ctx) if "E(" in at else parse_field(at, s.ctx)
        if isinstance(val, DiffPoly):
            out["at"] = show(val(y))
        elif isinstance(val, LinOp):
            out["at"] = show(univexp.apply_gr(val, y) if isinstance(y, univexp.GrElem) else val(y))
        else:
            raise click.UsageError("--at needs a differential polynomial or an operator")
    return _set(ctx, out)


@cli.command("conj")
@click.option("--P", "P", required=True)
@click.option("--kind", type=click.Choice(["add", "mul", "comp"]), required=True)
@click.option("--by", required=True, help="Shift, multiplier or phi.")
@click.pass_context
def conj_cmd(ctx, P, kind, by):
    s = _sess(ctx)
    poly = parse_diffpoly(P, s.ctx)
    a = poly.ring.coerce(parse_field(by, s.ctx))
    res = {"add": poly.conj_add, "mul": poly.conj_mul, "comp": poly.conj_comp}[kind](a)
    return _set(ctx, {"value": show(res), "stats": res.stats()})


@cli.command("separant")
@click.option("--P", "P", required=True)
@click.pass_context
def separant_cmd(ctx, P):
    poly = parse_diffpoly(P, _sess(ctx).ctx)
    return _set(ctx, {"value": show(poly.separant())})


@cli.command("linpart")
@click.option("--P", "P", required=True)
@click.pass_context
def linpart_cmd(ctx, P):
    poly = parse_diffpoly(P, _sess(ctx).ctx)
    return _set(ctx, {"value": show(poly.linear_part())})


@cli.command("riccati")
@click.option("--n", type=int, default=None, help="Print R_n.")
@click.option("--P", "P", default=None, help="Riccati transform of a homogeneous polynomial.")
@click.pass_context
def riccati_cmd(ctx, n, P):
    if (n is None) == (P is None):
        raise click.UsageError("give exactly one of --n and --P")
    if n is not None:
        if n < 0:
            raise click.BadParameter("n must be non-negative")
        return _set(ctx, {"value": show(riccati_poly(n))})
    poly = parse_diffpoly(P, _sess(ctx).ctx)
    return _set(ctx, {"value": show(poly.riccati())})


@cli.command("dominant")
@click.option("--P", "P", required=True)
@click.pass_context
def dominant_cmd(ctx, P):
    poly = parse_diffpoly(P, _sess(ctx).ctx)
    d = poly.dominant()
    return _set(ctx, {"v": _val(d["v"]), "ddeg": d["ddeg"], "dval": d["dval"], "dwt": d["dwt"], "stats": poly.stats()})


# ---------------------------------------------------------------- operators


@cli.command("span")
@click.option("--A", "A", required=True)
@click.pass_context
def span_cmd(ctx, A):
    op = parse_op(A, _sess(ctx).ctx)
    v, dwm, dwt = op.span()
    return _set(ctx, {"span": show(v), "v": _val(v.v()), "dwm": dwm, "dwt": dwt})


@cli.command("op-compose")
@click.option("--A", "A", required=True)
@click.option("--B", "B", required=True)
@click.pass_context
def compose_cmd(ctx, A, B):
    s = _sess(ctx)
    a, b = _op_ring(parse_op(A, s.ctx), parse_op(B, s.ctx))
    return _set(ctx, {"value": show(a.compose(b))})


@cli.command("adjoint")
@click.option("--A", "A", required=True)
@click.pass_context
def adjoint_cmd(ctx, A):
    return _set(ctx, {"value": show(parse_op(A, _sess(ctx).ctx).adjoint())})


@cli.command("twist")
@click.option("--A", "A", required=True)
@click.option("--a", "shift", required=True)
@click.pass_context
def twist_cmd(ctx, A, shift):
    s = _sess(ctx)
    op = parse_op(A, s.ctx)
    a = parse_field(shift, s.ctx)
    if isinstance(a, ComplexElem):
        op = _op_ring(op, LinOp(s.cfield, [s.cfield.one]))[0]
    return _set(ctx, {"value": show(op.twist(op.ring.coerce(a)))})


@cli.command("lclm")
@click.option("--A", "A", required=True)
@click.option("--B", "B", required=True)
@click.pass_context
def lclm_cmd(ctx, A, B):
    s = _sess(ctx)
    a, b = _op_ring(parse_op(A, s.ctx), parse_op(B, s.ctx))
    L = lo.lclm(a, b)
    lo.lclm_certify(L, a, b)
    return _set(ctx, {"value": show(L), "order": L.order, "certified": True})


@cli.command("split-verify")
@click.option("--A", "A", required=True)
@click.option("--lead", default="1")
@click.option("--factor", "factors", multiple=True)
@click.pass_context
def split_verify_cmd(ctx, A, lead, factors):
    s = _sess(ctx)
    S = _splitting(s, lead, factors)
    op = _op_ring(parse_op(A, s.ctx), LinOp(S.ring, [S.ring.one]))[0]
    if op.ring != S.ring:
        S = lo.make_split(op.ring, S.lead, S.factors)
    res = S.residual(op)
    ok = S.verify(op)
    return _set(ctx, {"verdict": ok, "expanded": show(S.expand()), "residual": show(res)})


@cli.command("split-transform")
@click.option("--lead", default="1")
@click.option("--factor", "factors", multiple=True)
@click.option("--kind", type=click.Choice(["twist", "compconj"]), required=True)
@click.option("--by", required=True)
@click.pass_context
def split_transform_cmd(ctx, lead, factors, kind, by):
    s = _sess(ctx)
    S = _splitting(s, lead, factors)
    b = S.ring.coerce(parse_field(by, s.ctx))
    T = lo.split_twist(S, b) if kind == "twist" else lo.split_compconj(S, b)
    return _set(ctx, {"lead": show(T.lead), "factors": [show(g) for g in T.factors], "expanded": show(T.expand())})


@cli.command("real-split")
@click.option("--a", "re_part", required=True, help="Real part a of the factor a + bi.")
@click.option("--b", "im_part", required=True, help="Imaginary part b (nonzero).")
@click.option("--A", "A", default=None, help="Optional real operator to compare against.")
@click.pass_context
def real_split_cmd(ctx, re_part, im_part, A):
    s = _sess(ctx)
    a, b = parse_field(re_part, s.ctx), parse_field(im_part, s.ctx)
    op = lo.compose_order2(a, b, s.cfield)
    out = {"value": show(op)}
    if A is not None:
        out["verdict"] = op == parse_op(A, s.ctx)
    return _set(ctx, out)


@cli.command("order1-values")
@click.option("--A", "A", required=True)
@click.pass_context
def order1_cmd(ctx, A):
    vals = lo.order1_values(parse_op(A, _sess(ctx).ctx))
    return _set(ctx, {"exceptional": _val(vals["exceptional"]), "ultimate": _val(vals["ultimate"]), "instance_relative": True})


# ---------------------------------------------------------------- group ring


@cli.command("gr-eval")
@click.option("--f", "f", required=True)
@click.option("--A", "A", default=None, help="Apply this operator.")
@click.pass_context
def gr_eval_cmd(ctx, f, A):
    s = _sess(ctx)
    g = parse_gr(f, s.ctx)
    out = {"value": show(g), "spectrum": [lam.to_dsl(s.basis.names) for lam in g.spectrum()]}
    if A is not None:
        out["applied"] = show(univexp.apply_gr(parse_op(A, s.ctx), g))
    return _set(ctx, out)


@cli.command("vg")
@click.option("--f", "f", required=True)
@click.pass_context
def vg_cmd(ctx, f):
    return _set(ctx, {"v": _val(parse_gr(f, _sess(ctx).ctx).v_g())})


@cli.command("trace")
@click.option("--f", "f", required=True)
@click.pass_context
def trace_cmd(ctx, f):
    return _set(ctx, {"value": show(parse_gr(f, _sess(ctx).ctx).trace())})


@cli.command("norms")
@click.option("--f", "f", required=True)
@click.pass_context
def norms_cmd(ctx, f):
    g = parse_gr(f, _sess(ctx).ctx)
    out = {"norm_sq": show(g.norm_sq())}
    try:
        out["norm1"] = show(g.norm1())
    except TypeError as exc:
        out["norm1"] = None
        out["norm1_note"] = str(exc)
    return _set(ctx, out)


@cli.command("split-from-kernel")
@click.option("--y", "ys", multiple=True, required=True)
@click.pass_context
def split_from_kernel_cmd(ctx, ys):
    s = _sess(ctx)
    a, A = univexp.split_from_kernel([parse_gr(y, s.ctx) for y in ys])
    return _set(ctx, {"factors": [show(g) for g in a], "operator": show(A)})


@cli.command("kernel-from-splitting")
@click.option("--lead", default="1")
@click.option("--factor", "factors", multiple=True)
@click.pass_context
def kernel_cmd(ctx, lead, factors):
    s = _sess(ctx)
    S = _splitting(s, lead, factors, complex_=True)
    ker = univexp.kernel_from_splitting(S, s.basis)
    A = S.expand()
    return _set(ctx, {"kernel": [show(y) for y in ker], "v_g": [_val(y.v_g()) for y in ker], "verified": univexp.kernel_check(A, ker)})


@cli.command("spectrum")
@click.option("--lead", default="1")
@click.option("--factor", "factors", multiple=True)
@click.pass_context
def spectrum_cmd(ctx, lead, factors):
    s = _sess(ctx)
    S = _splitting(s, lead, factors, complex_=True)
    spec = univexp.spectrum_from_splitting(S, s.basis)
    rows = sorted(((lam.to_dsl(s.basis.names), k) for lam, k in spec.items()))
    return _set(ctx, {"spectrum": {name: k for name, k in rows}})


# ---------------------------------------------------------------- slots


@cli.command("slot-check")
@click.option("--predicate", required=True, type=click.Choice(["steep", "normal", "strictly-normal", "deep", "isolated", "ultimate", *slotcheck.MODES]))
@click.option("--P", "P", required=True)
@click.option("--m", "m", default="1", help="Monomial bound.")
@click.option("--cut", default="all", help="all | below:<mono> | down:<level>[:<mono>]")
@click.option("--realm", type=click.Choice(["H", "K"]), default="H")
@click.option("--chain", multiple=True, help="phi-chain entries for deep.")
@click.option("--lead", default="1", help="Splitting lead (split-normal modes, order above 1 for ultimate).")
@click.option("--factor", "factors", multiple=True, help="Splitting factors.")
@click.pass_context
def slot_check_cmd(ctx, predicate, P, m, cut, realm, chain, lead, factors):
    s = _sess(ctx)
    poly = parse_diffpoly(P, s.ctx)
    slot = slotcheck.SlotData(poly, parse_mono(m, s.ctx), parse_cut(cut, s.field.L, s.ctx), realm)
    kw = {}
    if predicate == "deep":
        chain_vals = [parse_field(c, s.ctx) for c in chain] if chain else s.default_chain()
        kw["chain"] = chain_vals
    elif predicate in slotcheck.MODES:
        kw["witness"] = slotcheck.witness_from_linear_part(slot, _splitting(s, lead, factors, complex_=True))
    elif predicate in ("isolated", "ultimate") and factors:
        kw["splitting"] = _splitting(s, lead, factors, complex_=True)
        kw["basis"] = s.basis
    rep = slotcheck.check(slot, predicate, **kw)
    return _set(ctx, {"slot": slot.to_json(), **rep.to_json()})


@cli.command("repulsion")
@click.option("--f", "f", required=True)
@click.option("--query", type=click.Choice(["attractive", "repulsive", "gamma-repulsive", "cut-repulsive"]), required=True)
@click.option("--gamma", default=None, help="Monomial whose value is gamma.")
@click.option("--cut", default=None)
@click.pass_context
def repulsion_cmd(ctx, f, query, gamma, cut):
    s = _sess(ctx)
    val = parse_field(f, s.ctx)
    g = parse_mono(gamma, s.ctx).v() if gamma else None
    c = parse_cut(cut, s.field.L, s.ctx) if cut else None
    return _set(ctx, {"verdict": slotcheck.repulsion(val, query, gamma=g, cut=c)})


# ---------------------------------------------------------------- oscillatory integration


@cli.command("oscint-solve")
@click.option("--xi", required=True)
@click.option("--f", "f", required=True)
@click.option("--prec", default=None, help="Precision monomial, relative to f.")
@click.option("--m", "m", type=int, default=3)
@click.pass_context
def oscint_cmd(ctx, xi, f, prec, m):
    s = _sess(ctx)
    xi_v, f_v = parse_field(xi, s.ctx), parse_field(f, s.ctx)
    p = parse_mono(prec, s.ctx) if prec else None
    sol = oscint.solve_order1(xi_v, f_v, p, m)
    return _set(
        ctx,
        {
            "y": show(sol.y),
            "u": show(sol.u),
            "approximants": [show(a) for a in sol.approximants],
            "residual": show(sol.residual),
            "checks": sol.checks,
            "verdict": all(sol.checks.values()),
            "xi_outside_I_plus_dagger": sol.xi_outside_I_plus_dagger,
        },
    )


@cli.command("byparts-check")
@click.option("--f", "f", required=True)
@click.option("--xi", required=True)
@click.option("--m", "m", type=int, default=0)
@click.option("--lam", required=True, help="Lambda combination realizing e with e-dagger = xi.")
@click.pass_context
def byparts_cmd(ctx, f, xi, m, lam):
    s = _sess(ctx)
    res = oscint.byparts_check(parse_field(f, s.ctx), parse_field(xi, s.ctx), m, s.basis, parse_lambda(lam, s.ctx))
    return _set(ctx, {"residual": show(res), "verdict": res.is_zero()})


@cli.command("ladder")
@click.option("--m", "m", type=int, required=True, help="Print P_0 .. P_m.")
@click.pass_context
def ladder_cmd(ctx, m):
    if m < 0:
        raise click.BadParameter("m must be non-negative")
    return _set(ctx, {"ladder": [show(P) for P in oscint.pj_ladder(m)]})


# ---------------------------------------------------------------- corpus


@cli.command("corpus-run")
@click.argument("paths", nargs=-1, required=True)
@click.pass_context
def corpus_cmd(ctx, paths):
    files = sorted({p for pat in paths for p in (glob.glob(pat) or [pat])})
    results = []
    for path in files:
        with open(path) as fh:
            data = json.load(fh)
        for vec in data["vectors"] if isinstance(data, dict) else data:
            results.append(run_vector(vec, data.get("session") if isinstance(data, dict) else None))
    failed = [r for r in results if not r["ok"]]
    return _set(ctx, {"total": len(results), "passed": len(results) - len(failed), "failed": [r["id"] for r in failed], "failures": failed, "verdict": not failed})


def run_vector(vec: dict, session: dict | None = None) -> dict:
    """Run one corpus vector in-process and compare the expected subset."""
    sess_data = vec.get("session", session)
    sess = Session.from_dict(sess_data) if sess_data else Session()
    code, payload = invoke(vec["args"], sess)
    problems = []
    if code != vec.get("exit", 0):
        problems.append(f"exit {code} != {vec.get('exit', 0)}")
    for key, want in vec.get("expect", {}).items():
        got = _dig(payload, key)
        if got != want:
            problems.append(f"{key}: got {got!r}, want {want!r}")
    return {"id": vec["id"], "ok": not problems, "problems": problems}


def _dig(payload, dotted: str):
    cur = payload
    for part in dotted.split("."):
        if isinstance(cur, dict):
            cur = cur.get(part)
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            return None
    return cur


# ---------------------------------------------------------------- entry points


def _exit_code(payload: dict) -> int:
    if "error" in payload:
        return 2
    return 1 if payload.get("verdict") is False else 0


def invoke(args, session: Session | None = None, session_path: str | None = None) -> tuple[int, dict]:
    """Run a command in-process; returns (exit code, payload)."""
    obj = {"session": session, "session_path": session_path}
    try:
        cli.main(args=list(args), standalone_mode=False, obj=obj, prog_name="adakit")
    except click.exceptions.NoArgsIsHelpError:
        return 2, {"schema": SCHEMA, "error": "no command given"}
    except click.ClickException as exc:
        return 2, {"schema": SCHEMA, "error": exc.format_message()}
    except (AdakitError, ValueError, TypeError, ZeroDivisionError, FileNotFoundError, KeyError) as exc:
        return 2, {"schema": SCHEMA, "error": f"{type(exc).__name__}: {exc}"}
    payload = obj.get("payload")
    if payload is None:
        return 0, {"schema": SCHEMA}
    return _exit_code(payload), payload


def format_text(payload: dict) -> str:
    lines = []
    for k, v in payload.items():
        if k == "schema":
            continue
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def main(argv=None) -> None:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help") or "--help" in argv:
        cli.main(args=argv or ["--help"], prog_name="adakit")
        return
    as_json = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    code, payload = invoke(argv)
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(format_text(payload))
    sys.exit(code)


if __name__ == "__main__":
    main()
