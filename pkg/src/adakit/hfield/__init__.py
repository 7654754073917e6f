"""Concrete coefficient fields: exact rational functions, truncated
transseries, their complexifications, and asymptotic operations on them."""

from .base import QQ, FieldElem, Rationals
from .complexfield import ComplexElem, ComplexField
from .mono import Mono, gen_dagger
from .ops import (
    RELATIONS,
    antiderivative,
    asym_cmp,
    asymp,
    complex_dagger_formula,
    dagger_decompose,
    delta_of,
    flat_subgroup,
    in_flat,
    in_I,
    logderiv,
    logderiv_solve,
    max_psi,
    omega,
    prec_,
    preceq,
    psi,
    sigma,
    sim,
    wr,
)
from .ratfunc import RatFunc, RatFuncField
from .trans import Trans, TransField


def real_field(F):
    """The real field underlying F (F itself unless F is a complexification)."""
    return F.base if isinstance(F, ComplexField) else F


def is_real_elem(a) -> bool:
    return not isinstance(a, ComplexElem) or a.im.is_zero()


__all__ = [
    "QQ",
    "Rationals",
    "FieldElem",
    "ComplexElem",
    "ComplexField",
    "Mono",
    "gen_dagger",
    "RatFunc",
    "RatFuncField",
    "Trans",
    "TransField",
    "RELATIONS",
    "antiderivative",
    "asym_cmp",
    "asymp",
    "complex_dagger_formula",
    "dagger_decompose",
    "delta_of",
    "flat_subgroup",
    "in_flat",
    "in_I",
    "logderiv",
    "logderiv_solve",
    "max_psi",
    "omega",
    "prec_",
    "preceq",
    "psi",
    "sigma",
    "sim",
    "wr",
    "real_field",
    "is_real_elem",
]
