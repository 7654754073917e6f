"""Session configuration: which coefficient field, the Lambda basis, default
precision and the default phi-chain.  Stored as TOML::

    instance = "multitrans"   # or "ratfunc"
    levels = 2
    precision = "e(1)^-8"
    max_terms = 24
    chain = ["1", "x^-1"]

    [lambda]
    l1 = "i"
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dsl import Context, evaluate, parse_field, parse_mono
from .hfield import ComplexField, RatFuncField, TransField
from .univexp import LambdaBasis

ENV_VAR = "ADAKIT_SESSION"
INSTANCES = ("multitrans", "ratfunc")


@dataclass
class Session:
    instance: str = "multitrans"
    levels: int = 2
    precision: str | None = None
    max_terms: int = 24
    lambdas: dict = field(default_factory=lambda: {"l1": "i"})
    chain: list | None = None

    def __post_init__(self):
        if self.instance not in INSTANCES:
            raise ValueError(f"instance must be one of {INSTANCES}")
        if self.instance == "ratfunc":
            self.levels = 1

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        known = {"instance", "levels", "precision", "max_terms", "lambda", "chain"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown session keys: {sorted(extra)}")
        kw = {k: data[k] for k in ("instance", "levels", "precision", "max_terms", "chain") if k in data}
        if "lambda" in data:
            kw["lambdas"] = dict(data["lambda"])
        return cls(**kw)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Session":
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh))

    @classmethod
    def resolve(cls, path: str | None = None) -> "Session":
        """Explicit path, then $ADAKIT_SESSION, then defaults."""
        path = path or os.environ.get(ENV_VAR)
        if path:
            if not Path(path).is_file():
                raise FileNotFoundError(f"session file {path} not found")
            return cls.load(path)
        return cls()

    @cached_property
    def field(self):
        if self.instance == "ratfunc":
            return RatFuncField()
        F = TransField(self.levels, max_terms=self.max_terms)
        if self.precision:
            F = TransField(self.levels, parse_mono(self.precision, Context(F)), self.max_terms)
        return F

    @cached_property
    def cfield(self) -> ComplexField:
        return ComplexField(self.field)

    @cached_property
    def basis(self) -> LambdaBasis | None:
        if not self.lambdas:
            return None
        base = Context(self.field, LambdaBasis(self.cfield, []))
        names = list(self.lambdas)
        elems = [self.cfield.coerce(evaluate(self.lambdas[n], base)) for n in names]
        return LambdaBasis(self.cfield, elems, names)

    @cached_property
    def ctx(self) -> Context:
        return Context(self.field, self.basis)

    def default_chain(self) -> list | None:
        if not self.chain:
            return None
        return [parse_field(t, self.ctx) for t in self.chain]
