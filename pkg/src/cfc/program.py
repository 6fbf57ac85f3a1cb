"""Declarations of a ``.cfc`` source file, plus surface-only type syntax.

Surface types reuse the kernel type nodes and add class-constrained types
``C t => body``.  Spans are excluded from equality so that a re-parsed program
compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .diagnostics import Span
from .syntax import canon


@dataclass(frozen=True, slots=True)
class Pred:
    """A class predicate ``C t1 .. tn``."""

    cls: str
    args: tuple = ()

    def __str__(self) -> str:
        from .printer import show
        return show(self)


@dataclass(frozen=True, slots=True)
class Constrained:
    """Surface qualified type ``preds => body``."""

    preds: tuple
    body: object

    def __str__(self) -> str:
        from .printer import show
        return show(self)


# -- kernel declarations ----------------------------------------------------

_span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DataDecl:
    name: str
    arity: int
    span: Optional[Span] = _span


@dataclass(frozen=True)
class ConstDecl:
    name: str
    ty: object
    span: Optional[Span] = _span


@dataclass(frozen=True)
class FamilyDecl:
    name: str
    arity: int
    total: bool
    span: Optional[Span] = _span


@dataclass(frozen=True)
class AxiomDecl:
    name: str
    fam: str
    equations: tuple
    span: Optional[Span] = _span
    eq_spans: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class TermDecl:
    name: str
    ty: Optional[object]
    expr: object
    span: Optional[Span] = _span


# -- surface declarations ---------------------------------------------------


@dataclass(frozen=True)
class DataKindDecl:
    """``data Nat = Z | S Nat``: a datatype whose constructors are type constants."""

    name: str
    constructors: tuple  # of (name, tuple of argument types)
    span: Optional[Span] = _span


@dataclass(frozen=True)
class ClassDecl:
    name: str
    params: tuple
    supers: tuple = ()
    assoc: tuple = ()        # associated family names
    closed: bool = False
    instances: tuple = ()    # InstanceDecl, only for closed classes
    span: Optional[Span] = _span


@dataclass(frozen=True)
class AssocDef:
    """``type F lhs = rhs`` inside an instance body."""

    fam: str
    lhs: tuple
    rhs: object


@dataclass(frozen=True)
class InstanceDecl:
    context: tuple
    head: Pred
    assoc: tuple = ()        # AssocDef
    span: Optional[Span] = _span


@dataclass(frozen=True)
class FamilyEquation:
    fam: str
    lhs: tuple
    rhs: object
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TypeFamilyDecl:
    """``type family [total] F params [where { equations }]``.

    ``params`` holds ``(name, kind-or-None)`` pairs; ``equations`` is ``None``
    for an open family.
    """

    name: str
    params: tuple
    total: bool = False
    equations: Optional[tuple] = None
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TypeInstanceDecl:
    fam: str
    lhs: tuple
    rhs: object
    span: Optional[Span] = _span


@dataclass(frozen=True)
class TotalPragma:
    fam: str
    span: Optional[Span] = _span


Decl = Union[DataDecl, ConstDecl, FamilyDecl, AxiomDecl, TermDecl, DataKindDecl, ClassDecl,
             InstanceDecl, TypeFamilyDecl, TypeInstanceDecl, TotalPragma]


@dataclass(frozen=True)
class Program:
    decls: tuple
    source: str = field(default="<input>", compare=False)


def _canon_decl(d):
    if isinstance(d, TermDecl):
        return TermDecl(d.name, None if d.ty is None else canon(d.ty), canon(d.expr))
    if isinstance(d, AxiomDecl):
        return AxiomDecl(d.name, d.fam, tuple(canon(e) for e in d.equations))
    if isinstance(d, ConstDecl):
        return ConstDecl(d.name, canon(d.ty))
    return d


def program_alpha_eq(p1: Program, p2: Program) -> bool:
    """Declaration-wise equality up to bound-variable names and spans."""
    if len(p1.decls) != len(p2.decls):
        return False
    return all(_canon_decl(a) == _canon_decl(b) for a, b in zip(p1.decls, p2.decls))
