"""Turn a parsed program into a checked module.

Loading collects kernel declarations into a :class:`Signature`, builds the
surface class table, elaborates free-standing type families into classes,
flattens surface family equations into kernel axioms, validates the resulting
signature and types every term.  All problems are gathered as diagnostics with
source spans; loading itself never raises on user errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import program as P
from .diagnostics import CheckError, Diagnostic, Span
from .parser import parse_program
from .signature import check_good_signature, check_signature
from .surface import (ClassInfo, FamilyGuard, Instance, SurfaceEnv, check_totality,
                      flatten_equation, ordered_ftv)
from .syntax import (Context, FamilyInfo, Signature, Subst, TmBind, alpha_eq, fresh_name,
                     subst_apply)
from .typecheck import check_type, infer_expr


@dataclass
class TermInfo:
    name: str
    expr: object
    ty: object
    closed: object          # expr with earlier terms inlined
    span: Optional[Span] = None


@dataclass
class Module:
    program: P.Program
    sig: Signature
    env: SurfaceEnv
    terms: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    elaborated: list = field(default_factory=list)      # surface classes and instances
    kernel: list = field(default_factory=list)          # kernel family and axiom decls
    unsafe_total: set = field(default_factory=set)

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    @property
    def family_names(self) -> set:
        return set(self.sig.families)


def load_file(path: str) -> Module:
    with open(path, encoding="utf-8") as fh:
        return load_source(fh.read(), path)


def load_source(src: str, filename: str = "<input>") -> Module:
    return load_program(parse_program(src, filename))


class _Loader:
    def __init__(self, prog: P.Program):
        self.prog = prog
        self.diags: list = []
        self.warnings: list = []
        self.ty_cons: dict = {}
        self.consts: dict = {}
        self.families: dict = {}
        self.axioms: dict = {}
        self.axiom_spans: dict = {}        # (axiom, index or None) -> span
        self.env = SurfaceEnv()
        self.elaborated: list = []
        self.kernel: list = []
        self.unsafe: set = set()
        self.fam_spans: dict = {}

    def error(self, code: str, msg: str, span, rule=None, **kw) -> None:
        self.diags.append(Diagnostic(code, msg, rule, span=span, **kw))

    def err_from(self, err: CheckError, span) -> None:
        for d in err.diagnostics:
            self.diags.append(d.with_span(span))

    # -- declaration collection -------------------------------------------

    def _declare(self, table: dict, name: str, value, span, what: str) -> bool:
        if name in table:
            self.error("DuplicateDeclaration", f"{what} {name} is declared twice", span)
            return False
        table[name] = value
        return True

    def _fresh_axiom(self, base: str) -> str:
        name = base
        n = 1
        while name in self.axioms:
            name = f"{base}_{n}"
            n += 1
        return name

    def _add_axiom(self, name: str, eqs: tuple, span, eq_spans=()) -> None:
        self.axioms[name] = eqs
        self.axiom_spans[(name, None)] = span
        for i, s in enumerate(eq_spans):
            self.axiom_spans[(name, i)] = s

    def run(self) -> Module:
        decls = self.prog.decls
        pragmas = {d.fam: d for d in decls if isinstance(d, P.TotalPragma)}
        # Pass 1: type constants, constants, kernel families, classes.
        for d in decls:
            match d:
                case P.DataDecl(name, arity):
                    self._declare(self.ty_cons, name, arity, d.span, "type constant")
                case P.DataKindDecl(name, cons):
                    if self._declare(self.ty_cons, name, 0, d.span, "type constant"):
                        self.env.kinds[name] = cons
                    for c, args in cons:
                        self._declare(self.ty_cons, c, len(args), d.span, "type constant")
                case P.ConstDecl(name, ty):
                    self._declare(self.consts, name, ty, d.span, "constant")
                case P.FamilyDecl(name, arity, total):
                    if self._declare(self.families, name, FamilyInfo(arity, total), d.span,
                                     "family"):
                        self.fam_spans[name] = d.span
                case P.ClassDecl():
                    self._class(d)
                case P.TypeFamilyDecl(name, params, total, eqs):
                    self._type_family_head(d, name in pragmas)
        self.env.ty_cons = self.ty_cons
        for name, d in pragmas.items():
            if name not in self.families:
                self.error("UndeclaredFamily", f"TOTAL pragma names unknown family {name}", d.span)
        # Pass 2: instances (explicit first, so elaborated contexts can use them).
        for d in decls:
            if isinstance(d, P.InstanceDecl):
                self._instance(d)
        for d in decls:
            if isinstance(d, P.ClassDecl) and d.closed:
                self._closed_class_axioms(d)
        # Pass 3: surface families with equations, in source order.
        totals = {f for f, info in self.families.items() if info.total and f not in pragmas}
        for d in decls:
            if isinstance(d, P.TypeFamilyDecl):
                self._type_family_body(d, pragmas, totals)
            elif isinstance(d, P.TypeInstanceDecl):
                self._type_instance(d)
        self._open_assoc_axioms()
        # Kernel axioms as written.
        for d in decls:
            if isinstance(d, P.AxiomDecl):
                if d.name in self.axioms:
                    self.error("DuplicateDeclaration", f"axiom {d.name} is declared twice", d.span)
                    continue
                for i, eq in enumerate(d.equations):
                    if eq.fam != d.fam:
                        sp = d.eq_spans[i] if i < len(d.eq_spans) else d.span
                        self.error("MixedFamilyAxiom", f"equation {i} is over {eq.fam}, "
                                   f"not {d.fam}", sp, "Good-1", axiom=d.name, index=i)
                self._add_axiom(d.name, d.equations, d.span, d.eq_spans)
        sig = Signature(dict(self.ty_cons), dict(self.consts), dict(self.families),
                        dict(self.axioms))
        for diag in check_signature(sig) or check_good_signature(sig):
            span = self.axiom_spans.get((diag.axiom, diag.index)) or \
                self.axiom_spans.get((diag.axiom, None))
            if span is None and diag.code == "BadConstType":
                span = next((x.span for x in decls if isinstance(x, P.ConstDecl)
                             and diag.message.startswith(f"constant {x.name} ")), None)
            self.diags.append(diag.with_span(span))
        mod = Module(self.prog, sig, self.env, diagnostics=self.diags, warnings=self.warnings,
                     elaborated=self.elaborated, unsafe_total=self.unsafe)
        self._kernel_view(sig, mod)
        self._terms(sig, mod)
        return mod

    # -- classes and instances --------------------------------------------

    def _class(self, d: P.ClassDecl) -> None:
        if d.name in self.env.classes:
            self.error("DuplicateDeclaration", f"class {d.name} is declared twice", d.span)
            return
        info = ClassInfo(d.name, d.params, d.supers, d.assoc, d.closed)
        self.env.classes[d.name] = info
        for f in d.assoc:
            if self._declare(self.families, f, FamilyInfo(len(d.params), False), d.span,
                             "family"):
                self.env.families[f] = FamilyGuard(len(d.params), d.name)
                self.fam_spans[f] = d.span
        for k, inst in enumerate(d.instances):
            info.instances.append(Instance(inst.context, inst.head, f"{d.name}#{k}"))

    def _instance(self, d: P.InstanceDecl) -> None:
        info = self.env.classes.get(d.head.cls)
        if info is None:
            self.error("UndeclaredClass", f"class {d.head.cls} is not declared", d.span)
            return
        if info.closed:
            self.error("ClosedClassExtension", f"closed class {info.name} cannot gain "
                       "instances outside its declaration", d.span)
            return
        if len(d.head.args) != info.arity:
            self.error("ArityMismatch", f"{info.name} expects {info.arity} argument(s)", d.span)
            return
        info.instances.append(Instance(d.context, d.head, f"{info.name}#{len(info.instances)}"))

    def _check_assoc(self, inst_decl: P.InstanceDecl, inst: Instance, info: ClassInfo):
        """Validate associated definitions; returns ``(fam, lhs, rhs)`` triples."""
        out = []
        scope = inst.vars()
        for a in inst_decl.assoc:
            if a.fam not in info.assoc:
                self.error("UnknownAssociatedFamily", f"{a.fam} is not associated with "
                           f"{info.name}", inst_decl.span)
                continue
            if tuple(a.lhs) != tuple(inst.head.args):
                self.error("AssocHeadMismatch", f"type {a.fam} arguments must repeat the "
                           "instance head", inst_decl.span)
                continue
            try:
                self.env.st_check_type(inst.context, scope, a.rhs, exclude=inst.name)
            except CheckError as err:
                self.err_from(err, inst_decl.span)
                continue
            out.append((a.fam, a.lhs, a.rhs))
        return out

    def _instances_with_decls(self):
        """Pair each explicit instance declaration with its table entry."""
        counters: dict = {}
        for d in self.prog.decls:
            if isinstance(d, P.InstanceDecl):
                info = self.env.classes.get(d.head.cls)
                if info is None or info.closed or len(d.head.args) != info.arity:
                    continue
                k = counters.get(info.name, 0)
                counters[info.name] = k + 1
                yield d, info.instances[k], info

    def _open_assoc_axioms(self) -> None:
        counts: dict = {}
        for d, inst, info in self._instances_with_decls():
            for fam, lhs, rhs in self._check_assoc(d, inst, info):
                k = counts.get(fam, 0)
                counts[fam] = k + 1
                self._flatten_into(self._fresh_axiom(f"ax_{fam}_{k}"), [(fam, lhs, rhs, d.span)],
                                   d.span)

    def _closed_class_axioms(self, d: P.ClassDecl) -> None:
        info = self.env.classes[d.name]
        per_fam: dict = {}
        for k, idecl in enumerate(d.instances):
            for fam, lhs, rhs in self._check_assoc(idecl, info.instances[k], info):
                per_fam.setdefault(fam, []).append((fam, lhs, rhs, idecl.span or d.span))
        for fam, eqs in per_fam.items():
            self._flatten_into(self._fresh_axiom(f"ax_{fam}"), eqs, d.span)

    def _flatten_into(self, axname: str, eqs: list, span) -> None:
        out, spans = [], []
        for fam, lhs, rhs, sp in eqs:
            try:
                out.append(flatten_equation(fam, lhs, rhs))
                spans.append(sp)
            except CheckError as err:
                self.err_from(err, sp)
        if out:
            self._add_axiom(axname, tuple(out), span, spans)

    # -- free-standing type families -----------------------------------------

    def _class_name(self, fam: str) -> str:
        name = "C" + fam
        while name in self.env.classes:
            name = fresh_name(name, set(self.env.classes))
        return name

    def _type_family_head(self, d: P.TypeFamilyDecl, pragma: bool) -> None:
        arity = len(d.params)
        if d.total or pragma:
            if self._declare(self.families, d.name, FamilyInfo(arity, pragma), d.span, "family"):
                self.env.families[d.name] = FamilyGuard(arity, None, pragma)
                self.fam_spans[d.name] = d.span
            return
        if not self._declare(self.families, d.name, FamilyInfo(arity, False), d.span, "family"):
            return
        cls = self._class_name(d.name)
        params = tuple(p for p, _ in d.params)
        info = ClassInfo(cls, params, (), (d.name,), closed=d.equations is not None)
        self.env.classes[cls] = info
        self.env.families[d.name] = FamilyGuard(arity, cls)
        self.fam_spans[d.name] = d.span

    def _type_family_body(self, d: P.TypeFamilyDecl, pragmas: dict, totals: set) -> None:
        guard = self.env.families.get(d.name)
        if guard is None or self.fam_spans.get(d.name) is not d.span:
            return
        eqs = d.equations
        for e in eqs or ():
            if e.fam != d.name:
                self.error("MixedFamilyAxiom", f"equation for {e.fam} inside family {d.name}",
                           e.span)
        eqs = tuple(e for e in (eqs or ()) if e.fam == d.name)
        if d.total or d.name in pragmas:
            res = check_totality(d.name, d.params, [(e.lhs, e.rhs) for e in eqs],
                                 self.env.kinds, totals, pragma=d.name in pragmas)
            if res.unsafe:
                self.unsafe.add(d.name)
                self.warnings.append(Diagnostic("UnsafeTotal", f"{d.name} is trusted as total "
                                                f"by pragma; the checker says: {res.reason}",
                                                span=d.span))
            if res.total:
                totals.add(d.name)
                self.families[d.name] = FamilyInfo(len(d.params), True)
                self.env.families[d.name] = FamilyGuard(len(d.params), None, True)
            else:
                self.error("NotTotal", f"{d.name}: {res.reason}", d.span, "ST_TFamily")
            if eqs:
                self._flatten_into(self._fresh_axiom(f"ax_{d.name}"),
                                   [(e.fam, e.lhs, e.rhs, e.span) for e in eqs], d.span)
            self.elaborated.append(d)
            return
        cls = guard.guard
        info = self.env.classes[cls]
        self.elaborated.append(P.ClassDecl(cls, info.params, (), (d.name,), info.closed, (),
                                           d.span))
        if eqs is None or d.equations is None:
            return
        flat = []
        for k, e in enumerate(eqs):
            inst = self._elaborate_instance(cls, e.fam, e.lhs, e.rhs, e.span, f"{cls}#{k}")
            if inst is not None:
                info.instances.append(inst)
                flat.append((e.fam, e.lhs, e.rhs, e.span))
        if flat:
            self._flatten_into(self._fresh_axiom(f"ax_{d.name}"), flat, d.span)

    def _elaborate_instance(self, cls, fam, lhs, rhs, span, name) -> Optional[Instance]:
        info = self.env.classes[cls]
        if len(lhs) != info.arity:
            self.error("ArityMismatch", f"{fam} expects {info.arity} argument(s), "
                       f"got {len(lhs)}", span)
            return None
        scope = ordered_ftv(*lhs)
        try:
            ctx = self.env.infer_constraints(scope, rhs, exclude=name)
            self.env.st_check_type(ctx, scope, rhs, exclude=name)
        except CheckError as err:
            self.err_from(err, span)
            return None
        inst = Instance(ctx, P.Pred(cls, tuple(lhs)), name)
        self.elaborated.append(P.InstanceDecl(ctx, inst.head, (P.AssocDef(fam, tuple(lhs), rhs),),
                                              span))
        return inst

    def _type_instance(self, d: P.TypeInstanceDecl) -> None:
        guard = self.env.families.get(d.fam)
        info = self.env.classes.get(guard.guard) if guard and guard.guard else None
        if info is None or info.closed or d.fam not in info.assoc or \
                not any(isinstance(x, P.TypeFamilyDecl) and x.name == d.fam and x.equations is None
                        for x in self.prog.decls):
            self.error("NotAnOpenFamily", f"{d.fam} is not an open type family declared with "
                       "'type family'", d.span)
            return
        k = len(info.instances)
        inst = self._elaborate_instance(info.name, d.fam, d.lhs, d.rhs, d.span,
                                        f"{info.name}#{k}")
        if inst is None:
            return
        info.instances.append(inst)
        n = sum(1 for ax in self.axioms if ax.startswith(f"ax_{d.fam}_"))
        self._flatten_into(self._fresh_axiom(f"ax_{d.fam}_{n}"), [(d.fam, d.lhs, d.rhs, d.span)],
                           d.span)

    # -- results ------------------------------------------------------------------

    def _kernel_view(self, sig: Signature, mod: Module) -> None:
        for f, info in sig.families.items():
            mod.kernel.append(P.FamilyDecl(f, info.arity, info.total))
        for ax, eqs in sig.axioms.items():
            if eqs:
                mod.kernel.append(P.AxiomDecl(ax, eqs[0].fam, eqs))

    def _terms(self, sig: Signature, mod: Module) -> None:
        ctx = Context()
        inline: dict = {}
        for d in self.prog.decls:
            if not isinstance(d, P.TermDecl):
                continue
            if ctx.termvar(d.name) is not None or d.name in mod.terms:
                self.error("DuplicateDeclaration", f"term {d.name} is declared twice", d.span)
                continue
            try:
                ty = infer_expr(sig, ctx, d.expr)
                if d.ty is not None:
                    check_type(sig, Context(), d.ty)
                    if not alpha_eq(ty, d.ty):
                        raise CheckError(Diagnostic("TermTypeMismatch", f"{d.name} has type {ty}, "
                                                    f"but is annotated {d.ty}"))
            except CheckError as err:
                self.err_from(err, d.span)
                continue
            closed = subst_apply(Subst(tms=inline), d.expr) if inline else d.expr
            mod.terms[d.name] = TermInfo(d.name, d.expr, ty, closed, d.span)
            inline[d.name] = closed
            ctx = ctx.extend(TmBind(d.name, ty))


def load_program(prog: P.Program) -> Module:
    return _Loader(prog).run()


__all__ = ["Module", "TermInfo", "load_file", "load_source", "load_program"]
