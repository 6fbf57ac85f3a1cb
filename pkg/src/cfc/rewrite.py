"""Type reduction: top-level family reduction with proofs, single steps inside
one-hole contexts, normalization under several strategies, joinability and the
consistency oracle.

Top-level reduction matches equations in declaration order, rejects a match
when an earlier equation of the same axiom is neither apart nor compatible,
and resolves the equation's evaluation assumptions left to right.  Every
successful reduction also yields the coercion proving it, which
``check_coercion`` can re-verify independently.

Arguments may mention type variables (for instance those bound by an enclosing
``forall``); they are rigid when matching and unknowns in the conflict check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .conflict import no_conflict
from .diagnostics import CheckError, fail
from .syntax import (AxiomUse, Context, EvalResolution, Signature, alpha_eq, canon,
                     find_redexes, is_family_free, subst_types)
from .unify import match

# Nesting bound on assumption resolution.  Deeper chains are treated as stuck.
MAX_RESOLUTION_DEPTH = 120


@dataclass(frozen=True)
class Attempt:
    """What happened when one equation was tried.

    ``outcome`` is one of ``no-match``, ``conflict-blocked`` (``blocker`` is
    the earlier equation index), ``assumption-stuck`` (``blocker`` is the
    assumption index) or ``fired``.
    """

    axiom: str
    index: int
    outcome: str
    blocker: Optional[int] = None


@dataclass(frozen=True)
class Reduction:
    reduct: object
    proof: AxiomUse
    attempts: tuple = field(default=(), compare=False)

    @property
    def axiom(self) -> str:
        return self.proof.axiom

    @property
    def index(self) -> int:
        return self.proof.index


class Rewriter:
    """Reduction engine bound to one signature, with a memo table."""

    def __init__(self, sig: Signature, max_depth: int = MAX_RESOLUTION_DEPTH):
        self.sig = sig
        self.max_depth = max_depth
        self._memo: dict = {}
        self._axioms: dict = {}

    def _axioms_for(self, fam: str) -> list:
        got = self._axioms.get(fam)
        if got is None:
            got = self._axioms[fam] = self.sig.axioms_for(fam)
        return got

    # -- top-level reduction -------------------------------------------

    def top_reduce(self, fam: str, args: Sequence) -> Optional[Reduction]:
        """Reduce ``fam args`` at the root, or ``None`` when stuck."""
        args = tuple(args)
        if not all(is_family_free(a) for a in args):
            return None
        red, _ = self._top(fam, args, ())
        return red

    def explain(self, fam: str, args: Sequence) -> list[Attempt]:
        """Per-equation provenance for ``fam args`` (computed without the memo)."""
        attempts: list = []
        self._top(fam, tuple(args), (), attempts)
        return attempts

    def _top(self, fam: str, args: tuple, stack: tuple, log: Optional[list] = None):
        key = (fam, canon(args))
        if log is None and key in self._memo:
            hit = self._memo[key]
            return (None if hit is _STUCK else hit), False
        if key in stack:
            return None, True
        if len(stack) >= self.max_depth:
            return None, True
        stack = stack + (key,)
        cut = False
        attempts = [] if log is None else log
        for ax, eqs in self._axioms_for(fam):
            for i, eq in enumerate(eqs):
                theta = match(eq.lhs_args, args, eq.tyvars)
                if theta is None or any(a not in theta.tys for a in eq.tyvars):
                    attempts.append(Attempt(ax, i, "no-match"))
                    continue
                rho = tuple(theta.tys[a] for a in eq.tyvars)
                blocker = next((j for j in range(i) if not no_conflict(eqs, i, rho, j)), None)
                if blocker is not None:
                    attempts.append(Attempt(ax, i, "conflict-blocked", blocker))
                    continue
                mapping = dict(zip(eq.tyvars, rho))
                resolutions = []
                stuck_at = None
                for n, chi in enumerate(eq.assumps):
                    sub_args = tuple(subst_types(mapping, x) for x in chi.args)
                    sub, sub_cut = self._top(chi.fam, sub_args, stack)
                    cut = cut or sub_cut
                    if sub is None:
                        stuck_at = n
                        break
                    mapping[chi.var] = sub.reduct
                    resolutions.append(EvalResolution(sub.reduct, sub.proof))
                if stuck_at is not None:
                    attempts.append(Attempt(ax, i, "assumption-stuck", stuck_at))
                    continue
                attempts.append(Attempt(ax, i, "fired"))
                red = Reduction(subst_types(mapping, eq.rhs),
                                AxiomUse(ax, i, rho, tuple(resolutions)), tuple(attempts))
                if log is None:
                    self._memo[key] = red
                return red, cut
        if log is None and not cut:
            self._memo[key] = _STUCK
        return None, cut

    # -- single steps ----------------------------------------------------

    def firing_redexes(self, ty) -> list:
        """``(position, reduct_type, reduction)`` for every redex that fires."""
        out = []
        for k, (hole, fam, args) in enumerate(find_redexes(ty)):
            red = self.top_reduce(fam, args)
            if red is not None:
                out.append((k, hole.plug(red.reduct), red))
        return out

    def step_type(self, ty, choice: Union[int, Callable, None] = None):
        """One reduction step.

        ``choice`` is a redex position (index into ``find_redexes``), a
        callable picking one entry from the list of firing redexes, or
        ``None`` for the leftmost-innermost firing redex.
        """
        if isinstance(choice, int):
            redexes = find_redexes(ty)
            if not 0 <= choice < len(redexes):
                return None
            hole, fam, args = redexes[choice]
            red = self.top_reduce(fam, args)
            return None if red is None else hole.plug(red.reduct)
        if choice is None:
            for hole, fam, args in find_redexes(ty):
                red = self.top_reduce(fam, args)
                if red is not None:
                    return hole.plug(red.reduct)
            return None
        firing = self.firing_redexes(ty)
        if not firing:
            return None
        return firing[choice(firing)][1]

    def normalize(self, ty, strategy: Union[str, random.Random] = "innermost"):
        """Reduce until no redex fires; returns ``(normal_form, steps)``."""
        pick = _selector(strategy)
        steps = 0
        while True:
            nxt = self.step_type(ty, pick)
            if nxt is None:
                return ty, steps
            ty = nxt
            steps += 1

    def normal_form(self, ty):
        return self.normalize(ty)[0]

    def join(self, t1, t2):
        n1 = self.normal_form(t1)
        return n1 if alpha_eq(n1, self.normal_form(t2)) else None

    def consistent_endpoints(self, co):
        """Check ``co`` in the empty context and join its two endpoints.

        Returns ``(joined, witness, prop)``; ``witness`` is the common normal
        form or ``None``.
        """
        from .typecheck import check_coercion
        try:
            prop = check_coercion(self.sig, Context(), co)
        except CheckError as err:
            raise fail("IllTypedCoercion", err.diagnostic.message) from err
        w = self.join(prop.lhs, prop.rhs)
        return w is not None, w, prop


_STUCK = object()


def _selector(strategy) -> Optional[Callable]:
    if strategy == "innermost":
        return None
    if strategy == "rightmost":
        return lambda firing: len(firing) - 1
    if isinstance(strategy, random.Random):
        return lambda firing: strategy.randrange(len(firing))
    raise ValueError(f"unknown strategy {strategy!r}")


# Module-level conveniences mirroring the operation names.

def top_reduce(sig: Signature, fam: str, args: Sequence) -> Optional[Reduction]:
    return Rewriter(sig).top_reduce(fam, args)


def step_type(sig: Signature, ty, choice=None):
    return Rewriter(sig).step_type(ty, choice)


def normalize(sig: Signature, ty, strategy="innermost"):
    return Rewriter(sig).normalize(ty, strategy)


def join(sig: Signature, t1, t2):
    return Rewriter(sig).join(t1, t2)


def consistent_endpoints(sig: Signature, co):
    return Rewriter(sig).consistent_endpoints(co)


__all__ = ["Attempt", "Reduction", "Rewriter", "top_reduce", "step_type", "normalize",
           "join", "consistent_endpoints"]
