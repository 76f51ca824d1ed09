"""Guardedness checking for recursive specifications.

An occurrence of a variable is guarded when it sits inside a subterm
``a . t`` (action prefix) of the equation body.  A body that is not
syntactically guarded may still be rewritable to a guarded one; the
checker tries a bounded search: normalize with the unit/distribution
laws, and unfold other equations of the specification at unguarded
occurrences.  Exhausting the budget yields the conservative answer
``NOT_SHOWN_GUARDED``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .terms import (Act, Alt, Delta, Encap, Epsilon, LeftMerge, CommMerge,
                    Par, PosSi, RecConst, RecSpec, Seq, Si, Term, Var)


class Guardedness(Enum):
    SYNTACTICALLY_GUARDED = "syntactically-guarded"
    GUARDED_AFTER_REWRITING = "guarded-after-rewriting"
    NOT_SHOWN_GUARDED = "not-shown-guarded"


@dataclass(frozen=True)
class EquationReport:
    var: str
    status: Guardedness
    witness: Term | None = None  # the rewritten, guarded body when applicable
    steps_used: int = 0


@dataclass(frozen=True)
class GuardednessReport:
    entries: tuple[EquationReport, ...]

    @property
    def all_guarded(self) -> bool:
        return all(e.status is not Guardedness.NOT_SHOWN_GUARDED
                   for e in self.entries)

    def entry(self, var: str) -> EquationReport:
        for e in self.entries:
            if e.var == var:
                return e
        raise KeyError(var)


def is_syntactically_guarded(t: Term) -> bool:
    """True iff every free variable occurrence in ``t`` is under an action
    prefix.  Recursion constants are closed, so they are skipped."""
    return _guarded(t, under_prefix=False)


def _guarded(t: Term, under_prefix: bool) -> bool:
    if isinstance(t, Var):
        return under_prefix
    if isinstance(t, (Delta, Epsilon, Act, RecConst)):
        return True
    if isinstance(t, Seq):
        if isinstance(t.left, Act):
            return _guarded(t.right, True)
        return _guarded(t.left, under_prefix) and _guarded(t.right, under_prefix)
    if isinstance(t, Alt):
        return _guarded(t.left, under_prefix) and _guarded(t.right, under_prefix)
    if isinstance(t, (Par, LeftMerge, CommMerge)):
        return _guarded(t.left, under_prefix) and _guarded(t.right, under_prefix)
    if isinstance(t, Encap):
        return _guarded(t.body, under_prefix)
    if isinstance(t, (Si, PosSi)):
        return all(_guarded(a, under_prefix) for a in t.args)
    raise TypeError(f"not a term: {t!r}")


def _simplify_once(t: Term) -> Term | None:
    """Apply one unit/zero/associativity/distribution rewrite somewhere in
    ``t``, outermost-first; None when no rule applies."""
    rewritten = _simplify_head(t)
    if rewritten is not None:
        return rewritten
    if isinstance(t, Alt):
        out = _simplify_once(t.left)
        if out is not None:
            return Alt(out, t.right)
        out = _simplify_once(t.right)
        if out is not None:
            return Alt(t.left, out)
    elif isinstance(t, Seq):
        out = _simplify_once(t.left)
        if out is not None:
            return Seq(out, t.right)
        out = _simplify_once(t.right)
        if out is not None:
            return Seq(t.left, out)
    elif isinstance(t, Encap):
        out = _simplify_once(t.body)
        if out is not None:
            return Encap(t.blocked, out)
    elif isinstance(t, (Par, LeftMerge, CommMerge)):
        out = _simplify_once(t.left)
        if out is not None:
            return type(t)(out, t.right)
        out = _simplify_once(t.right)
        if out is not None:
            return type(t)(t.left, out)
    elif isinstance(t, (Si, PosSi)):
        for pos, a in enumerate(t.args):
            out = _simplify_once(a)
            if out is not None:
                args = t.args[:pos] + (out,) + t.args[pos + 1:]
                if isinstance(t, Si):
                    return Si(t.hist, t.state, args)
                return PosSi(t.index, t.hist, t.state, args)
    return None


def _simplify_head(t: Term) -> Term | None:
    if isinstance(t, Seq):
        if isinstance(t.left, Epsilon):        # eps . x = x
            return t.right
        if isinstance(t.right, Epsilon):       # x . eps = x
            return t.left
        if isinstance(t.left, Delta):          # delta . x = delta
            return Delta()
        if isinstance(t.left, Seq):            # (x . y) . z = x . (y . z)
            return Seq(t.left.left, Seq(t.left.right, t.right))
        if isinstance(t.left, Alt):            # (x + y) . z = x . z + y . z
            return Alt(Seq(t.left.left, t.right), Seq(t.left.right, t.right))
    elif isinstance(t, Alt):
        if isinstance(t.left, Delta):          # delta + x = x
            return t.right
        if isinstance(t.right, Delta):         # x + delta = x
            return t.left
    return None


def _unfold_one_unguarded(t: Term, own: str, spec: RecSpec) -> Term | None:
    """Replace one unguarded occurrence of a variable other than ``own``
    by its equation body; None when there is no such occurrence."""

    def walk(u: Term, under_prefix: bool) -> Term | None:
        if isinstance(u, Var):
            if not under_prefix and u.name != own and u.name in spec.vars:
                return spec.body(u.name)
            return None
        if isinstance(u, (Delta, Epsilon, Act, RecConst)):
            return None
        if isinstance(u, Seq):
            if isinstance(u.left, Act):
                return None  # everything to the right is guarded
            new = walk(u.left, under_prefix)
            if new is not None:
                return Seq(new, u.right)
            new = walk(u.right, under_prefix)
            if new is not None:
                return Seq(u.left, new)
            return None
        if isinstance(u, Alt):
            new = walk(u.left, under_prefix)
            if new is not None:
                return Alt(new, u.right)
            new = walk(u.right, under_prefix)
            if new is not None:
                return Alt(u.left, new)
            return None
        if isinstance(u, (Par, LeftMerge, CommMerge)):
            new = walk(u.left, under_prefix)
            if new is not None:
                return type(u)(new, u.right)
            new = walk(u.right, under_prefix)
            if new is not None:
                return type(u)(u.left, new)
            return None
        if isinstance(u, Encap):
            new = walk(u.body, under_prefix)
            if new is not None:
                return Encap(u.blocked, new)
            return None
        if isinstance(u, (Si, PosSi)):
            for pos, a in enumerate(u.args):
                new = walk(a, under_prefix)
                if new is not None:
                    args = u.args[:pos] + (new,) + u.args[pos + 1:]
                    if isinstance(u, Si):
                        return Si(u.hist, u.state, args)
                    return PosSi(u.index, u.hist, u.state, args)
            return None
        raise TypeError(f"not a term: {u!r}")

    return walk(t, False)


def check_guarded(spec: RecSpec, rewrite_budget: int = 1000) -> GuardednessReport:
    """Classify every equation of ``spec``.

    ``rewrite_budget`` bounds the total number of rewrite/unfold steps
    spent per equation; the search is sound but incomplete, so
    NOT_SHOWN_GUARDED does not prove unguardedness.
    """
    if rewrite_budget < 1:
        raise ValueError("rewrite budget must be positive")
    entries = []
    for var, body in spec.equations:
        if is_syntactically_guarded(body):
            entries.append(EquationReport(var, Guardedness.SYNTACTICALLY_GUARDED))
            continue
        t = body
        steps = 0
        status = Guardedness.NOT_SHOWN_GUARDED
        witness: Term | None = None
        while steps < rewrite_budget:
            nxt = _simplify_once(t)
            if nxt is None:
                nxt = _unfold_one_unguarded(t, var, spec)
            if nxt is None:
                break
            t = nxt
            steps += 1
            if is_syntactically_guarded(t):
                status = Guardedness.GUARDED_AFTER_REWRITING
                witness = t
                break
        entries.append(EquationReport(var, status, witness, steps))
    return GuardednessReport(tuple(entries))
