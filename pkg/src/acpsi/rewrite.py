"""Axiom-driven term transformation.

``head_normal_form`` rewrites a closed term into the dispatch shape
``a1 . t1 + ... + am . tm (+ eps)`` — or inaction when the list is empty
and there is no termination summand — using the algebraic laws oriented
left to right plus unfolding of recursion constants.  Successor terms are
kept in exactly the shape the operational rules produce, so the head
structure of a term and its one-step transitions can be compared
directly.

``eliminate`` expands a term with finite behavior all the way down into a
basic term over inaction, termination, actions, alternative and
sequential composition only.  ``canonical_basic_form`` computes the
unique representative of a basic term's strong-bisimulation class, which
makes equality of closed basic terms decidable by comparison.
``reduce_spec`` linearizes any finite-behavior term (cyclic behaviors
included) into a guarded recursive specification whose bodies use only
action prefixes, alternatives, termination and inaction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import BudgetExceeded, UndeclaredAction, UnguardedRecursion
from .kernel.config import (ActionKind, DeadlockMode, SystemConfig,
                            create_act_name)
from .kernel.hist import hist_extend
from .kernel.terms import (Act, Alt, CommMerge, Delta, Encap, Epsilon,
                           LeftMerge, Par, PosSi, RecConst, RecSpec, Seq, Si,
                           Term, Var, alt_of, is_basic, is_closed, substitute,
                           term_sort_key)
from .sos import _state_key
from .strategy.base import Outcome, StrategyInstance


@dataclass(frozen=True)
class Hnf:
    """Head normal form: action summands plus an optional termination
    summand.  Empty with no termination summand denotes inaction."""

    summands: tuple[tuple[str, Term], ...]
    has_epsilon: bool

    def __post_init__(self) -> None:
        keys = [(a, term_sort_key(t)) for a, t in self.summands]
        if keys != sorted(set(keys)):
            raise ValueError("summands must be sorted and duplicate-free")

    @property
    def is_empty(self) -> bool:
        return not self.summands and not self.has_epsilon

    def to_term(self) -> Term:
        parts: list[Term] = [Seq(Act(a), t) for a, t in self.summands]
        if self.has_epsilon:
            parts.append(Epsilon())
        return alt_of(parts)


_EMPTY_HNF = Hnf((), False)
_EPS_HNF = Hnf((), True)


def _mk_hnf(summands: set[tuple[str, Term]], has_epsilon: bool) -> Hnf:
    ordered = tuple(sorted(set(summands),
                           key=lambda m: (m[0], term_sort_key(m[1]))))
    return Hnf(ordered, has_epsilon)


class _HnfCtx:
    def __init__(self, cfg: SystemConfig, strat: StrategyInstance, budget: int):
        self.cfg = cfg
        self.strat = strat
        self.budget = budget
        self._busy: set[RecConst] = set()
        self._memo: dict[RecConst, Hnf] = {}

    def tick(self) -> None:
        self.budget -= 1
        if self.budget < 0:
            raise BudgetExceeded("head normalization ran out of budget")

    def kind(self, a: str) -> ActionKind:
        decl = self.cfg.alphabet.get(a)
        if decl is None:
            raise UndeclaredAction(f"action {a} is not declared in the alphabet")
        return decl.kind

    def hnf(self, t: Term) -> Hnf:
        self.tick()
        if isinstance(t, Delta):
            return _EMPTY_HNF
        if isinstance(t, Epsilon):
            return _EPS_HNF
        if isinstance(t, Act):
            self.kind(t.name)
            return Hnf(((t.name, Epsilon()),), False)
        if isinstance(t, Alt):
            l = self.hnf(t.left)
            r = self.hnf(t.right)
            return _mk_hnf(set(l.summands) | set(r.summands),
                           l.has_epsilon or r.has_epsilon)
        if isinstance(t, Seq):
            l = self.hnf(t.left)
            out = {(a, Seq(x2, t.right)) for a, x2 in l.summands}
            eps = False
            if l.has_epsilon:  # eps . y = y
                r = self.hnf(t.right)
                out |= set(r.summands)
                eps = r.has_epsilon
            return _mk_hnf(out, eps)
        if isinstance(t, Par):
            # expansion law: left steps, right steps, synchronizations, and a
            # termination summand exactly when both halves have one
            l = self.hnf(t.left)
            r = self.hnf(t.right)
            out = {(a, Par(x2, t.right)) for a, x2 in l.summands}
            out |= {(b, Par(t.left, y2)) for b, y2 in r.summands}
            gamma = self.cfg.comm.gamma
            for a, x2 in l.summands:
                for b, y2 in r.summands:
                    c = gamma(a, b)
                    if c is not None:
                        out.add((c, Par(x2, y2)))
            return _mk_hnf(out, l.has_epsilon and r.has_epsilon)
        if isinstance(t, LeftMerge):
            l = self.hnf(t.left)
            return _mk_hnf({(a, Par(x2, t.right)) for a, x2 in l.summands}, False)
        if isinstance(t, CommMerge):
            l = self.hnf(t.left)
            r = self.hnf(t.right)
            gamma = self.cfg.comm.gamma
            out = set()
            for a, x2 in l.summands:
                for b, y2 in r.summands:
                    c = gamma(a, b)
                    if c is not None:
                        out.add((c, Par(x2, y2)))
            return _mk_hnf(out, False)
        if isinstance(t, Encap):
            inner = self.hnf(t.body)
            kept = {(a, Encap(t.blocked, x2)) for a, x2 in inner.summands
                    if a not in t.blocked}
            return _mk_hnf(kept, inner.has_epsilon)
        if isinstance(t, RecConst):
            hit = self._memo.get(t)
            if hit is not None:
                return hit
            if t in self._busy:
                raise UnguardedRecursion(
                    f"<{t.var}|...> unfolds to itself without exposing a prefix")
            self._busy.add(t)
            try:
                out = self.hnf(unfold(t))
            finally:
                self._busy.discard(t)
            self._memo[t] = out
            return out
        if isinstance(t, Si):
            n = t.n
            i = self.strat.sched(n, t.hist, t.state)
            if i is None or not (1 <= i <= n):
                return _EMPTY_HNF  # scheduler yields nobody: inaction
            return self._turn_hnf(t.args, t.hist, t.state, i)
        if isinstance(t, PosSi):
            return self._turn_hnf(t.args, t.hist, t.state, t.index)
        if isinstance(t, Var):
            raise ValueError(f"open term has no head normal form: {t!r}")
        raise TypeError(f"not a term: {t!r}")

    def _turn_hnf(self, args: tuple[Term, ...], h, s: Any, i: int) -> Hnf:
        n = len(args)
        strat = self.strat
        inner = self.hnf(args[i - 1])
        out: set[tuple[str, Term]] = set()
        eps = False
        for a, x2 in inner.summands:
            kind = self.kind(a)
            if kind is ActionKind.CREATE_REQUEST:
                datum = self.cfg.alphabet[a].ref
                body = self.cfg.creation.get(datum)
                if body is None:
                    raise UndeclaredAction(
                        f"creation request {a} has no configured process body")
                new_args = args[:i - 1] + (x2,) + args[i:] + (body,)
                out.add((create_act_name(datum),
                         Si(hist_extend(h, i, n + 1),
                            strat.updat(n, h, s, i, a), new_args)))
            elif kind is ActionKind.CREATE_ACT:
                continue
            elif strat.is_control(a):
                new_args = args[:i - 1] + (x2,) + args[i:]
                out.add((strat.bar_of(a),
                         Si(hist_extend(h, i, n),
                            strat.updat(n, h, s, i, a), new_args)))
            else:
                new_args = args[:i - 1] + (x2,) + args[i:]
                out.add((a, Si(hist_extend(h, i, n),
                               strat.updat(n, h, s, i, a), new_args)))
        if inner.has_epsilon:
            if n == 1:
                eps = True
            else:
                contracted = self._contracted(args, h, s, i, Outcome.EPS)
                sub = self.hnf(contracted)
                out |= set(sub.summands)
                eps = eps or sub.has_epsilon
        if inner.is_empty and n >= 2 \
                and self.cfg.deadlock_mode is DeadlockMode.DEFERRED:
            # drop the stuck process but forfeit overall termination
            doomed = Seq(self._contracted(args, h, s, i, Outcome.DELTA), Delta())
            sub = self.hnf(doomed)
            out |= set(sub.summands)
            eps = eps or sub.has_epsilon
        return _mk_hnf(out, eps)

    def _contracted(self, args: tuple[Term, ...], h, s: Any, i: int,
                    event: Outcome) -> Si:
        n = len(args)
        rest = args[:i - 1] + args[i:]
        return Si(hist_extend(h, i, n - 1),
                  self.strat.updat(n, h, s, i, event), rest)


def head_normal_form(t: Term, cfg: SystemConfig, strat: StrategyInstance, *,
                     budget: int = 1_000_000) -> Hnf:
    """Head normal form of closed ``t``; provably equal to ``t`` and with
    the same one-step head structure as the operational semantics."""
    if not is_closed(t):
        raise ValueError("head_normal_form needs a closed term")
    return _HnfCtx(cfg, strat, budget).hnf(t)


def unfold(rc: RecConst) -> Term:
    """Body of the constant's equation with every specification variable
    replaced by its constant."""
    spec = rc.spec
    return substitute(spec.body(rc.var),
                      {v: RecConst(v, spec) for v in spec.vars})


# ---------------------------------------------------------------------------
# Elimination into basic terms

def eliminate(t: Term, cfg: SystemConfig, strat: StrategyInstance, *,
              max_states: int = 100_000, budget: int = 1_000_000) -> Term:
    """A basic term provably equal to closed ``t``.

    The behavior must be finite as a tree: encountering the same
    (digest-quotiented) configuration again along one expansion path means
    the behavior is cyclic and no basic term exists; that and oversize
    behaviors raise BudgetExceeded.  Cyclic behaviors are the job of
    ``reduce_spec``.
    """
    if not is_closed(t):
        raise ValueError("eliminate needs a closed term")
    ctx = _HnfCtx(cfg, strat, budget)
    dig = strat.hist_digest
    seen: dict[tuple, Term] = {}
    on_path: set[tuple] = set()
    count = 0

    def expand(u: Term) -> Term:
        nonlocal count
        key = _state_key(u, dig)
        hit = seen.get(key)
        if hit is not None:
            return hit
        if key in on_path:
            raise BudgetExceeded(
                "cyclic behavior: no basic term exists (use reduce_spec)")
        count += 1
        if count > max_states:
            raise BudgetExceeded("behavior too large to eliminate")
        on_path.add(key)
        try:
            head = ctx.hnf(u)
            expanded = [(a, expand(succ)) for a, succ in head.summands]
            expanded.sort(key=lambda m: (m[0], term_sort_key(m[1])))
            parts: list[Term] = [Act(a) if isinstance(body, Epsilon)
                                 else Seq(Act(a), body)
                                 for a, body in expanded]
            if head.has_epsilon:
                parts.append(Epsilon())
            result = alt_of(parts) if parts else Delta()
        finally:
            on_path.discard(key)
        seen[key] = result
        return result

    return expand(t)


def canonical_basic_form(t: Term) -> Term:
    """The unique representative of a basic term's strong-bisimulation
    class.  Two closed basic terms are bisimilar exactly when their
    canonical forms are structurally equal."""
    if not is_basic(t):
        raise ValueError("canonical_basic_form needs a basic term "
                         "(inaction, termination, actions, + and . only)")
    memo: dict[Term, tuple[bool, frozenset[tuple[str, Term]]]] = {}

    def heads(u: Term) -> tuple[bool, frozenset[tuple[str, Term]]]:
        """(can terminate, set of (action, canonical successor))."""
        hit = memo.get(u)
        if hit is not None:
            return hit
        if isinstance(u, Delta):
            out = (False, frozenset())
        elif isinstance(u, Epsilon):
            out = (True, frozenset())
        elif isinstance(u, Act):
            out = (False, frozenset(((u.name, Epsilon()),)))
        elif isinstance(u, Alt):
            le, ls = heads(u.left)
            re, rs = heads(u.right)
            out = (le or re, ls | rs)
        elif isinstance(u, Seq):
            le, ls = heads(u.left)
            moved = frozenset((a, rebuild(heads_of_seq(x2, u.right)))
                              for a, x2 in ls)
            if le:
                re, rs = heads(u.right)
                out = (re, moved | rs)
            else:
                out = (False, moved)
        else:
            raise ValueError(f"not a basic term: {u!r}")
        memo[u] = out
        return out

    def heads_of_seq(x: Term, y: Term) -> tuple[bool, frozenset[tuple[str, Term]]]:
        return heads(Seq(x, y)) if not isinstance(x, Epsilon) else heads(y)

    def rebuild(h: tuple[bool, frozenset[tuple[str, Term]]]) -> Term:
        eps, summands = h
        parts = []
        for a, succ in sorted(summands, key=lambda m: (m[0], term_sort_key(m[1]))):
            parts.append(Act(a) if isinstance(succ, Epsilon) else Seq(Act(a), succ))
        if eps:
            if not parts:
                return Epsilon()
            parts.append(Epsilon())
        return alt_of(parts)

    return rebuild(heads(t))


# ---------------------------------------------------------------------------
# Reduction to a plain guarded recursive specification

def reduce_spec(t: Term, cfg: SystemConfig, strat: StrategyInstance, *,
                max_states: int = 100_000, max_depth: int = 10_000,
                use_digest: bool = True) -> RecConst:
    """Linearize ``t`` into a guarded recursive specification over action
    prefixes, alternatives, termination and inaction, returned as the
    constant for its root variable.

    The reachable digest-quotiented configuration space must be finite
    within the budget.  Configurations are merged up to strong
    bisimilarity before equations are emitted, so the result is minimal.
    """
    from .analysis import partition_lts
    from .sos import build_lts

    lts = build_lts(t, cfg, strat, max_states=max_states, max_depth=max_depth,
                    use_digest=use_digest, require_complete=True)
    block_of = partition_lts(lts)

    # Name blocks in breadth-first order from the initial block.
    order: dict[int, int] = {}

    def name_of(block: int) -> str:
        if block not in order:
            order[block] = len(order)
        return f"Z{order[block]}"

    root = name_of(block_of[lts.init])
    pending = [block_of[lts.init]]
    done: set[int] = set()
    equations: dict[str, Term] = {}
    rep_state: dict[int, int] = {}
    for q in sorted(lts.states):
        rep_state.setdefault(block_of[q], q)

    while pending:
        block = pending.pop(0)
        if block in done:
            continue
        done.add(block)
        q = rep_state[block]
        succs = sorted({(label, block_of[dst]) for label, dst in lts.successors(q)})
        parts: list[Term] = []
        for label, dst_block in succs:
            parts.append(Seq(Act(label), Var(name_of(dst_block))))
            if dst_block not in done:
                pending.append(dst_block)
        if q in lts.terminating:
            parts.append(Epsilon())
        equations[name_of(block)] = alt_of(parts)

    return RecConst(root, RecSpec.of(equations))
