"""Structural operational semantics and transition-system construction.

``step`` computes the one-step transitions of a closed term, ``terminates``
the successful-termination predicate, and ``build_lts`` the breadth-first
finite unfolding of both into a labelled transition system.

Rules for the core operators: termination can only do ``eps``; an action
constant performs itself and terminates; alternatives offer both sides'
moves; sequencing runs the left argument and, once it can terminate, the
right one; parallel composition interleaves both sides and synchronizes
pairs the communication function relates; left merge forces a first step
on the left; communication merge forces a first synchronization; neither
merge can terminate on its own; encapsulation blocks the listed labels.

For the interleaving operators, only the scheduled argument may move (for
the positional operator, the pinned one).  A move by a plain action keeps
the label; a move by a control action is relabelled to its bar action; a
creation request spawns the configured process as a new last argument and
shows up as the creation act.  Creation-act prefixes have no rule, so a
process performing one directly under an interleaving operator is stuck.
When the scheduled argument can terminate, the whole behaves additionally
as the contracted interleaving of the remaining arguments (the history
records the departure and the control state is updated for it).  When the
scheduler yields no process — or an index outside 1..n, which the built-in
semaphore scheduler can produce right after a termination — the whole is
stuck.

A stuck *scheduled argument* is handled per the configured deadlock mode:
immediately stuck in IMMEDIATE mode; in DEFERRED mode the stuck process is
dropped like a terminated one and the contracted system runs on, but
sequenced with inaction so that overall termination is forfeit ("doomed"
states are simply terms of the shape ``t . delta``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable

from .errors import BudgetExceeded, UndeclaredAction, UnguardedRecursion
from .kernel.config import (ActionKind, DeadlockMode, SystemConfig,
                            create_act_name)
from .kernel.hist import Hist, hist_extend
from .kernel.terms import (Act, Alt, CommMerge, Delta, Encap, Epsilon,
                           LeftMerge, Par, PosSi, RecConst, RecSpec, Seq, Si,
                           Term, Var, is_closed, substitute, term_sort_key)
from .strategy.base import Outcome, StrategyInstance

Move = tuple[str, Term]

DEFAULT_MAX_STATES = 100_000
DEFAULT_MAX_DEPTH = 10_000


def _unfold(rc: RecConst) -> Term:
    spec = rc.spec
    return substitute(spec.body(rc.var),
                      {v: RecConst(v, spec) for v in spec.vars})


class _Ctx:
    """Evaluation context: config, strategy, and per-run memo tables."""

    def __init__(self, cfg: SystemConfig, strat: StrategyInstance):
        self.cfg = cfg
        self.strat = strat
        self.move_memo: dict[RecConst, frozenset[Move]] = {}
        self.term_memo: dict[RecConst, bool] = {}
        self._moves_busy: set[RecConst] = set()
        self._term_busy: set[RecConst] = set()

    # -- scheduling helpers

    def scheduled(self, n: int, h: Hist, s: Any) -> int | None:
        """The scheduler's choice, with out-of-range results treated as
        undefined (the scheduler's codomain is 1..n)."""
        i = self.strat.sched(n, h, s)
        if i is None or not (1 <= i <= n):
            return None
        return i

    def kind(self, a: str) -> ActionKind:
        decl = self.cfg.alphabet.get(a)
        if decl is None:
            raise UndeclaredAction(f"action {a} is not declared in the alphabet")
        return decl.kind

    # -- transitions

    def moves(self, t: Term) -> frozenset[Move]:
        if isinstance(t, (Delta, Epsilon)):
            return frozenset()
        if isinstance(t, Act):
            self.kind(t.name)  # declaredness check
            return frozenset(((t.name, Epsilon()),))
        if isinstance(t, Alt):
            return self.moves(t.left) | self.moves(t.right)
        if isinstance(t, Seq):
            out = {(a, Seq(x2, t.right)) for a, x2 in self.moves(t.left)}
            if self.terminates(t.left):
                out |= self.moves(t.right)
            return frozenset(out)
        if isinstance(t, Par):
            lm = self.moves(t.left)
            rm = self.moves(t.right)
            out = {(a, Par(x2, t.right)) for a, x2 in lm}
            out |= {(b, Par(t.left, y2)) for b, y2 in rm}
            gamma = self.cfg.comm.gamma
            for a, x2 in lm:
                for b, y2 in rm:
                    c = gamma(a, b)
                    if c is not None:
                        out.add((c, Par(x2, y2)))
            return frozenset(out)
        if isinstance(t, LeftMerge):
            return frozenset((a, Par(x2, t.right)) for a, x2 in self.moves(t.left))
        if isinstance(t, CommMerge):
            out = set()
            gamma = self.cfg.comm.gamma
            for a, x2 in self.moves(t.left):
                for b, y2 in self.moves(t.right):
                    c = gamma(a, b)
                    if c is not None:
                        out.add((c, Par(x2, y2)))
            return frozenset(out)
        if isinstance(t, Encap):
            return frozenset((a, Encap(t.blocked, x2))
                             for a, x2 in self.moves(t.body)
                             if a not in t.blocked)
        if isinstance(t, RecConst):
            hit = self.move_memo.get(t)
            if hit is not None:
                return hit
            if t in self._moves_busy:
                raise UnguardedRecursion(
                    f"<{t.var}|...> unfolds to itself without performing an action")
            self._moves_busy.add(t)
            try:
                out = self.moves(_unfold(t))
            finally:
                self._moves_busy.discard(t)
            self.move_memo[t] = out
            return out
        if isinstance(t, Si):
            i = self.scheduled(t.n, t.hist, t.state)
            if i is None:
                return frozenset()
            return self._turn_moves(t.args, t.hist, t.state, i)
        if isinstance(t, PosSi):
            return self._turn_moves(t.args, t.hist, t.state, t.index)
        if isinstance(t, Var):
            raise ValueError(f"open term has no transitions: {t!r}")
        raise TypeError(f"not a term: {t!r}")

    def _turn_moves(self, args: tuple[Term, ...], h: Hist, s: Any,
                    i: int) -> frozenset[Move]:
        n = len(args)
        strat = self.strat
        x = args[i - 1]
        x_moves = self.moves(x)
        x_term = self.terminates(x)
        out: set[Move] = set()
        for a, x2 in x_moves:
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
                continue  # no rule: creation acts cannot be replayed under interleaving
            elif strat.is_control(a):
                new_args = args[:i - 1] + (x2,) + args[i:]
                out.add((strat.bar_of(a),
                         Si(hist_extend(h, i, n),
                            strat.updat(n, h, s, i, a), new_args)))
            else:
                new_args = args[:i - 1] + (x2,) + args[i:]
                out.add((a, Si(hist_extend(h, i, n),
                               strat.updat(n, h, s, i, a), new_args)))
        if x_term and n >= 2:
            out |= self.moves(self._contracted(args, h, s, i, Outcome.EPS))
        if (not x_moves and not x_term
                and self.cfg.deadlock_mode is DeadlockMode.DEFERRED and n >= 2):
            doomed = Seq(self._contracted(args, h, s, i, Outcome.DELTA), Delta())
            out |= self.moves(doomed)
        return frozenset(out)

    def _contracted(self, args: tuple[Term, ...], h: Hist, s: Any, i: int,
                    event: Outcome) -> Si:
        n = len(args)
        rest = args[:i - 1] + args[i:]
        return Si(hist_extend(h, i, n - 1),
                  self.strat.updat(n, h, s, i, event), rest)

    # -- termination predicate

    def terminates(self, t: Term) -> bool:
        if isinstance(t, Epsilon):
            return True
        if isinstance(t, (Delta, Act)):
            return False
        if isinstance(t, Alt):
            return self.terminates(t.left) or self.terminates(t.right)
        if isinstance(t, (Seq, Par)):
            return self.terminates(t.left) and self.terminates(t.right)
        if isinstance(t, (LeftMerge, CommMerge)):
            return False
        if isinstance(t, Encap):
            return self.terminates(t.body)
        if isinstance(t, RecConst):
            hit = self.term_memo.get(t)
            if hit is not None:
                return hit
            if t in self._term_busy:
                raise UnguardedRecursion(
                    f"<{t.var}|...> unfolds to itself without performing an action")
            self._term_busy.add(t)
            try:
                out = self.terminates(_unfold(t))
            finally:
                self._term_busy.discard(t)
            self.term_memo[t] = out
            return out
        if isinstance(t, Si):
            i = self.scheduled(t.n, t.hist, t.state)
            if i is None:
                return False
            if not self.terminates(t.args[i - 1]):
                return False
            if t.n == 1:
                return True
            return self.terminates(self._contracted(t.args, t.hist, t.state,
                                                    i, Outcome.EPS))
        if isinstance(t, PosSi):
            if not self.terminates(t.args[t.index - 1]):
                return False
            if t.n == 1:
                return True
            return self.terminates(self._contracted(t.args, t.hist, t.state,
                                                    t.index, Outcome.EPS))
        if isinstance(t, Var):
            raise ValueError(f"open term: {t!r}")
        raise TypeError(f"not a term: {t!r}")


def step(t: Term, cfg: SystemConfig, strat: StrategyInstance) -> frozenset[Move]:
    """One-step transitions of closed term ``t``: a set of (label, successor)."""
    if not is_closed(t):
        raise ValueError("step needs a closed term")
    return _Ctx(cfg, strat).moves(t)


def terminates(t: Term, cfg: SystemConfig, strat: StrategyInstance) -> bool:
    """True iff ``t`` can terminate successfully right now."""
    if not is_closed(t):
        raise ValueError("terminates needs a closed term")
    return _Ctx(cfg, strat).terminates(t)


# ---------------------------------------------------------------------------
# State identity

def _state_key(t: Term, dig: Callable[[Hist], Hashable] | None) -> tuple:
    """Hashable identity of a term as an exploration state.

    Same total order encoding as ``term_sort_key``, except alternative
    composition is normalized in key space (flatten, drop inaction, sort,
    deduplicate) and histories are replaced by their digest when the
    strategy provides one and digesting is on.
    """
    if isinstance(t, Delta):
        return ("0delta",)
    if isinstance(t, Epsilon):
        return ("1eps",)
    if isinstance(t, Act):
        return ("2act", t.name)
    if isinstance(t, Seq):
        return ("3seq", _state_key(t.left, dig), _state_key(t.right, dig))
    if isinstance(t, Alt):
        branches: list[Term] = []
        _flatten(t, branches)
        keys = sorted({_state_key(b, dig) for b in branches} - {("0delta",)})
        if not keys:
            return ("0delta",)
        if len(keys) == 1:
            return keys[0]
        return ("4alt", tuple(keys))
    if isinstance(t, Par):
        return ("5par", _state_key(t.left, dig), _state_key(t.right, dig))
    if isinstance(t, LeftMerge):
        return ("6lm", _state_key(t.left, dig), _state_key(t.right, dig))
    if isinstance(t, CommMerge):
        return ("7cm", _state_key(t.left, dig), _state_key(t.right, dig))
    if isinstance(t, Encap):
        return ("8encap", tuple(sorted(t.blocked)), _state_key(t.body, dig))
    if isinstance(t, Si):
        h: Hashable = dig(t.hist) if dig is not None else t.hist
        return ("9si", len(t.args), h, _opaque(t.state),
                tuple(_state_key(a, dig) for a in t.args))
    if isinstance(t, PosSi):
        h = dig(t.hist) if dig is not None else t.hist
        return ("9pos", len(t.args), t.index, h, _opaque(t.state),
                tuple(_state_key(a, dig) for a in t.args))
    if isinstance(t, RecConst):
        return ("Arec", t.var,
                tuple((v, term_sort_key(b)) for v, b in t.spec.equations))
    if isinstance(t, Var):
        return ("Bvar", t.name)
    raise TypeError(f"not a term: {t!r}")


def _flatten(t: Term, out: list[Term]) -> None:
    if isinstance(t, Alt):
        _flatten(t.left, out)
        _flatten(t.right, out)
    else:
        out.append(t)


def _opaque(state: Any) -> tuple:
    sk = getattr(state, "sort_key", None)
    if callable(sk):
        return sk()
    return ("opaque", type(state).__name__, repr(state))


# ---------------------------------------------------------------------------
# Labelled transition systems

@dataclass
class Lts:
    """A finite labelled transition system with a termination predicate.

    ``truncated`` holds the states whose successors were cut by a budget;
    they have no outgoing edges even if their term has transitions.
    ``state_term`` maps each state to the first-reached representative
    term (None for systems re-imported from serialized form).
    """

    init: int
    states: frozenset[int]
    edges: tuple[tuple[int, str, int], ...]
    terminating: frozenset[int]
    truncated: frozenset[int] = frozenset()
    state_term: dict[int, Term] | None = None
    _succ: dict[int, tuple[tuple[str, int], ...]] | None = field(
        default=None, repr=False, compare=False)

    @property
    def num_states(self) -> int:
        return len(self.states)

    def successors(self, q: int) -> tuple[tuple[str, int], ...]:
        if self._succ is None:
            table: dict[int, list[tuple[str, int]]] = {q: [] for q in self.states}
            for src, label, dst in self.edges:
                table[src].append((label, dst))
            self._succ = {q: tuple(sorted(set(v))) for q, v in table.items()}
        return self._succ[q]

    def labels(self) -> frozenset[str]:
        return frozenset(label for _, label, _ in self.edges)

    def is_deadlock(self, q: int) -> bool:
        return not self.successors(q) and q not in self.terminating


def build_lts(t: Term, cfg: SystemConfig, strat: StrategyInstance, *,
              max_states: int = DEFAULT_MAX_STATES,
              max_depth: int = DEFAULT_MAX_DEPTH,
              use_digest: bool = True,
              require_complete: bool = False) -> Lts:
    """Breadth-first closure of ``step``/``terminates`` from ``t``.

    States are identified by the digest-quotiented canonical key; without
    a digest (or with ``use_digest=False``) raw histories are part of the
    identity, and cyclic behaviors may then exhaust the budget.  With
    ``require_complete`` a truncation raises instead of marking states.
    """
    if not is_closed(t):
        raise ValueError("build_lts needs a closed term")
    ctx = _Ctx(cfg, strat)
    dig = strat.hist_digest if use_digest else None

    ids: dict[tuple, int] = {}
    rep: dict[int, Term] = {}
    depth: dict[int, int] = {}
    terminating: set[int] = set()
    truncated: set[int] = set()
    edges: list[tuple[int, str, int]] = []

    frontier: deque[int] = deque()

    def intern(u: Term, d: int) -> int | None:
        key = _state_key(u, dig)
        hit = ids.get(key)
        if hit is not None:
            return hit
        if len(ids) >= max_states:
            return None
        q = len(ids)
        ids[key] = q
        rep[q] = u
        depth[q] = d
        if ctx.terminates(u):
            terminating.add(q)
        frontier.append(q)
        return q

    q0 = intern(t, 0)
    assert q0 is not None
    while frontier:
        q = frontier.popleft()
        if depth[q] >= max_depth:
            truncated.add(q)
            continue
        moves = sorted(ctx.moves(rep[q]),
                       key=lambda m: (m[0], term_sort_key(m[1])))
        for label, succ in moves:
            q2 = intern(succ, depth[q] + 1)
            if q2 is None:
                truncated.add(q)
                continue
            edges.append((q, label, q2))

    if require_complete and truncated:
        raise BudgetExceeded(
            f"exploration truncated at {len(ids)} states (budget "
            f"max_states={max_states}, max_depth={max_depth})")

    return Lts(init=q0,
               states=frozenset(range(len(ids))),
               edges=tuple(edges),
               terminating=frozenset(terminating),
               truncated=frozenset(truncated),
               state_term=rep)
