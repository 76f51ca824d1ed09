"""Round-robin scheduling with binary semaphores.

Each process is given a bounded run of consecutive turns, in cyclic
order, and may acquire (``P_r``) and release (``V_r``) binary
semaphores; these are the strategy's control actions.  The control
state is a finite partial map from semaphore names to queues of process
indices:

* ``r`` not in the map: semaphore ``r`` is free (value 1);
* ``r`` mapped to the empty queue: ``r`` is held and nobody waits;
* ``r`` mapped to a non-empty queue: a FIFO queue of the processes
  suspended on ``r``.

Suspended processes are skipped by the scheduler; when every process is
suspended no turn can be given and the interleaving is stuck.

Turn accounting has two conventions.  The defining clause for the
follow-up turn reads "give the last process another turn while its
*previous* streak is shorter than k", which in effect allows k+1
consecutive turns; that literal reading is ``AS_WRITTEN`` and is the
default.  ``PROSE`` counts the streak including the turn just taken, so
a process gets exactly k consecutive turns.  The two conventions differ
observably (see the trace tests), so both are provided.

A released-but-never-acquired ``V_r`` is a no-op by the update clauses
(identity when ``r`` is free); nothing guards against unbalanced use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from ..kernel.hist import Hist
from ..kernel.seqmap import (map_domain_subtract, map_empty, map_override,
                             maplet, seq_concat, seq_elems, seq_tl)
from .base import Outcome, StrategyInstance


class TurnsConvention(Enum):
    AS_WRITTEN = "as-written"
    PROSE = "prose"


P_PREFIX = "P_"
V_PREFIX = "V_"


def p_action(r: str) -> str:
    return P_PREFIX + r


def v_action(r: str) -> str:
    return V_PREFIX + r


@dataclass(frozen=True)
class SemState:
    """Immutable finite map from semaphore name to queue of process indices."""

    entries: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        names = [r for r, _ in self.entries]
        if names != sorted(names) or len(set(names)) != len(names):
            raise ValueError("semaphore state entries must be sorted and unique")

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[int]]) -> "SemState":
        return cls(tuple(sorted((r, tuple(q)) for r, q in mapping.items())))

    def to_dict(self) -> dict[str, tuple[int, ...]]:
        return dict(self.entries)

    def dom(self) -> frozenset[str]:
        return frozenset(r for r, _ in self.entries)

    def queue(self, r: str) -> tuple[int, ...]:
        for name, q in self.entries:
            if name == r:
                return q
        raise KeyError(r)

    def sort_key(self) -> tuple:
        return ("sem", self.entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{r}:{list(q)}" for r, q in self.entries)
        return "{" + inner + "}"


EMPTY_SEM_STATE = SemState(())


def sem_turns(h: Hist, i: int) -> int:
    """Length of the run of turns of process ``i`` at the end of ``h``."""
    count = 0
    for j, _ in reversed(h):
        if j != i:
            break
        count += 1
    return count


def sem_next(n: int, h: Hist, i: int, *, k: int,
             convention: TurnsConvention = TurnsConvention.AS_WRITTEN) -> int:
    """The process that should get the (i+1)-th next turn, ignoring
    suspension.

    Mirrors the defining clauses: on the empty history the candidate is
    ``i + 1``; otherwise the last process again while its streak is
    below ``k`` (streak measured per the convention), else rotate to
    ``((i + j) mod n) + 1``.  The first clause can produce a value
    above ``n``; callers treat an out-of-range result as "no turn".
    """
    if not h:
        return i + 1
    j, _ = h[-1]
    if convention is TurnsConvention.AS_WRITTEN:
        streak = sem_turns(h[:-1], j)
    else:
        streak = sem_turns(h, j)
    if streak < k:
        return j
    return ((i + j) % n) + 1


def sem_waiting(s: SemState) -> frozenset[int]:
    """Indices of processes suspended on at least one semaphore."""
    out: frozenset[int] = frozenset()
    for _, q in s.entries:
        out |= seq_elems(q)
    return out


def sem_sched(n: int, h: Hist, s: SemState, *, k: int,
              convention: TurnsConvention = TurnsConvention.AS_WRITTEN) -> int | None:
    """First non-suspended candidate; None after k*n skipped candidates."""
    waiting = sem_waiting(s)
    i = 0
    while i < k * n:
        cand = sem_next(n, h, i, k=k, convention=convention)
        if cand not in waiting:
            return cand
        i += 1
    return None


def _remove_queue(q: tuple[int, ...], i: int) -> tuple[int, ...]:
    if not q:
        return ()
    j, rest = q[0], q[1:]
    if j < i:
        return seq_concat((j,), _remove_queue(rest, i))
    if j == i:
        return _remove_queue(rest, i)
    return seq_concat((j - 1,), _remove_queue(rest, i))


def sem_remove(n: int, s: SemState, i: int) -> SemState:
    """State after process ``i`` leaves: drop it from every queue and
    renumber the processes behind it down by one.  Domains never change."""
    return SemState.of({r: _remove_queue(q, i) for r, q in s.entries})


def sem_updat(n: int, h: Hist, s: SemState, i: int, alpha,
              *, semaphores: frozenset[str]) -> SemState:
    """Control-state transformer for the semaphore strategy.

    Non-control actions (including creation actions and bar actions)
    reset the state to empty on the very first interleaving step and
    leave it alone afterwards.  ``P_r`` acquires or enqueues, ``V_r``
    releases or dequeues.  Termination removes the process; a stuck
    process dropped under deferred-deadlock semantics is removed the
    same way, because the remaining processes are renumbered identically.
    """
    if alpha is Outcome.EPS or alpha is Outcome.DELTA:
        return sem_remove(n, s, i)
    if not isinstance(alpha, str):
        raise TypeError(f"not an action or outcome: {alpha!r}")

    mapping = s.to_dict()
    if alpha.startswith(P_PREFIX) and alpha[len(P_PREFIX):] in semaphores:
        r = alpha[len(P_PREFIX):]
        if not h:
            return SemState.of(maplet(r, ()))
        if r not in mapping:
            return SemState.of(map_override(mapping, maplet(r, ())))
        return SemState.of(map_override(mapping, maplet(r, seq_concat(mapping[r], (i,)))))
    if alpha.startswith(V_PREFIX) and alpha[len(V_PREFIX):] in semaphores:
        r = alpha[len(V_PREFIX):]
        if not h:
            return SemState.of(map_empty())
        if r not in mapping:
            return s
        if not mapping[r]:
            return SemState.of(map_domain_subtract(mapping, {r}))
        return SemState.of(map_override(mapping, maplet(r, seq_tl(mapping[r]))))
    # any other action
    if not h:
        return EMPTY_SEM_STATE
    return s


def sem_digest(h: Hist, *, k: int) -> tuple:
    """Bounded history abstraction: emptiness, the last pair, and the
    previous streak of its process capped at ``k`` — exactly what the
    scheduling and update clauses can observe."""
    if not h:
        return ("empty", 0, 0, 0)
    j, m = h[-1]
    return ("last", j, m, min(sem_turns(h[:-1], j), k))


def sem_strategy(k: int, semaphores: Iterable[str],
                 convention: TurnsConvention = TurnsConvention.AS_WRITTEN
                 ) -> StrategyInstance:
    """Round-robin-with-semaphores strategy over semaphore names ``semaphores``
    with run length ``k``."""
    from ..kernel.config import bar_name

    names = frozenset(semaphores)
    if not names:
        raise ValueError("at least one semaphore name is required")
    if k < 1:
        raise ValueError("k must be positive")
    for r in names:
        if not r or not r[0].isalpha():
            raise ValueError(f"bad semaphore name: {r!r}")

    controls: dict[str, str] = {}
    for r in sorted(names):
        controls[p_action(r)] = bar_name(p_action(r))
        controls[v_action(r)] = bar_name(v_action(r))

    def sched(n: int, h: Hist, s: SemState) -> int | None:
        return sem_sched(n, h, s, k=k, convention=convention)

    def updat(n: int, h: Hist, s: SemState, i: int, alpha) -> SemState:
        return sem_updat(n, h, s, i, alpha, semaphores=names)

    def digest(h: Hist) -> tuple:
        return sem_digest(h, k=k)

    return StrategyInstance(
        name="rr-semaphore",
        sched=sched,
        updat=updat,
        control_actions=controls,
        initial_state=EMPTY_SEM_STATE,
        hist_digest=digest,
    )
