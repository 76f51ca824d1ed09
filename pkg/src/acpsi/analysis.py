"""Analyses over finite labelled transition systems.

Strong bisimilarity is decided by signature-based partition refinement;
a deliberately naive greatest-fixpoint checker is kept alongside as an
independent oracle for testing.  Termination flags are part of state
identity throughout: states can only be related when they agree on the
ability to terminate successfully.

Mutual exclusion is checked over instrumented programs: the caller names,
per protected region, the enter/exit actions of each process position,
and the checker reports every reachable way a second position can enter
before the first has exited.  Deadlock detection reports reachable states
with no outgoing transitions and no termination, each with a shortest
witness trace (ties broken lexicographically by label).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import TruncatedInput
from .sos import Lts


# ---------------------------------------------------------------------------
# Strong bisimulation

def partition_lts(lts: Lts) -> dict[int, int]:
    """Coarsest strong-bisimulation partition; returns state -> block id.

    Blocks start split by the termination flag and are refined by
    (label, successor block) signatures until stable.
    """
    block: dict[int, int] = {q: (1 if q in lts.terminating else 0)
                             for q in lts.states}
    while True:
        sigs: dict[tuple, int] = {}
        nxt: dict[int, int] = {}
        for q in sorted(lts.states):
            sig = (block[q],
                   frozenset((label, block[dst]) for label, dst in lts.successors(q)))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            nxt[q] = sigs[sig]
        if len(set(nxt.values())) == len(set(block.values())):
            return nxt
        block = nxt


def _union(l1: Lts, l2: Lts) -> tuple[Lts, int, int]:
    offset = (max(l1.states) + 1) if l1.states else 0
    states = frozenset(l1.states) | frozenset(q + offset for q in l2.states)
    edges = tuple(l1.edges) + tuple((a + offset, lbl, b + offset)
                                    for a, lbl, b in l2.edges)
    terminating = frozenset(l1.terminating) | frozenset(
        q + offset for q in l2.terminating)
    combined = Lts(init=l1.init, states=states, edges=edges,
                   terminating=terminating)
    return combined, l1.init, l2.init + offset


def _check_untruncated(l1: Lts, l2: Lts) -> None:
    if l1.truncated or l2.truncated:
        raise TruncatedInput(
            "bisimilarity needs complete transition systems; "
            "rebuild with a larger budget")


def bisimilar(l1: Lts, l2: Lts) -> bool:
    """True iff the initial states of the two systems are strongly bisimilar."""
    _check_untruncated(l1, l2)
    combined, i1, i2 = _union(l1, l2)
    block = partition_lts(combined)
    return block[i1] == block[i2]


def bisimilar_naive(l1: Lts, l2: Lts) -> bool:
    """Greatest-fixpoint bisimilarity check (the slow reference oracle).

    Starts from all pairs that agree on termination and repeatedly deletes
    pairs where one side has a move the other cannot match into a
    surviving pair.
    """
    _check_untruncated(l1, l2)
    combined, i1, i2 = _union(l1, l2)
    states = sorted(combined.states)
    succ = {q: combined.successors(q) for q in states}
    related = {(p, q) for p in states for q in states
               if (p in combined.terminating) == (q in combined.terminating)}

    def matched(p: int, q: int) -> bool:
        for label, p2 in succ[p]:
            if not any(lbl == label and (p2, q2) in related for lbl, q2 in succ[q]):
                return False
        for label, q2 in succ[q]:
            if not any(lbl == label and (p2, q2) in related for lbl, p2 in succ[p]):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in sorted(related):
            if not matched(*pair):
                related.discard(pair)
                changed = True
    return (i1, i2) in related


# ---------------------------------------------------------------------------
# Traces

class TraceOutcome(Enum):
    TERMINATED = "terminated"
    DEADLOCKED = "deadlocked"
    CUT = "cut"


def maximal_traces(lts: Lts, depth: int) -> frozenset[tuple[tuple[str, ...], TraceOutcome]]:
    """All action sequences from the initial state that end in a state
    without outgoing edges (classified by its termination flag), plus the
    prefixes cut at ``depth``."""
    if depth < 1:
        raise ValueError("depth must be positive")
    out: set[tuple[tuple[str, ...], TraceOutcome]] = set()
    stack: list[tuple[int, tuple[str, ...]]] = [(lts.init, ())]
    while stack:
        q, trace = stack.pop()
        succs = lts.successors(q)
        if not succs:
            outcome = (TraceOutcome.TERMINATED if q in lts.terminating
                       else TraceOutcome.DEADLOCKED)
            out.add((trace, outcome))
            continue
        if len(trace) >= depth:
            out.add((trace, TraceOutcome.CUT))
            continue
        for label, dst in succs:
            stack.append((dst, trace + (label,)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Mutual exclusion

@dataclass(frozen=True)
class MutexRegion:
    """Instrumentation of one protected region.

    ``enter_actions``/``exit_actions`` map process positions to the plain
    actions that mark entry into and exit from the region for that
    position; all these actions must be pairwise distinct.
    """

    semaphore: str
    enter_actions: tuple[tuple[int, str], ...]
    exit_actions: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        names = [a for _, a in self.enter_actions] + [a for _, a in self.exit_actions]
        if len(set(names)) != len(names):
            raise ValueError("region enter/exit actions must be pairwise distinct")
        if sorted(p for p, _ in self.enter_actions) != sorted(
                p for p, _ in self.exit_actions):
            raise ValueError("every position needs both an enter and an exit action")

    @classmethod
    def of(cls, semaphore: str, enter: Mapping[int, str],
           exit: Mapping[int, str]) -> "MutexRegion":
        return cls(semaphore,
                   tuple(sorted(enter.items())),
                   tuple(sorted(exit.items())))

    def entering(self, label: str) -> int | None:
        for p, a in self.enter_actions:
            if a == label:
                return p
        return None

    def leaving(self, label: str) -> int | None:
        for p, a in self.exit_actions:
            if a == label:
                return p
        return None


class ViolationKind(Enum):
    MUTEX_OVERLAP = "mutex-overlap"
    DEADLOCK = "deadlock"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: tuple[str, ...]
    state: int

    def __str__(self) -> str:
        trace = " ".join(self.witness) if self.witness else "<empty>"
        return f"{self.kind.value} after [{trace}] in state {self.state}"


def check_mutex(lts: Lts, regions: Iterable[MutexRegion],
                depth: int = 10_000) -> list[Violation]:
    """Report every reachable overlap of region occupancy.

    Explores the product of the transition system with the region
    occupancy sets breadth-first (equivalent to scanning all maximal
    traces but without path explosion), so each violation carries a
    shortest witness.  An overlap is an enter action of one position
    while a different position is inside the same region.
    """
    regions = list(regions)
    init_occ = tuple(frozenset() for _ in regions)
    seen = {(lts.init, init_occ)}
    queue = deque([(lts.init, init_occ, ())])
    found: dict[tuple[str, ...], Violation] = {}
    while queue:
        q, occ, trace = queue.popleft()
        if len(trace) >= depth:
            continue
        for label, dst in lts.successors(q):
            new_occ = []
            for region, inside in zip(regions, occ):
                pos = region.entering(label)
                if pos is not None:
                    others = inside - {pos}
                    if others:
                        witness = trace + (label,)
                        if witness not in found:
                            found[witness] = Violation(
                                ViolationKind.MUTEX_OVERLAP, witness, dst)
                    inside = inside | {pos}
                out_pos = region.leaving(label)
                if out_pos is not None:
                    inside = inside - {out_pos}
                new_occ.append(inside)
            key = (dst, tuple(new_occ))
            if key not in seen:
                seen.add(key)
                queue.append((dst, tuple(new_occ), trace + (label,)))
    return sorted(found.values(), key=lambda v: (len(v.witness), v.witness))


# ---------------------------------------------------------------------------
# Deadlocks

def find_deadlocks(lts: Lts) -> list[Violation]:
    """All reachable states with no outgoing edges and no termination,
    each with a shortest witness trace (label-lexicographic tie-break)."""
    witness: dict[int, tuple[str, ...]] = {lts.init: ()}
    queue = deque([lts.init])
    while queue:
        q = queue.popleft()
        for label, dst in lts.successors(q):  # sorted: BFS is lexicographic
            if dst not in witness:
                witness[dst] = witness[q] + (label,)
                queue.append(dst)
    out = [Violation(ViolationKind.DEADLOCK, witness[q], q)
           for q in sorted(witness)
           if lts.is_deadlock(q)]
    return sorted(out, key=lambda v: (len(v.witness), v.witness))
