"""Plain round-robin interleaving: one turn each, in cyclic order.

The scheduler gives the first turn to process 1 and, after a turn of
process ``j`` among ``n`` processes, the next turn to ``(j mod n) + 1``.
It is total — some process always gets a turn — keeps no control state,
and has no control actions.
"""

from __future__ import annotations

from typing import Any

from ..kernel.hist import Hist
from .base import UNIT, Outcome, StrategyInstance


def rr_sched(n: int, h: Hist, s: Any) -> int:
    if not h:
        return 1
    j, _ = h[-1]
    return (j % n) + 1


def rr_updat(n: int, h: Hist, s: Any, i: int, alpha) -> Any:
    return s


def rr_digest(h: Hist) -> tuple:
    # The scheduler only ever looks at the last pair.
    if not h:
        return ("empty", 0, 0)
    j, m = h[-1]
    return ("last", j, m)


def rr_strategy() -> StrategyInstance:
    return StrategyInstance(
        name="round-robin",
        sched=rr_sched,
        updat=rr_updat,
        control_actions={},
        initial_state=UNIT,
        hist_digest=rr_digest,
    )
