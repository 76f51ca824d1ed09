"""The generic interleaving-strategy interface.

A strategy bundles:

* ``sched(n, h, s)`` — the partial scheduler: which of the ``n``
  processes gets the next turn after history ``h`` in control state
  ``s``; ``None`` means no process can be given a turn and the whole
  interleaving is stuck.
* ``updat(n, h, s, i, alpha)`` — the control-state transformer, applied
  after process ``i`` performs action ``alpha``, terminates
  (``Outcome.EPS``), or — under deferred-deadlock semantics — is dropped
  as stuck (``Outcome.DELTA``).
* the set of control actions together with their bar names;
* the initial control state;
* optionally ``hist_digest``, a function each strategy may supply to
  state that its scheduler and transformer only ever observe a bounded
  abstraction of the history.  When present it must factor both:
  digest-equal histories must be indistinguishable to ``sched`` and
  ``updat`` (and digests must update consistently under extension).
  State-space construction uses the digest to identify states, which
  keeps reachable sets finite although histories grow without bound.

Control states are opaque: any hashable value.  Instances are immutable
and their functions pure, so they can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Hashable, Mapping

from ..kernel.hist import Hist


class Outcome(Enum):
    """Non-action events fed to a control-state transformer."""

    EPS = "eps"      # the scheduled process terminated successfully
    DELTA = "delta"  # the scheduled process is stuck (deferred mode only)


SchedFn = Callable[[int, Hist, Any], "int | None"]
UpdatFn = Callable[[int, Hist, Any, int, "str | Outcome"], Any]
DigestFn = Callable[[Hist], Hashable]


@dataclass(frozen=True)
class UnitState:
    """The single control state of strategies that keep no private data."""

    def sort_key(self) -> tuple:
        return ("unit",)

    def __repr__(self) -> str:
        return "init"


UNIT = UnitState()


@dataclass(frozen=True)
class StrategyInstance:
    name: str
    sched: SchedFn
    updat: UpdatFn
    control_actions: Mapping[str, str] = field(default_factory=dict)  # c -> bar
    initial_state: Any = UNIT
    hist_digest: DigestFn | None = None

    def is_control(self, action: str) -> bool:
        return action in self.control_actions

    def bar_of(self, action: str) -> str:
        return self.control_actions[action]


def validate_strategy_against_config(cfg, strat: StrategyInstance) -> list[str]:
    """Cross-checks between a strategy's control set and a config's alphabet.

    Returns problem descriptions; empty means consistent.  Kept out of
    ``validate_config`` because a config is meaningful on its own.
    """
    from ..kernel.config import ActionKind, bar_name

    problems: list[str] = []
    declared_controls = {n for n, d in cfg.alphabet.items()
                         if d.kind is ActionKind.CONTROL}
    strat_controls = set(strat.control_actions)
    for c in sorted(strat_controls - declared_controls):
        if c in cfg.alphabet:
            problems.append(
                f"strategy control action {c} collides with a declared "
                f"{cfg.alphabet[c].kind.value} action")
        else:
            problems.append(f"strategy control action {c} is not declared")
    for c in sorted(declared_controls - strat_controls):
        problems.append(f"declared control action {c} is unknown to the strategy")
    for c, b in sorted(strat.control_actions.items()):
        if b != bar_name(c):
            problems.append(f"strategy bar for {c} is {b}, expected {bar_name(c)}")
    return problems
