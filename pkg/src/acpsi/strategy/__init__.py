"""Interleaving strategies: the generic interface and the built-ins."""

from .base import (UNIT, Outcome, StrategyInstance, UnitState,
                   validate_strategy_against_config)
from .round_robin import rr_digest, rr_sched, rr_strategy, rr_updat
from .semaphore import (EMPTY_SEM_STATE, SemState, TurnsConvention, p_action,
                        sem_digest, sem_next, sem_remove, sem_sched,
                        sem_strategy, sem_turns, sem_updat, sem_waiting,
                        v_action)

__all__ = [
    "UNIT", "Outcome", "StrategyInstance", "UnitState",
    "validate_strategy_against_config",
    "rr_digest", "rr_sched", "rr_strategy", "rr_updat",
    "EMPTY_SEM_STATE", "SemState", "TurnsConvention", "p_action",
    "sem_digest", "sem_next", "sem_remove", "sem_sched", "sem_strategy",
    "sem_turns", "sem_updat", "sem_waiting", "v_action",
]
