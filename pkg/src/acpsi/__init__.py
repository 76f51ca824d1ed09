"""acpsi: a workbench for ACP-style process algebra with strategy-driven
interleaving.

The pieces:

* ``acpsi.kernel`` — terms, alphabets, communication, histories, guarded
  recursion;
* ``acpsi.strategy`` — the scheduler interface, plain round-robin, and
  round-robin with binary semaphores;
* ``acpsi.sos`` — operational semantics and transition-system building;
* ``acpsi.rewrite`` — head normal forms, elimination into basic terms,
  canonical forms, reduction to recursive specifications;
* ``acpsi.analysis`` — bisimilarity, traces, mutual exclusion, deadlocks;
* ``acpsi.frontend`` — parser, config files, rendering, export, CLI.
"""

from . import analysis, frontend, kernel, rewrite, sos, strategy
from .analysis import (MutexRegion, TraceOutcome, Violation, ViolationKind,
                       bisimilar, bisimilar_naive, check_mutex,
                       find_deadlocks, maximal_traces, partition_lts)
from .errors import (AcpsiError, BudgetExceeded, ConfigError,
                     IllFormedHistory, ParseError, TruncatedInput,
                     UndeclaredAction, UnguardedRecursion)
from .rewrite import (Hnf, canonical_basic_form, eliminate, head_normal_form,
                      reduce_spec, unfold)
from .sos import Lts, build_lts, step, terminates

__all__ = [
    "analysis", "frontend", "kernel", "rewrite", "sos", "strategy",
    "MutexRegion", "TraceOutcome", "Violation", "ViolationKind",
    "bisimilar", "bisimilar_naive", "check_mutex", "find_deadlocks",
    "maximal_traces", "partition_lts",
    "AcpsiError", "BudgetExceeded", "ConfigError", "IllFormedHistory",
    "ParseError", "TruncatedInput", "UndeclaredAction", "UnguardedRecursion",
    "Hnf", "canonical_basic_form", "eliminate", "head_normal_form",
    "reduce_spec", "unfold",
    "Lts", "build_lts", "step", "terminates",
]

__version__ = "0.1.0"
