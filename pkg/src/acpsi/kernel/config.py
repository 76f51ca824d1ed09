"""Action alphabets, the communication function, and system configuration.

An alphabet declares every action once, classified as:

* plain application actions;
* control actions (performed to steer the scheduler);
* bar actions — the visible trace ``c~`` a control action ``c`` leaves
  once the scheduler has handled it;
* process-creation requests ``cr_d`` and creation acts ``cr_d~`` for
  each creation datum ``d``.

Naming is conventional and enforced: the bar of ``c`` is ``c + "~"``,
creation actions for datum ``d`` are ``cr_d`` and ``cr_d~``.  Those
shapes are reserved: a plain action may neither end in ``~`` nor start
with ``cr_``.

The communication function is a finite symmetric partial map; missing
entries mean the two actions do not communicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .terms import Term, action_names, free_vars

CREATION_PREFIX = "cr_"
BAR_SUFFIX = "~"


class ActionKind(Enum):
    PLAIN = "plain"
    CONTROL = "control"
    BAR = "bar"
    CREATE_REQUEST = "create-request"
    CREATE_ACT = "create-act"


@dataclass(frozen=True)
class ActionDecl:
    """Classification of one alphabet entry.

    ``ref`` is the base control action for bars and the creation datum
    for creation actions; plain and control actions carry no reference.
    """

    kind: ActionKind
    ref: str | None = None


class DeadlockMode(Enum):
    """What happens when the scheduled process is stuck.

    IMMEDIATE: the whole interleaving becomes inactive at once.
    DEFERRED: the stuck process is dropped, the others keep running, but
    successful termination of the whole is permanently forfeited.
    """

    IMMEDIATE = "immediate"
    DEFERRED = "deferred"


def bar_name(base: str) -> str:
    return base + BAR_SUFFIX


def create_request_name(datum: str) -> str:
    return CREATION_PREFIX + datum


def create_act_name(datum: str) -> str:
    return CREATION_PREFIX + datum + BAR_SUFFIX


@dataclass
class CommTable:
    """Finite symmetric partial communication function.

    ``entries`` maps unordered action pairs (stored as given) to the
    resulting action.  ``gamma`` looks both orders up; validation
    reports tables whose two orders disagree.
    """

    entries: dict[tuple[str, str], str] = field(default_factory=dict)

    @classmethod
    def of(cls, mapping: Mapping[tuple[str, str], str]) -> "CommTable":
        return cls(dict(mapping))

    def gamma(self, a: str, b: str) -> str | None:
        hit = self.entries.get((a, b))
        if hit is None:
            hit = self.entries.get((b, a))
        return hit

    def __iter__(self):
        return iter(self.entries.items())


@dataclass
class SystemConfig:
    """Everything fixed about a system besides the strategy itself."""

    alphabet: dict[str, ActionDecl]
    comm: CommTable = field(default_factory=CommTable)
    creation: dict[str, Term] = field(default_factory=dict)
    deadlock_mode: DeadlockMode = DeadlockMode.IMMEDIATE

    def declares(self, name: str) -> bool:
        return name in self.alphabet

    def kind_of(self, name: str) -> ActionKind:
        return self.alphabet[name].kind

    def plain_actions(self) -> frozenset[str]:
        return frozenset(n for n, d in self.alphabet.items()
                         if d.kind is ActionKind.PLAIN)

    def control_actions(self) -> frozenset[str]:
        return frozenset(n for n, d in self.alphabet.items()
                         if d.kind is ActionKind.CONTROL)


def assemble_config(plain: Iterable[str],
                    *,
                    control: Iterable[str] = (),
                    creation: Mapping[str, Term] | None = None,
                    comm: Mapping[tuple[str, str], str] | None = None,
                    deadlock_mode: DeadlockMode = DeadlockMode.IMMEDIATE) -> SystemConfig:
    """Build a config from plain action names, control bases, and creation data.

    Bar actions and creation request/act pairs are added automatically
    following the naming convention.
    """
    alphabet: dict[str, ActionDecl] = {}
    for a in plain:
        alphabet[a] = ActionDecl(ActionKind.PLAIN)
    for c in control:
        alphabet[c] = ActionDecl(ActionKind.CONTROL)
        alphabet[bar_name(c)] = ActionDecl(ActionKind.BAR, ref=c)
    creation = dict(creation or {})
    for d in creation:
        alphabet[create_request_name(d)] = ActionDecl(ActionKind.CREATE_REQUEST, ref=d)
        alphabet[create_act_name(d)] = ActionDecl(ActionKind.CREATE_ACT, ref=d)
    return SystemConfig(alphabet=alphabet,
                        comm=CommTable.of(comm or {}),
                        creation=creation,
                        deadlock_mode=deadlock_mode)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)


def _is_reserved_shape(name: str) -> bool:
    return name.endswith(BAR_SUFFIX) or name.startswith(CREATION_PREFIX)


def validate_config(cfg: SystemConfig) -> ValidationReport:
    """Check every structural requirement on alphabet, communication and
    creation; returns the full list of violations (empty iff admissible)."""
    report = ValidationReport()
    alpha = cfg.alphabet

    # Alphabet shape and cross-references.
    for name, decl in alpha.items():
        if decl.kind is ActionKind.PLAIN:
            if _is_reserved_shape(name):
                report.add(f"reserved name used as plain action: {name}")
        elif decl.kind is ActionKind.CONTROL:
            if _is_reserved_shape(name):
                report.add(f"reserved name used as control action: {name}")
            b = bar_name(name)
            if b not in alpha or alpha[b].kind is not ActionKind.BAR:
                report.add(f"missing bar action: {name}")
            elif alpha[b].ref != name:
                report.add(f"bar action {b} does not refer back to {name}")
        elif decl.kind is ActionKind.BAR:
            base = decl.ref
            if name != bar_name(base or ""):
                report.add(f"bar action {name} does not follow the {base}~ convention")
            elif base not in alpha or alpha[base].kind is not ActionKind.CONTROL:
                report.add(f"bar of non-control action: {name}")
        elif decl.kind is ActionKind.CREATE_REQUEST:
            d = decl.ref
            if name != create_request_name(d or ""):
                report.add(f"creation request {name} does not follow the cr_{d} convention")
            if d not in cfg.creation:
                report.add(f"creation action declared for unknown datum: {name}")
        elif decl.kind is ActionKind.CREATE_ACT:
            d = decl.ref
            if name != create_act_name(d or ""):
                report.add(f"creation act {name} does not follow the cr_{d}~ convention")
            if d not in cfg.creation:
                report.add(f"creation action declared for unknown datum: {name}")

    # Creation map: every datum has its actions declared and a closed body.
    for d, body in cfg.creation.items():
        for need in (create_request_name(d), create_act_name(d)):
            if need not in alpha:
                report.add(f"creation datum {d} is missing its action {need}")
        if free_vars(body):
            report.add(f"creation body for {d} is not closed")
        for a in sorted(action_names(body)):
            if a not in alpha:
                report.add(f"creation body for {d} uses undeclared action: {a}")

    reserved_kinds = (ActionKind.CONTROL, ActionKind.BAR,
                      ActionKind.CREATE_REQUEST, ActionKind.CREATE_ACT)

    # Communication table: declaredness, symmetry, argument/result classes.
    for (a, b), c in sorted(cfg.comm.entries.items()):
        for x in (a, b, c):
            if x not in alpha:
                report.add(f"undeclared action in communication: {x}")
        back = cfg.comm.entries.get((b, a))
        if a != b and back != c and (b, a) in cfg.comm.entries:
            report.add(f"not symmetric: gamma({a},{b})={c} but gamma({b},{a})={back}")
        elif a != b and (b, a) not in cfg.comm.entries:
            report.add(f"not symmetric: gamma({a},{b})={c} but gamma({b},{a}) is undeclared")
        for x in (a, b):
            if x in alpha and alpha[x].kind in reserved_kinds:
                report.add(f"communication declared with reserved action: gamma({a},{b})")
                break
        if c in alpha and alpha[c].kind in reserved_kinds:
            report.add(f"communication result is a reserved action: gamma({a},{b})={c}")

    # Associativity over the whole (finite) alphabet, with absent results
    # propagating as non-communication.
    names = sorted(alpha)
    gamma = cfg.comm.gamma

    def g(x: str | None, y: str | None) -> str | None:
        if x is None or y is None:
            return None
        return gamma(x, y)

    for a in names:
        for b in names:
            ab = g(a, b)
            for c in names:
                if g(ab, c) != g(a, g(b, c)):
                    report.add(f"not associative: ({a},{b},{c})")

    return report
