"""Configuration documents.

A config is an INI-like document with four sections::

    [alphabet]
    actions = a, b, enter1

    [communication]
    a * b = c

    [strategy]
    name = rr-semaphore        # or: round-robin
    k = 1                      # rr-semaphore only
    semaphores = r, rp         # rr-semaphore only
    turns_convention = as-written   # or: prose
    deadlock_mode = immediate  # or: deferred

    [creation]
    d = a . eps

The alphabet section declares plain actions only; control actions and
their bars come from the strategy (``P_r``/``V_r`` per semaphore ``r``),
and creation request/act pairs from the creation section.  Creation
bodies are term sources parsed against the assembled alphabet.
"""

from __future__ import annotations

import re

from ..errors import ConfigError, ParseError
from ..kernel.config import (DeadlockMode, SystemConfig, assemble_config,
                             bar_name, create_act_name, create_request_name,
                             validate_config)
from ..strategy.base import (StrategyInstance,
                             validate_strategy_against_config)
from ..strategy.round_robin import rr_strategy
from ..strategy.semaphore import (TurnsConvention, p_action, sem_strategy,
                                  v_action)
from .parser import SourceText, parse_term

_SECTION_RE = re.compile(r"^\[([a-z]+)\]$")
_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

_KNOWN_SECTIONS = ("alphabet", "communication", "strategy", "creation")


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def load_config(src: str | SourceText) -> tuple[SystemConfig, StrategyInstance]:
    """Parse and validate a configuration document.

    Raises ConfigError carrying every problem found (with line numbers for
    syntax-level ones).
    """
    if isinstance(src, str):
        src = SourceText(src)
    problems: list[str] = []
    sections: dict[str, list[tuple[int, str, str]]] = {s: [] for s in _KNOWN_SECTIONS}
    current: str | None = None
    for lineno, raw in enumerate(src.text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            if m.group(1) not in _KNOWN_SECTIONS:
                problems.append(f"line {lineno}: unknown section [{m.group(1)}]")
                current = None
            else:
                current = m.group(1)
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        if current is None:
            problems.append(f"line {lineno}: entry outside any section")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        sections[current].append((lineno, key, value))
    if problems:
        raise ConfigError(problems)

    # -- alphabet
    plain: list[str] = []
    for lineno, key, value in sections["alphabet"]:
        if key != "actions":
            problems.append(f"line {lineno}: unknown alphabet key {key!r}")
            continue
        for name in _split_list(value):
            if not _NAME_RE.match(name):
                problems.append(f"line {lineno}: bad action name {name!r}")
            else:
                plain.append(name)

    # -- strategy
    strat_opts: dict[str, tuple[int, str]] = {}
    for lineno, key, value in sections["strategy"]:
        if key in strat_opts:
            problems.append(f"line {lineno}: duplicate strategy key {key!r}")
        strat_opts[key] = (lineno, value)

    name = strat_opts.pop("name", (0, "round-robin"))[1]
    semaphores: list[str] = []
    k = 1
    convention = TurnsConvention.AS_WRITTEN
    deadlock_mode = DeadlockMode.IMMEDIATE
    if "semaphores" in strat_opts:
        lineno, value = strat_opts.pop("semaphores")
        semaphores = _split_list(value)
        if name != "rr-semaphore":
            problems.append(f"line {lineno}: semaphores require rr-semaphore")
    if "k" in strat_opts:
        lineno, value = strat_opts.pop("k")
        if name != "rr-semaphore":
            problems.append(f"line {lineno}: k requires rr-semaphore")
        try:
            k = int(value)
            if k < 1:
                raise ValueError
        except ValueError:
            problems.append(f"line {lineno}: k must be a positive integer")
            k = 1
    if "turns_convention" in strat_opts:
        lineno, value = strat_opts.pop("turns_convention")
        if name != "rr-semaphore":
            problems.append(f"line {lineno}: turns_convention requires rr-semaphore")
        try:
            convention = TurnsConvention(value)
        except ValueError:
            options = "/".join(c.value for c in TurnsConvention)
            problems.append(f"line {lineno}: turns_convention must be {options}")
    if "deadlock_mode" in strat_opts:
        lineno, value = strat_opts.pop("deadlock_mode")
        try:
            deadlock_mode = DeadlockMode(value)
        except ValueError:
            options = "/".join(m.value for m in DeadlockMode)
            problems.append(f"line {lineno}: deadlock_mode must be {options}")
    for key, (lineno, _) in strat_opts.items():
        problems.append(f"line {lineno}: unknown strategy key {key!r}")

    if name == "round-robin":
        strat = rr_strategy()
    elif name == "rr-semaphore":
        if not semaphores:
            problems.append("strategy rr-semaphore needs a semaphores list")
            raise ConfigError(problems)
        for r in semaphores:
            if not _NAME_RE.match(r):
                problems.append(f"bad semaphore name {r!r}")
        if problems:
            raise ConfigError(problems)
        strat = sem_strategy(k, semaphores, convention)
    else:
        problems.append(f"unknown strategy name {name!r} "
                        f"(round-robin or rr-semaphore)")
        raise ConfigError(problems)

    # -- creation data (names first; bodies need the full alphabet)
    creation_src: dict[str, tuple[int, str]] = {}
    for lineno, key, value in sections["creation"]:
        if not _NAME_RE.match(key):
            problems.append(f"line {lineno}: bad creation datum name {key!r}")
        elif key in creation_src:
            problems.append(f"line {lineno}: duplicate creation datum {key!r}")
        else:
            creation_src[key] = (lineno, value)

    # Collisions between plain names and generated control/bar/creation names.
    generated: set[str] = set()
    for r in semaphores:
        generated |= {p_action(r), v_action(r),
                      bar_name(p_action(r)), bar_name(v_action(r))}
    for d in creation_src:
        generated |= {create_request_name(d), create_act_name(d)}
    for a in plain:
        if a in generated:
            problems.append(f"plain action {a} collides with a strategy or "
                            f"creation action")
    if problems:
        raise ConfigError(problems)

    # -- communication
    comm: dict[tuple[str, str], str] = {}
    for lineno, key, value in sections["communication"]:
        parts = [p.strip() for p in key.split("*")]
        if len(parts) != 2 or not all(_NAME_RE.match(p) for p in parts):
            problems.append(f"line {lineno}: communication key must be 'a * b'")
            continue
        if not _NAME_RE.match(value):
            problems.append(f"line {lineno}: bad communication result {value!r}")
            continue
        a, b = parts
        if (a, b) in comm:
            problems.append(f"line {lineno}: duplicate communication entry {a} * {b}")
            continue
        comm[(a, b)] = value
        comm.setdefault((b, a), value)

    cfg = assemble_config(plain,
                          control=sorted(strat.control_actions),
                          comm=comm,
                          deadlock_mode=deadlock_mode)

    # Register creation data before parsing bodies, then parse them.
    from ..kernel.config import ActionDecl, ActionKind
    for d in creation_src:
        cfg.alphabet[create_request_name(d)] = ActionDecl(
            ActionKind.CREATE_REQUEST, ref=d)
        cfg.alphabet[create_act_name(d)] = ActionDecl(ActionKind.CREATE_ACT, ref=d)
    for d, (lineno, body_src) in creation_src.items():
        try:
            body = parse_term(SourceText(body_src, path=src.path), cfg, strat)
        except ParseError as exc:
            problems.append(f"line {lineno}: creation body for {d}: {exc.message}")
            continue
        cfg.creation[d] = body
    if problems:
        raise ConfigError(problems)

    report = validate_config(cfg)
    problems.extend(report.violations)
    problems.extend(validate_strategy_against_config(cfg, strat))
    if problems:
        raise ConfigError(problems)
    return cfg, strat


def default_config(action_names: set[str] | frozenset[str]) -> tuple[SystemConfig, StrategyInstance]:
    """A synthesized config for running without a config file: the given
    names as plain actions, no communication, round-robin strategy."""
    reserved = sorted(a for a in action_names
                      if a.endswith("~") or a.startswith("cr_"))
    if reserved:
        raise ConfigError(
            [f"action {a} needs an explicit config (bar/creation actions "
             f"cannot be synthesized)" for a in reserved])
    return assemble_config(sorted(action_names)), rr_strategy()
