"""Operational semantics: transitions, termination, and LTS construction."""

from __future__ import annotations

import random

import pytest

from acpsi.analysis import bisimilar
from acpsi.errors import (BudgetExceeded, IllFormedHistory, UndeclaredAction,
                          UnguardedRecursion)
from acpsi.kernel import (DELTA, EPSILON, Act, Alt, DeadlockMode, Encap, Par,
                          PosSi, RecConst, RecSpec, Seq, Si, Var,
                          assemble_config, hist_is_wellformed, subterms)
from acpsi.sos import build_lts, step, terminates
from acpsi.strategy import (EMPTY_SEM_STATE, SemState, UNIT, rr_strategy,
                            sem_strategy)
from tests.gen import plain_rr_env, random_closed, sem_env


def seq(*parts):
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


RR = rr_strategy()


# ---------------------------------------------------------------------------
# step examples

def test_step_action_prefix():
    cfg, _ = plain_rr_env()
    assert step(Seq(Act("a"), EPSILON), cfg, RR) == frozenset(
        {("a", Seq(EPSILON, EPSILON))})
    assert step(Act("a"), cfg, RR) == frozenset({("a", EPSILON)})


def test_step_rr_interleaving_is_singleton():
    cfg, _ = plain_rr_env()
    t = Si((), UNIT, (Act("a"), Act("b")))
    got = step(t, cfg, RR)
    assert got == frozenset(
        {("a", Si(((1, 2),), UNIT, (EPSILON, Act("b"))))})


def test_step_all_waiting_is_stuck():
    sem = sem_strategy(1, ["r"])
    cfg, _ = sem_env(k=1)
    blocked = SemState.of({"r": (1, 2)})
    t = Si(((1, 2),), blocked, (Act("a"), Act("b")))
    assert step(t, cfg, sem) == frozenset()
    assert not terminates(t, cfg, sem)


def test_step_control_action_leaves_bar_trace():
    sem = sem_strategy(1, ["r"])
    cfg, _ = sem_env(k=1)
    t = Si((), EMPTY_SEM_STATE, (Seq(Act("P_r"), EPSILON),))
    got = step(t, cfg, sem)
    assert got == frozenset(
        {("P_r~", Si(((1, 1),), SemState.of({"r": ()}),
                     (Seq(EPSILON, EPSILON),)))})


def test_step_creation_spawns_configured_process():
    cfg, strat = plain_rr_env(creation=True)
    t = Si((), UNIT, (Seq(Act("cr_w"), EPSILON),))
    got = step(t, cfg, strat)
    assert got == frozenset(
        {("cr_w~", Si(((1, 2),), UNIT,
                      (Seq(EPSILON, EPSILON), Seq(Act("a"), EPSILON))))})


def test_step_creation_act_prefix_is_blocked_under_interleaving():
    cfg, strat = plain_rr_env(creation=True)
    t = Si((), UNIT, (Seq(Act("cr_w~"), EPSILON),))
    assert step(t, cfg, strat) == frozenset()
    # outside the interleaving operator it is an ordinary action
    assert step(Act("cr_w~"), cfg, strat) == frozenset({("cr_w~", EPSILON)})


def test_step_undeclared_action():
    cfg, _ = plain_rr_env()
    with pytest.raises(UndeclaredAction):
        step(Act("zz"), cfg, RR)


def test_step_unguarded_recursion():
    cfg, _ = plain_rr_env()
    bad = RecConst("X", RecSpec.of({"X": Alt(Var("X"), Act("a"))}))
    with pytest.raises(UnguardedRecursion):
        step(bad, cfg, RR)


# ---------------------------------------------------------------------------
# terminates examples

def test_terminates_base():
    cfg, _ = plain_rr_env()
    assert terminates(EPSILON, cfg, RR)
    assert not terminates(Seq(Act("a"), EPSILON), cfg, RR)
    assert not terminates(DELTA, cfg, RR)


def test_terminates_single_interleaved_process():
    cfg, _ = plain_rr_env()
    assert terminates(Si((), UNIT, (EPSILON,)), cfg, RR)


def test_terminates_needs_scheduler_cooperation():
    sem = sem_strategy(1, ["r"])
    cfg, _ = sem_env()
    blocked = SemState.of({"r": (1, 2)})
    t = Si(((1, 2),), blocked, (EPSILON, EPSILON))
    assert not terminates(t, cfg, sem)
    # with a free scheduler the same tuple terminates
    t2 = Si(((1, 2),), EMPTY_SEM_STATE, (EPSILON, EPSILON))
    assert terminates(t2, cfg, sem)


def test_out_of_range_scheduler_choice_is_stuck():
    # after process 2 leaves, the literal follow-up clause can pick it again;
    # the choice is outside 1..n and means no turn at all (k=2 exposes it)
    sem = sem_strategy(2, ["r"])
    cfg, _ = sem_env(k=2)
    h = ((1, 2), (2, 2), (2, 1))
    t = Si(h, EMPTY_SEM_STATE, (EPSILON,))
    assert sem.sched(1, h, EMPTY_SEM_STATE) == 2  # raw clause value
    assert step(t, cfg, sem) == frozenset()
    assert not terminates(t, cfg, sem)


# ---------------------------------------------------------------------------
# build_lts examples

def test_build_lts_two_action_path():
    cfg, _ = plain_rr_env()
    lts = build_lts(seq(Act("a"), Act("b"), EPSILON), cfg, RR)
    assert lts.num_states == 3
    assert [e[1] for e in lts.edges] == ["a", "b"]
    assert lts.terminating == frozenset({2})
    assert not lts.truncated


def test_build_lts_rr_two_processes_single_path():
    cfg, _ = plain_rr_env()
    t = Si((), UNIT, (Act("a"), Act("b")))
    lts = build_lts(t, cfg, RR)
    assert lts.num_states == 3
    assert [e[1] for e in lts.edges] == ["a", "b"]
    assert lts.terminating == frozenset({2})


def test_build_lts_recursion_digest_quotient_is_finite_cycle():
    cfg, _ = plain_rr_env()
    x = RecConst("X", RecSpec.of({"X": Seq(Act("a"), Var("X"))}))
    y = RecConst("Y", RecSpec.of({"Y": Seq(Act("b"), Var("Y"))}))
    t = Si((), UNIT, (x, y))
    lts = build_lts(t, cfg, RR)
    assert not lts.truncated
    assert lts.num_states == 3  # initial state plus a 2-cycle
    labels = sorted(e[1] for e in lts.edges)
    assert labels == ["a", "a", "b"]
    # every run alternates a, b forever
    succs = {q: lts.successors(q) for q in lts.states}
    assert all(len(s) == 1 for s in succs.values())


def test_build_lts_truncation_and_completeness_flag():
    cfg, _ = plain_rr_env()
    t = seq(Act("a"), Act("b"), Act("c"), EPSILON)
    lts = build_lts(t, cfg, RR, max_states=2)
    assert lts.truncated
    with pytest.raises(BudgetExceeded):
        build_lts(t, cfg, RR, max_states=2, require_complete=True)
    lts2 = build_lts(t, cfg, RR, max_depth=1)
    assert lts2.truncated


def test_digest_quotient_safety_samples():
    rng = random.Random(5)
    for cfg, strat in (plain_rr_env(), sem_env(k=1)):
        checked = 0
        while checked < 12:
            t = random_closed(rng, cfg, strat, 3)
            try:
                with_digest = build_lts(t, cfg, strat, max_states=800,
                                        require_complete=True)
                without = build_lts(t, cfg, strat, max_states=800,
                                    use_digest=False, require_complete=True)
            except BudgetExceeded:
                continue
            assert bisimilar(with_digest, without)
            checked += 1


def test_scheduling_determinism_structural():
    # transitions of an interleaving state all come from dispatching the
    # single scheduled index: Si behaves exactly as its positional form
    rng = random.Random(9)
    for cfg, strat in (plain_rr_env(), sem_env(k=2, sems=("r", "q"))):
        checked = 0
        while checked < 25:
            n = rng.randint(1, 3)
            from tests.gen import random_hist, random_state
            h = random_hist(rng, n)
            s = random_state(rng, strat, n)
            args = tuple(random_closed(rng, cfg, strat, 1, allow_si=False)
                         for _ in range(n))
            t = Si(h, s, args)
            i = strat.sched(n, h, s)
            direct = step(t, cfg, strat)
            if i is None or not (1 <= i <= n):
                assert direct == frozenset()
            else:
                assert direct == step(PosSi(i, h, s, args), cfg, strat)
            checked += 1


def test_step_preserves_history_wellformedness():
    rng = random.Random(13)
    cfg, strat = sem_env(k=1)
    checked = 0
    while checked < 40:
        t = random_closed(rng, cfg, strat, 3)
        for _, succ in step(t, cfg, strat):
            for sub in subterms(succ):
                if isinstance(sub, (Si, PosSi)):
                    assert hist_is_wellformed(sub.hist)
        checked += 1


def test_semaphore_bookkeeping_during_exploration():
    # queue entries always denote live process indices and are distinct
    sem = sem_strategy(1, ["r"])
    cfg, _ = sem_env(k=1)
    p = lambda body: seq(*[Act(a) for a in body], EPSILON)
    t = Si((), EMPTY_SEM_STATE,
           (p(["P_r", "a", "V_r"]), p(["P_r", "b", "V_r"]),
            p(["P_r", "c", "V_r"])))
    lts = build_lts(t, cfg, sem, require_complete=True)
    assert lts.state_term is not None
    for term in lts.state_term.values():
        for sub in subterms(term):
            if isinstance(sub, Si) and isinstance(sub.state, SemState):
                for _, queue in sub.state.entries:
                    assert len(set(queue)) == len(queue)
                    assert all(1 <= j <= sub.n for j in queue)


# ---------------------------------------------------------------------------
# deferred deadlock mode

def test_deferred_mode_drops_stuck_process_but_forfeits_termination():
    cfg_def, strat = plain_rr_env(deadlock_mode=DeadlockMode.DEFERRED)
    cfg_imm, _ = plain_rr_env()
    t = Si((), UNIT, (DELTA, Act("b")))
    # immediate mode: whole thing stuck at once
    assert step(t, cfg_imm, strat) == frozenset()
    # deferred mode: b still runs, but no run terminates
    lts = build_lts(t, cfg_def, strat, require_complete=True)
    assert sorted(e[1] for e in lts.edges) == ["b"]
    assert lts.terminating == frozenset()


def test_deferred_mode_single_process_is_plain_deadlock():
    cfg_def, strat = plain_rr_env(deadlock_mode=DeadlockMode.DEFERRED)
    t = Si((), UNIT, (DELTA,))
    assert step(t, cfg_def, strat) == frozenset()
    assert not terminates(t, cfg_def, strat)
