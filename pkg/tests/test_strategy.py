"""The two built-in strategies: round-robin and round-robin with semaphores.

The semaphore clauses are checked against values computed by unrolling
the defining recursions by hand; where the spec's example tables diverge
from direct clause evaluation (sem_sched under the literal convention,
and the termination update on {r:[2]}), the clause evaluation wins and
both behaviors are pinned here.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acpsi.strategy import (EMPTY_SEM_STATE, Outcome, SemState,
                            TurnsConvention, UNIT, p_action, rr_strategy,
                            sem_next, sem_remove, sem_sched, sem_strategy,
                            sem_turns, sem_updat, sem_waiting, v_action,
                            validate_strategy_against_config)
from acpsi.kernel import assemble_config
from tests.gen import random_hist, random_sem_state

R = frozenset({"r"})
RQ = frozenset({"r", "q"})


# ---------------------------------------------------------------------------
# Round-robin

def test_rr_sched_examples():
    rr = rr_strategy()
    assert rr.sched(3, (), UNIT) == 1
    assert rr.sched(2, ((1, 2),), UNIT) == 2
    assert rr.sched(2, ((1, 2), (2, 2)), UNIT) == 1


def test_rr_updat_is_identity_and_c_empty():
    rr = rr_strategy()
    assert rr.updat(2, ((1, 2),), UNIT, 1, "a") is UNIT
    assert rr.control_actions == {}
    assert rr.initial_state == UNIT


@given(st.integers(1, 5), st.data())
def test_rr_sched_total_and_in_range(n, data):
    rr = rr_strategy()
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    h = random_hist(rng, rng.randint(1, 5), max_len=4)
    got = rr.sched(n, h, UNIT)
    assert got is not None and 1 <= got <= n


# ---------------------------------------------------------------------------
# turns / next / waiting

def test_sem_turns_examples():
    assert sem_turns((), 3) == 0
    assert sem_turns(((2, 2), (1, 2)), 1) == 1
    assert sem_turns(((1, 2), (2, 2)), 1) == 0


@given(st.data())
def test_sem_turns_recurrence(data):
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    n = rng.randint(1, 4)
    h = random_hist(rng, n, max_len=4)
    i = rng.randint(1, n)
    extended = h + ((i, n),)
    assert sem_turns(extended, i) == sem_turns(h, i) + 1
    for j in range(1, n + 1):
        if j != i:
            assert sem_turns(extended, j) == 0


def test_sem_next_examples():
    assert sem_next(2, (), 0, k=1) == 1
    assert sem_next(2, ((1, 2),), 0, k=1) == 1
    assert sem_next(2, ((1, 2), (1, 2)), 0, k=1) == 2


def test_sem_next_conventions_differ():
    h = ((1, 2),)
    assert sem_next(2, h, 0, k=1, convention=TurnsConvention.AS_WRITTEN) == 1
    assert sem_next(2, h, 0, k=1, convention=TurnsConvention.PROSE) == 2


def test_sem_waiting_examples():
    assert sem_waiting(EMPTY_SEM_STATE) == frozenset()
    assert sem_waiting(SemState.of({"r": ()})) == frozenset()
    assert sem_waiting(SemState.of({"r": (2,), "q": (1, 3)})) == frozenset({1, 2, 3})


# ---------------------------------------------------------------------------
# sem_sched

def test_sem_sched_first_turn():
    assert sem_sched(2, (), EMPTY_SEM_STATE, k=1) == 1


def test_sem_sched_skips_waiting_convention_sensitive():
    # Under the literal clauses the candidate is pinned to the last actor
    # while its previous streak is below k, so a waiting last actor starves
    # the scheduler; the prose convention rotates past it.
    h = ((1, 2),)
    s = SemState.of({"r": (1,)})
    assert sem_sched(2, h, s, k=1, convention=TurnsConvention.AS_WRITTEN) is None
    assert sem_sched(2, h, s, k=1, convention=TurnsConvention.PROSE) == 2


def test_sem_sched_absent_when_all_waiting():
    s = SemState.of({"r": (1,), "q": (2,)})
    for h in ((), ((1, 2),), ((2, 2), (1, 2))):
        assert sem_sched(2, h, s, k=1) is None


@given(st.data())
def test_sem_sched_defined_when_nobody_waits(data):
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    n = rng.randint(1, 4)
    h = random_hist(rng, n, max_len=4)
    k = rng.randint(1, 3)
    conv = rng.choice(list(TurnsConvention))
    got = sem_sched(n, h, EMPTY_SEM_STATE, k=k, convention=conv)
    assert got is not None


@given(st.data())
def test_sem_sched_absent_iff_all_candidates_waiting(data):
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    n = rng.randint(1, 4)
    k = rng.randint(1, 2)
    conv = rng.choice(list(TurnsConvention))
    h = random_hist(rng, n, max_len=4)
    s = random_sem_state(rng, n, ("r", "q"))
    waiting = sem_waiting(s)
    candidates = [sem_next(n, h, i, k=k, convention=conv) for i in range(k * n)]
    got = sem_sched(n, h, s, k=k, convention=conv)
    if got is None:
        assert all(c in waiting for c in candidates)
    else:
        assert got not in waiting
        assert got in candidates


# ---------------------------------------------------------------------------
# sem_remove

def test_sem_remove_examples():
    assert sem_remove(2, EMPTY_SEM_STATE, 1) == EMPTY_SEM_STATE
    assert sem_remove(3, SemState.of({"r": (3,)}), 1) == SemState.of({"r": (2,)})
    assert sem_remove(3, SemState.of({"r": (1, 3)}), 1) == SemState.of({"r": (2,)})


@given(st.data())
def test_sem_remove_properties(data):
    rng = random.Random(data.draw(st.integers(0, 10_000)))
    n = rng.randint(1, 4)
    s = random_sem_state(rng, n, ("r", "q"))
    i = rng.randint(1, n)
    out = sem_remove(n, s, i)
    assert out.dom() == s.dom()  # domain unchanged
    total_before = sum(len(q) for _, q in s.entries)
    total_after = sum(len(q) for _, q in out.entries)
    assert total_after <= total_before
    # i's own entries are gone; survivors above i shifted down
    expected = frozenset(j - 1 for j in sem_waiting(s) if j > i) | frozenset(
        j for j in sem_waiting(s) if j < i)
    assert sem_waiting(out) == expected


# ---------------------------------------------------------------------------
# sem_updat

S_R = frozenset({"r"})


def test_sem_updat_p_clauses():
    h = ((1, 2),)
    assert sem_updat(2, h, EMPTY_SEM_STATE, 2, "P_r",
                     semaphores=S_R) == SemState.of({"r": ()})
    assert sem_updat(2, h, SemState.of({"r": ()}), 2, "P_r",
                     semaphores=S_R) == SemState.of({"r": (2,)})


def test_sem_updat_v_clauses():
    h = ((1, 2),)
    assert sem_updat(2, h, SemState.of({"r": ()}), 1, "V_r",
                     semaphores=S_R) == EMPTY_SEM_STATE
    assert sem_updat(2, h, SemState.of({"r": (2,)}), 1, "V_r",
                     semaphores=S_R) == SemState.of({"r": ()})
    # releasing a semaphore nobody holds is the identity
    assert sem_updat(2, h, EMPTY_SEM_STATE, 1, "V_r",
                     semaphores=S_R) == EMPTY_SEM_STATE


def test_sem_updat_termination_applies_remove():
    # remove' deletes the queue entry equal to the leaver, so {r:[2]} with
    # process 2 leaving empties the queue (and renumbers nothing below).
    got = sem_updat(2, ((1, 2),), SemState.of({"r": (2,)}), 2, Outcome.EPS,
                    semaphores=S_R)
    assert got == SemState.of({"r": ()})
    got = sem_updat(2, ((1, 2),), SemState.of({"r": (2,)}), 1, Outcome.EPS,
                    semaphores=S_R)
    assert got == SemState.of({"r": (1,)})


def test_sem_updat_empty_history_resets():
    s = SemState.of({"r": (1,)})
    assert sem_updat(2, (), s, 1, "a", semaphores=S_R) == EMPTY_SEM_STATE
    assert sem_updat(2, (), s, 1, "P_r", semaphores=S_R) == SemState.of({"r": ()})
    assert sem_updat(2, (), s, 1, "V_r", semaphores=S_R) == EMPTY_SEM_STATE
    # termination removes even on the empty history
    assert sem_updat(2, (), s, 1, Outcome.EPS, semaphores=S_R) == SemState.of(
        {"r": ()})


def test_sem_updat_plain_action_keeps_state():
    s = SemState.of({"r": (2,)})
    assert sem_updat(2, ((1, 2),), s, 1, "a", semaphores=S_R) == s
    # creation and bar actions take the non-control clauses too
    assert sem_updat(2, ((1, 2),), s, 1, "cr_w", semaphores=S_R) == s
    assert sem_updat(2, ((1, 2),), s, 1, "P_r~", semaphores=S_R) == s


def test_sem_updat_stall_matches_termination():
    s = SemState.of({"r": (1, 2)})
    h = ((1, 2),)
    assert sem_updat(2, h, s, 1, Outcome.DELTA, semaphores=S_R) \
        == sem_updat(2, h, s, 1, Outcome.EPS, semaphores=S_R)


# ---------------------------------------------------------------------------
# sem_strategy instances

def test_sem_strategy_examples():
    strat = sem_strategy(1, R)
    assert strat.sched(1, (), EMPTY_SEM_STATE) == 1
    blocked = SemState.of({"r": (1, 2)})
    assert strat.sched(2, ((1, 2),), blocked) is None
    assert set(strat.control_actions) == {"P_r", "V_r"}
    assert strat.bar_of("P_r") == "P_r~"
    assert strat.initial_state == EMPTY_SEM_STATE


def test_sem_strategy_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sem_strategy(0, R)
    with pytest.raises(ValueError):
        sem_strategy(1, ())


def test_strategy_config_collision_detected():
    strat = sem_strategy(1, R)
    cfg = assemble_config(["a", "P_r"], control=sorted(strat.control_actions))
    problems = validate_strategy_against_config(cfg, strat)
    assert not problems  # control wins: assemble overwrote the plain entry
    cfg2 = assemble_config(["a"], control=["P_r"])  # missing V_r
    problems = validate_strategy_against_config(cfg2, strat)
    assert any("V_r" in p for p in problems)


def test_consecutive_turns_convention_k_vs_k_plus_one():
    # trace heads under the two conventions, k=2, two processes
    from acpsi.kernel import Act, Seq, EPSILON, Si
    from acpsi.sos import build_lts
    from acpsi.analysis import maximal_traces, TraceOutcome

    def leading_turns(convention):
        strat = sem_strategy(2, R, convention)
        cfg = assemble_config(["a", "b"], control=sorted(strat.control_actions))
        p1 = Seq(Act("a"), Seq(Act("a"), Seq(Act("a"), Seq(Act("a"), EPSILON))))
        p2 = Seq(Act("b"), Seq(Act("b"), Seq(Act("b"), Seq(Act("b"), EPSILON))))
        lts = build_lts(Si((), strat.initial_state, (p1, p2)), cfg, strat)
        (trace, outcome), = maximal_traces(lts, 64)
        assert outcome is TraceOutcome.TERMINATED
        run = 0
        for label in trace:
            if label != "a":
                break
            run += 1
        return run

    assert leading_turns(TurnsConvention.AS_WRITTEN) == 3  # k + 1
    assert leading_turns(TurnsConvention.PROSE) == 2       # exactly k


# ---------------------------------------------------------------------------
# digest factorization

@given(st.data())
def test_digest_factorization_sampled(data):
    rng = random.Random(data.draw(st.integers(0, 100_000)))
    for strat, sems in ((rr_strategy(), ()),
                        (sem_strategy(2, RQ), ("r", "q"))):
        digest = strat.hist_digest
        assert digest is not None
        n = rng.randint(1, 4)
        h1 = random_hist(rng, n, max_len=4)
        h2 = random_hist(rng, n, max_len=4)
        if digest(h1) != digest(h2):
            continue
        s = random_sem_state(rng, n, sems) if sems else UNIT
        assert strat.sched(n, h1, s) == strat.sched(n, h2, s)
        i = rng.randint(1, n)
        for alpha in ("a", "P_r" if sems else "a", Outcome.EPS):
            assert strat.updat(n, h1, s, i, alpha) == strat.updat(n, h2, s, i, alpha)


def test_digest_distinguishes_what_sched_needs():
    strat = sem_strategy(2, R)
    dig = strat.hist_digest
    # same last pair, different capped streaks -> different digests
    assert dig(((1, 2), (2, 2))) != dig(((2, 2), (2, 2)))
    # streaks at or above k collapse
    deep = ((2, 2), (2, 2), (2, 2), (2, 2))
    deeper = deep + ((2, 2),)
    assert dig(deep) == dig(deeper)
