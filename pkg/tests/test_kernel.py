"""Kernel-level behavior: sequences, maps, histories, terms, config
validation, and guardedness classification."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acpsi.errors import IllFormedHistory
from acpsi.kernel import (DELTA, EPSILON, Act, ActionDecl, ActionKind, Alt,
                          CommTable, Encap, Epsilon, Guardedness, Par,
                          RecConst, RecSpec, Seq, Si, SystemConfig, Var,
                          assemble_config, canonical_term, check_guarded,
                          free_vars, hist_extend, hist_is_wellformed,
                          is_closed, is_syntactically_guarded,
                          map_domain_subtract, map_empty, map_override,
                          maplet, mk_hist, seq_concat, seq_elems, seq_hd,
                          seq_tl, substitute, validate_config)
from acpsi.strategy import UNIT


# ---------------------------------------------------------------------------
# Sequence and map utilities

def test_seq_ops_examples():
    assert seq_tl((1, 3, 2)) == (3, 2)
    assert seq_elems((2, 2, 1)) == frozenset({1, 2})
    assert seq_concat((), (5,)) == (5,)
    assert seq_hd((4, 1)) == 4


def test_seq_ops_empty_errors():
    with pytest.raises(ValueError):
        seq_hd(())
    with pytest.raises(ValueError):
        seq_tl(())


def test_map_ops_examples():
    assert map_override({"r": ()}, {"r": (2,)}) == {"r": (2,)}
    assert map_domain_subtract({"r": (), "q": (1,)}, {"r"}) == {"q": (1,)}
    assert map_override(map_empty(), {"r": ()}) == {"r": ()}
    assert maplet("d", 5) == {"d": 5}


small_maps = st.dictionaries(st.sampled_from("pqrs"), st.integers(0, 3),
                             max_size=4)


@given(small_maps, small_maps, small_maps)
def test_map_override_associative(f, g, h):
    assert (map_override(map_override(f, g), h)
            == map_override(f, map_override(g, h)))


@given(small_maps)
def test_map_override_empty_identity(f):
    assert map_override(f, map_empty()) == f
    assert map_override(map_empty(), f) == f


# ---------------------------------------------------------------------------
# Histories

def test_hist_wellformed_examples():
    assert hist_is_wellformed(())
    assert not hist_is_wellformed(((2, 1),))
    assert hist_is_wellformed(((1, 2), (2, 3)))
    assert not hist_is_wellformed(((1, 2), (1, 4)))


def test_hist_extend_examples():
    assert hist_extend((), 1, 2) == ((1, 2),)
    assert hist_extend(((1, 2),), 2, 2) == ((1, 2), (2, 2))
    with pytest.raises(IllFormedHistory):
        hist_extend(((1, 2),), 3, 2)


@st.composite
def valid_hists(draw):
    length = draw(st.integers(0, 5))
    h = ()
    for _ in range(length):
        if not h:
            n = draw(st.integers(1, 4))
            i = draw(st.integers(1, n))
        else:
            prev_n = h[-1][1]
            i = draw(st.integers(1, prev_n))
            n = draw(st.sampled_from(
                [m for m in (prev_n - 1, prev_n, prev_n + 1) if m >= 1]))
        h = hist_extend(h, i, n)
    return h


@given(valid_hists())
def test_generated_hists_wellformed(h):
    assert hist_is_wellformed(h)


@given(valid_hists(), st.integers(1, 6), st.integers(1, 6))
def test_extend_agrees_with_wellformedness(h, i, n):
    appended = h + ((i, n),)
    if hist_is_wellformed(appended):
        assert hist_extend(h, i, n) == appended
    else:
        with pytest.raises(IllFormedHistory):
            hist_extend(h, i, n)


def test_term_constructors_reject_bad_histories():
    with pytest.raises(IllFormedHistory):
        Si(((3, 2),), UNIT, (EPSILON,))
    with pytest.raises(IllFormedHistory):
        mk_hist(((1, 2), (1, 9)))


# ---------------------------------------------------------------------------
# Terms

def test_closedness_and_free_vars():
    spec = RecSpec.of({"X": Seq(Act("a"), Var("X"))})
    assert free_vars(RecConst("X", spec)) == frozenset()
    assert is_closed(RecConst("X", spec))
    assert free_vars(Alt(Var("Y"), Act("a"))) == frozenset({"Y"})
    assert not is_closed(Var("Y"))


def test_recspec_rejects_loose_variables():
    with pytest.raises(ValueError):
        RecSpec.of({"X": Var("Z")})
    with pytest.raises(ValueError):
        RecConst("Y", RecSpec.of({"X": Act("a")}))


def test_substitute_skips_recursion_constants():
    spec = RecSpec.of({"X": Seq(Act("a"), Var("X"))})
    t = Alt(Var("X"), RecConst("X", spec))
    out = substitute(t, {"X": Act("b")})
    assert out == Alt(Act("b"), RecConst("X", spec))


def test_canonical_term_aci():
    a, b = Act("a"), Act("b")
    assert canonical_term(Alt(b, a)) == canonical_term(Alt(a, b))
    assert canonical_term(Alt(a, Alt(b, a))) == canonical_term(Alt(b, a))
    assert canonical_term(Alt(a, a)) == a
    assert canonical_term(Alt(a, DELTA)) == a
    assert canonical_term(Alt(DELTA, DELTA)) == DELTA
    # sequencing untouched
    assert canonical_term(Seq(EPSILON, a)) == Seq(EPSILON, a)


def test_canonical_term_idempotent_on_samples():
    rng = random.Random(3)
    from tests.gen import plain_rr_env, random_closed
    cfg, strat = plain_rr_env()
    for _ in range(60):
        t = random_closed(rng, cfg, strat, 3)
        c = canonical_term(t)
        assert canonical_term(c) == c


# ---------------------------------------------------------------------------
# Config validation

def _valid_cfg() -> SystemConfig:
    return assemble_config(
        ["a", "b", "c", "d"],
        control=["P_r"],
        creation={"w": Seq(Act("a"), EPSILON)},
        comm={("a", "b"): "c", ("b", "a"): "c"},
    )


def test_validate_config_accepts_valid():
    assert validate_config(_valid_cfg()).ok
    # delta-only communication over a bare alphabet is trivially fine
    assert validate_config(assemble_config(["a", "b"])).ok


def test_validate_config_missing_bar():
    cfg = _valid_cfg()
    del cfg.alphabet["P_r~"]
    report = validate_config(cfg)
    assert report.violations == ["missing bar action: P_r"]


def test_validate_config_control_comm_result():
    cfg = _valid_cfg()
    cfg.comm.entries[("a", "d")] = "P_r"
    cfg.comm.entries[("d", "a")] = "P_r"
    report = validate_config(cfg)
    assert report.violations
    assert all("reserved action" in v for v in report.violations)


def test_validate_config_asymmetric():
    # the result c communicates with nothing, so only symmetry breaks
    cfg = _valid_cfg()
    cfg.comm.entries[("a", "d")] = "c"
    report = validate_config(cfg)
    assert report.violations == [
        "not symmetric: gamma(a,d)=c but gamma(d,a) is undeclared"]


_MUTATIONS = {
    "missing bar action": lambda cfg: cfg.alphabet.pop("P_r~"),
    "not symmetric": lambda cfg: cfg.comm.entries.update({("a", "d"): "c"}),
    "reserved name used as plain": lambda cfg: cfg.alphabet.update(
        {"e~": ActionDecl(ActionKind.PLAIN)}),
    "creation body for w uses undeclared action":
        lambda cfg: cfg.creation.update({"w": Act("nosuch")}),
    "creation body for w is not closed":
        lambda cfg: cfg.creation.update({"w": Var("Q")}),
    "not associative": lambda cfg: cfg.comm.entries.update(
        {("c", "d"): "a", ("d", "c"): "a"}),
}


@pytest.mark.parametrize("expected", sorted(_MUTATIONS))
def test_validate_config_single_mutation_reports_that_violation(expected):
    cfg = _valid_cfg()
    _MUTATIONS[expected](cfg)
    report = validate_config(cfg)
    assert report.violations, f"mutation for {expected!r} went undetected"
    assert all(expected in v for v in report.violations), report.violations


def test_comm_with_control_argument_rejected():
    cfg = _valid_cfg()
    cfg.comm.entries[("a", "P_r")] = "b"
    cfg.comm.entries[("P_r", "a")] = "b"
    report = validate_config(cfg)
    assert any("reserved action" in v for v in report.violations)


# ---------------------------------------------------------------------------
# Guardedness

def test_guarded_syntactic():
    spec = RecSpec.of({"X": Seq(Act("a"), Var("X"))})
    report = check_guarded(spec)
    assert report.entry("X").status is Guardedness.SYNTACTICALLY_GUARDED


def test_unguarded_self_equation():
    spec = RecSpec.of({"X": Var("X")})
    report = check_guarded(spec)
    assert report.entry("X").status is Guardedness.NOT_SHOWN_GUARDED
    assert not report.all_guarded


def test_guardedness_is_subterm_based():
    # an occurrence under any enclosing action prefix is guarded as written,
    # even when unit laws could simplify the context away
    spec = RecSpec.of({"X": Seq(EPSILON, Seq(Act("a"), Var("X")))})
    report = check_guarded(spec)
    assert report.entry("X").status is Guardedness.SYNTACTICALLY_GUARDED
    spec2 = RecSpec.of({"X": Seq(Seq(Act("a"), Var("X")), Act("b"))})
    assert check_guarded(spec2).entry("X").status \
        is Guardedness.SYNTACTICALLY_GUARDED


def test_guarded_after_rewriting_unit_law():
    # (eps . a) . X has no action prefix over the occurrence until the
    # sequence is reassociated and the unit dropped
    spec = RecSpec.of({"X": Seq(Seq(EPSILON, Act("a")), Var("X"))})
    report = check_guarded(spec)
    entry = report.entry("X")
    assert entry.status is Guardedness.GUARDED_AFTER_REWRITING
    assert entry.witness is not None
    assert is_syntactically_guarded(entry.witness)


def test_guarded_after_unfolding_other_equation():
    spec = RecSpec.of({"X": Seq(Act("a"), Var("X")), "Y": Var("X")})
    report = check_guarded(spec)
    assert report.entry("X").status is Guardedness.SYNTACTICALLY_GUARDED
    assert report.entry("Y").status is Guardedness.GUARDED_AFTER_REWRITING


def test_mutual_unfolding_loop_is_not_shown_guarded():
    spec = RecSpec.of({"X": Var("Y"), "Y": Var("X")})
    report = check_guarded(spec, rewrite_budget=50)
    assert report.entry("X").status is Guardedness.NOT_SHOWN_GUARDED
    assert report.entry("Y").status is Guardedness.NOT_SHOWN_GUARDED


def test_guardedness_assoc_reshuffle():
    # (b . eps) . X needs reassociation before the prefix covers X
    spec = RecSpec.of({"X": Seq(Seq(Act("b"), EPSILON), Var("X"))})
    report = check_guarded(spec)
    assert report.entry("X").status is Guardedness.GUARDED_AFTER_REWRITING


def test_syntactic_guard_check_sees_through_other_operators():
    assert is_syntactically_guarded(Encap(frozenset({"a"}),
                                          Seq(Act("a"), Var("X"))))
    assert not is_syntactically_guarded(Par(Var("X"), Act("a")))
