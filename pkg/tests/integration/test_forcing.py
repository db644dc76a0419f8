from fractions import Fraction
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
import damsenviet.pzf as pzf
from damsenviet.pzf.forcing import iterate_rounds, crossing_rounds
from damsenviet.pzf.utils import make_rng


def named(family, n):
    return pzf.named_graph(pzf.GraphSpec(family, n))


@pytest.mark.parametrize(
    "family, n, blue, u, expected",
    [
        ("complete", 2, [0], 0, Fraction(1)),
        ("path", 3, [1], 1, Fraction(1, 2)),
        ("cycle", 4, [0, 1], 0, Fraction(1)),
        ("star", 3, [0], 0, Fraction(1, 3)),
    ],
)
def test_force_probability(family, n, blue, u, expected):
    assert pzf.force_probability(named(family, n), blue, u) == expected


def test_force_probability_rejects_white_and_isolated():
    with pytest.raises(pzf.IllegalValueException):
        pzf.force_probability(named("path", 3), [1], 0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.force_probability(pzf.Graph.from_edges(2, []), [0], 0)


@pytest.mark.parametrize(
    "family, n, blue, expected",
    [
        ("path", 3, [0], {0, 1}),
        ("complete", 3, [0], {0}),
        ("star", 3, [0], {0}),
        ("path", 5, [2], {2}),
        ("star", 3, [1], {0, 1}),
    ],
)
def test_classical_step(family, n, blue, expected):
    assert pzf.classical_step(named(family, n), blue) == expected


def test_deterministic_runs():
    for seed in range(20):
        record = pzf.run_process(named("complete", 2), [0], pzf.ForcingRule.standard(), seed)
        assert record.status == pzf.Status.forced and record.pt == 1
        record = pzf.run_process(named("path", 3), [0], pzf.ForcingRule.standard(), seed)
        assert record.pt == 2
        assert record.b_trajectory == (1, 2, 3)


def test_run_is_reproducible():
    g = pzf.sample_gnp(200, 0.05, 3)
    rule = pzf.ForcingRule.standard()
    a = pzf.run_process(g, [0], rule, 99, record_blue_edges=True)
    b = pzf.run_process(g, [0], rule, 99, record_blue_edges=True)
    assert a == b
    assert a.to_jsonl() == b.to_jsonl()


def test_empty_start_rejected():
    with pytest.raises(pzf.IllegalValueException):
        pzf.run_process(named("path", 3), [], pzf.ForcingRule.standard(), 0)


def test_disconnected_graph_hits_round_cap():
    g = pzf.Graph.from_edges(4, [(0, 1), (2, 3)])
    record = pzf.run_process(g, [0], pzf.ForcingRule.standard(), 1, max_rounds=10)
    assert record.status == pzf.Status.round_cap_reached
    assert record.pt is None
    assert record.b_trajectory[-1] == 2
    assert len(record.b_trajectory) == 11


def test_one_round_frequencies_on_path():
    g = named("path", 3)
    state = pzf.ProcessState.initial(g, [1])
    rng = make_rng(2024)
    samples = 20000
    counts = {}
    for _ in range(samples):
        added = frozenset(pzf.probabilistic_step(g, state, pzf.ForcingRule.standard(), rng).newly_blue.tolist())
        counts[added] = counts.get(added, 0) + 1
    assert set(counts) <= {frozenset(), frozenset([0]), frozenset([2]), frozenset([0, 2])}
    error = np.sqrt(0.25 * 0.75 / samples)
    for added in (frozenset(), frozenset([0]), frozenset([2]), frozenset([0, 2])):
        assert abs(counts.get(added, 0) / samples - 0.25) <= 5 * error


def test_alternative_on_regular_graph_matches_standard():
    g = named("cycle", 8)
    standard = pzf.run_process(g, [0], pzf.ForcingRule.standard(), 17)
    alternative = pzf.run_process(g, [0], pzf.ForcingRule.alternative(2.0), 17)
    assert standard.b_trajectory == alternative.b_trajectory
    assert not alternative.coupling_violation


def test_alternative_without_active_rounds_is_standard():
    g = pzf.sample_gnp(150, 0.08, 5)
    rule = pzf.ForcingRule.alternative(1.0, active_rounds=[])
    assert not rule.is_active(0)
    standard = pzf.run_process(g, [0], pzf.ForcingRule.standard(), 8)
    alternative = pzf.run_process(g, [0], rule, 8)
    assert standard.b_trajectory == alternative.b_trajectory


def test_small_divisor_forces_everything():
    g = named("complete", 6)
    record = pzf.run_process(g, [0], pzf.ForcingRule.alternative(0.5), 3)
    assert record.pt == 1
    assert not record.coupling_violation


def test_large_divisor_sets_validity_flag():
    g = named("path", 6)
    record = pzf.run_process(g, [2], pzf.ForcingRule.alternative(3.0, [0]), 3)
    assert record.coupling_violation


def test_rule_json_and_validation():
    rule = pzf.ForcingRule.alternative(4.5, [0, 2])
    assert pzf.ForcingRule.from_json(rule.to_json()) == rule
    assert rule.is_active(2) and not rule.is_active(1)
    assert pzf.ForcingRule.from_omega(101, 0.1, 2.0).d_lower == pytest.approx(5.0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.ForcingRule.alternative(0.0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.ForcingRule("standard", d_lower=2.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 32), start=st.integers(min_value=0, max_value=79))
def test_state_trajectories(seed, start):
    g = pzf.sample_gnp(80, 0.1, seed)
    edges = g.edges()
    state = pzf.ProcessState.initial(g, [start], record_blue_edges=True, record_white_degree=True)
    previous = state.blue.copy()
    for state in iterate_rounds(g, state, pzf.ForcingRule.standard(), make_rng(seed), 40):
        assert not np.any(previous[state.newly_blue])
        assert np.all(state.blue[previous])
        inside = int(np.sum(state.blue[edges[:, 0]] & state.blue[edges[:, 1]]))
        assert state.blue_edges == inside
        previous = state.blue.copy()
    b = state.blue_count_trajectory
    assert all(x <= y for x, y in zip(b, b[1:]))
    assert b[-1] == int(state.blue.sum())
    assert state.blue_edge_trajectory[-1] == state.blue_edges
    assert len(state.max_white_degree_trajectory) == state.round


def test_shadow_containment():
    for seed in range(50):
        record, classical, contained = pzf.run_with_shadow(named("path", 5), [0], seed)
        assert contained
        assert classical[1] == {0, 1}
    record, classical, contained = pzf.run_with_shadow(named("complete", 3), [0], 4)
    assert contained and all(z == {0} for z in classical)
    record, classical, contained = pzf.run_with_shadow(named("cycle", 5), range(5), 4)
    assert contained and record.pt == 0 and classical == (frozenset(range(5)),)


def test_record_json_and_status_invariant():
    record = pzf.run_process(named("path", 4), [1], pzf.ForcingRule.standard(), 6)
    assert pzf.TrialRecord.from_jsonl(record.to_jsonl()) == record
    with pytest.raises(pzf.InvariantViolationException):
        pzf.TrialRecord(
            seed=0,
            trial=0,
            n=3,
            p=None,
            family=None,
            start=(0,),
            rule=pzf.ForcingRule.standard(),
            status=pzf.Status.forced,
            pt=1,
            b_trajectory=(1, 2),
        )
    with pytest.raises(pzf.DeserializeException):
        pzf.TrialRecord.from_jsonl('{"seed": 0}')
    with pytest.raises(pzf.DeserializeException):
        pzf.TrialRecord.from_jsonl("not json")


def test_crossing_rounds():
    assert crossing_rounds((1, 3, 8, 20), {"a": 3, "b": 10, "c": 50}) == {
        "a": 1,
        "b": 3,
        "c": None,
    }
    assert crossing_rounds((1, 2), None) == {}


def test_star_from_leaf_grows_with_size():
    means = []
    for n in (4, 64):
        g = named("star", n)
        pts = [pzf.run_process(g, [1], pzf.ForcingRule.standard(), seed).pt for seed in range(300)]
        assert all(pt >= 2 for pt in pts)
        means.append(np.mean(pts))
    assert means[0] < means[1]
