import math
import pytest
from hypothesis import given, settings, strategies as st
import damsenviet.pzf as pzf
from damsenviet.pzf.bounds import (
    degree_envelope,
    lower_bound_horizons,
    phase_upper_estimate,
    universal_lower_bound,
)
from damsenviet.pzf.forcing import crossing_rounds
from damsenviet.pzf.graph import is_connected


def test_predict_bounds_example():
    prediction = pzf.predict_bounds(65536, 0.5)
    assert prediction.upper == pytest.approx(4.6309, abs=1e-4)
    assert prediction.lower == pytest.approx(4.0)
    assert prediction.regime == "dense"
    assert prediction.hypothesis_met


def test_predict_bounds_sparse_regime():
    prediction = pzf.predict_bounds(10 ** 6, 1e-4)
    assert prediction.regime == "sparse"
    assert prediction.lower == pytest.approx(math.log(1e4, 4))
    assert prediction.upper == pytest.approx(math.log2(math.log2(10 ** 6)) + math.log(1e4, 3))


def test_predict_bounds_flags_thin_graphs():
    assert not pzf.predict_bounds(1000, 0.001).hypothesis_met


@pytest.mark.parametrize("n, p", [(15, 0.5), (100, 0.0), (100, 1.5)])
def test_predict_bounds_rejects(n, p):
    with pytest.raises(pzf.IllegalValueException):
        pzf.predict_bounds(n, p)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=16, max_value=10 ** 9),
    p=st.floats(min_value=1e-9, max_value=1.0),
)
def test_bounds_are_ordered_and_monotone(n, p):
    prediction = pzf.predict_bounds(n, p)
    assert prediction.lower <= prediction.upper
    assert pzf.predict_bounds(2 * n, p).upper >= prediction.upper
    assert pzf.predict_bounds(n, p / 2).upper >= prediction.upper


def test_chernoff_tail():
    assert pzf.chernoff_tail(0.5, 12.0) == pytest.approx(2 * math.exp(-1))
    assert pzf.chernoff_tail(0.5, 0.0) == pytest.approx(2.0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.chernoff_tail(1.5, 1.0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.chernoff_tail(0.5, -1.0)


def test_universal_lower_bound():
    assert universal_lower_bound(65536) == pytest.approx(4.0)
    assert universal_lower_bound(2) == 0.0


def tail_floats():
    return st.floats(min_value=1e-3, max_value=1.499)


@settings(max_examples=80, deadline=None)
@given(
    eps=st.lists(tail_floats(), min_size=2, max_size=2),
    mean=st.lists(st.floats(min_value=0.0, max_value=1e4), min_size=2, max_size=2),
)
def test_chernoff_tail_decreases(eps, mean):
    eps_low, eps_high = sorted(eps)
    mean_low, mean_high = sorted(mean)
    assert pzf.chernoff_tail(eps_high, mean_low) <= pzf.chernoff_tail(eps_low, mean_low)
    assert pzf.chernoff_tail(eps_low, mean_high) <= pzf.chernoff_tail(eps_low, mean_low)
    assert 0.0 <= pzf.chernoff_tail(eps_high, mean_high) <= 2.0


@pytest.mark.parametrize(
    "n, p, seeds",
    [(256, 0.5, range(4)), (1024, 0.5, range(2)), (1024, 0.05, range(4)), (4096, 0.05, range(2))],
)
def test_forced_runs_respect_universal_lower_bound(n, p, seeds):
    floor = math.ceil(universal_lower_bound(n)) - 2
    for seed in seeds:
        g = pzf.sample_gnp(n, p, seed)
        if not is_connected(g):
            continue
        record = pzf.run_process(g, [0], pzf.ForcingRule.standard(), seed)
        assert record.status == pzf.Status.forced
        assert record.pt >= floor


def test_degree_envelope():
    envelope = degree_envelope(101, 0.1, 2.0)
    assert envelope.d == pytest.approx(10.0)
    assert envelope.d_lower == pytest.approx(5.0)
    assert envelope.d_upper == pytest.approx(15.0)


def test_dense_phase_thresholds():
    thresholds = pzf.phase_thresholds(10 ** 6, 0.5, 16.0)
    assert not thresholds.has_phase2
    assert thresholds.t2 == 0
    assert thresholds.t3 == thresholds.t1
    assert thresholds.t4 == pytest.approx(math.log2(math.log2(10 ** 6)))
    assert set(thresholds.crossing_targets()) == {"b1", "b3", "b4"}
    assert thresholds.upper_estimate == pytest.approx(
        2 * thresholds.t1 + thresholds.t4 + 2
    )
    assert phase_upper_estimate(10 ** 6, 0.5, 16.0) == thresholds.upper_estimate
    assert thresholds.phase4_growth(1) == pytest.approx(thresholds.b3)


def test_sparse_phase_thresholds():
    thresholds = pzf.phase_thresholds(10 ** 6, 1e-4, 16.0)
    assert thresholds.has_phase2
    assert thresholds.growth == pytest.approx(1.5)
    assert thresholds.t2 == pytest.approx(math.log(thresholds.b2 / thresholds.b1, 1.5))
    assert list(thresholds.crossing_targets()) == ["b1", "b2", "b3", "b4"]
    with pytest.raises(pzf.IllegalValueException):
        pzf.phase_thresholds(10 ** 6, 1e-4, 1.1)


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(min_value=16, max_value=10 ** 15),
    p=st.floats(min_value=1e-9, max_value=1.0),
    omega=st.floats(min_value=6.0, max_value=1000.0),
)
def test_phase_thresholds_are_ordered(n, p, omega):
    thresholds = pzf.phase_thresholds(n, p, omega)
    assert thresholds.b1 < thresholds.b3
    assert thresholds.t2 >= 0
    assert thresholds.has_phase2 == (thresholds.b2 > thresholds.b1)
    targets = thresholds.crossing_targets()
    assert list(targets)[0] == "b1" and list(targets)[-1] == "b4"


@pytest.mark.parametrize("n, p, omega", [(2000, 0.01, 8.0), (2000, 0.3, 8.0), (800, 0.02, 16.0)])
def test_crossing_rounds_follow_threshold_order(n, p, omega):
    thresholds = pzf.phase_thresholds(n, p, omega)
    targets = sorted(thresholds.crossing_targets().items(), key=lambda item: item[1])
    for seed in range(3):
        g = pzf.sample_gnp(n, p, seed)
        record = pzf.run_process(g, [0], pzf.ForcingRule.standard(), seed, thresholds=thresholds)
        assert record.crossings == crossing_rounds(record.b_trajectory, thresholds)
        rounds = [record.crossings[name] for name, _ in targets]
        reached = [r for r in rounds if r is not None]
        assert reached == sorted(reached)
        assert rounds[: len(reached)] == reached


@pytest.mark.parametrize(
    "p, c1, c2",
    [
        (p, c1, c2)
        for p in (1e-8, 1e-10, 1e-12)
        for c1, c2 in ((0.75, 0.8), (0.75, 0.95), (0.9, 0.95))
    ],
)
def test_eta_sequence_converges(p, c1, c2):
    eta = pzf.eta_sequence(p, c1, c2, 100)
    assert len(eta.values) == 101 and eta.values[0] == 0
    assert eta.is_monotone
    assert all(value <= eta.fixed_point * (1 + 1e-12) for value in eta.values)
    assert eta.relative_gap(100) <= 1e-12


def test_eta_sequence_outgrows_envelope():
    eta = pzf.eta_sequence(1e-8, 0.75, 0.8, 20)
    assert eta.envelope_violations[0] == 3
    assert not eta.envelope_holds
    assert eta.fixed_point == pytest.approx(2 * eta.envelope, rel=0.05)


def test_eta_sequence_without_fixed_point():
    eta = pzf.eta_sequence(0.5, 0.1, 0.2, 5)
    assert eta.fixed_point is None
    assert eta.relative_gap() is None
    with pytest.raises(pzf.IllegalValueException):
        pzf.eta_sequence(1e-8, 0.8, 0.75, 5)


def test_lower_bound_horizons():
    horizons = lower_bound_horizons(10 ** 6, 1e-4, 2.0, 0.75, 0.8)
    assert horizons.sparse_start == pytest.approx(1e4 ** 0.75)
    assert horizons.sparse_stop == pytest.approx(2 * 1e4 ** 0.8)
    assert horizons.sparse_horizon == pytest.approx(0.05 * math.log(1e4, 4))
    # 4 omega ln n / p is far above n^(1/3) here
    assert horizons.dense_horizon is None


def record(b, p, white_degrees=None, blue_edges=None):
    return pzf.TrialRecord(
        seed=0,
        trial=0,
        n=b[-1],
        p=p,
        family="gnp",
        start=(0,),
        rule=pzf.ForcingRule.standard(),
        status=pzf.Status.forced,
        pt=len(b) - 1,
        b_trajectory=tuple(b),
        e_blue_trajectory=blue_edges,
        max_white_degree_trajectory=white_degrees,
    )


def test_dense_audit():
    audit = pzf.audit_rounds(record((1, 3, 10), 0.5, white_degrees=(1, 2)), 0.5, "dense")
    assert audit.good == (True, True)
    assert audit.first_bad_round is None
    assert audit.degree_audited
    audit = pzf.audit_rounds(record((1, 5, 10), 0.5), 0.5, "dense")
    assert audit.growth == (False, True)
    assert audit.degree == (None, None)
    assert audit.first_bad_round == 1
    assert audit.bad_fraction() == 0.5
    assert audit.to_json()["degree"] == ["unaudited", "unaudited"]


def test_sparse_audit():
    audit = pzf.audit_rounds(
        record((1, 3, 10), 1e-8, blue_edges=(0, 2, 9)), 1e-8, "sparse", 0.75, 0.8
    )
    assert audit.good == (True, True)
    with pytest.raises(pzf.IllegalValueException):
        pzf.audit_rounds(record((1, 3, 10), 1e-8), 1e-8, "sparse", 0.75, 0.8)
    with pytest.raises(pzf.IllegalValueException):
        pzf.audit_rounds(record((1, 3, 10), 1e-8, blue_edges=(0, 2, 9)), 1e-8, "sparse")
