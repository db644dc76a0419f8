import json
import math
import os
import pytest
from hypothesis import assume, given, settings, strategies as st
import damsenviet.pzf as pzf
from damsenviet.pzf.montecarlo import (
    SweepRow,
    read_records,
    run_experiment,
)


def forced_record(pt):
    return pzf.TrialRecord(
        seed=0,
        trial=pt,
        n=pt + 1,
        p=None,
        family=None,
        start=(0,),
        rule=pzf.ForcingRule.standard(),
        status=pzf.Status.forced,
        pt=pt,
        b_trajectory=tuple(range(1, pt + 2)),
    )


def capped_record():
    return pzf.TrialRecord(
        seed=0,
        trial=9,
        n=3,
        p=None,
        family=None,
        start=(0,),
        rule=pzf.ForcingRule.standard(),
        status=pzf.Status.round_cap_reached,
        pt=None,
        b_trajectory=(1, 1),
    )


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", pzf.StartPolicy.fixed_vertex(3)),
        ("0,4,7", pzf.StartPolicy.fixed_set([0, 4, 7])),
        ("min", pzf.StartPolicy.singletons_min()),
        ("random:3@2", pzf.StartPolicy.random_set(3, 2)),
        ("random:4", pzf.StartPolicy.random_set(4)),
    ],
)
def test_start_policy_parse(text, expected):
    assert pzf.StartPolicy.parse(text) == expected


def test_start_policy_rejects():
    with pytest.raises(pzf.IllegalValueException):
        pzf.StartPolicy.parse("fastest")
    with pytest.raises(pzf.IllegalValueException):
        pzf.StartPolicy.parse("random:0")
    g = pzf.named_graph(pzf.GraphSpec("path", 4))
    with pytest.raises(pzf.IllegalValueException):
        pzf.StartPolicy.fixed_set([1, 4]).resolve(g, 0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.StartPolicy.random_set(5).resolve(g, 0)


def test_random_start_sets():
    g = pzf.named_graph(pzf.GraphSpec("path", 10))
    policy = pzf.StartPolicy.random_set(3, 2)
    (start,) = policy.resolve(g, 41)
    assert len(start) == 3 and 2 in start
    assert policy.resolve(g, 41) == [start]
    assert pzf.StartPolicy.singletons_min().resolve(g, 0) == [frozenset([v]) for v in range(10)]


def test_config_json():
    config = pzf.ExperimentConfig(
        graph=pzf.GraphSpec("gnp", 100, 0.1),
        start=pzf.StartPolicy.parse("0,5"),
        rule=pzf.ForcingRule.alternative(3.0, [0]),
        trials=7,
        master_seed=11,
    )
    assert pzf.ExperimentConfig.from_json(config.to_json()) == config
    other = pzf.ExperimentConfig.from_json({**config.to_json(), "workers": 4, "out_dir": "x"})
    assert other.digest == config.digest
    reseeded = pzf.ExperimentConfig.from_json({**config.to_json(), "master_seed": 12})
    assert reseeded.digest != config.digest
    with pytest.raises(pzf.DeserializeException):
        pzf.ExperimentConfig.from_json({**config.to_json(), "seed": 3})


def test_config_validation():
    with pytest.raises(pzf.IllegalValueException):
        pzf.ExperimentConfig()
    with pytest.raises(pzf.IllegalValueException):
        pzf.ExperimentConfig(graph=pzf.GraphSpec("path", 4), graph_file="g.txt")
    with pytest.raises(pzf.IllegalValueException):
        pzf.ExperimentConfig(graph=pzf.GraphSpec("path", 4), trials=0)
    with pytest.raises(pzf.IllegalValueException):
        pzf.ExperimentConfig(graph_file="g.txt", resample_graph=True)


def test_config_read(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"graph": {"family": "path", "n": 4}, "trials": 3}))
    config = pzf.ExperimentConfig.read(str(path))
    assert config.trials == 3 and config.graph == pzf.GraphSpec("path", 4)
    path.write_text("{trials: 3")
    with pytest.raises(pzf.DeserializeException):
        pzf.ExperimentConfig.read(str(path))


def test_summarize():
    stats = pzf.summarize([forced_record(1), forced_record(2), forced_record(3)])
    assert stats.mean == 2 and stats.median == 2
    assert stats.standard_error == pytest.approx(1 / math.sqrt(3))
    assert (stats.min, stats.max) == (1, 3)
    single = pzf.summarize([forced_record(4)])
    assert single.standard_error is None
    capped = pzf.summarize([forced_record(2), capped_record()])
    assert (capped.total, capped.count, capped.cap_hits) == (2, 1, 1)
    assert capped.mean == 2
    nothing = pzf.summarize([capped_record()])
    assert nothing.empty and nothing.mean is None
    with pytest.raises(pzf.IllegalValueException):
        pzf.summarize([])


@settings(max_examples=60, deadline=None)
@given(
    pts=st.lists(st.integers(min_value=1, max_value=12), max_size=30),
    caps=st.integers(min_value=0, max_value=3),
    cuts=st.lists(st.integers(min_value=0, max_value=33), max_size=3),
)
def test_merged_chunks_match_whole(pts, caps, cuts):
    records = [forced_record(pt) for pt in pts] + [capped_record() for _ in range(caps)]
    assume(records)
    bounds = sorted(min(cut, len(records)) for cut in cuts)
    chunks = [records[a:b] for a, b in zip([0] + bounds, bounds + [len(records)])]
    merged = pzf.SummaryStats.from_values([])
    for chunk in chunks:
        part = pzf.summarize(chunk) if chunk else pzf.SummaryStats.from_values([])
        merged = merged.merge(part)
    whole = pzf.summarize(records)
    assert merged == whole
    assert merged.values == whole.values


def test_merge_boundaries():
    one = pzf.summarize([forced_record(4)])
    assert one.merge(pzf.SummaryStats.from_values([])) == one
    both = one.merge(pzf.summarize([forced_record(2)]))
    assert both == pzf.summarize([forced_record(2), forced_record(4)])
    assert both.standard_error == pytest.approx(1.0)
    a, b, c = (pzf.summarize([forced_record(pt)]) for pt in (1, 5, 3))
    assert a.merge(b).merge(c) == a.merge(b.merge(c))
    capped = pzf.summarize([capped_record()]).merge(pzf.summarize([capped_record()]))
    assert capped.empty and capped.cap_hits == 2
    read_back = pzf.SummaryStats(1, 1, 0, 1.0, None, 1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(pzf.IllegalValueException):
        read_back.merge(one)


def test_trials_are_reproducible_across_workers():
    config = pzf.ExperimentConfig(graph=pzf.GraphSpec("gnp", 200, 0.05), trials=12, master_seed=5)
    serial = [record.to_jsonl() for record in pzf.run_trials(config)]
    threaded = [
        record.to_jsonl()
        for record in pzf.run_trials(pzf.ExperimentConfig.from_json({**config.to_json(), "workers": 3}))
    ]
    assert serial == threaded
    assert [json.loads(line)["trial"] for line in serial] == list(range(12))
    assert all(json.loads(line)["seed"] == 5 for line in serial)


def test_singletons_min_keeps_fastest():
    config = pzf.ExperimentConfig(
        graph=pzf.GraphSpec("path", 3), start=pzf.StartPolicy.singletons_min(), trials=40
    )
    pts = set()
    for record in pzf.run_trials(config):
        assert record.pt in (1, 2)
        if record.pt == 1:
            assert record.start == (1,)
        pts.add(record.pt)
    assert pts == {1, 2}


def test_resampled_graphs_record_crossings():
    config = pzf.ExperimentConfig(
        graph=pzf.GraphSpec("gnp", 200, 0.1),
        trials=4,
        resample_graph=True,
        thresholds_omega=16.0,
    )
    records = list(pzf.run_trials(config))
    assert len(records) == 4
    assert all(set(record.crossings) == {"b1", "b3", "b4"} for record in records)
    assert len({record.b_trajectory for record in records}) > 1


def test_run_experiment_writes_outputs(tmp_path):
    config = pzf.ExperimentConfig(
        graph=pzf.GraphSpec("cycle", 8), trials=5, out_dir=str(tmp_path / "out")
    )
    records, stats = run_experiment(config)
    assert stats.count == 5
    assert read_records(str(tmp_path / "out" / "records.jsonl")) == records
    with open(tmp_path / "out" / "manifest.json") as file:
        manifest = json.load(file)
    assert manifest["config_sha256"] == config.digest
    assert manifest["sampler_mode"] == "named"
    assert os.path.exists(tmp_path / "out" / "summary.csv")


def test_sweep_records_failures(tmp_path):
    template = pzf.ExperimentConfig(graph=pzf.GraphSpec("path", 3), trials=4)
    table = pzf.sweep([(30, 0.5), (20, 1.5), (40, 0.5)], template)
    assert len(table) == 3
    assert [row.n for row in table.complete_rows()] == [30, 40]
    assert table.rows[1].error.startswith("IllegalValueException")
    assert table.rows[0].prediction == pzf.predict_bounds(30, 0.5)
    path = str(tmp_path / "sweep.csv")
    table.write_csv(path)
    reread = pzf.SweepTable.read_csv(path)
    assert [row.stats for row in reread.rows] == [row.stats for row in table.rows]
    assert reread.rows[1].error == table.rows[1].error


def synthetic_table(points):
    return pzf.SweepTable(
        tuple(
            SweepRow(n, p, pzf.SummaryStats.from_values([median]))
            for n, p, median in points
        )
    )


def test_fit_growth_recovers_slopes():
    table = synthetic_table([(16, 0.5, 3.0), (256, 0.5, 4.0), (65536, 0.5, 5.0)])
    fit = pzf.fit_growth(table, "loglog_n")
    assert fit.slope == pytest.approx(1.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.max_residual == pytest.approx(0.0, abs=1e-9)
    slope = 2 / math.log(4)
    table = synthetic_table(
        [(10 ** 5, p, slope * math.log(1 / p) + 1) for p in (1e-1, 1e-2, 1e-3, 1e-4)]
    )
    assert pzf.fit_growth(table, "log_inv_p").slope == pytest.approx(slope)


def test_fit_growth_rejects():
    table = synthetic_table([(16, 0.5, 3.0), (256, 0.5, 4.0)])
    with pytest.raises(pzf.IllegalValueException):
        pzf.fit_growth(table, "loglog_n")
    table = synthetic_table([(16, 0.5, 3.0), (16, 0.5, 4.0), (16, 0.5, 5.0)])
    with pytest.raises(pzf.IllegalValueException):
        pzf.fit_growth(table, "loglog_n")
    with pytest.raises(pzf.IllegalValueException):
        pzf.fit_growth(table, "quadratic")
