import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkburst.phases import (Phase, PhaseConfig, aging_report, all_transitions, classify_phases,
                              compute_timelines, degree_acceleration, node_timeline,
                              phase_transitions)
from linkburst.synth import NodeGroup, SynthConfig, gen_trace
from linkburst.trace import NodeSeries, NodeSeriesSet, build_node_series

weekly = st.lists(st.integers(0, 30), min_size=1, max_size=60)


def series_set(rows, T=None):
    """rows: (join_week, counts) per node, counts running to a common T."""
    T = max(j + len(n) - 1 for j, n in rows) if T is None else T
    return NodeSeriesSet.from_series(
        [NodeSeries(i, j, np.asarray(n), T) for i, (j, n) in enumerate(rows)])


def test_scripted_node(oracles):
    o = oracles["scripted_node"]
    s = NodeSeries(0, o["join_week"], np.array(o["n"]), o["join_week"] + len(o["n"]) - 1)
    tl = node_timeline(s)
    assert list(tl.a) == o["a"]
    assert [str(p) for p in tl.labels] == o["labels"]


def test_constant_counts():
    assert list(degree_acceleration(np.array([4, 4, 4, 4]))) == [4, 0, 0, 0]


def test_classification_examples():
    a = np.array([3, -3, 0, 0, -4])
    c = np.array([1, 1, 1, 0, 0])
    assert [Phase(x) for x in classify_phases(a, c)] == [
        Phase.ACC, Phase.DEC, Phase.CRUISE, Phase.INACT, Phase.DEC]


def test_thresholds_are_strict():
    assert [Phase(x) for x in classify_phases([2, -2], [1, 1])] == [Phase.CRUISE, Phase.CRUISE]


def test_classify_length_mismatch():
    with pytest.raises(ValueError):
        classify_phases([1, 2], [1])


def test_config_validation():
    with pytest.raises(ValueError):
        PhaseConfig(theta1=-1)
    with pytest.raises(ValueError):
        PhaseConfig(dt_weeks=0)


def test_transitions_example():
    s = NodeSeries(0, 0, np.array([3, 8, 8, 4, 0]), 4)
    tl = node_timeline(s)
    assert phase_transitions(tl) == [(2, Phase.ACC, Phase.CRUISE), (3, Phase.CRUISE, Phase.DEC)]
    flat = node_timeline(NodeSeries(0, 0, np.array([1, 1, 1]), 2))
    assert phase_transitions(flat) == []


def test_scripted_schedule_transitions():
    # the join week always has activity, so the schedule opens with a light
    # week; after it: inact -> acc -> cruise -> dec
    cfg = SynthConfig(groups=(NodeGroup("scripted", 1, counts=(1, 0, 6, 7, 7, 1)),),
                      seed=1, horizon_weeks=6, sink_nodes=50)
    tr, _ = gen_trace(cfg)
    ser = build_node_series(tr, epoch=0)
    tl = compute_timelines(ser).timeline(int(np.searchsorted(ser.nodes, 0)))
    got = [(w, str(a), str(b)) for w, a, b in phase_transitions(tl)]
    assert got == [(1, "cruise", "inact"), (2, "inact", "acc"), (3, "acc", "cruise"),
                   (5, "cruise", "dec")]


def test_aging_single_node():
    ser = series_set([(0, [3, 3])])
    rep = aging_report(compute_timelines(ser))
    assert list(rep.n_first_acc) == [1, 0]
    assert list(rep.network_size) == [1, 1]


def test_max_acceleration_tie_goes_to_earliest_week():
    ser = series_set([(0, [5, 0, 5, 0])])
    tl = compute_timelines(ser)
    assert list(tl.a) == [5, -5, 5, -5]
    rep = aging_report(tl)
    assert list(rep.n_max_acc) == [1, 0, 0, 0]
    assert list(rep.n_max_dec) == [0, 1, 0, 0]


def test_aging_report_against_brute_force():
    rng = np.random.default_rng(4)
    rows = [(int(rng.integers(0, 10)), None) for _ in range(40)]
    rows = [(j, rng.poisson(3, 12 - j) * rng.integers(0, 3, 12 - j)) for j, _ in rows]
    rows = [(j, np.where(np.arange(n.size) == 0, n + 1, n)) for j, n in rows]
    ser = series_set(rows, T=11)
    tl = compute_timelines(ser)
    rep = aging_report(tl)
    first_acc = np.zeros(12, int)
    max_dec = np.zeros(12, int)
    acc_by_age = {}
    for t in tl:
        weeks = t.join_week + np.arange(t.life)
        acc = [w for w, s in zip(weeks, t.s) if s == Phase.ACC]
        if acc:
            first_acc[acc[0]] += 1
        dec = [(-a, w) for w, a, s in zip(weeks, t.a, t.s) if s == Phase.DEC]
        if dec:
            max_dec[max(dec, key=lambda x: (x[0], -x[1]))[1]] += 1
        for age, (a, s) in enumerate(zip(t.a, t.s)):
            if s == Phase.ACC:
                acc_by_age.setdefault(age, []).append(a)
    assert list(rep.n_first_acc) == list(first_acc)
    assert list(rep.n_max_dec) == list(max_dec)
    for age, vals in acc_by_age.items():
        assert rep.avg_acc[age] == pytest.approx(np.mean(vals))
    for vec in (rep.n_first_acc, rep.n_first_dec, rep.n_max_acc, rep.n_max_dec):
        assert vec.sum() <= len(ser)
    assert list(rep.network_size) == [sum(j <= t for j, _ in rows) for t in range(12)]


def test_empty_aging_report():
    ser = NodeSeriesSet(np.empty(0, np.int64), np.empty(0, np.int64), np.zeros(1, np.int64),
                        np.empty(0, np.int64), 0)
    with pytest.raises(ValueError):
        aging_report(compute_timelines(ser))


@settings(max_examples=200, deadline=None)
@given(weekly)
def test_acceleration_identity(n):
    n = np.asarray(n)
    a = degree_acceleration(n)
    prev = np.concatenate([[0], n[:-1]])
    assert np.array_equal(a, n - prev)
    assert a.sum() == n[-1]


@settings(max_examples=100, deadline=None)
@given(weekly, st.integers(1, 4))
def test_acceleration_matches_definition_for_any_lag(n, lag):
    d = np.cumsum(n)
    at = lambda t: d[t] if t >= 0 else 0
    expected = [(at(t) - 2 * at(t - lag) + at(t - 2 * lag)) / lag**2 for t in range(len(n))]
    assert np.allclose(degree_acceleration(np.asarray(n), PhaseConfig(dt_weeks=lag)), expected)


@settings(max_examples=100, deadline=None)
@given(weekly, st.floats(0.5, 6), st.floats(-6, -0.5))
def test_labels_total_and_acc_implies_activity(n, th1, th2):
    n = np.asarray(n)
    cfg = PhaseConfig(th1, th2)
    a = degree_acceleration(n, cfg)
    s = classify_phases(a, n >= 1, cfg)
    assert s.size == n.size
    assert set(np.unique(s)) <= {0, 1, 2, 3}
    # a > theta1 >= 0 needs n(t) > n(t-1) >= 0, so the week is active
    assert (n[s == Phase.ACC] >= 1).all()
    assert (n[s == Phase.INACT] == 0).all()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), weekly), min_size=1, max_size=8),
       st.integers(1, 3))
def test_vectorized_timelines_match_per_node(rows, lag):
    T = max(j + len(n) - 1 for j, n in rows)
    rows = [(j, (list(n) + [0] * T)[:T - j + 1]) for j, n in rows]
    rows = [(j, [max(n[0], 1)] + n[1:]) for j, n in rows]
    ser = series_set(rows, T)
    cfg = PhaseConfig(dt_weeks=lag)
    tls = compute_timelines(ser, cfg)
    for i, s in enumerate(ser):
        one = node_timeline(s, cfg)
        assert np.array_equal(tls.timeline(i).a, one.a)
        assert np.array_equal(tls.timeline(i).s, one.s)
    node, week, s0, s1 = all_transitions(tls)
    per_node = [(int(tl.node), w, int(a), int(b)) for tl in tls for w, a, b in phase_transitions(tl)]
    assert list(zip(node.tolist(), week.tolist(), s0.tolist(), s1.tolist())) == per_node


def test_poisson_population_avg_acc_flat_in_age():
    cfg = SynthConfig(groups=(NodeGroup("poisson", 400, rate=40 / 604800),),
                      seed=2, horizon_weeks=30, sink_nodes=100000)
    tr, _ = gen_trace(cfg)
    ser = build_node_series(tr, epoch=0)
    ours = np.isin(ser.nodes, np.arange(400))
    sub = NodeSeriesSet.from_series([s for s, k in zip(ser, ours) if k])
    rep = aging_report(compute_timelines(sub))
    mid = rep.avg_acc[3:25]
    assert np.nanmax(mid) - np.nanmin(mid) < 0.25 * np.nanmean(mid)
