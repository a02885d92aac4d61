import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankpersist import (ArrivalMode, ContractViolation, EngineConfig, GalleryEvent, RankIndex,
                         Scorer, SynthConfig, Track, generate, oracle_simulate, rank_of, simulate)
from rankpersist.metrics import persistence
from rankpersist.model import sort_events

from conftest import distance_event, fig1_stream, make_event, make_probes

EUCLID = Scorer()


def test_rank_of_single_key():
    index = RankIndex([(1.0, 0.0, "a")])
    assert rank_of(index, (1.0, 0.0, "a")) == 1


def test_rank_of_tie_break_by_arrival():
    keys = [(1.0, 0.0, "a"), (2.0, 5.0, "b"), (2.0, 9.0, "c"), (3.0, 1.0, "d")]
    index = RankIndex(keys)
    assert rank_of(index, (2.0, 9.0, "c")) == 3
    assert rank_of(index, (2.0, 5.0, "b")) == 2


def test_rank_of_absent_key():
    with pytest.raises(ContractViolation):
        rank_of(RankIndex([(1.0, 0.0, "a")]), (2.0, 0.0, "b"))
    with pytest.raises(ContractViolation):
        RankIndex().delete((1.0, 0.0, "a"))


def test_rank_of_agrees_with_sorted_array(rng):
    scores = rng.integers(0, 50, size=1000).astype(float)  # plenty of ties
    keys = [(s, float(rng.integers(0, 100)), f"t{i:04d}") for i, s in enumerate(scores)]
    index = RankIndex()
    for k in keys:
        index.insert(k)
    ordered = sorted(keys)
    position = {k: i + 1 for i, k in enumerate(ordered)}
    assert all(index.rank_of(k) == position[k] for k in keys)
    for k in keys[::2]:
        index.delete(k)
    ordered = sorted(keys[1::2])
    assert [index.rank_of(k) for k in ordered] == list(range(1, len(ordered) + 1))


def test_singleton_gallery():
    events = [distance_event("m", 120.0, 3.0, "A")]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    (trace,) = simulate(events, probes, EUCLID, EngineConfig(horizon=600.0))
    assert trace.breakpoints == ((0.0, None), (120.0, 1))
    assert trace.horizon == 600.0


def test_match_at_time_zero_replaces_initial_absent():
    events = [distance_event("m", 0.0, 3.0, "A")]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    (trace,) = simulate(events, probes, EUCLID, EngineConfig(horizon=10.0))
    assert trace.breakpoints == ((0.0, 1),)


def test_fig1_pushed_past_rank_ten():
    events, probes = fig1_stream()
    (trace,) = simulate(events, probes, EUCLID, EngineConfig(horizon=1800.0))
    assert trace.value_at(120.0) == 5
    assert trace.value_at(719.0) == 10
    assert trace.value_at(720.0) == 11
    ranks = [r for t, r in trace.breakpoints if t >= 120.0]
    assert ranks == sorted(ranks)
    assert persistence(trace, [10]).durations[10] == 600.0


def test_twenty_closer_distractors():
    events = [distance_event(f"e{k}", 10.0 + k, 1.0 + 0.1 * k) for k in range(4)]
    events.append(distance_event("match", 120.0, 5.0, "A"))
    events += [distance_event(f"c{k:02d}", 120.0 + 30.0 * (k + 1), 2.0 + 0.1 * k) for k in range(20)]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    (trace,) = simulate(sort_events(events), probes, EUCLID, EngineConfig(horizon=1200.0))
    assert trace.value_at(120.0) == 5
    ranks = [r for t, r in trace.breakpoints if t >= 120.0]
    assert ranks == sorted(ranks)
    assert ranks[-1] == 25


def test_simultaneous_events_sampled_once():
    events = sort_events([distance_event("b", 50.0, 1.0), distance_event("a", 50.0, 2.0, "A")])
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    (trace,) = simulate(events, probes, EUCLID, EngineConfig(horizon=100.0))
    assert trace.breakpoints == ((0.0, None), (50.0, 2))


def test_ties_broken_by_arrival_then_track_id():
    # all equal distances: earlier arrivals rank ahead, then track id
    events = sort_events([distance_event("z", 1.0, 1.0), distance_event("b", 2.0, 1.0, "A"),
                          distance_event("a", 2.0, 1.0)])
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    (trace,) = simulate(events, probes, EUCLID, EngineConfig(horizon=10.0))
    assert trace.value_at(2.0) == 3


def test_retention_window_expiry():
    events = sort_events([distance_event("m", 10.0, 2.0, "A"), distance_event("d", 20.0, 1.0)])
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    cfg = EngineConfig(horizon=200.0, retention_window=50.0)
    (trace,) = simulate(events, probes, EUCLID, cfg)
    # match gone at 60, distractor gone at 70
    assert trace.breakpoints == ((0.0, None), (10.0, 1), (20.0, 2), (60.0, None))
    assert oracle_simulate(events, probes, EUCLID, cfg) == [trace]


def test_expiry_of_best_match_falls_back_to_next_match():
    events = sort_events([distance_event("m1", 0.0, 1.0, "A"), distance_event("d", 5.0, 2.0),
                          distance_event("m2", 10.0, 3.0, "A")])
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    cfg = EngineConfig(horizon=100.0, retention_window=20.0)
    (trace,) = simulate(events, probes, EUCLID, cfg)
    assert trace.breakpoints == ((0.0, 1), (20.0, 2), (25.0, 1), (30.0, None))


def test_unsorted_events_rejected():
    events = [distance_event("a", 5.0, 1.0), distance_event("b", 1.0, 1.0)]
    with pytest.raises(ContractViolation):
        simulate(events, make_probes(("P1", "A", [0.0, 0.0])), EUCLID, EngineConfig(horizon=10.0))


def test_dim_mismatch_rejected():
    events = [make_event("a", 1.0, [1.0, 2.0, 3.0])]
    with pytest.raises(ContractViolation):
        simulate(events, make_probes(("P1", "A", [0.0, 0.0])), EUCLID, EngineConfig(horizon=10.0))


def test_event_beyond_horizon_rejected():
    with pytest.raises(ContractViolation):
        simulate([distance_event("a", 50.0, 1.0)], make_probes(("P1", "A", [0.0, 0.0])),
                 EUCLID, EngineConfig(horizon=10.0))


def test_bad_retention():
    with pytest.raises(ContractViolation):
        EngineConfig(horizon=10.0, retention_window=0.0)
    assert EngineConfig(horizon=10.0, retention_window=float("inf")).retention_window is None


def test_arrival_mode_start():
    track = Track("m", "A", 30.0, 90.0, [[1.0, 0.0]])
    events = [GalleryEvent(90.0, track)]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    cfg = EngineConfig(horizon=100.0, arrival_mode=ArrivalMode.TRACK_START)
    (trace,) = simulate(events, probes, EUCLID, cfg)
    assert trace.breakpoints == ((0.0, None), (30.0, 1))


def test_no_probes():
    assert simulate([distance_event("a", 1.0, 1.0)], make_probes(), EUCLID,
                    EngineConfig(horizon=10.0)) == []


def _instance(seed, n_events, n_probes, **kw):
    cfg = SynthConfig(seed=seed, horizon=5000.0, arrival_rate=n_events / 5000.0, dim=8,
                      n_identities=n_probes + 2, n_probes=n_probes, frames_per_track=(1, 3), **kw)
    return generate(cfg)


@pytest.mark.parametrize("window", [None, 400.0, 2500.0])
@pytest.mark.parametrize("seed", range(4))
def test_oracle_equivalence_small(seed, window):
    ds = _instance(seed, 200, 5)
    cfg = EngineConfig(horizon=ds.horizon, retention_window=window)
    assert simulate(ds.events, ds.probes, EUCLID, cfg) == oracle_simulate(ds.events, ds.probes, EUCLID, cfg)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 6), st.sampled_from(["A", "B", None])),
                max_size=40),
       st.sampled_from([None, 3.0, 7.0]))
def test_oracle_equivalence_with_heavy_ties(spec, window):
    # integer times and distances force many timestamp and score ties
    events = sort_events([distance_event(f"t{i:02d}", float(t), float(d), ident)
                          for i, (t, d, ident) in enumerate(spec)])
    probes = make_probes(("P1", "A", [0.0, 0.0]), ("P2", "B", [0.0, 0.0]), ("P3", "C", [1.0, 0.0]))
    cfg = EngineConfig(horizon=30.0, retention_window=window)
    assert simulate(events, probes, EUCLID, cfg) == oracle_simulate(events, probes, EUCLID, cfg)


@pytest.mark.parametrize("seed", range(5))
def test_best_rank_improves_only_at_true_match_arrivals(seed):
    ds = _instance(seed, 400, 4, reappearances_per_probe=3)
    traces = simulate(ds.events, ds.probes, EUCLID, EngineConfig(horizon=ds.horizon))
    for probe, trace in zip(ds.probes, traces):
        match_times = {e.arrival for e in ds.events if e.track.identity_id == probe.identity_id}
        bps = trace.breakpoints
        for (_, prev), (t, cur) in zip(bps, bps[1:]):
            if prev is not None and cur < prev:
                assert t in match_times


def test_deterministic_reruns():
    ds = _instance(7, 500, 5)
    cfg = EngineConfig(horizon=ds.horizon)
    assert simulate(ds.events, ds.probes, EUCLID, cfg) == simulate(ds.events, ds.probes, EUCLID, cfg)


def test_time_shift_equivariance():
    ds = _instance(3, 300, 4)
    c = 1000.0
    shifted = [GalleryEvent(e.arrival + c, Track(e.track.track_id, e.track.identity_id,
                                                 e.track.t_start + c, e.track.t_end + c,
                                                 e.track.frames))
               for e in ds.events]
    base = simulate(ds.events, ds.probes, EUCLID, EngineConfig(horizon=ds.horizon))
    moved = simulate(shifted, ds.probes, EUCLID, EngineConfig(horizon=ds.horizon + c))
    for a, b in zip(base, moved):
        expect = [(t + c, r) for t, r in a.breakpoints if r is not None]
        assert [(t, r) for t, r in b.breakpoints if r is not None] == expect
