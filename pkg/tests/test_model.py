import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rankpersist import ContractViolation, GalleryEvent, ProbeSet, RankTrace, SchemaError, Track
from rankpersist.model import validate_dataset

from conftest import make_event, make_probes


def test_track_rejects_bad_times():
    with pytest.raises(ContractViolation):
        Track("t", None, 5.0, 4.0, [[1.0]])
    with pytest.raises(ContractViolation):
        Track("t", None, -1.0, 4.0, [[1.0]])
    with pytest.raises(ContractViolation):
        Track("t", None, 0.0, float("inf"), [[1.0]])


def test_track_rejects_empty_and_nonfinite_frames():
    with pytest.raises(ContractViolation):
        Track("t", None, 0.0, 1.0, np.zeros((0, 3)))
    with pytest.raises(ContractViolation):
        Track("t", None, 0.0, 1.0, [[1.0, float("nan")]])


def test_event_cannot_arrive_before_track_starts():
    track = Track("t", None, 10.0, 20.0, [[1.0]])
    with pytest.raises(ContractViolation):
        GalleryEvent(5.0, track)


def test_probe_ids_unique():
    with pytest.raises(SchemaError):
        make_probes(("P1", "A", [0.0]), ("P1", "B", [1.0]))


def test_rank_trace_invariants():
    with pytest.raises(ContractViolation):
        RankTrace("p", ((5.0, 1), (5.0, 2)), 10.0)
    with pytest.raises(ContractViolation):
        RankTrace("p", ((0.0, 0),), 10.0)
    tr = RankTrace("p", ((0.0, None), (120.0, 1)), 600.0)
    assert tr.value_at(60.0) is None
    assert tr.value_at(120.0) == 1
    assert list(tr.segments()) == [(0.0, 120.0, None), (120.0, 600.0, 1)]


def test_validate_empty():
    report = validate_dataset([], ProbeSet([]))
    assert report.errors == []
    assert report.warnings == ["empty stream"]


def test_validate_duplicate_track_id():
    events = [make_event("x", 1.0, [0.0]), make_event("x", 2.0, [1.0])]
    report = validate_dataset(events, ProbeSet([]))
    assert report.errors == ["duplicate track_id x"]


def test_validate_probe_never_reappears():
    events = [make_event("g1", 1.0, [0.0], "B"), make_event("g2", 2.0, [1.0])]
    probes = make_probes(("P7", "A7", [0.0]), ("P2", "B", [0.0]))
    # brute-force scan of the labels present in the stream
    labels = {e.track.identity_id for e in events}
    missing = [p.identity_id for p in probes if p.identity_id not in labels]
    assert missing == ["A7"]
    report = validate_dataset(events, probes)
    assert report.ok
    assert report.warnings == ["probe A7 never reappears"]


def test_validate_dim_mismatch_and_probe_in_gallery():
    events = [make_event("g1", 1.0, [0.0, 1.0]), make_event("probe-P1", 2.0, [1.0])]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    report = validate_dataset(events, probes)
    assert any("dim mismatch" in e and "probe-P1" in e for e in report.errors)
    assert "probe track probe-P1 also appears in the gallery stream" in report.errors


def test_validate_flags_nonmonotone_arrivals():
    events = [make_event("a", 5.0, [0.0]), make_event("b", 1.0, [0.0])]
    report = validate_dataset(events, ProbeSet([]))
    assert report.ok
    assert "arrivals are not monotone in stream order" in report.warnings


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from(["A", "B", None])),
                min_size=1, max_size=12),
       st.randoms(use_true_random=False))
def test_validate_idempotent_and_order_insensitive_within_timestamp(spec, rnd):
    events = [make_event(f"t{i % 7}", float(t), [0.0], ident) for i, (t, ident) in enumerate(spec)]
    events.sort(key=lambda e: e.arrival)
    probes = make_probes(("P1", "A", [0.0]), ("P2", "Z", [0.0]))
    first = validate_dataset(events, probes)
    assert validate_dataset(events, probes) == first
    # shuffle only inside groups of equal arrival time
    groups = {}
    for e in events:
        groups.setdefault(e.arrival, []).append(e)
    shuffled = []
    for t in sorted(groups):
        g = list(groups[t])
        rnd.shuffle(g)
        shuffled += g
    assert validate_dataset(shuffled, probes) == first
