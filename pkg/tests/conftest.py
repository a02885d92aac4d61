import numpy as np
import pytest

from rankpersist import GalleryEvent, Probe, ProbeSet, Track
from rankpersist.model import sort_events


def make_event(track_id, t, feature, identity=None):
    frames = np.atleast_2d(np.asarray(feature, dtype=float))
    return GalleryEvent(t, Track(track_id, identity, t, t, frames))


def make_probes(*specs):
    """specs: (probe_id, identity_id, feature)"""
    return ProbeSet([Probe(pid, ident, Track(f"probe-{pid}", ident, 0.0, 0.0,
                                             np.atleast_2d(np.asarray(f, dtype=float))))
                     for pid, ident, f in specs])


def distance_event(track_id, t, distance, identity=None):
    """An event whose 2-D feature sits ``distance`` from the origin."""
    return make_event(track_id, t, [distance, 0.0], identity)


def fig1_stream():
    """Match arrives at 120 s behind 4 closer tracks; 6 closer ones follow by 720 s."""
    events = [distance_event(f"early{k}", 10.0 * (k + 1), 1.0 + k) for k in range(4)]
    events.append(distance_event("match", 120.0, 5.0, identity="A"))
    later = [180.0, 300.0, 420.0, 540.0, 600.0, 720.0]
    events += [distance_event(f"close{k}", t, 4.5 - 0.1 * k) for k, t in enumerate(later)]
    # farther distractors never move the match
    events += [distance_event(f"far{k}", 150.0 + 97.0 * k, 9.0 + k) for k in range(12)]
    probes = make_probes(("P1", "A", [0.0, 0.0]))
    return sort_events(events), probes


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
