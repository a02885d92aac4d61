"""
Rank of one person over a growing gallery
=========================================

A single probe, a single true reappearance, and a gallery that keeps
growing. The reappearance enters at rank 5 after two minutes and is pushed
down as closer-looking strangers arrive.
"""

from pathlib import Path

import numpy as np

from rankpersist import (EngineConfig, GalleryEvent, Probe, ProbeSet, Scorer, Track,
                         persistence, simulate)
from rankpersist.model import sort_events
from rankpersist.plots import line_chart

out = Path("demo-output")
out.mkdir(exist_ok=True)

###############################################################################
# Build the stream by hand. Features are 2-D; the probe sits at the origin so
# a track's distance is just its x coordinate.


def person(track_id, t, x, identity=None):
    return GalleryEvent(t, Track(track_id, identity, t, t, [[x, 0.0]]))


events = [person(f"early{k}", 10.0 * (k + 1), 1.0 + k) for k in range(4)]
events.append(person("match", 120.0, 5.0, identity="A"))
for k, t in enumerate([180.0, 300.0, 420.0, 540.0, 600.0, 720.0]):
    events.append(person(f"close{k}", t, 4.5 - 0.1 * k))
events = sort_events(events)

probes = ProbeSet([Probe("P1", "A", Track("probe", "A", 0.0, 0.0, [[0.0, 0.0]]))])

###############################################################################
# Replay the stream. The trace only stores the instants where the rank
# changes.

(trace,) = simulate(events, probes, Scorer(), EngineConfig(horizon=1200.0))
for t, r in trace.breakpoints:
    print(f"t = {t / 60:5.1f} min  rank = {r if r is not None else '-'}")

summary = persistence(trace, [5, 10])
print("minutes in the top 10:", summary.durations[10] / 60)

###############################################################################
# Draw the staircase.

xs, ys = [], []
for start, end, r in trace.segments():
    if r is not None:
        xs += [start / 60, end / 60]
        ys += [r, r]
svg = line_chart([("P1", xs, ys)], "time (minutes)", "rank", y_range=(0, max(ys) + 1))
(out / "temporal_rank_curve.svg").write_text(svg)
