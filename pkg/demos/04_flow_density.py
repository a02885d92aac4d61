"""
Video flow density and its effect on rank
=========================================

A rush-hour stream: quiet for the first half, four times busier in the
second. The arrival rate per ten-minute bin shows the change, and the
same reappearance loses rank faster when it lands in the busy half.
"""

import numpy as np

from rankpersist import EngineConfig, Scorer, SynthConfig, flow_density, generate, simulate

quiet, busy = 0.01, 0.04
config = SynthConfig(seed=4, horizon=20_000.0, rate_schedule=((0.0, quiet), (10_000.0, busy)))
data = generate(config)

profile = flow_density(data.events, 600.0, data.horizon)
half = len(profile.counts) // 2
print(f"mean people/s, first half:  {profile.counts_per_unit_time[:half].mean():.4f}")
print(f"mean people/s, second half: {profile.counts_per_unit_time[half:].mean():.4f}")

###############################################################################
# Rank 30 minutes after each probe's first reappearance, grouped by half.

traces = simulate(data.events, data.probes, Scorer(), EngineConfig(horizon=data.horizon))
arrival = {e.track.track_id: e.arrival for e in data.events}
growth = {"quiet": [], "busy": []}
for probe, trace in zip(data.probes, traces):
    for tid in data.ground_truth[probe.probe_id]:
        t = arrival[tid]
        if t + 1800 > data.horizon:
            continue
        r0, r1 = trace.value_at(t), trace.value_at(t + 1800)
        growth["quiet" if t < 10_000 else "busy"].append(r1 - r0)
for k, v in growth.items():
    print(k, "mean rank change over 30 min:", np.mean(v) if v else "n/a")
