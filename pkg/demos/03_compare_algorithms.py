"""
Comparing two matchers by their persistence
===========================================

The same gallery is ranked twice: once with plain Euclidean distances and
once with distances scrambled by a random factor in [0.5, 2]. The
scrambled matcher should hold its true matches on the shortlist for less
time, and the dominance report says at which rank levels that holds.
"""

from rankpersist import EngineConfig, NoisyScorer, Scorer, SynthConfig, compare, generate, simulate
from rankpersist.metrics import dominance_fraction, log_duration_grid, rpc_from_traces

data = generate(SynthConfig(seed=1))
config = EngineConfig(horizon=data.horizon)
grid = log_duration_grid(1.0, data.horizon, 60)

clean = rpc_from_traces(simulate(data.events, data.probes, Scorer(), config), (5, 20), grid)
noisy = rpc_from_traces(simulate(data.events, data.probes, NoisyScorer(seed=1), config), (5, 20), grid)

report = compare(clean, noisy)
print(report.to_text())
print(f"cells where the clean matcher is at least as good: {dominance_fraction(clean, noisy):.1%}")
