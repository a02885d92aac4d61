"""Scale benchmark: full simulate + metrics pipeline on a large stream.

Run as ``python -m rankpersist.bench [n_events] [n_probes] [dim]``; prints
one JSON object with timings and peak memory.

The brute-force oracle re-sorts the whole gallery at every timestamp, so
its cost per event grows with the gallery. It is timed on a prefix of the
stream and scaled linearly to the full length, which understates its real
cost and so gives a conservative speed-up figure.
"""

from __future__ import annotations

import json
import resource
import sys
import time

from .engine import EngineConfig, simulate
from .metrics import DEFAULT_RANK_LEVELS, flow_density, log_duration_grid, persistence, compute_rpc
from .scoring import Scorer
from .synth import SynthConfig, generate, oracle_simulate


def _peak_rss_bytes() -> int:
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def run(n_events: int = 100_000, n_probes: int = 50, dim: int = 64, seed: int = 0,
        oracle_prefix: int = 4_000) -> dict:
    horizon = 36_000.0
    # a little extra rate, then cut to exactly n_events arrivals
    cfg = SynthConfig(seed=seed, horizon=horizon, arrival_rate=1.02 * n_events / horizon, dim=dim,
                      n_identities=n_probes, n_probes=n_probes, reappearances_per_probe=3,
                      frames_per_track=(1, 2))
    ds = generate(cfg)
    if len(ds.events) < n_events:
        raise RuntimeError(f"generated {len(ds.events)} events, need {n_events}")
    events = ds.events[:n_events]
    horizon = events[-1].arrival
    rss_before = _peak_rss_bytes()

    t0 = time.perf_counter()
    traces = simulate(events, ds.probes, Scorer(), EngineConfig(horizon=horizon))
    t_sim = time.perf_counter() - t0
    summaries = [persistence(t, DEFAULT_RANK_LEVELS) for t in traces]
    rpc = compute_rpc(summaries, DEFAULT_RANK_LEVELS, log_duration_grid(1.0, horizon))
    flow = flow_density(events, 600.0, horizon)
    t_total = time.perf_counter() - t0
    rss_after = _peak_rss_bytes()

    prefix = events[:oracle_prefix]
    p_horizon = prefix[-1].arrival
    t1 = time.perf_counter()
    engine_prefix = simulate(prefix, ds.probes, Scorer(), EngineConfig(horizon=p_horizon))
    t_engine_prefix = time.perf_counter() - t1
    t1 = time.perf_counter()
    oracle_prefix_traces = oracle_simulate(prefix, ds.probes, Scorer(), EngineConfig(horizon=p_horizon))
    t_oracle_prefix = time.perf_counter() - t1
    oracle_full_lower = t_oracle_prefix * n_events / len(prefix)

    keys = n_events * n_probes
    return {
        "n_events": n_events,
        "n_probes": n_probes,
        "dim": dim,
        "simulate_seconds": t_sim,
        "pipeline_seconds": t_total,
        "rpc_invariant_violations": len(rpc.check_invariants()),
        "flow_total": flow.total(),
        "peak_rss_bytes": rss_after,
        "rss_growth_bytes": rss_after - rss_before,
        "bytes_per_index_key": (rss_after - rss_before) / keys,
        "oracle_prefix_events": len(prefix),
        "engine_prefix_seconds": t_engine_prefix,
        "oracle_prefix_seconds": t_oracle_prefix,
        "prefix_traces_equal": engine_prefix == oracle_prefix_traces,
        "oracle_full_lower_bound_seconds": oracle_full_lower,
        "speedup_lower_bound": oracle_full_lower / t_total,
    }


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:]]
    print(json.dumps(run(*args), indent=2))
