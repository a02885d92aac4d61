"""Synthetic temporal re-id workloads and the brute-force rank oracle.

Appearance is a two-level Gaussian model: every person has a feature
center drawn around the origin with spread ``sigma_between`` and each frame
scatters around that center with spread ``sigma_within``. A probe's later
reappearances shift the center a little (a change of clothes). Distractors
arrive as a Poisson process, optionally with a piecewise-constant rate.

Randomness comes from numpy's PCG64 bit generator seeded with ``seed``.
Streams are reproducible for a fixed numpy version (pinned in
pyproject.toml).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import EngineConfig, prepare_events, probe_matrix
from .model import (ContractViolation, GalleryEvent, Probe, ProbeSet, RankTrace, Track,
                    sort_events)
from .scoring import Scorer, pool

# Defaults follow a 10 hour single-camera recording with 7 actors, each
# reappearing 3 times among roughly 535 candidates.
DEFAULT_HORIZON = 36_000.0
DEFAULT_RATE = 0.0149


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    horizon: float = DEFAULT_HORIZON
    arrival_rate: float = DEFAULT_RATE
    dim: int = 16
    n_identities: int = 7
    n_probes: int = 7
    reappearances_per_probe: int = 3
    sigma_within: float = 0.6
    sigma_between: float = 1.0
    reappearance_shift: float = 1.0
    frames_per_track: tuple = (4, 12)
    frame_interval: float = 0.5
    # [(segment start, rate), ...]; overrides arrival_rate when given
    rate_schedule: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "frames_per_track", tuple(self.frames_per_track))
        if self.rate_schedule is not None:
            object.__setattr__(self, "rate_schedule",
                               tuple((float(a), float(b)) for a, b in self.rate_schedule))
        self.check()

    def check(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ContractViolation("horizon must be positive and finite")
        if self.arrival_rate < 0:
            raise ContractViolation("arrival_rate must be non-negative")
        if self.dim < 1:
            raise ContractViolation("dim must be positive")
        if not 0 <= self.n_probes <= self.n_identities:
            raise ContractViolation("need 0 <= n_probes <= n_identities")
        if self.reappearances_per_probe < 0:
            raise ContractViolation("reappearances_per_probe must be non-negative")
        if min(self.sigma_within, self.sigma_between, self.reappearance_shift) < 0:
            raise ContractViolation("spreads must be non-negative")
        lo, hi = self.frames_per_track
        if not 1 <= lo <= hi:
            raise ContractViolation("frames_per_track must satisfy 1 <= low <= high")
        if self.frame_interval < 0:
            raise ContractViolation("frame_interval must be non-negative")
        if self.rate_schedule is not None:
            starts = [s for s, _ in self.rate_schedule]
            if not starts or starts[0] != 0 or any(b <= a for a, b in zip(starts, starts[1:])):
                raise ContractViolation("rate_schedule must start at 0 with increasing starts")
            if any(r < 0 for _, r in self.rate_schedule):
                raise ContractViolation("rate_schedule rates must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frames_per_track"] = list(self.frames_per_track)
        if self.rate_schedule is not None:
            d["rate_schedule"] = [list(x) for x in self.rate_schedule]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ContractViolation(f"unknown synth config keys {sorted(unknown)}")
        d = dict(d)
        if d.get("rate_schedule") is not None:
            d["rate_schedule"] = tuple(tuple(x) for x in d["rate_schedule"])
        return cls(**d)


@dataclass(frozen=True)
class SyntheticDataset:
    events: list
    probes: ProbeSet
    # probe_id -> track ids of its reappearances, in arrival order
    ground_truth: dict
    config: SynthConfig = field(repr=False)

    @property
    def horizon(self) -> float:
        return self.config.horizon


def poisson_arrivals(rng: np.random.Generator, rate: float, start: float, end: float) -> np.ndarray:
    """Sorted event times of a homogeneous Poisson process on ``[start, end)``."""
    count = rng.poisson(rate * (end - start))
    times = np.sort(rng.uniform(start, end, size=count))
    return times[times < end]


def _arrival_times(cfg: SynthConfig, rng) -> np.ndarray:
    schedule = cfg.rate_schedule or ((0.0, cfg.arrival_rate),)
    pieces = []
    for k, (start, rate) in enumerate(schedule):
        end = schedule[k + 1][0] if k + 1 < len(schedule) else cfg.horizon
        end = min(end, cfg.horizon)
        if end > start:
            pieces.append(poisson_arrivals(rng, rate, start, end))
    return np.concatenate(pieces) if pieces else np.zeros(0)


def _make_track(rng, cfg, center, track_id, identity_id, arrival):
    lo, hi = cfg.frames_per_track
    n = int(rng.integers(lo, hi + 1))
    frames = center + rng.normal(0.0, cfg.sigma_within, size=(n, cfg.dim))
    t_start = max(0.0, arrival - (n - 1) * cfg.frame_interval)
    return Track(track_id, identity_id, t_start, arrival, frames)


def generate(config: SynthConfig) -> SyntheticDataset:
    """Build a gallery stream and probe set that depend only on ``config``.

    Arrival times are track end times, so replaying with the default
    arrival mode puts each event at its Poisson-generated time.
    """
    config.check()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    dim = config.dim

    centers = rng.normal(0.0, config.sigma_between, size=(config.n_identities, dim))
    identity_ids = [f"A{k + 1}" for k in range(config.n_identities)]

    probes = []
    for k in range(config.n_probes):
        track = _make_track(rng, config, centers[k], f"probe-{identity_ids[k]}",
                            identity_ids[k], 0.0)
        probes.append(Probe(f"P{k + 1}", identity_ids[k], track))

    events = []
    ground_truth = {p.probe_id: [] for p in probes}
    for k, ident in enumerate(identity_ids):
        times = np.sort(rng.uniform(0.0, config.horizon, size=config.reappearances_per_probe))
        for j, t in enumerate(times):
            shifted = centers[k] + rng.normal(0.0, config.reappearance_shift, size=dim)
            tid = f"{ident}-r{j + 1}"
            events.append(GalleryEvent(float(t), _make_track(rng, config, shifted, tid, ident, float(t))))
            if k < config.n_probes:
                ground_truth[f"P{k + 1}"].append(tid)

    arrivals = _arrival_times(config, rng)
    width = max(6, len(str(len(arrivals))))
    for j, t in enumerate(arrivals):
        center = rng.normal(0.0, config.sigma_between, size=dim)
        tid = f"d{j:0{width}d}"
        events.append(GalleryEvent(float(t), _make_track(rng, config, center, tid, None, float(t))))

    return SyntheticDataset(
        events=sort_events(events),
        probes=ProbeSet(probes),
        ground_truth={k: tuple(v) for k, v in ground_truth.items()},
        config=config,
    )


def oracle_simulate(events: Sequence[GalleryEvent], probes: ProbeSet, scorer: Scorer,
                    config: EngineConfig) -> list[RankTrace]:
    """Reference replay that ranks the whole present gallery from scratch.

    At every timestamp where something arrives or expires, the present
    candidates are found by direct comparison against each arrival time
    and fully sorted per probe by (score, arrival, track_id).
    """
    events = prepare_events(events, config)
    # own replay order, so a stable sort on score alone yields the full
    # (score, arrival, track_id) order
    events = sorted(events, key=lambda e: (e.arrival, e.track.track_id))
    P = len(probes)
    n = len(events)
    if P == 0:
        return []
    pmat = probe_matrix(probes)
    scores = np.zeros((P, n))
    for j, e in enumerate(events):
        scores[:, j] = scorer.score_batch(pmat, pool(e.track))
    arrival = np.array([e.arrival for e in events])
    labels = np.array([e.track.identity_id for e in events], dtype=object)
    is_match = np.array([labels == p.identity_id for p in probes]).reshape(P, n)

    window = config.retention_window
    times = set(arrival.tolist())
    if window is not None:
        times.update((arrival + window).tolist())
    times = sorted(t for t in times if t <= config.horizon)

    points = [[(0.0, None)] for _ in range(P)]
    for t in times:
        present = arrival <= t
        if window is not None:
            present &= t < arrival + window
        ids = np.flatnonzero(present)
        if len(ids):
            order = np.argsort(scores[:, ids], axis=-1, kind="stable")
            hits = np.take_along_axis(is_match[:, ids], order, axis=-1)
            found = hits.any(axis=1)
            first = hits.argmax(axis=1) + 1
        else:
            found = np.zeros(P, dtype=bool)
            first = np.zeros(P, dtype=np.int64)
        for p in range(P):
            rank = int(first[p]) if found[p] else None
            last_t, last_rank = points[p][-1]
            if rank == last_rank:
                continue
            if t == last_t:
                points[p][-1] = (t, rank)
            else:
                points[p].append((t, rank))

    return [RankTrace(pr.probe_id, tuple(pts), config.horizon)
            for pr, pts in zip(probes, points)]
