"""Aggregate curves computed from rank traces: RPC, CMC, flow density."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .model import (ContractViolation, CmcTable, FlowDensityProfile, GalleryEvent, ProbeSet,
                    RankTrace, RpcTable)
from .scoring import Scorer, pool

DEFAULT_RANK_LEVELS = (1, 5, 10, 20)


@dataclass(frozen=True)
class PersistenceSummary:
    """Longest unbroken stay of a probe's best rank within the top ``r``.

    ``reached[r]`` says whether the best rank was ever ``<= r`` at all,
    which is what separates a zero-length stay at the horizon from never
    making the shortlist.
    """

    probe_id: str
    durations: dict  # r -> seconds
    censored: dict  # r -> longest stay ran into the horizon
    reached: dict  # r -> best rank ever <= r

    def duration(self, r: int) -> float:
        return self.durations[r]


def persistence(trace: RankTrace, rank_levels: Sequence[int]) -> PersistenceSummary:
    durations, censored, reached = {}, {}, {}
    segments = list(trace.segments())
    for r in rank_levels:
        best, best_censored, hit = 0.0, False, False
        start = None
        for seg_start, seg_end, rank in segments:
            inside = rank is not None and rank <= r
            if inside:
                hit = True
                if start is None:
                    start = seg_start
            elif start is not None:
                if seg_start - start > best:
                    best, best_censored = seg_start - start, False
                start = None
        if start is not None:
            length = trace.horizon - start
            # ties go to the interval that runs into the horizon
            if length >= best:
                best, best_censored = length, True
        durations[r], censored[r], reached[r] = best, best_censored, hit
    return PersistenceSummary(trace.probe_id, durations, censored, reached)


def log_duration_grid(start: float, stop: float, num: int = 60) -> tuple:
    if not (0 < start <= stop) or num < 1:
        raise ContractViolation("log grid needs 0 < start <= stop and num >= 1")
    if num == 1:
        return (float(start),)
    return tuple(float(x) for x in np.geomspace(start, stop, num))


def compute_rpc(summaries: Sequence[PersistenceSummary], rank_levels: Sequence[int],
                duration_grid: Sequence[float]) -> RpcTable:
    """Fraction of probes whose longest top-``r`` stay lasts at least ``d``.

    The denominator is the number of probes. At ``d = 0`` a probe counts
    when its best rank ever reached ``r`` or better.
    """
    if not summaries:
        raise ContractViolation("RPC needs at least one probe")
    rank_levels = tuple(rank_levels)
    grid = np.asarray(duration_grid, dtype=np.float64)
    if np.any(np.diff(grid) < 0) or np.any(grid < 0):
        raise ContractViolation("duration grid must be non-negative and ascending")
    values = np.zeros((len(rank_levels), len(grid)))
    for i, r in enumerate(rank_levels):
        try:
            durs = np.array([s.durations[r] for s in summaries])
            hit = np.array([s.reached[r] for s in summaries])
        except KeyError:
            raise ContractViolation(f"summaries do not cover rank level {r}") from None
        counts = ((durs[None, :] >= grid[:, None]) & hit[None, :]).sum(axis=1)
        values[i] = counts / len(summaries)
    return RpcTable(rank_levels, tuple(grid), values)


def rpc_from_traces(traces: Sequence[RankTrace], rank_levels=DEFAULT_RANK_LEVELS,
                    duration_grid=None) -> RpcTable:
    if duration_grid is None:
        horizon = max(t.horizon for t in traces)
        duration_grid = log_duration_grid(1.0, max(horizon, 1.0))
    return compute_rpc([persistence(t, rank_levels) for t in traces], rank_levels, duration_grid)


def compute_cmc(final_ranks: Mapping[str, Optional[int]], max_rank: int):
    """CMC over probes that have a true match in the final gallery.

    Returns the table and the sorted ids of probes left out for lacking a
    match.
    """
    if max_rank < 1:
        raise ContractViolation("max_rank must be at least 1")
    excluded = sorted(pid for pid, r in final_ranks.items() if r is None)
    ranks = np.array([r for r in final_ranks.values() if r is not None], dtype=np.int64)
    if len(ranks) == 0:
        return CmcTable(np.zeros(max_rank)), excluded
    ks = np.arange(1, max_rank + 1)
    values = (ranks[None, :] <= ks[:, None]).sum(axis=1) / len(ranks)
    return CmcTable(values), excluded


def final_ranks(events: Sequence[GalleryEvent], probes: ProbeSet, scorer: Scorer) -> dict:
    """Best true-match rank of every probe against the complete gallery.

    All candidates are sorted at once by (score, arrival, track_id); probes
    with no true match map to ``None``.
    """
    out = {p.probe_id: None for p in probes}
    if not events or not len(probes):
        return out
    pmat = np.vstack([pool(p.track).feature for p in probes])
    scores = np.column_stack([scorer.score_batch(pmat, pool(e.track)) for e in events])
    arrival = np.array([e.arrival for e in events])
    tids = sorted(range(len(events)), key=lambda j: events[j].track.track_id)
    tid_rank = np.empty(len(events), dtype=np.int64)
    tid_rank[tids] = np.arange(len(events))
    labels = [e.track.identity_id for e in events]
    for p, probe in enumerate(probes):
        order = np.lexsort((tid_rank, arrival, scores[p]))
        for pos, j in enumerate(order):
            if labels[j] == probe.identity_id:
                out[probe.probe_id] = pos + 1
                break
    return out


def flow_density(events: Sequence[GalleryEvent], bin_width: float, horizon: float) -> FlowDensityProfile:
    """Arrivals per second in consecutive bins ``[b*w, (b+1)*w)``.

    An arrival exactly at the horizon falls in the last bin so every event
    is counted.
    """
    if not bin_width > 0:
        raise ContractViolation("bin_width must be positive")
    n_bins = max(1, math.ceil(horizon / bin_width))
    counts = np.zeros(n_bins, dtype=np.int64)
    for e in events:
        b = min(int(e.arrival // bin_width), n_bins - 1)
        counts[b] += 1
    return FlowDensityProfile(bin_width, counts / bin_width, counts)


@dataclass(frozen=True)
class LevelDominance:
    rank: int
    a_dominates: bool  # A >= B at every grid duration
    b_dominates: bool
    max_gap: float  # largest |A - B|
    max_gap_duration: float
    max_gap_sign: int  # +1 when A is above B there, -1 below, 0 identical


@dataclass(frozen=True)
class DominanceReport:
    levels: tuple

    @property
    def identical(self) -> bool:
        return all(lv.max_gap == 0 for lv in self.levels)

    @property
    def a_dominates(self) -> bool:
        return all(lv.a_dominates for lv in self.levels) and not self.identical

    @property
    def b_dominates(self) -> bool:
        return all(lv.b_dominates for lv in self.levels) and not self.identical

    def summary(self) -> str:
        if self.identical:
            return "no strict dominance; curves identical"
        if self.a_dominates:
            return "A dominates B at all rank levels"
        if self.b_dominates:
            return "B dominates A at all rank levels"
        return "no dominance at all rank levels"

    def to_text(self) -> str:
        lines = [self.summary()]
        for lv in self.levels:
            if lv.a_dominates and lv.b_dominates:
                verdict = "identical"
            elif lv.a_dominates:
                verdict = "A >= B"
            elif lv.b_dominates:
                verdict = "B >= A"
            else:
                verdict = "curves cross"
            lines.append(f"rank {lv.rank}: {verdict}; max gap {lv.max_gap:.6g} "
                         f"at {lv.max_gap_duration:.6g} s")
        return "\n".join(lines)


def compare(rpc_a: RpcTable, rpc_b: RpcTable) -> DominanceReport:
    """Weak dominance of RPC ``A`` over ``B`` (and back) per rank level."""
    if rpc_a.rank_levels != rpc_b.rank_levels or rpc_a.duration_grid != rpc_b.duration_grid:
        raise ContractViolation("RPC tables use different rank levels or duration grids")
    grid = rpc_a.duration_grid
    levels = []
    for i, r in enumerate(rpc_a.rank_levels):
        diff = rpc_a.values[i] - rpc_b.values[i]
        if len(diff):
            j = int(np.argmax(np.abs(diff)))
            gap, where, sign = float(abs(diff[j])), grid[j], int(np.sign(diff[j]))
        else:
            gap, where, sign = 0.0, 0.0, 0
        levels.append(LevelDominance(r, bool(np.all(diff >= 0)), bool(np.all(diff <= 0)),
                                     gap, where, sign))
    return DominanceReport(tuple(levels))


def dominance_fraction(rpc_a: RpcTable, rpc_b: RpcTable, rank_levels=None) -> float:
    """Share of (rank level, duration) cells where A >= B."""
    levels = rank_levels or rpc_a.rank_levels
    rows = [rpc_a.rank_levels.index(r) for r in levels]
    return float(np.mean(rpc_a.values[rows] >= rpc_b.values[rows]))
