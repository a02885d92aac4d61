"""Event-driven replay of a growing gallery against a fixed probe set.

Every arrival is pooled and scored once against all probes, then inserted
into one order-statistic index per probe. Each probe's best rank (the
smallest rank over its true matches in the gallery) is kept up to date
incrementally and sampled once per distinct timestamp, so traces hold
exact breakpoints rather than a sampled grid.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sortedcontainers import SortedList

from .model import ContractViolation, GalleryEvent, ProbeSet, RankTrace, is_sorted, sort_events
from .scoring import Scorer, pool


class ArrivalMode(enum.Enum):
    TRACK_END = "end"
    TRACK_START = "start"


@dataclass(frozen=True)
class EngineConfig:
    """``retention_window=None`` keeps every candidate forever.

    ``arrival_mode=None`` replays events at their recorded arrival; a mode
    re-times each event at its track's start or end first.
    """

    horizon: float
    retention_window: Optional[float] = None
    arrival_mode: Optional[ArrivalMode] = None

    def __post_init__(self):
        if self.retention_window is not None:
            if math.isinf(self.retention_window):
                object.__setattr__(self, "retention_window", None)
            elif not self.retention_window > 0:
                raise ContractViolation("retention_window must be positive")
        if not (math.isfinite(self.horizon) and self.horizon >= 0):
            raise ContractViolation("horizon must be finite and non-negative")


class RankIndex:
    """Order-statistic multiset of comparable keys.

    ``rank_of(key)`` is one plus the number of stored keys strictly less
    than ``key``. The engine stores ``(score, seq)`` where ``seq`` is the
    event's position in (arrival, track_id) order, which orders keys
    exactly as ``(score, arrival, track_id)`` would.
    """

    __slots__ = ("_keys",)

    def __init__(self, keys=()):
        self._keys = SortedList(keys)

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key):
        return key in self._keys

    def insert(self, key):
        self._keys.add(key)

    def delete(self, key):
        try:
            self._keys.remove(key)
        except ValueError:
            raise ContractViolation(f"key {key!r} not in index") from None

    def count_less(self, key) -> int:
        return self._keys.bisect_left(key)

    def rank_of(self, key) -> int:
        if key not in self._keys:
            raise ContractViolation(f"key {key!r} not in index")
        return self._keys.bisect_left(key) + 1


def rank_of(index: RankIndex, key) -> int:
    return index.rank_of(key)


def prepare_events(events: Sequence[GalleryEvent], config: EngineConfig) -> list[GalleryEvent]:
    """Check replay order, apply the arrival mode and the horizon bound."""
    if not is_sorted(events):
        raise ContractViolation("events must be sorted by (arrival, track_id)")
    if config.arrival_mode is not None:
        attr = "t_end" if config.arrival_mode is ArrivalMode.TRACK_END else "t_start"
        events = sort_events(GalleryEvent(getattr(e.track, attr), e.track) for e in events)
    if events and events[-1].arrival > config.horizon:
        raise ContractViolation(
            f"event at {events[-1].arrival} lies beyond horizon {config.horizon}")
    return list(events)


def probe_matrix(probes: ProbeSet) -> np.ndarray:
    feats = [pool(p.track).feature for p in probes]
    dims = {f.shape[0] for f in feats}
    if len(dims) > 1:
        raise ContractViolation(f"probes have mixed dims {sorted(dims)}")
    return np.vstack(feats) if feats else np.zeros((0, 0))


class _TraceBuilder:
    __slots__ = ("probe_id", "points")

    def __init__(self, probe_id):
        self.probe_id = probe_id
        self.points = [(0.0, None)]

    def record(self, t, rank):
        last_t, last_rank = self.points[-1]
        if rank == last_rank:
            return
        if t == last_t:
            self.points[-1] = (t, rank)
            if len(self.points) > 1 and self.points[-2][1] == rank:
                self.points.pop()
        else:
            self.points.append((t, rank))

    def build(self, horizon):
        return RankTrace(self.probe_id, tuple(self.points), horizon)


class _ProbeState:
    __slots__ = ("index", "matches", "best_key", "best_rank", "dirty")

    def __init__(self):
        self.index = RankIndex()
        self.matches = SortedList()
        self.best_key = None
        self.best_rank = None
        self.dirty = False


def simulate(events: Sequence[GalleryEvent], probes: ProbeSet, scorer: Scorer,
             config: EngineConfig) -> list[RankTrace]:
    """Replay ``events`` and return one :class:`RankTrace` per probe.

    A gallery track is a true match for a probe when their identity ids
    agree. With a retention window ``W`` a track leaves every index at
    ``arrival + W``; the best rank is then recomputed over the remaining
    matches and may get worse.
    """
    events = prepare_events(events, config)
    P = len(probes)
    pmat = probe_matrix(probes)
    identities = [p.identity_id for p in probes]
    states = [_ProbeState() for _ in range(P)]
    builders = [_TraceBuilder(p.probe_id) for p in probes]
    window = config.retention_window

    # probes to touch for each identity label
    by_identity: dict = {}
    for i, ident in enumerate(identities):
        by_identity.setdefault(ident, []).append(i)

    expiries: list = []  # heap of (expiry time, seq)
    cached: dict = {}  # seq -> score list, kept only while a track can expire
    n = len(events)
    i = 0
    while i < n or expiries:
        t_next = events[i].arrival if i < n else math.inf
        if expiries and expiries[0][0] <= t_next:
            t_next = expiries[0][0]
        if t_next > config.horizon:
            break

        while expiries and expiries[0][0] == t_next:
            _, seq = heapq.heappop(expiries)
            scores = cached.pop(seq)
            _remove(states, scores, seq, by_identity.get(events[seq].track.identity_id, ()))

        while i < n and events[i].arrival == t_next:
            event = events[i]
            model = pool(event.track)
            scores = scorer.score_batch(pmat, model).tolist() if P else []
            _insert(states, scores, i, by_identity.get(event.track.identity_id, ()))
            if window is not None:
                heapq.heappush(expiries, (event.arrival + window, i))
                cached[i] = scores
            i += 1

        for st, builder in zip(states, builders):
            if st.dirty:
                st.best_rank = None if st.best_key is None else st.index.count_less(st.best_key) + 1
                st.dirty = False
            builder.record(t_next, st.best_rank)

    return [b.build(config.horizon) for b in builders]


def _insert(states, scores, seq, match_rows):
    for p, st in enumerate(states):
        key = (scores[p], seq)
        st.index.insert(key)
        best = st.best_key
        if best is not None and key < best:
            if st.best_rank is not None:
                st.best_rank += 1
    for p in match_rows:
        st = states[p]
        key = (scores[p], seq)
        st.matches.add(key)
        if st.best_key is None or key < st.best_key:
            st.best_key = key
            st.dirty = True


def _remove(states, scores, seq, match_rows):
    for p in match_rows:
        st = states[p]
        key = (scores[p], seq)
        st.matches.remove(key)
        if key == st.best_key:
            st.best_key = st.matches[0] if st.matches else None
            st.dirty = True
    for p, st in enumerate(states):
        key = (scores[p], seq)
        st.index.delete(key)
        best = st.best_key
        if best is not None and key < best and st.best_rank is not None:
            st.best_rank -= 1
