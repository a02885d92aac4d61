"""Core value types for temporal re-identification evaluation.

Times are float offsets in seconds from the start of the stream. A rank
of ``None`` (exported as :data:`ABSENT`) means no true match for the probe
is present in the gallery yet.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

ABSENT = None


class ContractViolation(ValueError):
    """A caller broke an operation's precondition."""


class SchemaError(ValueError):
    """Input data does not match the expected record layout."""


def _check_time(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ContractViolation(f"{name} must be a finite non-negative time, got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class Track:
    """One detected appearance of a person: a run of per-frame feature vectors."""

    track_id: str
    identity_id: Optional[str]
    t_start: float
    t_end: float
    frames: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t_start", _check_time(self.t_start, "t_start"))
        object.__setattr__(self, "t_end", _check_time(self.t_end, "t_end"))
        if self.t_start > self.t_end:
            raise ContractViolation(
                f"track {self.track_id}: t_start {self.t_start} > t_end {self.t_end}")
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames[np.newaxis, :]
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ContractViolation(f"track {self.track_id}: frames must be a non-empty 2-D array")
        if not np.all(np.isfinite(frames)):
            raise ContractViolation(f"track {self.track_id}: non-finite feature component")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class AppearanceModel:
    feature: np.ndarray
    source_track: str

    @property
    def dim(self) -> int:
        return self.feature.shape[0]


@dataclass(frozen=True)
class GalleryEvent:
    arrival: float
    track: Track

    def __post_init__(self):
        object.__setattr__(self, "arrival", _check_time(self.arrival, "arrival"))
        if self.arrival < self.track.t_start:
            raise ContractViolation(
                f"track {self.track.track_id}: arrival {self.arrival} precedes t_start")

    @property
    def sort_key(self):
        return (self.arrival, self.track.track_id)


@dataclass(frozen=True)
class Probe:
    probe_id: str
    identity_id: str
    track: Track


@dataclass(frozen=True)
class ProbeSet:
    probes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "probes", tuple(self.probes))
        counts = Counter(p.probe_id for p in self.probes)
        dupes = sorted(k for k, c in counts.items() if c > 1)
        if dupes:
            raise SchemaError(f"duplicate probe_id {dupes[0]!r}")

    def __len__(self):
        return len(self.probes)

    def __iter__(self):
        return iter(self.probes)

    def __getitem__(self, i):
        return self.probes[i]

    @property
    def ids(self) -> list[str]:
        return [p.probe_id for p in self.probes]


@dataclass(frozen=True)
class RankTrace:
    """Step function of a probe's best rank over ``[0, horizon)``.

    ``breakpoints`` holds ``(t, rank)`` pairs; each value holds until the
    next breakpoint (or the horizon). ``rank`` is ``None`` while no true
    match is in the gallery.
    """

    probe_id: str
    breakpoints: tuple
    horizon: float

    def __post_init__(self):
        bps = tuple((float(t), None if r is None else int(r)) for t, r in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        times = [t for t, _ in bps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ContractViolation(f"trace {self.probe_id}: breakpoint times not increasing")
        if any(r is not None and r < 1 for _, r in bps):
            raise ContractViolation(f"trace {self.probe_id}: rank below 1")
        if times and times[-1] > self.horizon:
            raise ContractViolation(f"trace {self.probe_id}: breakpoint beyond horizon")

    def value_at(self, t: float):
        """Best rank holding at time ``t`` (``None`` before the first breakpoint)."""
        value = None
        for bt, r in self.breakpoints:
            if bt > t:
                break
            value = r
        return value

    def segments(self):
        """Yield ``(start, end, rank)`` for every piece of the step function."""
        bps = self.breakpoints
        for i, (t, r) in enumerate(bps):
            end = bps[i + 1][0] if i + 1 < len(bps) else self.horizon
            yield t, end, r


@dataclass(frozen=True)
class RpcTable:
    rank_levels: tuple
    duration_grid: tuple
    values: np.ndarray  # shape (len(rank_levels), len(duration_grid))

    def __post_init__(self):
        object.__setattr__(self, "rank_levels", tuple(int(r) for r in self.rank_levels))
        object.__setattr__(self, "duration_grid", tuple(float(d) for d in self.duration_grid))
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.rank_levels), len(self.duration_grid)):
            raise ContractViolation(f"RPC values shape {values.shape} does not match grids")
        object.__setattr__(self, "values", values)

    def curve(self, r: int) -> np.ndarray:
        return self.values[self.rank_levels.index(r)]

    def check_invariants(self) -> list[str]:
        problems = []
        v = self.values
        if np.any((v < 0) | (v > 1)):
            problems.append("value outside [0, 1]")
        if v.shape[1] > 1 and np.any(np.diff(v, axis=1) > 0):
            problems.append("increasing in duration")
        order = np.argsort(self.rank_levels, kind="stable")
        if v.shape[0] > 1 and np.any(np.diff(v[order], axis=0) < 0):
            problems.append("decreasing in rank level")
        return problems

    def __eq__(self, other):
        if not isinstance(other, RpcTable):
            return NotImplemented
        return (self.rank_levels == other.rank_levels
                and self.duration_grid == other.duration_grid
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class CmcTable:
    values: np.ndarray  # values[k - 1] = CMC at rank k

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    @property
    def max_rank(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, CmcTable):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class FlowDensityProfile:
    bin_width: float
    counts_per_unit_time: np.ndarray
    counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ContractViolation("bin_width must be positive")
        object.__setattr__(self, "counts_per_unit_time",
                           np.asarray(self.counts_per_unit_time, dtype=np.float64))
        if self.counts is None:
            counts = np.rint(self.counts_per_unit_time * self.bin_width).astype(np.int64)
            object.__setattr__(self, "counts", counts)

    @property
    def bin_starts(self) -> np.ndarray:
        return np.arange(len(self.counts_per_unit_time)) * self.bin_width

    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, FlowDensityProfile):
            return NotImplemented
        return (self.bin_width == other.bin_width
                and np.array_equal(self.counts_per_unit_time, other.counts_per_unit_time))


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __str__(self):
        lines = [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]
        lines.append(f"{len(self.errors)} error(s), {len(self.warnings)} warning(s)")
        return "\n".join(lines)


def sort_events(events: Sequence[GalleryEvent]) -> list[GalleryEvent]:
    """Order events by (arrival, track_id), the replay order."""
    return sorted(events, key=lambda e: e.sort_key)


def is_sorted(events: Sequence[GalleryEvent]) -> bool:
    return all(a.sort_key <= b.sort_key for a, b in zip(events, events[1:]))


def validate_dataset(events: Sequence[GalleryEvent], probes: ProbeSet) -> ValidationReport:
    """Collect problems with a gallery stream and probe set without raising.

    Messages are sorted so that the report does not depend on the order of
    events sharing a timestamp.
    """
    errors, warnings = set(), set()
    if not events:
        warnings.add("empty stream")

    dims = Counter(e.track.dim for e in events)
    dims.update(p.track.dim for p in probes)
    if len(dims) > 1:
        expected = dims.most_common(1)[0][0]
        for e in events:
            if e.track.dim != expected:
                errors.add(f"dim mismatch: track {e.track.track_id} has dim "
                           f"{e.track.dim}, expected {expected}")
        for p in probes:
            if p.track.dim != expected:
                errors.add(f"dim mismatch: probe {p.probe_id} has dim "
                           f"{p.track.dim}, expected {expected}")

    ids = Counter(e.track.track_id for e in events)
    for tid, count in ids.items():
        if count > 1:
            errors.add(f"duplicate track_id {tid}")

    for a, b in zip(events, events[1:]):
        if b.arrival < a.arrival:
            warnings.add("arrivals are not monotone in stream order")
            break

    probe_tracks = {p.track.track_id for p in probes}
    for tid in sorted(probe_tracks & set(ids)):
        errors.add(f"probe track {tid} also appears in the gallery stream")

    labels = {e.track.identity_id for e in events if e.track.identity_id is not None}
    for p in probes:
        if p.identity_id not in labels:
            warnings.add(f"probe {p.identity_id} never reappears")

    return ValidationReport(errors=sorted(errors), warnings=sorted(warnings))
