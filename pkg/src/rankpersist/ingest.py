"""Reading and writing datasets (JSON lines) and result tables (CSV).

Gallery file, one JSON object per line::

    {"track_id": "d000001", "identity_id": null, "t_start": 3.5, "t_end": 7.0,
     "features": [[...], [...]]}

An optional first line ``{"schema_version": 1, "dim": 16, "horizon": 36000.0}``
carries the dataset manifest. Probe records add a ``"probe_id"`` key.

Floats are written with ``repr``, the shortest decimal that reads back to
the same double, so files are byte-stable and round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .engine import ArrivalMode
from .model import (CmcTable, FlowDensityProfile, GalleryEvent, Probe, ProbeSet, RankTrace,
                    RpcTable, SchemaError, Track, sort_events)

SCHEMA_VERSION = 1
SUPPORTED_SCHEMAS = {1}

RPC_HEADER = ["rank", "duration_seconds", "fraction"]
CMC_HEADER = ["rank", "fraction"]
TRACE_HEADER = ["probe_id", "t_seconds", "rank"]
FLOW_HEADER = ["bin_start_seconds", "people_per_second"]
PERSISTENCE_HEADER = ["probe_id", "rank", "max_duration_seconds", "censored", "reached"]


class ParseError(SchemaError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class DatasetManifest:
    dim: int
    horizon: float
    track_count: int
    schema_version: int = SCHEMA_VERSION


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_line(path, lineno, line):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(path, lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ParseError(path, lineno, "record is not a JSON object")
    return obj


def _track_from_record(path, lineno, obj) -> Track:
    try:
        track_id = obj["track_id"]
        features = obj["features"]
        t_start, t_end = obj["t_start"], obj["t_end"]
    except KeyError as exc:
        raise ParseError(path, lineno, f"missing field {exc.args[0]!r}") from None
    identity = obj.get("identity_id")
    if not isinstance(track_id, str) or (identity is not None and not isinstance(identity, str)):
        raise ParseError(path, lineno, "track_id and identity_id must be strings")
    try:
        frames = np.array(features, dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError(path, lineno, "features must be a rectangular list of numbers") from None
    if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
        raise ParseError(path, lineno, "features must be a non-empty list of equal-length vectors")
    try:
        return Track(track_id, identity, t_start, t_end, frames)
    except (TypeError, ValueError) as exc:
        raise ParseError(path, lineno, str(exc)) from None


def _records(path) -> Iterator[tuple]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                yield lineno, _parse_line(path, lineno, line)


def iter_gallery_records(path) -> Iterator[tuple]:
    """Yield ``(lineno, Track)`` one line at a time; the header is skipped."""
    for lineno, obj in _records(path):
        if "track_id" not in obj and "schema_version" in obj:
            continue
        yield lineno, _track_from_record(path, lineno, obj)


def read_gallery_stream(path, arrival_mode: ArrivalMode = ArrivalMode.TRACK_END):
    """Load a gallery file as replay-ordered events plus its manifest.

    Each event arrives at its track's end time (or start time with
    ``ArrivalMode.TRACK_START``).
    """
    header = None
    for _, obj in _records(path):
        if "track_id" not in obj and "schema_version" in obj:
            header = obj
        break
    if header is not None and header.get("schema_version") not in SUPPORTED_SCHEMAS:
        raise SchemaError(f"{path}: unsupported schema_version {header.get('schema_version')!r}")

    dim = header.get("dim") if header else None
    events = []
    for lineno, track in iter_gallery_records(path):
        if dim is None:
            dim = track.dim
        elif track.dim != dim:
            raise SchemaError(f"{path}:{lineno}: track {track.track_id} has dim "
                              f"{track.dim}, expected {dim}")
        arrival = track.t_end if arrival_mode is ArrivalMode.TRACK_END else track.t_start
        events.append(GalleryEvent(arrival, track))
    events = sort_events(events)

    latest = events[-1].arrival if events else 0.0
    horizon = float(header["horizon"]) if header and header.get("horizon") is not None else latest
    if horizon < latest:
        raise SchemaError(f"{path}: horizon {horizon} precedes last arrival {latest}")
    manifest = DatasetManifest(dim=int(dim or 0), horizon=horizon, track_count=len(events),
                               schema_version=int(header["schema_version"]) if header else SCHEMA_VERSION)
    return events, manifest


def read_probes(path, dim: Optional[int] = None) -> ProbeSet:
    probes = []
    seen = set()
    for lineno, obj in _records(path):
        if "probe_id" not in obj:
            raise ParseError(path, lineno, "missing field 'probe_id'")
        track = _track_from_record(path, lineno, obj)
        if track.identity_id is None:
            raise ParseError(path, lineno, "probe records need an identity_id")
        if dim is not None and track.dim != dim:
            raise SchemaError(f"{path}:{lineno}: probe {obj['probe_id']} has dim "
                              f"{track.dim}, expected {dim}")
        if obj["probe_id"] in seen:
            raise SchemaError(f"{path}:{lineno}: duplicate probe_id {obj['probe_id']!r}")
        seen.add(obj["probe_id"])
        probes.append(Probe(obj["probe_id"], track.identity_id, track))
    return ProbeSet(probes)


def _track_record(track: Track) -> dict:
    return {
        "track_id": track.track_id,
        "identity_id": track.identity_id,
        "t_start": track.t_start,
        "t_end": track.t_end,
        "features": track.frames.tolist(),
    }


def write_gallery_stream(events: Sequence[GalleryEvent], path, horizon: Optional[float] = None):
    path = Path(path)
    dim = events[0].track.dim if events else 0
    with open(path, "w", encoding="utf-8") as fh:
        if horizon is not None:
            header = {"schema_version": SCHEMA_VERSION, "dim": dim, "horizon": float(horizon)}
            fh.write(json.dumps(header) + "\n")
        for e in events:
            fh.write(json.dumps(_track_record(e.track)) + "\n")
    return path


def write_probes(probes: ProbeSet, path):
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for p in probes:
            rec = {"probe_id": p.probe_id, **_track_record(p.track)}
            rec["identity_id"] = p.identity_id
            fh.write(json.dumps(rec) + "\n")
    return path


# CSV tables

def _writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def _read_rows(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != header:
            raise SchemaError(f"{path}: expected header {','.join(header)}, got {got}")
        return list(reader)


def write_rank_traces(traces: Sequence[RankTrace], path):
    fh, w = _writer(path)
    with fh:
        w.writerow(TRACE_HEADER)
        for tr in traces:
            for t, r in tr.breakpoints:
                w.writerow([tr.probe_id, _fmt(t), "" if r is None else r])
    return Path(path)


def read_rank_traces(path, horizon: float) -> list[RankTrace]:
    points: dict = {}
    for row in _read_rows(path, TRACE_HEADER):
        pid, t, r = row
        points.setdefault(pid, []).append((float(t), int(r) if r else None))
    return [RankTrace(pid, tuple(pts), horizon) for pid, pts in points.items()]


def write_rpc(table: RpcTable, path):
    fh, w = _writer(path)
    with fh:
        w.writerow(RPC_HEADER)
        for i, r in enumerate(table.rank_levels):
            for j, d in enumerate(table.duration_grid):
                w.writerow([r, _fmt(d), _fmt(table.values[i, j])])
    return Path(path)


def read_rpc(path) -> RpcTable:
    cells = {}
    ranks, grid = [], []
    for r, d, v in _read_rows(path, RPC_HEADER):
        r, d = int(r), float(d)
        if r not in ranks:
            ranks.append(r)
        if d not in grid:
            grid.append(d)
        cells[r, d] = float(v)
    if len(cells) != len(ranks) * len(grid):
        raise SchemaError(f"{path}: RPC rows do not form a full rank x duration grid")
    values = np.array([[cells[r, d] for d in grid] for r in ranks]).reshape(len(ranks), len(grid))
    return RpcTable(tuple(ranks), tuple(grid), values)


def write_cmc(table: CmcTable, path):
    fh, w = _writer(path)
    with fh:
        w.writerow(CMC_HEADER)
        for k, v in enumerate(table.values, 1):
            w.writerow([k, _fmt(v)])
    return Path(path)


def read_cmc(path) -> CmcTable:
    rows = _read_rows(path, CMC_HEADER)
    if [int(k) for k, _ in rows] != list(range(1, len(rows) + 1)):
        raise SchemaError(f"{path}: CMC ranks must run 1..K")
    return CmcTable(np.array([float(v) for _, v in rows]))


def write_flow(profile: FlowDensityProfile, path):
    fh, w = _writer(path)
    with fh:
        w.writerow(FLOW_HEADER)
        for start, v in zip(profile.bin_starts, profile.counts_per_unit_time):
            w.writerow([_fmt(start), _fmt(v)])
    return Path(path)


def read_flow(path, bin_width: Optional[float] = None) -> FlowDensityProfile:
    """Read a flow CSV; ``bin_width`` is required for single-bin files."""
    rows = _read_rows(path, FLOW_HEADER)
    starts = [float(s) for s, _ in rows]
    values = np.array([float(v) for _, v in rows])
    width = bin_width
    if width is None:
        if len(starts) < 2:
            raise SchemaError(f"{path}: need two bins or an explicit bin width")
        width = starts[1] - starts[0]
    return FlowDensityProfile(width, values)


def write_persistence(summaries, rank_levels, path):
    fh, w = _writer(path)
    with fh:
        w.writerow(PERSISTENCE_HEADER)
        for s in summaries:
            for r in rank_levels:
                w.writerow([s.probe_id, r, _fmt(s.durations[r]),
                            str(s.censored[r]).lower(), str(s.reached[r]).lower()])
    return Path(path)
