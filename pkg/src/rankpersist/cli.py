"""Command-line front end.

Exit codes: 0 success, 1 domain or validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .engine import ArrivalMode, EngineConfig, simulate
from .ingest import (read_gallery_stream, read_probes, read_rank_traces, read_rpc, write_cmc,
                     write_flow, write_gallery_stream, write_persistence, write_probes,
                     write_rank_traces, write_rpc)
from .metrics import (DEFAULT_RANK_LEVELS, compare, compute_cmc, compute_rpc, final_ranks,
                      flow_density, log_duration_grid, persistence)
from .model import ContractViolation, SchemaError, validate_dataset
from .plots import cmc_svg, flow_svg, rpc_svg
from .scoring import get_scorer
from .synth import SynthConfig, generate

MANIFEST_NAME = "run-manifest.json"


class UsageError(ValueError):
    pass


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out: Path, command: str, args, inputs, extra=None):
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    manifest = {
        "tool": "rankpersist",
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "command": command,
        "flags": {k: str(v) if isinstance(v, Path) else v for k, v in flags.items()},
        "inputs": {str(p): _digest(p) for p in inputs},
    }
    if extra:
        manifest.update(extra)
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def parse_ranks(text: str) -> tuple:
    try:
        ranks = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad rank list {text!r}") from None
    if not ranks or min(ranks) < 1:
        raise UsageError("rank levels must be positive integers")
    return ranks


def parse_retention(text: str):
    if text.lower() in ("inf", "infinite", "none"):
        return None
    value = float(text)
    if math.isinf(value):
        return None
    return value


def parse_grid(text: str, horizon: float) -> tuple:
    """``start:stop:num`` log-spaced durations; ``stop`` may be ``horizon``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like 1:horizon:60, got {text!r}")
    try:
        start = float(parts[0])
        stop = horizon if parts[1] == "horizon" else float(parts[1])
        num = int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    return log_duration_grid(start, max(stop, start), num)


def _load_dataset(args):
    mode = ArrivalMode(args.arrival_mode)
    events, manifest = read_gallery_stream(args.gallery, arrival_mode=mode)
    probes = read_probes(args.probes, dim=manifest.dim or None)
    return events, manifest, probes


# subcommands

def cmd_validate(args):
    events, _, probes = _load_dataset(args)
    report = validate_dataset(events, probes)
    print(report)
    return 0 if report.ok else 1


def cmd_simulate(args):
    events, manifest, probes = _load_dataset(args)
    report = validate_dataset(events, probes)
    if not report.ok:
        print(report, file=sys.stderr)
        return 1
    horizon = args.horizon if args.horizon is not None else manifest.horizon
    config = EngineConfig(horizon=horizon, retention_window=parse_retention(args.retention))
    scorer = get_scorer(args.scorer, args.noise_seed)
    traces = simulate(events, probes, scorer, config)
    out = _out_dir(args)
    write_rank_traces(traces, out / "traces.csv")
    _write_manifest(out, "simulate", args, [args.gallery, args.probes], {"horizon": horizon})
    print(f"wrote {out / 'traces.csv'} ({len(traces)} probes)")
    return 0


def _traces_horizon(args) -> float:
    if args.horizon is not None:
        return args.horizon
    manifest = Path(args.traces).parent / MANIFEST_NAME
    if manifest.exists():
        horizon = json.loads(manifest.read_text()).get("horizon")
        if horizon is not None:
            return float(horizon)
    raise UsageError("no --horizon given and no run manifest with a horizon next to the traces")


def cmd_rpc(args):
    horizon = _traces_horizon(args)
    traces = read_rank_traces(args.traces, horizon)
    if not traces:
        raise ContractViolation("trace file holds no probes")
    ranks = parse_ranks(args.ranks)
    grid = parse_grid(args.grid_log, horizon)
    summaries = [persistence(t, ranks) for t in traces]
    table = compute_rpc(summaries, ranks, grid)
    out = _out_dir(args)
    write_rpc(table, out / "rpc.csv")
    write_persistence(summaries, ranks, out / "persistence.csv")
    if args.plot:
        (out / "rpc.svg").write_text(rpc_svg(table))
    _write_manifest(out, "rpc", args, [args.traces], {"horizon": horizon})
    print(f"wrote {out / 'rpc.csv'}")
    return 0


def cmd_cmc(args):
    events, _, probes = _load_dataset(args)
    ranks = final_ranks(events, probes, get_scorer(args.scorer, args.noise_seed))
    table, excluded = compute_cmc(ranks, args.max_rank)
    out = _out_dir(args)
    write_cmc(table, out / "cmc.csv")
    if args.plot:
        (out / "cmc.svg").write_text(cmc_svg(table))
    _write_manifest(out, "cmc", args, [args.gallery, args.probes], {"excluded_probes": excluded})
    for pid in excluded:
        print(f"probe {pid} has no true match in the gallery; excluded", file=sys.stderr)
    print(f"wrote {out / 'cmc.csv'}")
    return 0


def cmd_flow(args):
    events, manifest = read_gallery_stream(args.gallery, arrival_mode=ArrivalMode(args.arrival_mode))
    horizon = args.horizon if args.horizon is not None else manifest.horizon
    profile = flow_density(events, args.bin_width, horizon)
    out = _out_dir(args)
    write_flow(profile, out / "flow.csv")
    if args.plot:
        (out / "flow.svg").write_text(flow_svg(profile))
    _write_manifest(out, "flow", args, [args.gallery], {"horizon": horizon})
    print(f"wrote {out / 'flow.csv'}")
    return 0


def _rpc_path(p) -> Path:
    p = Path(p)
    return p / "rpc.csv" if p.is_dir() else p


def cmd_compare(args):
    a_path, b_path = _rpc_path(args.a), _rpc_path(args.b)
    report = compare(read_rpc(a_path), read_rpc(b_path))
    out = _out_dir(args)
    text = report.to_text()
    (out / "compare.txt").write_text(text + "\n")
    with open(out / "compare.csv", "w", encoding="utf-8") as fh:
        fh.write("rank,a_dominates,b_dominates,max_gap,max_gap_duration_seconds\n")
        for lv in report.levels:
            fh.write(f"{lv.rank},{str(lv.a_dominates).lower()},{str(lv.b_dominates).lower()},"
                     f"{lv.max_gap!r},{lv.max_gap_duration!r}\n")
    _write_manifest(out, "compare", args, [a_path, b_path])
    print(text)
    return 0


def cmd_synth(args):
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    overrides = {
        "seed": args.seed, "horizon": args.horizon, "arrival_rate": args.rate, "dim": args.dim,
        "n_probes": args.probes_count, "n_identities": args.identities,
        "reappearances_per_probe": args.reappearances,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "n_probes" in base and "n_identities" not in base:
        base["n_identities"] = max(base["n_probes"], SynthConfig().n_identities)
    config = SynthConfig.from_dict(base)
    data = generate(config)
    out = _out_dir(args)
    write_gallery_stream(data.events, out / "synth.gallery.jsonl", horizon=config.horizon)
    write_probes(data.probes, out / "synth.probes.jsonl")
    (out / "synth-config.json").write_text(json.dumps(
        {"config": config.to_dict(), "ground_truth": data.ground_truth}, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "synth", args, [args.config] if args.config else [],
                    {"seed": config.seed, "horizon": config.horizon})
    print(f"wrote {len(data.events)} gallery tracks and {len(data.probes)} probes to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankpersist",
                                     description="Temporal re-identification evaluation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def dataset_args(p):
        p.add_argument("gallery", help="*.gallery.jsonl stream")
        p.add_argument("probes", help="*.probes.jsonl file")
        p.add_argument("--arrival-mode", choices=["end", "start"], default="end")

    def scorer_args(p):
        p.add_argument("--scorer", choices=["euclidean", "cosine"], default="euclidean")
        p.add_argument("--noise-seed", type=int, default=None,
                       help="corrupt distances with a seeded factor in [0.5, 2]")

    def output_args(p, plot=True):
        p.add_argument("--out", default=".", help="output directory")
        if plot:
            p.add_argument("--plot", action="store_true", help="also write an SVG chart")

    p = sub.add_parser("validate", help="check a gallery/probe pair")
    dataset_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="replay the gallery and write rank traces")
    dataset_args(p)
    scorer_args(p)
    p.add_argument("--retention", default="inf", help="seconds a track stays, or inf")
    p.add_argument("--horizon", type=float, default=None)
    output_args(p, plot=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rpc", help="rank persistence curves from traces")
    p.add_argument("traces", help="traces.csv written by simulate")
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--ranks", default=",".join(map(str, DEFAULT_RANK_LEVELS)))
    p.add_argument("--grid-log", default="1:horizon:60")
    output_args(p)
    p.set_defaults(func=cmd_rpc)

    p = sub.add_parser("cmc", help="CMC curve on the final gallery")
    dataset_args(p)
    scorer_args(p)
    p.add_argument("--max-rank", type=int, default=20)
    output_args(p)
    p.set_defaults(func=cmd_cmc)

    p = sub.add_parser("flow", help="video flow density")
    p.add_argument("gallery")
    p.add_argument("--arrival-mode", choices=["end", "start"], default="end")
    p.add_argument("--bin-width", type=float, default=600.0)
    p.add_argument("--horizon", type=float, default=None)
    output_args(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--config", default=None, help="JSON file with synth settings")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--rate", type=float, default=None, help="distractor arrivals per second")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--probes", dest="probes_count", type=int, default=None)
    p.add_argument("--identities", type=int, default=None)
    p.add_argument("--reappearances", type=int, default=None)
    output_args(p, plot=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="RPC dominance of run A over run B")
    p.add_argument("a", help="rpc.csv or a directory holding one")
    p.add_argument("b", help="rpc.csv or a directory holding one")
    output_args(p, plot=False)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ContractViolation, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
