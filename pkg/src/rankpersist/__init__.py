"""Temporal re-identification evaluation: rank traces, rank persistence
curves, CMC and video flow density over a growing gallery."""

__version__ = "0.1.0"

from .engine import ArrivalMode, EngineConfig, RankIndex, rank_of, simulate
from .metrics import (compare, compute_cmc, compute_rpc, final_ranks, flow_density,
                      persistence, rpc_from_traces)
from .model import (ABSENT, AppearanceModel, CmcTable, ContractViolation, FlowDensityProfile,
                    GalleryEvent, Probe, ProbeSet, RankTrace, RpcTable, SchemaError, Track,
                    validate_dataset)
from .scoring import Metric, NoisyScorer, Scorer, pool, score
from .synth import SynthConfig, generate, oracle_simulate

__all__ = [
    "ABSENT", "AppearanceModel", "ArrivalMode", "CmcTable", "ContractViolation", "EngineConfig",
    "FlowDensityProfile", "GalleryEvent", "Metric", "NoisyScorer", "Probe", "ProbeSet",
    "RankIndex", "RankTrace", "RpcTable", "SchemaError", "Scorer", "SynthConfig", "Track",
    "compare", "compute_cmc", "compute_rpc", "final_ranks", "flow_density", "generate",
    "oracle_simulate", "persistence", "pool", "rank_of", "rpc_from_traces", "score", "simulate",
    "validate_dataset",
]
