"""Mean-pooled appearance models and probe-to-candidate distances.

Scores are distances: smaller means more alike, and candidates are ranked
in ascending order of score.
"""

from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass

import numpy as np

from .model import AppearanceModel, ContractViolation, Track


class Metric(enum.Enum):
    EUCLIDEAN = "euclidean"
    COSINE_DISTANCE = "cosine"


class Pooling(enum.Enum):
    MEAN = "mean"


def pool(track: Track) -> AppearanceModel:
    """Average a track's per-frame features into one appearance vector."""
    if track.n_frames < 1:
        raise ContractViolation(f"track {track.track_id} has no frames")
    feature = track.frames.mean(axis=0)
    feature.setflags(write=False)
    return AppearanceModel(feature=feature, source_track=track.track_id)


def _euclidean(probes: np.ndarray, candidate: np.ndarray) -> np.ndarray:
    diff = probes - candidate
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _cosine(probes: np.ndarray, candidate: np.ndarray) -> np.ndarray:
    # one summation kernel for every product keeps the distance symmetric
    dots = np.einsum("ij,ij->i", probes, candidate[np.newaxis, :])
    norms = np.sqrt(np.einsum("ij,ij->i", probes, probes)) * np.sqrt(
        np.einsum("ij,ij->i", candidate[np.newaxis, :], candidate[np.newaxis, :]))
    out = np.ones(len(probes))
    nz = norms > 0
    out[nz] = 1.0 - dots[nz] / norms[nz]
    # rounding can push parallel vectors a hair below zero
    return np.maximum(out, 0.0)


@dataclass(frozen=True)
class Scorer:
    """Distance function between pooled appearance models."""

    metric: Metric = Metric.EUCLIDEAN
    pooling: Pooling = Pooling.MEAN

    @property
    def name(self) -> str:
        return self.metric.value

    def score_batch(self, probe_features: np.ndarray, candidate: AppearanceModel) -> np.ndarray:
        """Distances from every row of ``probe_features`` to ``candidate``.

        Both the engine and the brute-force oracle go through this method,
        so cached scores are bit-identical between them.
        """
        probe_features = np.atleast_2d(probe_features)
        if probe_features.shape[1] != candidate.dim:
            raise ContractViolation(
                f"dim mismatch: probes have dim {probe_features.shape[1]}, "
                f"candidate {candidate.source_track} has dim {candidate.dim}")
        if self.metric is Metric.EUCLIDEAN:
            return _euclidean(probe_features, candidate.feature)
        return _cosine(probe_features, candidate.feature)


@dataclass(frozen=True)
class NoisyScorer(Scorer):
    """A deliberately degraded scorer for comparison runs.

    Each (probe row, candidate) distance is multiplied by a factor drawn
    uniformly from ``[low, high]``. The factor is a deterministic function
    of ``seed``, the candidate's track id and the probe row.
    """

    seed: int = 0
    low: float = 0.5
    high: float = 2.0

    @property
    def name(self) -> str:
        return f"{self.metric.value}+noise"

    def score_batch(self, probe_features, candidate):
        clean = super().score_batch(probe_features, candidate)
        tag = zlib.crc32(candidate.source_track.encode("utf-8"))
        rng = np.random.Generator(np.random.PCG64([self.seed, tag]))
        return clean * rng.uniform(self.low, self.high, size=len(clean))


def score(probe_model: AppearanceModel, candidate_model: AppearanceModel,
          scorer: Scorer = Scorer()) -> float:
    """Distance between two appearance models under ``scorer``."""
    if probe_model.dim != candidate_model.dim:
        raise ContractViolation(
            f"dim mismatch: {probe_model.dim} vs {candidate_model.dim}")
    return float(scorer.score_batch(probe_model.feature[np.newaxis, :], candidate_model)[0])


def get_scorer(name: str, noise_seed: int | None = None) -> Scorer:
    metric = Metric(name)
    if noise_seed is not None:
        return NoisyScorer(metric=metric, seed=noise_seed)
    return Scorer(metric=metric)
