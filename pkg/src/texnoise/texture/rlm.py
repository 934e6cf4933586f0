"""Gray-level run-length matrices and four run statistics per direction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import (
    DIRECTIONS,
    FeatureVector,
    TextureError,
    TextureMethod,
    rescale_levels,
)

RLM_FEATURE_NAMES = (
    "short_run_emphasis",
    "long_run_emphasis",
    "gray_level_nonuniformity",
    "run_length_nonuniformity",
)


@dataclass(frozen=True)
class RunLengthMatrix:
    """Counts of maximal constant-intensity runs per gray level and length."""

    levels: int
    direction: int
    counts: np.ndarray  # (levels, max_run)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != self.levels:
            raise ValueError("run-length matrix shape mismatch")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total_runs(self) -> int:
        return int(self.counts.sum())


def _direction_lines(arr: np.ndarray, direction: int):
    if direction == 0:
        return list(arr)
    if direction == 90:
        return list(arr.T)
    if direction == 45:
        flipped = np.fliplr(arr)
        return [np.diagonal(flipped, k) for k in range(-arr.shape[0] + 1, arr.shape[1])]
    if direction == 135:
        return [np.diagonal(arr, k) for k in range(-arr.shape[0] + 1, arr.shape[1])]
    raise ValueError(f"direction must be one of {DIRECTIONS}")


def _run_encode(line: np.ndarray):
    """(value, length) pairs of the maximal runs along one line."""
    boundaries = np.flatnonzero(np.diff(line)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [line.size]))
    return line[starts], ends - starts


def compute_rlm(roi, levels: int = 32, direction: int = 0) -> RunLengthMatrix:
    q = rescale_levels(roi, levels)
    if q.size == 0:
        raise TextureError(TextureMethod.RLM, "empty ROI")
    max_run = max(q.shape)
    counts = np.zeros((levels, max_run), dtype=np.int64)
    for line in _direction_lines(q, direction):
        values, lengths = _run_encode(np.asarray(line))
        np.add.at(counts, (values, lengths - 1), 1)
    return RunLengthMatrix(levels, direction, counts)


def rlm_statistics(matrix: RunLengthMatrix) -> np.ndarray:
    """The four per-direction statistics, normalized by the total run count."""
    p = matrix.counts.astype(np.float64)
    n_runs = matrix.total_runs
    if n_runs == 0:
        raise TextureError(TextureMethod.RLM, "no runs found")
    r = np.arange(1, p.shape[1] + 1, dtype=np.float64)
    sre = float(np.sum(p / r**2) / n_runs)
    lre = float(np.sum(p * r**2) / n_runs)
    gln = float(np.sum(p.sum(axis=1) ** 2) / n_runs)
    rln = float(np.sum(p.sum(axis=0) ** 2) / n_runs)
    return np.array([sre, lre, gln, rln])


def rlm_features(roi, levels: int = 32) -> FeatureVector:
    """4 statistics x 4 directions = 16 features."""
    names = []
    values = []
    for direction in DIRECTIONS:
        matrix = compute_rlm(roi, levels=levels, direction=direction)
        values.append(rlm_statistics(matrix))
        names.extend(f"rlm_{f}_{direction}" for f in RLM_FEATURE_NAMES)
    return FeatureVector(TextureMethod.RLM, tuple(names), np.concatenate(values))
