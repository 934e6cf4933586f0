"""Gray-level co-occurrence matrices and eight Haralick-style statistics per direction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import (
    DIRECTIONS,
    DIRECTION_OFFSETS,
    FeatureVector,
    TextureError,
    TextureMethod,
    rescale_levels,
)

GLCM_FEATURE_NAMES = (
    "energy",
    "contrast",
    "correlation",
    "homogeneity",
    "entropy",
    "variance",
    "sum_average",
    "dissimilarity",
)


@dataclass(frozen=True)
class GlcmMatrix:
    """Symmetric, normalized co-occurrence matrix for one direction."""

    levels: int
    direction: int
    distance: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (self.levels, self.levels):
            raise ValueError("co-occurrence matrix shape mismatch")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("co-occurrence matrix must sum to 1")
        if not np.allclose(probs, probs.T, atol=1e-15):
            raise ValueError("co-occurrence matrix must be symmetric")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


def _pair_views(arr: np.ndarray, dr: int, dc: int):
    h, w = arr.shape
    if h <= abs(dr) or w <= abs(dc):
        return None, None
    a = arr[max(0, -dr) : h - max(0, dr), max(0, -dc) : w - max(0, dc)]
    b = arr[max(0, dr) : h - max(0, -dr), max(0, dc) : w - max(0, -dc)]
    return a, b


def compute_glcm(roi, levels: int = 32, direction: int = 0, distance: int = 1) -> GlcmMatrix:
    """Count ordered intensity pairs at the direction's displacement, both ways."""
    if direction not in DIRECTION_OFFSETS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if distance < 1:
        raise ValueError("distance must be >= 1")
    q = rescale_levels(roi, levels)
    dr, dc = (d * distance for d in DIRECTION_OFFSETS[direction])
    a, b = _pair_views(q, dr, dc)
    if a is None or a.size == 0:
        raise TextureError(
            TextureMethod.GLCM, f"ROI too small for distance {distance} at {direction} deg"
        )
    counts = np.bincount((a * levels + b).ravel(), minlength=levels * levels)
    counts = counts.reshape(levels, levels).astype(np.float64)
    counts = counts + counts.T  # symmetric: count each pair in both orders
    return GlcmMatrix(levels, direction, distance, counts / counts.sum())


def haralick_features(matrix: GlcmMatrix) -> np.ndarray:
    """The eight per-direction statistics in fixed order (see GLCM_FEATURE_NAMES)."""
    p = matrix.probs
    levels = matrix.levels
    i = np.arange(levels, dtype=np.float64)
    ii, jj = np.meshgrid(i, i, indexing="ij")

    p_i = p.sum(axis=1)  # marginals coincide by symmetry
    mu = float(np.dot(i, p_i))
    sigma2 = float(np.dot((i - mu) ** 2, p_i))

    energy = float(np.sum(p * p))
    contrast = float(np.sum((ii - jj) ** 2 * p))
    if sigma2 > 0:
        correlation = float((np.sum(ii * jj * p) - mu * mu) / sigma2)
    else:
        correlation = 0.0
    homogeneity = float(np.sum(p / (1.0 + (ii - jj) ** 2)))
    nz = p[p > 0]
    entropy = float(-np.sum(nz * np.log(nz)))
    variance = float(np.sum((ii - mu) ** 2 * p))
    # distribution of i+j
    k = np.arange(2 * levels - 1, dtype=np.float64)
    p_sum = np.bincount((np.add.outer(np.arange(levels), np.arange(levels))).ravel(),
                        weights=p.ravel(), minlength=2 * levels - 1)
    sum_average = float(np.dot(k, p_sum))
    dissimilarity = float(np.sum(np.abs(ii - jj) * p))
    return np.array([energy, contrast, correlation, homogeneity,
                     entropy, variance, sum_average, dissimilarity])


def glcm_features(roi, levels: int = 32, distance: int = 1) -> FeatureVector:
    """8 statistics x 4 directions = 32 features."""
    names = []
    values = []
    for direction in DIRECTIONS:
        matrix = compute_glcm(roi, levels=levels, direction=direction, distance=distance)
        values.append(haralick_features(matrix))
        names.extend(f"glcm_{f}_{direction}" for f in GLCM_FEATURE_NAMES)
    return FeatureVector(TextureMethod.GLCM, tuple(names), np.concatenate(values))
