"""Feature normalization, Fisher criterion and Bhattacharyya error bound
between feature classes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .texture import FEATURE_COUNTS, FeatureVector, TextureMethod

_SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class FeatureClass:
    """A labelled set of feature vectors (rows) of equal dimension."""

    label: str
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[0] < 2:
            raise ValueError("a feature class needs >= 2 sample vectors")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_vectors(cls, label: str, vectors: list[FeatureVector]) -> "FeatureClass":
        methods = {v.method for v in vectors}
        if len(methods) != 1:
            raise ValueError("all vectors in a class must share one method")
        return cls(label, np.vstack([v.values for v in vectors]))

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def n(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class ClassStats:
    mean: np.ndarray
    covariance: np.ndarray  # divisor n-1
    scatter: np.ndarray  # raw sum of outer products of deviations


@dataclass(frozen=True)
class SeparabilityReport:
    """Fisher and Bhattacharyya values of one method against the clean and
    noisy reconstructions."""

    method: TextureMethod
    fisher_oc: float
    fisher_on: float
    bhatt_oc: float
    bhatt_on: float

    @property
    def n_features(self) -> int:
        return FEATURE_COUNTS[self.method]


def _check_dims(*classes: FeatureClass):
    dims = {c.dim for c in classes}
    if len(dims) != 1:
        raise ValueError(f"feature classes have mismatched dimensions: {dims}")


def normalize(classes: list[FeatureClass]) -> list[FeatureClass]:
    """Per-feature z-score with mean/stdev pooled jointly over every class;
    features that are constant across all classes map to 0."""
    _check_dims(*classes)
    pooled = np.vstack([c.samples for c in classes])
    mean = pooled.mean(axis=0)
    std = pooled.std(axis=0)  # population
    safe = np.where(std > 0, std, 1.0)
    out = []
    for c in classes:
        z = (c.samples - mean) / safe
        z[:, std == 0] = 0.0
        out.append(FeatureClass(c.label, z))
    return out


def class_stats(c: FeatureClass) -> ClassStats:
    mean = c.samples.mean(axis=0)
    deviations = c.samples - mean
    scatter = deviations.T @ deviations
    covariance = scatter / (c.n - 1)
    return ClassStats(mean, covariance, scatter)


def fisher_criterion(c1: FeatureClass, c2: FeatureClass, ridge: float = 1e-8) -> float:
    """Closed-form two-class maximum of the scatter-ratio criterion:
    (mu1-mu2)^T (S1 + S2 + ridge I)^-1 (mu1-mu2)."""
    _check_dims(c1, c2)
    s1, s2 = class_stats(c1), class_stats(c2)
    diff = s1.mean - s2.mean
    s_w = s1.scatter + s2.scatter + ridge * np.eye(c1.dim)
    return float(diff @ np.linalg.solve(s_w, diff))


def _logdet_psd(matrix: np.ndarray) -> float:
    """log determinant of a symmetric PSD matrix; -inf when rank deficient."""
    eigvals = np.linalg.eigvalsh(matrix)
    tol = max(eigvals.max(), 0.0) * _SINGULAR_RTOL + 1e-300
    if eigvals.min() <= tol:
        return -math.inf
    return float(np.sum(np.log(eigvals)))


def bhattacharyya_bound(c1: FeatureClass, c2: FeatureClass) -> float:
    """Gaussian Bhattacharyya distance; -inf when a class covariance is singular
    (covariances of fewer samples than features always are)."""
    _check_dims(c1, c2)
    s1, s2 = class_stats(c1), class_stats(c2)
    diff = s1.mean - s2.mean
    avg = (s1.covariance + s2.covariance) / 2.0
    logdet1 = _logdet_psd(s1.covariance)
    logdet2 = _logdet_psd(s2.covariance)
    logdet_avg = _logdet_psd(avg)
    if math.isinf(logdet_avg):
        term1 = float(diff @ np.linalg.pinv(avg, hermitian=True) @ diff) / 8.0
    else:
        term1 = float(diff @ np.linalg.solve(avg, diff)) / 8.0
    if math.isinf(logdet1) or math.isinf(logdet2) or math.isinf(logdet_avg):
        return -math.inf
    term2 = 0.5 * (logdet_avg - 0.5 * (logdet1 + logdet2))
    return term1 + term2


def build_report(method: TextureMethod, original: FeatureClass,
                 clean: FeatureClass, noisy: FeatureClass,
                 ridge: float = 1e-8) -> SeparabilityReport:
    """Original-vs-clean and original-vs-noisy distances for one method."""
    _check_dims(original, clean, noisy)
    return SeparabilityReport(
        method=method,
        fisher_oc=fisher_criterion(original, clean, ridge),
        fisher_on=fisher_criterion(original, noisy, ridge),
        bhatt_oc=bhattacharyya_bound(original, clean),
        bhatt_on=bhattacharyya_bound(original, noisy),
    )
