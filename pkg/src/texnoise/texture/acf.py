"""Normalized autocovariance at eight fixed spatial lags."""

from __future__ import annotations

import numpy as np

from . import FeatureVector, TextureError, TextureMethod, as_int_array

# (dx, dy): column and row shift of the second sample
ACF_LAGS = ((0, 1), (1, 0), (1, 1), (1, -1), (0, 2), (2, 0), (2, 2), (2, -2))


def autocovariance(roi, dx: int, dy: int) -> float:
    """rho(dx, dy) = sum[(I - mu)(I_shifted - mu)] / (N_valid * sigma^2), clipped
    to [-1, 1]; mu and sigma^2 are the full-ROI population moments."""
    arr = as_int_array(roi).astype(np.float64)
    h, w = arr.shape
    if h <= abs(dy) or w <= abs(dx):
        raise ValueError(f"ROI too small for lag ({dx},{dy})")
    mu = arr.mean()
    sigma2 = arr.var()
    if sigma2 == 0:
        return 0.0
    centered = arr - mu
    a = centered[max(0, -dy) : h - max(0, dy), max(0, -dx) : w - max(0, dx)]
    b = centered[max(0, dy) : h - max(0, -dy), max(0, dx) : w - max(0, -dx)]
    rho = float(np.sum(a * b) / (a.size * sigma2))
    return float(np.clip(rho, -1.0, 1.0))


def acf_features(roi) -> FeatureVector:
    """rho at the eight fixed lags; a zero-variance ROI yields flagged zeros."""
    arr = as_int_array(roi)
    if min(arr.shape) < 3:
        raise TextureError(TextureMethod.ACF, "ROI side must be >= 3")
    names = tuple(f"acf_rho_{dx}_{dy}" for dx, dy in ACF_LAGS)
    if arr.var() == 0:
        return FeatureVector(TextureMethod.ACF, names, np.zeros(len(ACF_LAGS)),
                             degenerate=True)
    values = np.array([autocovariance(arr, dx, dy) for dx, dy in ACF_LAGS])
    return FeatureVector(TextureMethod.ACF, names, values)
