"""Symmetric Gaussian Markov random field parameter estimation by least squares."""

from __future__ import annotations

import numpy as np

from . import FeatureVector, TextureError, TextureMethod, as_int_array

# (dr, dc) half-offsets; each regressor sums the pixel pair at +/- the offset
GMRF_OFFSETS = (
    (0, 1), (1, 0), (1, 1), (1, -1),
    (0, 2), (2, 0), (2, 2), (2, -2),
    (1, 2), (2, 1), (1, -2), (2, -1),
)
_MARGIN = 2


def _design_matrix(centered: np.ndarray):
    h, w = centered.shape
    core = centered[_MARGIN : h - _MARGIN, _MARGIN : w - _MARGIN]
    y = core.ravel()
    cols = []
    for dr, dc in GMRF_OFFSETS:
        plus = centered[_MARGIN + dr : h - _MARGIN + dr, _MARGIN + dc : w - _MARGIN + dc]
        minus = centered[_MARGIN - dr : h - _MARGIN - dr, _MARGIN - dc : w - _MARGIN - dc]
        cols.append((plus + minus).ravel())
    return np.column_stack(cols), y


def gmrf_parameters(roi):
    """Least-squares neighbor weights and residual variance over interior pixels."""
    arr = as_int_array(roi).astype(np.float64)
    if min(arr.shape) < 2 * _MARGIN + 3:
        raise TextureError(TextureMethod.GMRF, "ROI side must be >= 7")
    centered = arr - arr.mean()
    design, y = _design_matrix(centered)
    if not np.any(centered):
        # flat ROI carries no structure: define all weights and the residual as 0
        return np.zeros(len(GMRF_OFFSETS)), 0.0, True
    gram = design.T @ design
    rhs = design.T @ y
    try:
        theta = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise TextureError(TextureMethod.GMRF, f"singular normal matrix: {exc}") from exc
    residuals = y - design @ theta
    return theta, float(np.mean(residuals**2)), False


def gmrf_features(roi) -> FeatureVector:
    """12 neighbor weights in fixed offset order plus the residual variance."""
    theta, res_var, degenerate = gmrf_parameters(roi)
    names = tuple(f"gmrf_theta_{dr}_{dc}" for dr, dc in GMRF_OFFSETS) + ("gmrf_residual_variance",)
    values = np.concatenate([theta, [res_var]])
    return FeatureVector(TextureMethod.GMRF, names, values, degenerate=degenerate)


def synthesize_gmrf(theta, shape, seed: int, sigma: float = 1.0) -> np.ndarray:
    """Seeded stationary field on a torus whose conditional-autoregression
    weights are (approximately, up to edge effects) the given theta.

    Spectral synthesis: the field's power spectrum is sigma^2 over
    1 - 2 sum_k theta_k cos(2 pi <omega, o_k>), which must stay positive.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (len(GMRF_OFFSETS),):
        raise ValueError(f"theta must have {len(GMRF_OFFSETS)} entries")
    h, w = shape
    fr = np.fft.fftfreq(h)[:, None]
    fc = np.fft.fftfreq(w)[None, :]
    denom = np.ones((h, w))
    for (dr, dc), t in zip(GMRF_OFFSETS, theta):
        denom -= 2.0 * t * np.cos(2.0 * np.pi * (dr * fr + dc * fc))
    if denom.min() <= 0:
        raise ValueError("theta too large: spectrum not positive definite")
    rng = np.random.default_rng(seed)
    white = rng.normal(size=(h, w))
    spectrum = np.fft.fft2(white) * np.sqrt(sigma**2 / denom)
    return np.real(np.fft.ifft2(spectrum))
