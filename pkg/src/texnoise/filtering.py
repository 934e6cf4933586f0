"""Local-statistics adaptive noise reduction, residual noise extraction and
noise-doubled image generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .image import GrayImage


@dataclass(frozen=True)
class FilterParams:
    """Window size, assumed noise variance and the ratio clamp switch."""

    noise_variance: float
    window_side: int = 5
    ratio_clamp: bool = True

    def __post_init__(self):
        if self.window_side < 3 or self.window_side % 2 == 0:
            raise ValueError("window_side must be odd and >= 3")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")


def _as_float(img) -> np.ndarray:
    if isinstance(img, GrayImage):
        return img.as_float()
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image")
    return arr


def local_stats(field: np.ndarray, window_side: int):
    """Windowed mean and population variance with edge-replicated padding."""
    mu = ndimage.uniform_filter(field, size=window_side, mode="nearest")
    ex2 = ndimage.uniform_filter(field * field, size=window_side, mode="nearest")
    var = np.maximum(ex2 - mu * mu, 0.0)
    return mu, var


def adaptive_filter(img, params: FilterParams) -> np.ndarray:
    """Pull each pixel toward its window mean by the ratio noise_var / local_var.

    Zero noise variance returns the input unchanged; a flat window (zero local
    variance) is also left unchanged. With the clamp active the ratio is capped
    at 1, so the output never overshoots the window mean.
    """
    field = _as_float(img)
    if min(field.shape) < params.window_side:
        raise ValueError("image smaller than the filter window")
    if params.noise_variance == 0:
        return field.copy()
    mu, var = local_stats(field, params.window_side)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(var > 0, params.noise_variance / np.where(var > 0, var, 1.0), 0.0)
    if params.ratio_clamp:
        np.minimum(r, 1.0, out=r)
    return field - r * (field - mu)


def residual_noise(img, filtered: np.ndarray) -> np.ndarray:
    """Noise field eta = original - filtered."""
    field = _as_float(img)
    filtered = np.asarray(filtered, dtype=np.float64)
    if field.shape != filtered.shape:
        raise ValueError("image and filtered field dimensions differ")
    return field - filtered


def distort(img: GrayImage, eta: np.ndarray) -> GrayImage:
    """Add a noise field pixel-wise, round half away from zero, clamp to bit depth."""
    eta = np.asarray(eta, dtype=np.float64)
    if eta.shape != img.data.shape:
        raise ValueError("image and noise field dimensions differ")
    raw = img.as_float() + eta
    rounded = np.where(raw >= 0, np.floor(raw + 0.5), np.ceil(raw - 0.5))
    clamped = np.clip(rounded, 0, img.max_value)
    return GrayImage(clamped.astype(np.int64), img.bit_depth)


def to_gray_image(field: np.ndarray, bit_depth: int) -> GrayImage:
    """Round-and-clamp a real-valued field into an integer image."""
    rounded = np.where(field >= 0, np.floor(field + 0.5), np.ceil(field - 0.5))
    clamped = np.clip(rounded, 0, GrayImage.max_value_for(bit_depth))
    return GrayImage(clamped.astype(np.int64), bit_depth)
