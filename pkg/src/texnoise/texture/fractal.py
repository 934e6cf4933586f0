"""Differential box-counting fractal dimension on five derived images."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from . import FeatureVector, TextureError, TextureMethod, as_int_array

FD_VARIANT_NAMES = ("fd_original", "fd_high_gray", "fd_low_gray", "fd_hsmooth", "fd_vsmooth")
BOX_SIZES = (2, 4, 8, 16)


def _pad_to_pow2(surface: np.ndarray) -> np.ndarray:
    side = max(surface.shape)
    target = 1
    while target < side:
        target *= 2
    h, w = surface.shape
    if (h, w) == (target, target):
        return surface
    return np.pad(surface, ((0, target - h), (0, target - w)), mode="edge")


def _box_count(surface: np.ndarray, s: int) -> float:
    """Number of boxes covering the intensity surface at block size s.

    Intensities are taken relative to the surface minimum so the count is
    invariant under adding a constant; the box height is s * G / side with
    G the intensity range.
    """
    side = surface.shape[0]
    rel = surface - surface.min()
    gray_range = float(rel.max())
    blocks = rel.reshape(side // s, s, side // s, s)
    if gray_range == 0.0:
        return float((side // s) ** 2)
    h = s * gray_range / side
    bmax = blocks.max(axis=(1, 3))
    bmin = blocks.min(axis=(1, 3))
    return float(np.sum(np.ceil(bmax / h) - np.ceil(bmin / h) + 1.0))


def box_counting_dimension(surface) -> float:
    """Slope of log N(s) against log(1/s) over box sizes {2,4,8,16}, clamped to [2,3]."""
    surface = np.asarray(surface, dtype=np.float64)
    if surface.ndim != 2 or min(surface.shape) < 8:
        raise ValueError("surface side must be >= 8")
    surface = _pad_to_pow2(surface)
    side = surface.shape[0]
    sizes = [s for s in BOX_SIZES if s <= side // 2]
    if len(sizes) < 2:
        raise ValueError("fewer than 2 usable box sizes")
    if surface.max() == surface.min():
        return 2.0  # flat surface: N(s) = (side/s)^2 for every s
    counts = [_box_count(surface, s) for s in sizes]
    slope = np.polyfit(np.log(1.0 / np.asarray(sizes, dtype=np.float64)),
                       np.log(counts), 1)[0]
    return float(np.clip(slope, 2.0, 3.0))


def derived_images(roi) -> list[np.ndarray]:
    """Original, high-gray, low-gray, horizontally and vertically smoothed surfaces."""
    arr = as_int_array(roi).astype(np.float64)
    mean, std = arr.mean(), arr.std()
    high_cut = mean + std
    low_cut = max(mean - std, 0.0)
    high = np.maximum(arr - high_cut, 0.0)
    low = np.minimum(arr, low_cut)
    hsmooth = ndimage.uniform_filter(arr, size=(1, 3), mode="nearest")
    vsmooth = ndimage.uniform_filter(arr, size=(3, 1), mode="nearest")
    return [arr, high, low, hsmooth, vsmooth]


def fd_features(roi) -> FeatureVector:
    """Box-counting dimension of the five derived images, in fixed order."""
    arr = as_int_array(roi)
    if min(arr.shape) < 8:
        raise TextureError(TextureMethod.FD, "ROI side must be >= 8")
    values = np.array([box_counting_dimension(s) for s in derived_images(arr)])
    return FeatureVector(TextureMethod.FD, FD_VARIANT_NAMES, values)
