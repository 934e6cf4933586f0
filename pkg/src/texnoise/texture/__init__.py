"""Texture feature families: GLCM, RLM, ACF, GMRF and fractal dimension."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..image import GrayImage


class TextureMethod(enum.Enum):
    ACF = "acf"
    FD = "fd"
    RLM = "rlm"
    GMRF = "gmrf"
    GLCM = "glcm"


FEATURE_COUNTS = {
    TextureMethod.ACF: 8,
    TextureMethod.FD: 5,
    TextureMethod.RLM: 16,
    TextureMethod.GMRF: 13,
    TextureMethod.GLCM: 32,
}

# row/column offsets per direction, applied at unit distance
DIRECTIONS = (0, 45, 90, 135)
DIRECTION_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


class TextureError(ValueError):
    """Extraction failure, tagged with the method that caused it."""

    def __init__(self, method: TextureMethod, message: str):
        super().__init__(f"{method.value}: {message}")
        self.method = method


@dataclass(frozen=True)
class FeatureVector:
    """Named, fixed-length vector of real-valued texture features."""

    method: TextureMethod
    names: tuple
    values: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        expected = FEATURE_COUNTS[self.method]
        if values.shape != (expected,) or len(self.names) != expected:
            raise ValueError(
                f"{self.method.value} expects {expected} features, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.method.value} produced non-finite features")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", tuple(self.names))


def as_int_array(roi) -> np.ndarray:
    """Plain integer pixel array from a GrayImage or array-like ROI."""
    if isinstance(roi, GrayImage):
        return roi.data.astype(np.int64)
    arr = np.asarray(roi)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("ROI must be a non-empty 2-D array")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.array_equal(arr, np.round(arr)):
            raise ValueError("ROI intensities must be integers")
    return np.round(arr).astype(np.int64)


def rescale_levels(roi, levels: int) -> np.ndarray:
    """Quantize to [0, levels-1] by min-max scaling of the values actually present.

    Depends only on pixel values, never on the container bit depth, so feature
    extraction is invariant under re-declaring the same data at another depth.
    Data already inside [0, levels-1] passes through unchanged.
    """
    arr = as_int_array(roi)
    lo, hi = int(arr.min()), int(arr.max())
    if lo >= 0 and hi < levels:
        return arr
    if hi == lo:
        return np.zeros_like(arr)
    q = (arr - lo) * levels // (hi - lo + 1)
    return np.clip(q, 0, levels - 1)


from .glcm import glcm_features, compute_glcm, GlcmMatrix  # noqa: E402
from .rlm import rlm_features, compute_rlm, RunLengthMatrix  # noqa: E402
from .acf import acf_features, ACF_LAGS  # noqa: E402
from .gmrf import gmrf_features, synthesize_gmrf, GMRF_OFFSETS  # noqa: E402
from .fractal import fd_features, box_counting_dimension  # noqa: E402

_EXTRACTORS = {
    TextureMethod.ACF: lambda roi: acf_features(roi),
    TextureMethod.FD: lambda roi: fd_features(roi),
    TextureMethod.RLM: lambda roi: rlm_features(roi),
    TextureMethod.GMRF: lambda roi: gmrf_features(roi),
    TextureMethod.GLCM: lambda roi: glcm_features(roi),
}


def extract_features(roi, method: TextureMethod, levels: int = 32) -> FeatureVector:
    """One method's feature vector; grid methods (GLCM, RLM) use ``levels``."""
    try:
        if method is TextureMethod.GLCM:
            return glcm_features(roi, levels=levels)
        if method is TextureMethod.RLM:
            return rlm_features(roi, levels=levels)
        return _EXTRACTORS[method](roi)
    except TextureError:
        raise
    except ValueError as exc:
        raise TextureError(method, str(exc)) from exc


def extract_all(roi, levels: int = 32) -> dict:
    """All five feature vectors keyed by method; any failure names its method."""
    return {m: extract_features(roi, m, levels=levels) for m in TextureMethod}
