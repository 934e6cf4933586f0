"""Thin scikit-learn compatible wrappers so the algorithms compose with
Pipeline/GridSearch style tooling."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .ct import ScanGeometry, acquire
from .filtering import FilterParams, adaptive_filter, local_stats, to_gray_image
from .image import GrayImage, Histogram
from .noise import classify_noise
from .texture import FEATURE_COUNTS, TextureMethod, extract_features


def _check_image(X) -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a single non-empty 2-D image")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def _check_image_stack(X) -> list:
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [_check_image(X)]
    return [_check_image(img) for img in X]


class AdaptiveNoiseFilter(BaseEstimator, TransformerMixin):
    """Local-statistics noise reduction as a transformer.

    With ``noise_variance=None``, ``fit`` estimates it as the median local
    window variance of the fitted image; otherwise fit is a no-op.
    """

    def __init__(self, noise_variance=None, window_side=5, ratio_clamp=True):
        self.noise_variance = noise_variance
        self.window_side = window_side
        self.ratio_clamp = ratio_clamp

    def fit(self, X, y=None):
        if self.noise_variance is None:
            field = _check_image(X)
            _, var = local_stats(field, self.window_side)
            self.noise_variance_ = float(np.median(var))
        else:
            self.noise_variance_ = float(self.noise_variance)
        return self

    def transform(self, X):
        if not hasattr(self, "noise_variance_"):
            self.fit(X)
        params = FilterParams(noise_variance=self.noise_variance_,
                              window_side=self.window_side,
                              ratio_clamp=self.ratio_clamp)
        return adaptive_filter(_check_image(X), params)


class NoiseKindClassifier(BaseEstimator):
    """Classify which noise family (Gaussian, Rayleigh, Erlang) generated a
    sample of intensities; exposes the fitted model and per-family distances."""

    def fit(self, X, y=None):
        samples = np.asarray(X, dtype=np.float64).ravel()
        if samples.size == 0:
            raise ValueError("no samples")
        measured = Histogram.from_samples(samples)
        self.kind_, self.model_, self.distances_ = classify_noise(measured)
        self.mean_, self.variance_ = measured.moments()
        return self

    def predict(self, X=None):
        if not hasattr(self, "kind_"):
            raise ValueError("classifier is not fitted")
        return self.kind_


class TextureFeatureExtractor(BaseEstimator, TransformerMixin):
    """Stack of 2-D ROIs in, (n_rois, n_features) matrix out."""

    def __init__(self, methods="all", levels=32):
        self.methods = methods
        self.levels = levels

    def _method_list(self):
        if self.methods == "all":
            return list(TextureMethod)
        return [m if isinstance(m, TextureMethod) else TextureMethod(m)
                for m in self.methods]

    def fit(self, X, y=None):
        self.n_features_out_ = sum(FEATURE_COUNTS[m] for m in self._method_list())
        return self

    def transform(self, X):
        rois = _check_image_stack(X)
        rows, names = [], None
        for roi in rois:
            vectors = [extract_features(roi.astype(np.int64), m, levels=self.levels)
                       for m in self._method_list()]
            rows.append(np.concatenate([v.values for v in vectors]))
            if names is None:
                names = [n for v in vectors for n in v.names]
        self.feature_names_ = tuple(names)
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names_)


class CTScannerSimulator(BaseEstimator, TransformerMixin):
    """Parallel-beam project + filtered back-projection round trip."""

    def __init__(self, n_angles=360, recon_filter="hann", bit_depth=8):
        self.n_angles = n_angles
        self.recon_filter = recon_filter
        self.bit_depth = bit_depth

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        field = _check_image(X)
        img = to_gray_image(field, self.bit_depth)
        geometry = ScanGeometry(n_angles=self.n_angles)
        return acquire(img, geometry, self.recon_filter).as_float()
