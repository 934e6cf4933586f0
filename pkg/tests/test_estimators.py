import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from texnoise.estimators import (
    AdaptiveNoiseFilter,
    CTScannerSimulator,
    NoiseKindClassifier,
    TextureFeatureExtractor,
)
from texnoise.filtering import FilterParams, adaptive_filter
from texnoise.noise import NoiseKind
from texnoise.synth import shepp_logan


def test_estimators_clone_and_get_params():
    for est in (AdaptiveNoiseFilter(noise_variance=4.0),
                NoiseKindClassifier(),
                TextureFeatureExtractor(methods=["fd"], levels=16),
                CTScannerSimulator(n_angles=90)):
        copy = clone(est)
        assert copy.get_params() == est.get_params()


def test_filter_matches_functional_api(rng):
    field = rng.normal(100, 10, (16, 16))
    est = AdaptiveNoiseFilter(noise_variance=25.0)
    out = est.fit(field).transform(field)
    expect = adaptive_filter(field, FilterParams(noise_variance=25.0))
    assert np.array_equal(out, expect)


def test_filter_estimates_variance(rng):
    field = rng.normal(100, 5, (64, 64))
    est = AdaptiveNoiseFilter().fit(field)
    assert est.noise_variance_ == pytest.approx(25.0, rel=0.3)


def test_noise_classifier(rng):
    samples = np.round(rng.normal(120, 8, 4096))
    est = NoiseKindClassifier().fit(samples)
    assert est.predict() is NoiseKind.GAUSSIAN
    assert est.mean_ == pytest.approx(120, abs=1.0)
    assert set(est.distances_) == set(NoiseKind)
    with pytest.raises(ValueError):
        NoiseKindClassifier().predict()


def test_texture_extractor_shapes(rng):
    rois = [rng.integers(0, 256, (16, 16)) for _ in range(3)]
    est = TextureFeatureExtractor()
    out = est.fit(rois).transform(rois)
    assert out.shape == (3, 8 + 5 + 16 + 13 + 32)
    assert est.n_features_out_ == 74
    assert len(est.get_feature_names_out()) == 74

    sub = TextureFeatureExtractor(methods=["glcm", "rlm"])
    out = sub.fit(rois).transform(rois)
    assert out.shape == (3, 48)


def test_texture_extractor_single_image(rng):
    roi = rng.integers(0, 256, (16, 16))
    out = TextureFeatureExtractor(methods=["fd"]).fit(roi).transform(roi)
    assert out.shape == (1, 5)


def test_ct_simulator_round_trip():
    img = shepp_logan(64, 8)
    est = CTScannerSimulator(n_angles=120, recon_filter="ram-lak")
    out = est.fit(img.as_float()).transform(img.as_float())
    assert out.shape == (64, 64)
    mse = np.mean((out - img.as_float()) ** 2)
    assert 10 * np.log10(255**2 / mse) > 20.0


def test_sklearn_pipeline_composition(rng):
    field = np.round(rng.normal(128, 10, (32, 32)))
    pipe = Pipeline([
        ("denoise", AdaptiveNoiseFilter(noise_variance=100.0)),
        ("features", TextureFeatureExtractor(methods=["acf"])),
    ])
    out = pipe.fit_transform(field)
    assert out.shape == (1, 8)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        AdaptiveNoiseFilter(noise_variance=1.0).transform(np.zeros(5))
    with pytest.raises(ValueError):
        NoiseKindClassifier().fit(np.array([]))
    with pytest.raises(ValueError):
        TextureFeatureExtractor().fit_transform(np.full((8, 8), np.nan))
