"""End-to-end acceptance checks. Each test covers one numbered criterion and
prints a PASS line once its assertions hold."""

import math
import time

import numpy as np
import pytest
from scipy import optimize

import oracles
from texnoise.ct import ScanGeometry, acquire, forward_project
from texnoise.filtering import FilterParams, adaptive_filter, distort, local_stats
from texnoise.image import GrayImage, Histogram
from texnoise.noise import (
    NoiseKind,
    NoiseModel,
    classify_noise,
    fit_from_moments,
    matusita_distance,
    sample_field,
)
from texnoise.pipeline import load_run_config, run_corpus
from texnoise.separability import (
    FeatureClass,
    bhattacharyya_bound,
    fisher_criterion,
)
from texnoise.synth import shepp_logan, write_corpus
from texnoise.texture import DIRECTION_OFFSETS, DIRECTIONS
from texnoise.texture.fractal import box_counting_dimension
from texnoise.texture.glcm import compute_glcm
from texnoise.texture.gmrf import GMRF_OFFSETS, gmrf_parameters, synthesize_gmrf
from texnoise.texture.rlm import compute_rlm


def test_criterion_01_noise_classification_recovery():
    models = {
        NoiseKind.GAUSSIAN: NoiseModel(NoiseKind.GAUSSIAN, 16.0, math.sqrt(40.0)),
        NoiseKind.RAYLEIGH: fit_from_moments(NoiseKind.RAYLEIGH, 13.70, 41.15),
        NoiseKind.ERLANG: NoiseModel(NoiseKind.ERLANG, 0.4, 6.0),
    }
    start = time.perf_counter()
    hits = {kind: 0 for kind in models}
    for kind, model in models.items():
        for seed in range(100):
            field = sample_field(model, 400, 250, seed=seed)  # 1e5 samples
            measured = Histogram.from_samples(np.round(field.ravel()).astype(int))
            got, _, _ = classify_noise(measured)
            hits[kind] += got is kind
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    for kind, n in hits.items():
        assert n >= 95, f"{kind.value}: {n}/100"
    print(f"criterion 1: PASS (hits={ {k.value: v for k, v in hits.items()} }, "
          f"{elapsed:.2f}s)")


def test_criterion_02_matusita_oracle_equivalence():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        n1, n2 = rng.integers(1, 20, 2)
        v1 = np.sort(rng.choice(64, size=n1, replace=False))
        v2 = np.sort(rng.choice(64, size=n2, replace=False))
        p1 = rng.random(n1)
        p2 = rng.random(n2)
        h1 = Histogram(v1, p1 / p1.sum())
        h2 = Histogram(v2, p2 / p2.sum())
        expect = oracles.matusita_brute(h1.values, h1.counts, h2.values, h2.counts)
        assert abs(matusita_distance(h1, h2) - expect) <= 1e-12
        assert matusita_distance(h1, h1) == 0.0
    print("criterion 2: PASS (1000 pairs within 1e-12, identity exact)")


def test_criterion_03_adaptive_filter_contracts():
    rng = np.random.default_rng(0)
    field = rng.normal(100, 10, (32, 32))

    out = adaptive_filter(field, FilterParams(noise_variance=0.0))
    assert out.tobytes() == field.tobytes()  # bit-identical

    mu, var = local_stats(field, 5)
    out = adaptive_filter(field, FilterParams(noise_variance=float(var.max())))
    assert np.abs(out - mu).max() <= 1e-9  # ratio 1 everywhere -> window mean

    clean = shepp_logan(64, 8).as_float()
    wins = 0
    for seed in range(100):
        noisy = clean + np.random.default_rng(seed).normal(0, 5.0, clean.shape)
        filtered = adaptive_filter(noisy, FilterParams(noise_variance=25.0))
        wins += np.mean((filtered - clean) ** 2) < np.mean((noisy - clean) ** 2)
    assert wins == 100
    print("criterion 3: PASS (identity, window-mean limit, 100/100 MSE wins)")


def test_criterion_04_distortion_exactness():
    values = np.repeat(np.arange(256), 513).reshape(256, 513)
    etas = np.tile(np.arange(-256, 257), (256, 1)).astype(float)
    img = GrayImage(values, 8)
    out = distort(img, etas)
    expect = np.clip(values + etas.astype(int), 0, 255)
    assert np.array_equal(out.data, expect)
    print("criterion 4: PASS (all 256x513 value/noise pairs exact)")


def test_criterion_05_glcm_rlm_oracle_equivalence():
    rng = np.random.default_rng(7)
    for i in range(100):
        side_h = int(rng.integers(3, 17))
        side_w = int(rng.integers(3, 17))
        levels = int(rng.choice([2, 4, 8, 32]))
        roi = rng.integers(0, levels, (side_h, side_w))
        for direction in DIRECTIONS:
            dr, dc = DIRECTION_OFFSETS[direction]
            brute = oracles.glcm_brute(roi, levels, dr, dc).astype(float)
            got = compute_glcm(roi, levels=levels, direction=direction)
            assert np.array_equal(got.probs, brute / brute.sum())
            brute_rlm = oracles.rlm_brute(roi, levels, direction, max(roi.shape))
            assert np.array_equal(
                compute_rlm(roi, levels=levels, direction=direction).counts,
                brute_rlm)
    print("criterion 5: PASS (100 ROIs x 4 directions, exact equality)")


def test_criterion_06_gmrf_recovery():
    theta = np.zeros(12)
    theta[0], theta[1], theta[2] = 0.12, 0.08, -0.05
    hits = 0
    for seed in range(50):
        field = synthesize_gmrf(theta, (64, 64), seed=seed)
        scaled = np.round(128 + 40 * field).astype(int)
        est, _, _ = gmrf_parameters(scaled)
        hits += np.abs(est - theta).max() < 0.1
    assert hits >= 45, f"{hits}/50"

    rng = np.random.default_rng(11)
    roi = rng.integers(0, 256, (20, 20))
    est, res, _ = gmrf_parameters(roi)
    expect, expect_res = oracles.gmrf_pinv(roi, GMRF_OFFSETS)
    assert np.abs(est - expect).max() <= 1e-6
    assert abs(res - expect_res) <= 1e-6
    print(f"criterion 6: PASS ({hits}/50 recoveries, pinv path within 1e-6)")


def test_criterion_07_fractal_dimension_contracts():
    assert box_counting_dimension(np.full((32, 32), 7.0)) == 2.0
    for seed in range(50):
        noise = np.random.default_rng(seed).integers(0, 256, (64, 64)).astype(float)
        fd = box_counting_dimension(noise)
        assert 2.4 <= fd <= 3.0, f"seed {seed}: {fd}"
    print("criterion 7: PASS (flat=2.0 exact, 50/50 noise FDs in [2.4, 3.0])")


def test_criterion_08_fisher_bhattacharyya_closed_forms():
    rng = np.random.default_rng(3)
    x = rng.normal(0, 1, (20, 3))
    same1, same2 = FeatureClass("a", x), FeatureClass("b", x.copy())
    assert fisher_criterion(same1, same2) == 0.0
    assert bhattacharyya_bound(same1, same2) == 0.0

    # 1-D fixture with exact sample stats: mean diff 2, unit variances
    c1 = FeatureClass("a", np.array([[-1.0], [0.0], [1.0]]))
    c2 = FeatureClass("b", np.array([[1.0], [2.0], [3.0]]))
    assert abs(bhattacharyya_bound(c1, c2) - 0.5) <= 1e-9

    # closed form vs numerically optimized Rayleigh quotient, 3-D
    for seed in range(5):
        r = np.random.default_rng(seed)
        x1 = r.normal(0, 1, (30, 3))
        x2 = r.normal(0.8, 1.2, (30, 3))
        f1, f2 = FeatureClass("a", x1), FeatureClass("b", x2)
        closed = fisher_criterion(f1, f2)
        m1, m2 = x1.mean(axis=0), x2.mean(axis=0)
        d1, d2 = x1 - m1, x2 - m2
        s_w = d1.T @ d1 + d2.T @ d2
        diff = m1 - m2

        def neg_quotient(w):
            return -(w @ diff) ** 2 / (w @ s_w @ w)

        best = -math.inf
        for w0 in r.normal(size=(50, 3)):
            res = optimize.minimize(neg_quotient, w0, method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-14})
            best = max(best, -res.fun)
        assert abs(closed - best) <= 1e-4 * max(1.0, closed)

    # undersampled high-dimensional classes: singular covariance -> -inf
    x1 = rng.normal(0, 1, (11, 32))
    x2 = rng.normal(1, 1, (11, 32))
    assert bhattacharyya_bound(FeatureClass("a", x1), FeatureClass("b", x2)) == -math.inf
    print("criterion 8: PASS (J=0/B=0 identity, B=0.5 fixture, "
          "quotient search match, 32-dim B=-Inf)")


def test_criterion_09_ct_stage_fidelity():
    phantom = shepp_logan(128, 8)
    start = time.perf_counter()
    sino = forward_project(phantom, ScanGeometry(n_angles=360))
    masses = sino.data.sum(axis=1)
    total = phantom.as_float().sum()
    assert np.abs(masses / total - 1.0).max() < 0.01
    recon = acquire(phantom, ScanGeometry(n_angles=360), filter_name="ram-lak")
    elapsed = time.perf_counter() - start
    value = oracles.psnr(recon.data, phantom.data, 255)
    assert value >= 25.0, f"PSNR {value:.2f}"
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    print(f"criterion 9: PASS (PSNR {value:.2f} dB, mass within 1%, {elapsed:.2f}s)")


def test_criterion_10_end_to_end_trend(tmp_path):
    seeds = (1, 2, 3)
    amplitudes = (1.0, 2.0, 4.0)
    f_on = {}  # (seed, amplitude) -> {method: F_on}
    start = time.perf_counter()
    first_run = None
    for seed in seeds:
        for amp in amplitudes:
            out = tmp_path / f"s{seed}a{int(amp)}"
            config = write_corpus(out, n_cases=11, seed=seed, noise_scale=amp)
            run = load_run_config(config)
            result = run_corpus(run)
            assert not result.failures
            f_on[(seed, amp)] = {r.method: r.fisher_on for r in result.reports}
            if first_run is None:
                first_run = (config, run)
    single_run_time = (time.perf_counter() - start) / 9.0
    assert single_run_time < 60.0

    methods = list(f_on[(1, 1.0)])
    for method in methods:
        averaged = [np.mean([f_on[(s, a)][method] for s in seeds]) for a in amplitudes]
        assert averaged[0] <= averaged[1] <= averaged[2], (
            f"{method.value}: seed-averaged F_on {averaged} not non-decreasing")

    # determinism: rerunning the first config reproduces every report byte
    config, run = first_run
    snapshot = {p.relative_to(run.output_dir): p.read_bytes()
                for p in sorted(run.output_dir.rglob("*")) if p.is_file()}
    run_corpus(load_run_config(config))
    for rel, blob in snapshot.items():
        assert (run.output_dir / rel).read_bytes() == blob, rel
    print(f"criterion 10: PASS (monotone seed-averaged F_on x5 methods, "
          f"byte-identical rerun, {single_run_time:.1f}s/run)")


def test_criterion_11_report_shape_fidelity(tmp_path):
    config = write_corpus(tmp_path, n_cases=11, seed=1, noise_scale=2.0)
    run = load_run_config(config)
    run_corpus(run)

    lines = (run.output_dir / "noise_distances.csv").read_text().strip().split("\n")
    assert len(lines) == 12  # header + 11 cases
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 5  # case, 3 distance columns, classified
        for cell in cells[1:4]:
            assert cell == "Inf" or float(cell) >= 0.0

    lines = (run.output_dir / "separability.csv").read_text().strip().split("\n")
    assert len(lines) == 6  # header + 5 methods
    counts = [int(line.split(",")[1]) for line in lines[1:]]
    assert counts == [8, 5, 16, 13, 32]
    print("criterion 11: PASS (11x3 noise table, 5-row separability "
          "table with feature counts 8/5/16/13/32)")
