import numpy as np
import pytest
from hypothesis import given, strategies as st

from texnoise.image import (
    GrayImage,
    Histogram,
    ImageFormatError,
    RoiError,
    RoiSpec,
    extract_roi,
    histogram,
    load_image,
    load_pgm,
    load_raw16,
    quantize,
    save_pgm,
    save_raw16,
)


def test_grayimage_validates_range():
    with pytest.raises(ValueError):
        GrayImage(np.array([[0, 256]]), 8)
    with pytest.raises(ValueError):
        GrayImage(np.array([[-1, 0]]), 8)
    img = GrayImage(np.array([[0, 4095]]), 12)
    assert img.max_value == 4095


def test_grayimage_rejects_bad_depth_and_shape():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((2, 2), dtype=int), 10)
    with pytest.raises(ValueError):
        GrayImage(np.zeros(4, dtype=int), 8)


def test_pgm8_round_trip(tmp_path):
    img = GrayImage(np.array([[0, 255], [128, 7]]), 8)
    path = tmp_path / "a.pgm"
    save_pgm(img, path)
    back = load_pgm(path)
    assert back.bit_depth == 8
    assert np.array_equal(back.data, [[0, 255], [128, 7]])


def test_pgm_maxval_4095_gives_12_bits(tmp_path):
    # reference writer: hand-built header + big-endian payload
    path = tmp_path / "b.pgm"
    data = np.array([[0, 4095], [2048, 17]], dtype=">u2")
    path.write_bytes(b"P5\n2 2\n4095\n" + data.tobytes())
    img = load_pgm(path)
    assert img.bit_depth == 12
    assert np.array_equal(img.data, [[0, 4095], [2048, 17]])


def test_pgm16_round_trip(tmp_path):
    img = GrayImage(np.array([[65535, 0], [300, 40000]]), 16)
    path = tmp_path / "c.pgm"
    save_pgm(img, path)
    assert np.array_equal(load_pgm(path).data, img.data)


def test_pgm_comments_and_whitespace(tmp_path):
    path = tmp_path / "d.pgm"
    path.write_bytes(b"P5 # comment\n# another\n 2\t1 \n255\n\x05\x07")
    img = load_pgm(path)
    assert np.array_equal(img.data, [[5, 7]])


def test_pgm_malformed_and_truncated(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P6\n2 2\n255\n\x00\x00\x00\x00")
    with pytest.raises(ImageFormatError):
        load_pgm(path)
    path.write_bytes(b"P5\n2 2\n255\n\x00\x00")
    with pytest.raises(ImageFormatError):
        load_pgm(path)
    path.write_bytes(b"P5\n2 2\n100\n\x00\x00\x00\xff")
    with pytest.raises(ImageFormatError):
        load_pgm(path)


def test_raw16_little_endian_order(tmp_path):
    path = tmp_path / "r.raw"
    path.write_bytes(bytes([1, 0, 0, 1, 255, 255, 16, 39]))
    img = load_raw16(path, width=2, height=2)
    assert img.bit_depth == 16
    assert np.array_equal(img.data, [[1, 256], [65535, 10000]])


def test_raw16_round_trip_and_dims_required(tmp_path):
    img = GrayImage(np.arange(6).reshape(2, 3), 16)
    path = tmp_path / "r2.raw"
    save_raw16(img, path)
    assert np.array_equal(load_image(path, "raw16", width=3, height=2).data, img.data)
    with pytest.raises(ValueError):
        load_image(path, "raw16")
    with pytest.raises(ImageFormatError):
        load_raw16(path, width=4, height=2)


def test_extract_roi_identity_and_center():
    ramp = GrayImage(np.arange(16).reshape(4, 4), 8)
    assert np.array_equal(extract_roi(ramp, RoiSpec(0, 0, 4)).data, ramp.data)
    center = extract_roi(ramp, RoiSpec(1, 1, 2))
    assert np.array_equal(center.data, [[5, 6], [9, 10]])


def test_extract_roi_out_of_bounds():
    img = GrayImage(np.zeros((4, 4), dtype=int), 8)
    with pytest.raises(RoiError):
        extract_roi(img, RoiSpec(3, 0, 2))


def test_extract_roi_composes():
    img = GrayImage(np.arange(64).reshape(8, 8) % 256, 8)
    once = extract_roi(extract_roi(img, RoiSpec(1, 2, 6)), RoiSpec(2, 1, 3))
    direct = extract_roi(img, RoiSpec(3, 3, 3))
    assert np.array_equal(once.data, direct.data)


def test_quantize_identity_midpoint_clamp():
    img = GrayImage(np.array([[0, 127], [128, 255]]), 8)
    assert np.array_equal(quantize(img, 256).data, img.data)
    assert np.array_equal(quantize(img, 2).data, [[0, 0], [1, 1]])
    top = GrayImage(np.array([[4095, 0]]), 12)
    assert np.array_equal(quantize(top, 32).data, [[31, 0]])


@given(st.integers(0, 255), st.integers(0, 255), st.sampled_from([2, 4, 8, 16, 32]))
def test_quantize_monotone(v1, v2, levels):
    img = GrayImage(np.array([[v1, v2]]), 8)
    q = quantize(img, levels).data[0]
    if v1 <= v2:
        assert q[0] <= q[1]
    else:
        assert q[0] >= q[1]


def test_histogram_constant_and_sparse():
    img = GrayImage(np.full((3, 3), 9), 8)
    h = histogram(img, RoiSpec(0, 0, 3))
    assert np.array_equal(h.values, [9]) and h.total == 9
    h2 = Histogram.from_samples([3, 5])
    assert np.array_equal(h2.values, [3, 5])
    assert np.array_equal(h2.counts, [1, 1])


def test_histogram_matches_counting_oracle(rng):
    samples = np.clip(np.round(rng.normal(100, 10, (32, 32))), 0, 255).astype(int)
    h = histogram(GrayImage(samples, 8))
    tally = {}
    for v in samples.ravel():
        tally[v] = tally.get(v, 0) + 1
    assert dict(zip(h.values.tolist(), h.counts.tolist())) == {
        k: float(v) for k, v in tally.items()
    }


def test_moments_delta_and_two_point():
    assert Histogram(np.array([5]), np.array([3])).moments() == (5.0, 0.0)
    mean, var = Histogram(np.array([0, 1]), np.array([2, 2])).moments()
    assert mean == pytest.approx(0.5) and var == pytest.approx(0.25)


def test_moments_match_pixel_statistics(rng):
    samples = rng.integers(0, 256, (32, 32))
    h = histogram(GrayImage(samples, 8))
    mean, var = h.moments()
    assert mean == pytest.approx(samples.mean(), rel=1e-9)
    assert var == pytest.approx(samples.var(), rel=1e-9)


def test_empty_histogram_rejected():
    with pytest.raises(ValueError):
        Histogram(np.array([], dtype=int), np.array([]))
    with pytest.raises(ValueError):
        Histogram(np.array([1]), np.array([0.0])).moments()
