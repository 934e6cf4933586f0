"""Seeded synthetic images: an ellipse phantom for CT checks and a procedural
textured corpus with controlled injected noise for end-to-end runs."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .filtering import to_gray_image
from .image import GrayImage, RoiSpec, save_pgm

# (value, x-center, y-center, x-half-axis, y-half-axis, rotation deg), on the
# unit square; the classic head-phantom layout with non-negative contrasts
PHANTOM_ELLIPSES = (
    (1.00, 0.0, 0.0, 0.69, 0.92, 0.0),
    (-0.80, 0.0, -0.0184, 0.6624, 0.874, 0.0),
    (-0.20, 0.22, 0.0, 0.11, 0.31, -18.0),
    (-0.20, -0.22, 0.0, 0.16, 0.41, 18.0),
    (0.10, 0.0, 0.35, 0.21, 0.25, 0.0),
    (0.10, 0.0, 0.10, 0.046, 0.046, 0.0),
    (0.10, 0.0, -0.10, 0.046, 0.046, 0.0),
    (0.10, -0.08, -0.605, 0.046, 0.023, 0.0),
    (0.10, 0.0, -0.605, 0.023, 0.023, 0.0),
    (0.10, 0.06, -0.605, 0.023, 0.046, 0.0),
)


def shepp_logan(side: int, bit_depth: int = 8) -> GrayImage:
    """Head-style ellipse phantom scaled to the full bit range."""
    coords = (np.arange(side) - (side - 1) / 2.0) / (side / 2.0)
    x = coords[None, :]
    y = -coords[:, None]
    field = np.zeros((side, side))
    for value, cx, cy, ax, ay, rot in PHANTOM_ELLIPSES:
        phi = math.radians(rot)
        xr = (x - cx) * math.cos(phi) + (y - cy) * math.sin(phi)
        yr = -(x - cx) * math.sin(phi) + (y - cy) * math.cos(phi)
        field += value * ((xr / ax) ** 2 + (yr / ay) ** 2 <= 1.0)
    field = np.clip(field, 0.0, None)
    peak = field.max()
    if peak > 0:
        field = field / peak
    return to_gray_image(field * GrayImage.max_value_for(bit_depth), bit_depth)


def sinusoid_grating(side: int, period: float, angle_deg: float) -> np.ndarray:
    """Values in [0, 1]."""
    ys, xs = np.indices((side, side)).astype(np.float64)
    phi = math.radians(angle_deg)
    t = xs * math.cos(phi) + ys * math.sin(phi)
    return 0.5 + 0.5 * np.sin(2.0 * math.pi * t / period)


def fractal_surface(side: int, beta: float, seed: int) -> np.ndarray:
    """1/f^beta spectral noise, min-max scaled to [0, 1]."""
    rng = np.random.default_rng(seed)
    fy = np.fft.fftfreq(side)[:, None]
    fx = np.fft.fftfreq(side)[None, :]
    radius = np.sqrt(fx**2 + fy**2)
    radius[0, 0] = 1.0
    amplitude = radius ** (-beta / 2.0)
    amplitude[0, 0] = 0.0
    spectrum = np.fft.fft2(rng.normal(size=(side, side))) * amplitude
    field = np.real(np.fft.ifft2(spectrum))
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)


def checkerboard(side: int, cell: int) -> np.ndarray:
    ys, xs = np.indices((side, side))
    return (((ys // cell) + (xs // cell)) % 2).astype(np.float64)


CORPUS_SIDE = 128
TUMOR_ROI = RoiSpec(48, 48, 32)
UNIFORM_ROI = RoiSpec(8, 88, 32)
_UNIFORM_VALUE = 100.0
_BASE_SIGMA = 3.0

PRESETS = ("gratings11", "mixed11")


def _base_texture(preset: str, index: int, seed: int) -> np.ndarray:
    if preset == "gratings11":
        # homogeneous family: noise effects dominate the between-case spread
        return sinusoid_grating(CORPUS_SIDE, 7.0 + 0.5 * index, 10.0 * index)
    if preset == "mixed11":
        kind = index % 3
        if kind == 0:
            return sinusoid_grating(CORPUS_SIDE, 6.0 + 2.0 * (index // 3), 15.0 * index)
        if kind == 1:
            return fractal_surface(CORPUS_SIDE, 2.0 + 0.2 * (index // 3), seed * 1000 + index)
        return checkerboard(CORPUS_SIDE, 4 + 2 * (index // 3))
    raise ValueError(f"unknown preset {preset!r}, expected one of {PRESETS}")


def make_case_image(index: int, seed: int, noise_scale: float = 1.0,
                    preset: str = "gratings11") -> GrayImage:
    """One corpus image: mid-range texture, a flat scanning-table stand-in
    band under the uniform ROI, and seeded injected noise everywhere."""
    texture = _base_texture(preset, index, seed)
    field = 60.0 + 120.0 * texture
    field[UNIFORM_ROI.y0 : UNIFORM_ROI.y0 + UNIFORM_ROI.side,
          UNIFORM_ROI.x0 : UNIFORM_ROI.x0 + UNIFORM_ROI.side] = _UNIFORM_VALUE
    rng = np.random.default_rng(seed * 10_000 + index)
    sigma = _BASE_SIGMA * noise_scale
    if index % 2 == 0:
        noise = rng.normal(0.0, sigma, field.shape)
    else:
        # zero-mean Rayleigh-shaped noise with standard deviation sigma
        raw = rng.rayleigh(1.0, field.shape)
        noise = (raw - math.sqrt(math.pi / 2.0)) * (sigma / math.sqrt(2.0 - math.pi / 2.0))
    return to_gray_image(field + noise, 8)


def write_corpus(out_dir, n_cases: int = 11, seed: int = 0, noise_scale: float = 1.0,
                 skip_recon: bool = True, window_side: int = 5,
                 quantization: int = 32, n_angles: int = 180,
                 preset: str = "gratings11") -> Path:
    """Write PGM cases plus a run config; returns the config path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [
        f"seed = {seed}",
        'output_dir = "reports"',
        f"skip_recon = {'true' if skip_recon else 'false'}",
        f"quantization = {quantization}",
        "",
        "[filter]",
        f"window_side = {window_side}",
        "",
        "[geometry]",
        f"n_angles = {n_angles}",
    ]
    for index in range(n_cases):
        label = f"case{index + 1:02d}"
        img = make_case_image(index, seed, noise_scale, preset)
        save_pgm(img, out_dir / f"{label}.pgm")
        lines += [
            "",
            "[[cases]]",
            f'label = "{label}"',
            f'image = "{label}.pgm"',
            f"tumor_roi = [{TUMOR_ROI.x0}, {TUMOR_ROI.y0}, {TUMOR_ROI.side}]",
            f"uniform_roi = [{UNIFORM_ROI.x0}, {UNIFORM_ROI.y0}, {UNIFORM_ROI.side}]",
        ]
    config_path = out_dir / "run.toml"
    config_path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return config_path
