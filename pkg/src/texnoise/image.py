"""Gray-level image container, PGM/raw16 file I/O, ROI cropping, quantization and histograms."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

VALID_BIT_DEPTHS = (8, 12, 16)


class ImageFormatError(ValueError):
    """Malformed header, truncated data or out-of-range intensities in an image file."""


class RoiError(ValueError):
    """Region of interest does not fit the image."""


@dataclass(frozen=True)
class GrayImage:
    """2-D grid of integer intensities with a declared bit depth (8, 12 or 16)."""

    data: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("image data must be a non-empty 2-D array")
        if self.bit_depth not in VALID_BIT_DEPTHS:
            raise ValueError(f"bit_depth must be one of {VALID_BIT_DEPTHS}")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.array_equal(arr, np.round(arr)):
                raise ValueError("image intensities must be integers")
            arr = np.round(arr).astype(np.int64)
        if arr.min() < 0 or arr.max() > self.max_value_for(self.bit_depth):
            raise ValueError(
                f"intensities out of range for {self.bit_depth}-bit image"
            )
        arr = arr.astype(np.uint16)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @staticmethod
    def max_value_for(bit_depth):
        return (1 << bit_depth) - 1

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def max_value(self):
        return self.max_value_for(self.bit_depth)

    def as_float(self):
        return self.data.astype(np.float64)


@dataclass(frozen=True)
class RoiSpec:
    """Square region of interest: top-left corner (x0, y0) and side length."""

    x0: int
    y0: int
    side: int = 32

    def __post_init__(self):
        if self.side < 2:
            raise ValueError("ROI side must be >= 2")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("ROI offsets must be nonnegative")

    def check_inside(self, img: GrayImage):
        if self.x0 + self.side > img.width or self.y0 + self.side > img.height:
            raise RoiError(
                f"ROI ({self.x0},{self.y0},{self.side}) outside "
                f"{img.width}x{img.height} image"
            )

    def overlaps(self, other: "RoiSpec") -> bool:
        return not (
            self.x0 + self.side <= other.x0
            or other.x0 + other.side <= self.x0
            or self.y0 + self.side <= other.y0
            or other.y0 + other.side <= self.y0
        )


@dataclass(frozen=True)
class Histogram:
    """Sparse histogram over integer intensities: bin values, counts and total mass.

    Counts may be fractional so that model PDFs evaluated on an integer
    support can share the type with measured histograms.
    """

    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.float64)
        if values.ndim != 1 or counts.shape != values.shape:
            raise ValueError("values and counts must be matching 1-D arrays")
        if values.size == 0:
            raise ValueError("histogram must have at least one bin")
        if np.any(np.diff(values) <= 0):
            raise ValueError("histogram values must be strictly ascending")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be nonnegative")
        values.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        total = self.total
        if total <= 0:
            raise ValueError("cannot normalize an empty histogram")
        return self.counts / total

    def moments(self) -> tuple[float, float]:
        """Mean and population variance of the binned distribution."""
        p = self.probabilities()
        mean = float(np.dot(self.values, p))
        variance = float(np.dot((self.values - mean) ** 2, p))
        return mean, variance

    def normalized(self) -> "Histogram":
        return Histogram(self.values, self.probabilities())

    @classmethod
    def from_samples(cls, samples) -> "Histogram":
        samples = np.asarray(samples).ravel()
        if samples.size == 0:
            raise ValueError("no samples")
        values, counts = np.unique(np.round(samples).astype(np.int64), return_counts=True)
        return cls(values, counts)


def extract_roi(img: GrayImage, roi: RoiSpec) -> GrayImage:
    """Crop a square ROI; pixel (i, j) of the result is source (x0+j, y0+i)."""
    roi.check_inside(img)
    block = img.data[roi.y0 : roi.y0 + roi.side, roi.x0 : roi.x0 + roi.side]
    return GrayImage(block.copy(), img.bit_depth)


def quantize(img: GrayImage, levels: int) -> GrayImage:
    """Map intensities to [0, levels-1] by floor scaling over the full bit range."""
    full = 1 << img.bit_depth
    if not 2 <= levels <= full:
        raise ValueError(f"levels must be in [2, {full}]")
    q = (img.data.astype(np.int64) * levels) // full
    np.clip(q, 0, levels - 1, out=q)
    return GrayImage(q, img.bit_depth)


def histogram(img: GrayImage, region: RoiSpec | None = None) -> Histogram:
    """Histogram of integer intensities inside a region (whole image by default)."""
    if region is not None:
        img = extract_roi(img, region)
    return Histogram.from_samples(img.data)


def _read_pgm_tokens(raw: bytes, n_tokens: int):
    """PGM header tokens, skipping '#' comments; returns tokens and data offset."""
    tokens = []
    i = 0
    while len(tokens) < n_tokens:
        if i >= len(raw):
            raise ImageFormatError("truncated PGM header")
        c = raw[i : i + 1]
        if c == b"#":
            while i < len(raw) and raw[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(raw) and not raw[j : j + 1].isspace() and raw[j : j + 1] != b"#":
                j += 1
            tokens.append(raw[i:j])
            i = j
    # single whitespace byte separates maxval from pixel data
    return tokens, i + 1


def _bit_depth_for_maxval(maxval: int) -> int:
    bits = maxval.bit_length()
    for depth in VALID_BIT_DEPTHS:
        if bits <= depth:
            return depth
    raise ImageFormatError(f"maxval {maxval} exceeds 16-bit range")


def load_pgm(path) -> GrayImage:
    """Binary PGM (P5); 2-byte big-endian samples when maxval > 255."""
    raw = Path(path).read_bytes()
    try:
        tokens, offset = _read_pgm_tokens(raw, 4)
    except ImageFormatError:
        raise
    if tokens[0] != b"P5":
        raise ImageFormatError(f"unsupported PGM magic {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"bad PGM header: {exc}") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ImageFormatError("bad PGM dimensions or maxval")
    wide = maxval > 255
    n_bytes = width * height * (2 if wide else 1)
    payload = raw[offset : offset + n_bytes]
    if len(payload) < n_bytes:
        raise ImageFormatError("truncated PGM pixel data")
    dtype = ">u2" if wide else "u1"
    data = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.uint16)
    if data.max() > maxval:
        raise ImageFormatError("PGM sample exceeds declared maxval")
    return GrayImage(data, _bit_depth_for_maxval(maxval))


def save_pgm(img: GrayImage, path):
    """Binary PGM (P5) with maxval 2^bit_depth - 1."""
    maxval = img.max_value
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        payload = img.data.astype(">u2").tobytes()
    else:
        payload = img.data.astype("u1").tobytes()
    Path(path).write_bytes(header + payload)


def load_raw16(path, width: int, height: int) -> GrayImage:
    """Headerless little-endian 16-bit raster with out-of-band dimensions."""
    raw = Path(path).read_bytes()
    n_bytes = width * height * 2
    if len(raw) < n_bytes:
        raise ImageFormatError("truncated raw16 data")
    data = np.frombuffer(raw[:n_bytes], dtype="<u2").reshape(height, width)
    return GrayImage(data.astype(np.uint16), 16)


def save_raw16(img: GrayImage, path):
    Path(path).write_bytes(img.data.astype("<u2").tobytes())


def load_image(path, fmt: str = "pgm", width: int | None = None, height: int | None = None) -> GrayImage:
    """Load an image; ``fmt`` is 'pgm' (8/16-bit binary) or 'raw16' (needs dims)."""
    if fmt == "pgm":
        return load_pgm(path)
    if fmt == "raw16":
        if width is None or height is None:
            raise ValueError("raw16 requires explicit width and height")
        return load_raw16(path, width, height)
    raise ValueError(f"unsupported format {fmt!r}")
