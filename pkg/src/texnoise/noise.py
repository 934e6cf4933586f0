"""Noise PDF models (Gaussian, Rayleigh, Erlang): moment fitting, discrete
histograms, Matusita-distance classification and seeded field sampling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .image import Histogram


class NoiseFitError(ValueError):
    """Moments incompatible with the requested noise family."""


class NoiseKind(enum.Enum):
    GAUSSIAN = "gaussian"
    RAYLEIGH = "rayleigh"
    ERLANG = "erlang"


# fixed tie-break order for classification
KIND_ORDER = (NoiseKind.GAUSSIAN, NoiseKind.RAYLEIGH, NoiseKind.ERLANG)


@dataclass(frozen=True)
class NoiseModel:
    """A noise family plus its two parameters and the implied moments.

    Gaussian: density exp(-(z-a)^2 / 2b^2) / (sqrt(2 pi) b), mean a, variance b^2.
    Rayleigh: density (2/b)(z-a) exp(-(z-a)^2 / b) for z >= a,
              mean a + sqrt(pi b / 4), variance b (4 - pi) / 4.
    Erlang:   density a^b z^(b-1) exp(-a z) / (b-1)! for z >= 0 with integer b,
              mean b/a, variance b/a^2.
    """

    kind: NoiseKind
    a: float
    b: float

    def __post_init__(self):
        if self.kind is NoiseKind.ERLANG:
            if self.a <= 0:
                raise NoiseFitError("Erlang rate a must be positive")
            if self.b < 1 or self.b != round(self.b):
                raise NoiseFitError("Erlang shape b must be a positive integer")
        elif self.b <= 0:
            raise NoiseFitError("scale parameter b must be positive")

    @property
    def mean(self) -> float:
        if self.kind is NoiseKind.GAUSSIAN:
            return self.a
        if self.kind is NoiseKind.RAYLEIGH:
            return self.a + math.sqrt(math.pi * self.b / 4.0)
        return self.b / self.a

    @property
    def variance(self) -> float:
        if self.kind is NoiseKind.GAUSSIAN:
            return self.b**2
        if self.kind is NoiseKind.RAYLEIGH:
            return self.b * (4.0 - math.pi) / 4.0
        return self.b / self.a**2

    def pdf(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if self.kind is NoiseKind.GAUSSIAN:
            return np.exp(-((z - self.a) ** 2) / (2.0 * self.b**2)) / (
                math.sqrt(2.0 * math.pi) * self.b
            )
        if self.kind is NoiseKind.RAYLEIGH:
            shifted = z - self.a
            out = np.where(shifted >= 0,
                           (2.0 / self.b) * shifted * np.exp(-(shifted**2) / self.b),
                           0.0)
            return out
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = (self.b * math.log(self.a) + (self.b - 1.0) * np.log(np.maximum(z, 1e-300))
                      - self.a * z - math.lgamma(self.b))
        out = np.where(z > 0, np.exp(logpdf), 0.0)
        if self.b == 1:
            out = np.where(z == 0, self.a, out)
        return out

    def cdf(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if self.kind is NoiseKind.GAUSSIAN:
            return special.ndtr((z - self.a) / self.b)
        if self.kind is NoiseKind.RAYLEIGH:
            shifted = np.maximum(z - self.a, 0.0)
            return 1.0 - np.exp(-(shifted**2) / self.b)
        return special.gammainc(self.b, self.a * np.maximum(z, 0.0))

    def ppf(self, q: float) -> float:
        if self.kind is NoiseKind.GAUSSIAN:
            return self.a + self.b * float(special.ndtri(q))
        if self.kind is NoiseKind.RAYLEIGH:
            return self.a + math.sqrt(-self.b * math.log1p(-q))
        return float(special.gammaincinv(self.b, q)) / self.a

    def bulk_support(self, coverage: float = 0.9995) -> tuple[int, int]:
        """Integer range containing at least the requested central mass."""
        return math.floor(self.ppf(1.0 - coverage)), math.ceil(self.ppf(coverage))


def fit_from_moments(kind: NoiseKind, mean: float, variance: float) -> NoiseModel:
    """Invert the moment relations of a noise family."""
    if variance <= 0:
        raise NoiseFitError("variance must be positive")
    if kind is NoiseKind.GAUSSIAN:
        return NoiseModel(kind, mean, math.sqrt(variance))
    if kind is NoiseKind.RAYLEIGH:
        b = 4.0 * variance / (4.0 - math.pi)
        a = mean - math.sqrt(math.pi * b / 4.0)
        return NoiseModel(kind, a, b)
    if mean <= 0:
        raise NoiseFitError("Erlang requires positive mean")
    a = mean / variance
    b = max(1, round(mean**2 / variance))
    return NoiseModel(kind, a, float(b))


def pdf_histogram(model: NoiseModel, support: tuple[int, int]) -> Histogram:
    """Model probability mass per integer bin z (the density integrated over
    [z-1/2, z+1/2]) over [lo, hi], renormalized to sum 1; this is what a
    histogram of rounded draws converges to."""
    lo, hi = int(support[0]), int(support[1])
    if hi < lo:
        raise ValueError("empty support")
    edges = np.arange(lo, hi + 2) - 0.5
    cdf = model.cdf(edges)
    mass = float(cdf[-1] - cdf[0])
    if mass < 0.999:
        raise ValueError(f"support covers only {mass:.4f} of the model mass")
    p = np.diff(cdf)
    total = p.sum()
    if total <= 0:
        raise ValueError("support excludes the model's mode entirely")
    return Histogram(np.arange(lo, hi + 1), p / total)


def _aligned_probs(p: Histogram, q: Histogram):
    """Union-of-supports alignment with zero fill; both inputs must be normalized."""
    for h in (p, q):
        if abs(h.counts.sum() - 1.0) > 1e-9:
            raise ValueError("matusita_distance requires normalized histograms")
    values = np.union1d(p.values, q.values)
    pa = np.zeros(values.size)
    qa = np.zeros(values.size)
    pa[np.searchsorted(values, p.values)] = p.counts
    qa[np.searchsorted(values, q.values)] = q.counts
    return pa, qa


def matusita_distance(p: Histogram, q: Histogram) -> float:
    """sqrt(sum_i (sqrt(p_i) - sqrt(q_i))^2); 0 for identical, sqrt(2) for disjoint."""
    pa, qa = _aligned_probs(p, q)
    return float(np.sqrt(np.sum((np.sqrt(pa) - np.sqrt(qa)) ** 2)))


def _fit_binned(kind: NoiseKind, mean: float, variance: float,
                measured_support: tuple[int, int], n_iter: int = 3):
    """Fit a model whose *binned* histogram reproduces the measured moments.

    Integer binning perturbs moments (Sheppard's 1/12 variance inflation plus
    rounding bias of the mean), so a plain moment inversion does not round-trip
    a model through its own histogram. A few fixed-point corrections on the
    continuous-moment targets remove the discretization bias.
    """
    target_mean, target_var = mean, variance
    # Sheppard's correction as the initial guess for the continuous variance
    var_adj = variance - 1.0 / 12.0 if variance > 1.0 / 6.0 else variance
    mean_adj = mean
    model = fit_from_moments(kind, mean_adj, var_adj)
    lo_b, hi_b = model.bulk_support()
    support = (min(measured_support[0], lo_b), max(measured_support[1], hi_b))
    generated = pdf_histogram(model, support)
    for _ in range(n_iter):
        binned_mean, binned_var = generated.moments()
        mean_adj += target_mean - binned_mean
        var_adj += target_var - binned_var
        if var_adj <= 0:
            break
        model = fit_from_moments(kind, mean_adj, var_adj)
        generated = pdf_histogram(model, support)
    return model, generated


def classify_noise(measured: Histogram):
    """Fit all three families from the measured moments and pick the nearest by
    Matusita distance.

    Returns (kind, model, distances) where distances maps every NoiseKind to its
    score; an unfittable family scores +inf. Ties break in the fixed order
    Gaussian < Rayleigh < Erlang.
    """
    mean, variance = measured.moments()
    if variance <= 0:
        raise NoiseFitError("measured histogram must have positive variance")
    measured_p = measured.normalized()
    lo_m, hi_m = int(measured.values[0]), int(measured.values[-1])

    distances: dict[NoiseKind, float] = {}
    models: dict[NoiseKind, NoiseModel] = {}
    for kind in KIND_ORDER:
        try:
            model, generated = _fit_binned(kind, mean, variance, (lo_m, hi_m))
            distances[kind] = matusita_distance(measured_p, generated)
            models[kind] = model
        except (NoiseFitError, ValueError):
            distances[kind] = math.inf
    best = min(KIND_ORDER, key=lambda k: distances[k])
    if best not in models:
        raise NoiseFitError("no noise family could be fitted to the histogram")
    return best, models[best], distances


def sample_field(model: NoiseModel, width: int, height: int, seed: int) -> np.ndarray:
    """Seeded (height, width) field of real-valued draws from the model."""
    rng = np.random.default_rng(seed)
    shape = (height, width)
    if model.kind is NoiseKind.GAUSSIAN:
        return rng.normal(model.a, model.b, shape)
    if model.kind is NoiseKind.RAYLEIGH:
        return model.a + rng.rayleigh(math.sqrt(model.b / 2.0), shape)
    return rng.gamma(model.b, 1.0 / model.a, shape)
