"""Batch orchestration: per-case noise analysis, filtering, distortion,
optional scanner pass, feature extraction, and report emission."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import numpy as np

from . import __version__
from .ct import ScanGeometry, acquire
from .filtering import FilterParams, adaptive_filter, distort, residual_noise, to_gray_image
from .image import GrayImage, Histogram, RoiSpec, extract_roi, histogram, load_pgm, save_pgm
from .noise import KIND_ORDER, NoiseKind, classify_noise, fit_from_moments, pdf_histogram
from .separability import FeatureClass, SeparabilityReport, build_report, normalize
from .texture import FEATURE_COUNTS, TextureMethod, extract_all

METHOD_ORDER = (TextureMethod.ACF, TextureMethod.FD, TextureMethod.RLM,
                TextureMethod.GMRF, TextureMethod.GLCM)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class CaseConfig:
    label: str
    image_path: Path
    tumor_roi: RoiSpec
    uniform_roi: RoiSpec

    def __post_init__(self):
        if self.tumor_roi.overlaps(self.uniform_roi):
            raise ConfigError(f"{self.label}: tumor and uniform ROIs overlap")


@dataclass(frozen=True)
class RunConfig:
    cases: tuple
    output_dir: Path
    seed: int = 0
    skip_recon: bool = False
    quantization: int = 32
    window_side: int = 5
    ratio_clamp: bool = True
    geometry: ScanGeometry = ScanGeometry()
    recon_filter: str = "hann"

    def __post_init__(self):
        if len(self.cases) < 2:
            raise ConfigError("a run needs at least 2 cases")
        labels = [c.label for c in self.cases]
        if len(set(labels)) != len(labels):
            raise ConfigError("case labels must be unique")


def _roi_from_list(raw, what: str) -> RoiSpec:
    if not (isinstance(raw, list) and len(raw) == 3):
        raise ConfigError(f"{what} must be [x0, y0, side]")
    try:
        return RoiSpec(*(int(v) for v in raw))
    except ValueError as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def load_run_config(path) -> RunConfig:
    """Parse a TOML run config; relative paths resolve against the config file."""
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    base = path.parent
    try:
        cases = []
        for raw in doc.get("cases", []):
            cases.append(CaseConfig(
                label=str(raw["label"]),
                image_path=base / raw["image"],
                tumor_roi=_roi_from_list(raw["tumor_roi"], "tumor_roi"),
                uniform_roi=_roi_from_list(raw["uniform_roi"], "uniform_roi"),
            ))
        filt = doc.get("filter", {})
        geom = doc.get("geometry", {})
        return RunConfig(
            cases=tuple(cases),
            output_dir=base / doc.get("output_dir", "reports"),
            seed=int(doc.get("seed", 0)),
            skip_recon=bool(doc.get("skip_recon", False)),
            quantization=int(doc.get("quantization", 32)),
            window_side=int(filt.get("window_side", 5)),
            ratio_clamp=bool(filt.get("ratio_clamp", True)),
            geometry=ScanGeometry(
                n_angles=int(geom.get("n_angles", 360)),
                n_detectors=geom.get("n_detectors"),
                detector_spacing=float(geom.get("detector_spacing", 1.0)),
            ),
            recon_filter=str(geom.get("filter", "hann")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config: {exc}") from exc


@dataclass
class CaseResult:
    label: str
    mean: float
    variance: float
    kind: NoiseKind | None
    distances: dict
    measured: Histogram
    features: dict  # method -> {"original"|"clean"|"noisy": FeatureVector}


def run_case(cfg: CaseConfig, run: RunConfig, persist: bool = True) -> CaseResult:
    """The per-case path: estimate noise in the uniform region, filter, double
    the residual noise, optionally pass both versions through the scanner,
    and extract every feature family from the tumor ROI of all three images."""
    img = load_pgm(cfg.image_path)
    cfg.tumor_roi.check_inside(img)
    cfg.uniform_roi.check_inside(img)

    measured = histogram(img, cfg.uniform_roi)
    mean, variance = measured.moments()
    if variance > 0:
        kind, _model, distances = classify_noise(measured)
    else:
        kind, distances = None, {}

    params = FilterParams(noise_variance=variance, window_side=run.window_side,
                          ratio_clamp=run.ratio_clamp)
    filtered = adaptive_filter(img, params)
    eta = residual_noise(img, filtered)
    clean = to_gray_image(filtered, img.bit_depth)
    noisy = distort(img, eta)
    if not run.skip_recon:
        clean = acquire(clean, run.geometry, run.recon_filter)
        noisy = acquire(noisy, run.geometry, run.recon_filter)

    by_role = {
        role: extract_all(extract_roi(version, cfg.tumor_roi), run.quantization)
        for role, version in (("original", img), ("clean", clean), ("noisy", noisy))
    }
    features = {
        method: {role: by_role[role][method] for role in by_role}
        for method in METHOD_ORDER
    }
    result = CaseResult(cfg.label, mean, variance, kind, distances, measured, features)
    if persist:
        _persist_case(result, clean, noisy, run)
    return result


def _persist_case(result: CaseResult, clean: GrayImage, noisy: GrayImage, run: RunConfig):
    case_dir = Path(run.output_dir) / "cases" / result.label
    case_dir.mkdir(parents=True, exist_ok=True)
    save_pgm(clean, case_dir / "clean.pgm")
    save_pgm(noisy, case_dir / "noisy.pgm")
    doc = {
        "label": result.label,
        "mean": result.mean,
        "variance": result.variance,
        "kind": result.kind.value if result.kind else None,
        "distances": {k.value: _json_number(v) for k, v in result.distances.items()},
        "features": {
            method.value: {
                role: dict(zip(fv.names, fv.values.tolist()))
                for role, fv in roles.items()
            }
            for method, roles in result.features.items()
        },
    }
    (case_dir / "case.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _json_number(v: float):
    if math.isinf(v):
        return None
    return v


@dataclass
class CorpusResult:
    results: list  # successful CaseResult, in config order
    failures: dict  # label -> error message
    reports: list  # SeparabilityReport per method, METHOD_ORDER
    run: RunConfig


def run_corpus(run: RunConfig, persist: bool = True) -> CorpusResult:
    """Run every case, pool per-method feature classes and compute the
    separability table; a failing case is excluded but does not stop the run."""
    results, failures = [], {}
    for cfg in run.cases:
        try:
            results.append(run_case(cfg, run, persist=persist))
        except Exception as exc:  # noqa: BLE001 - case isolation is the contract
            failures[cfg.label] = f"{type(exc).__name__}: {exc}"
    if len(results) < 2:
        raise RuntimeError(
            f"fewer than 2 cases succeeded ({len(failures)} failures): {failures}"
        )
    reports = []
    for method in METHOD_ORDER:
        classes = normalize([
            FeatureClass("original", np.vstack([r.features[method]["original"].values for r in results])),
            FeatureClass("clean", np.vstack([r.features[method]["clean"].values for r in results])),
            FeatureClass("noisy", np.vstack([r.features[method]["noisy"].values for r in results])),
        ])
        reports.append(build_report(method, *classes))
    corpus = CorpusResult(results, failures, reports, run)
    if persist:
        emit_reports(corpus, run.output_dir)
    return corpus


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "-Inf" if v < 0 else "Inf"
    return format(v, ".10g")


def noise_table_rows(corpus: CorpusResult) -> list:
    rows = []
    for r in corpus.results:
        rows.append({
            "case": r.label,
            "gaussian": r.distances.get(NoiseKind.GAUSSIAN, math.inf),
            "rayleigh": r.distances.get(NoiseKind.RAYLEIGH, math.inf),
            "erlang": r.distances.get(NoiseKind.ERLANG, math.inf),
            "classified": r.kind.value if r.kind else "none",
        })
    return rows


def _plot_series(result: CaseResult):
    """Measured probabilities next to the three fitted PDFs on a shared support."""
    measured = result.measured.normalized()
    if result.variance <= 0:
        return measured.values, {"measured": measured.counts}
    columns = {}
    lo, hi = int(measured.values[0]), int(measured.values[-1])
    for kind in KIND_ORDER:
        try:
            model = fit_from_moments(kind, result.mean, result.variance)
            b_lo, b_hi = model.bulk_support()
            lo, hi = min(lo, b_lo), max(hi, b_hi)
        except ValueError:
            pass
    support = np.arange(lo, hi + 1)
    measured_full = np.zeros(support.size)
    measured_full[np.searchsorted(support, measured.values)] = measured.counts
    columns["measured"] = measured_full
    for kind in KIND_ORDER:
        try:
            model = fit_from_moments(kind, result.mean, result.variance)
            columns[kind.value] = pdf_histogram(model, (lo, hi)).counts
        except ValueError:
            columns[kind.value] = np.zeros(support.size)
    return support, columns


def emit_reports(corpus: CorpusResult, out_dir):
    """noise_distances.csv, separability.csv/.json, plots/*.csv and manifest.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = ["case,gaussian,rayleigh,erlang,classified"]
    for row in noise_table_rows(corpus):
        lines.append(",".join([row["case"], _fmt(row["gaussian"]), _fmt(row["rayleigh"]),
                               _fmt(row["erlang"]), row["classified"]]))
    (out_dir / "noise_distances.csv").write_text("\n".join(lines) + "\n", encoding="ascii")

    lines = ["method,features,F_oc,F_on,B_oc,B_on"]
    json_rows = []
    for rep in corpus.reports:
        lines.append(",".join([
            rep.method.value.upper(), str(rep.n_features),
            _fmt(rep.fisher_oc), _fmt(rep.fisher_on),
            _fmt(rep.bhatt_oc), _fmt(rep.bhatt_on),
        ]))
        json_rows.append({
            "method": rep.method.value.upper(),
            "features": rep.n_features,
            "F_oc": rep.fisher_oc,
            "F_on": rep.fisher_on,
            "B_oc": _json_number(rep.bhatt_oc),
            "B_oc_is_neg_inf": math.isinf(rep.bhatt_oc),
            "B_on": _json_number(rep.bhatt_on),
            "B_on_is_neg_inf": math.isinf(rep.bhatt_on),
        })
    (out_dir / "separability.csv").write_text("\n".join(lines) + "\n", encoding="ascii")
    (out_dir / "separability.json").write_text(
        json.dumps(json_rows, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    plots_dir = out_dir / "plots"
    plots_dir.mkdir(exist_ok=True)
    for result in corpus.results:
        support, columns = _plot_series(result)
        header = "z," + ",".join(columns)
        rows = [header]
        for i, z in enumerate(support):
            rows.append(",".join([str(int(z))] + [_fmt(col[i]) for col in columns.values()]))
        (plots_dir / f"{result.label}.csv").write_text("\n".join(rows) + "\n", encoding="ascii")

    import numpy, scipy  # versions recorded for reproducibility

    run = corpus.run
    manifest = {
        "texnoise_version": __version__,
        "numpy_version": numpy.__version__,
        "scipy_version": scipy.__version__,
        "seed": run.seed,
        "skip_recon": run.skip_recon,
        "quantization": run.quantization,
        "window_side": run.window_side,
        "ratio_clamp": run.ratio_clamp,
        "geometry": {
            "n_angles": run.geometry.n_angles,
            "n_detectors": run.geometry.n_detectors,
            "detector_spacing": run.geometry.detector_spacing,
        },
        "recon_filter": run.recon_filter,
        "cases": [
            {
                "label": c.label,
                "image": str(c.image_path),
                "tumor_roi": [c.tumor_roi.x0, c.tumor_roi.y0, c.tumor_roi.side],
                "uniform_roi": [c.uniform_roi.x0, c.uniform_roi.y0, c.uniform_roi.side],
            }
            for c in run.cases
        ],
        "failures": corpus.failures,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
