"""Command line interface: batch runs, one-off noise classification, feature
extraction and synthetic corpus generation."""

from __future__ import annotations

import sys

import click

from . import __version__
from .image import RoiSpec, extract_roi, histogram, load_image
from .noise import classify_noise
from .pipeline import ConfigError, load_run_config, run_corpus
from .synth import write_corpus
from .texture import TextureMethod, extract_all, extract_features


def _parse_roi(text: str) -> RoiSpec:
    try:
        x, y, side = (int(v) for v in text.split(","))
        return RoiSpec(x, y, side)
    except ValueError as exc:
        raise click.UsageError(f"bad ROI '{text}', expected x,y,side: {exc}") from exc


def _load(image, fmt, width, height):
    try:
        return load_image(image, fmt=fmt, width=width, height=height)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


@click.group()
@click.version_option(__version__)
def main():
    """Measure how susceptible texture features are to image noise."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def run(config_path):
    """Run the full corpus described by a TOML config file."""
    try:
        cfg = load_run_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    try:
        corpus = run_corpus(cfg)
    except RuntimeError as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(1)
    for label, message in sorted(corpus.failures.items()):
        click.echo(f"case {label} failed: {message}", err=True)
    click.echo(f"{len(corpus.results)} cases ok, reports in {cfg.output_dir}")
    sys.exit(1 if corpus.failures else 0)


_IMAGE_OPTIONS = [
    click.option("--image", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--roi", required=True, help="x,y,side"),
    click.option("--format", "fmt", default="pgm", type=click.Choice(["pgm", "raw16"])),
    click.option("--width", type=int, default=None, help="raw16 width"),
    click.option("--height", type=int, default=None, help="raw16 height"),
]


def _image_options(fn):
    for opt in reversed(_IMAGE_OPTIONS):
        fn = opt(fn)
    return fn


@main.command("classify-noise")
@_image_options
def classify_noise_cmd(image, roi, fmt, width, height):
    """Estimate noise moments in a uniform region and classify the PDF."""
    img = _load(image, fmt, width, height)
    spec = _parse_roi(roi)
    try:
        measured = histogram(img, spec)
        mean, variance = measured.moments()
        kind, model, distances = classify_noise(measured)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"mean={mean:.4f} variance={variance:.4f}")
    for k, d in distances.items():
        click.echo(f"distance_{k.value}={d:.4f}")
    click.echo(f"classified={kind.value} a={model.a:.4f} b={model.b:.4f}")


@main.command()
@_image_options
@click.option("--method", default="all",
              type=click.Choice([m.value for m in TextureMethod] + ["all"]))
@click.option("--levels", default=32, type=int)
def features(image, roi, fmt, width, height, method, levels):
    """Extract texture features from an ROI, one name=value line per feature."""
    img = _load(image, fmt, width, height)
    block = extract_roi(img, _parse_roi(roi))
    try:
        if method == "all":
            vectors = extract_all(block, levels=levels).values()
        else:
            vectors = [extract_features(block, TextureMethod(method), levels=levels)]
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for vec in vectors:
        for name, value in zip(vec.names, vec.values):
            click.echo(f"{name}={value:.10g}")


@main.command()
@click.option("--preset", default="gratings11",
              type=click.Choice(["gratings11", "mixed11"]))
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", default="corpus", type=click.Path(file_okay=False))
@click.option("--noise-scale", default=1.0, type=float)
@click.option("--cases", "n_cases", default=11, type=int)
@click.option("--with-recon", is_flag=True, help="enable the CT stage in the config")
def synth(preset, seed, out_dir, noise_scale, n_cases, with_recon):
    """Generate a synthetic corpus plus a ready-to-run config file."""
    config_path = write_corpus(out_dir, n_cases=n_cases, seed=seed,
                               noise_scale=noise_scale, skip_recon=not with_recon,
                               preset=preset)
    click.echo(f"wrote {n_cases} cases, config at {config_path}")


if __name__ == "__main__":
    main()
