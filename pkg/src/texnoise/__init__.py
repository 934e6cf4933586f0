"""texnoise: measure how susceptible texture feature families are to image noise."""

__version__ = "0.1.0"

from .image import (  # noqa: F401
    GrayImage,
    Histogram,
    RoiSpec,
    extract_roi,
    histogram,
    load_image,
    load_pgm,
    quantize,
    save_pgm,
)
from .noise import (  # noqa: F401
    NoiseKind,
    NoiseModel,
    classify_noise,
    fit_from_moments,
    matusita_distance,
    pdf_histogram,
    sample_field,
)
from .filtering import FilterParams, adaptive_filter, distort, residual_noise  # noqa: F401
from .ct import ScanGeometry, Sinogram, acquire, forward_project, reconstruct_fbp  # noqa: F401
from .texture import (  # noqa: F401
    FeatureVector,
    TextureMethod,
    acf_features,
    extract_all,
    fd_features,
    glcm_features,
    gmrf_features,
    rlm_features,
)
from .separability import (  # noqa: F401
    FeatureClass,
    SeparabilityReport,
    bhattacharyya_bound,
    build_report,
    class_stats,
    fisher_criterion,
    normalize,
)
from .estimators import (  # noqa: F401
    AdaptiveNoiseFilter,
    CTScannerSimulator,
    NoiseKindClassifier,
    TextureFeatureExtractor,
)
