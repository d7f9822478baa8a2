"""Non-decimated wavelet transforms as explicit matrices."""
from .errors import DataError, ResourceGuardError
from .filters import WaveletFilter, check_filter, derive_qmf, dilate_filter, filter_names, get_filter
from .matrix import (
    NDWTMatrix,
    WeightMatrix,
    build_level_matrices,
    build_ndwt_matrix,
    build_orthonormal_matrix,
    build_weight_matrix,
    cached_ndwt_matrix,
)
from .transforms import (
    CoefficientGrid2D,
    CoefficientStack1D,
    StandardGrid2D,
    atrous_forward_1d,
    atrous_forward_2d,
    forward_1d,
    forward_2d,
    inverse_1d,
    inverse_2d,
    standard_ndwt_2d,
)
from .analysis import estimate_hurst, lorenz_curve, normalized_entropy, spectrum_1d, spectrum_2d
from .denoise import DenoiseConfig, denoise_1d, denoise_2d, estimate_sigma, hard_threshold, universal_threshold

__version__ = "0.1.0"
