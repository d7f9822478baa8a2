"""Hard-threshold denoising in the NDWT domain."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .matrix import build_weight_matrix, cached_ndwt_matrix
from .transforms import CoefficientGrid2D, CoefficientStack1D, forward_1d, forward_2d, inverse_1d, inverse_2d

VARIANTS = ("text", "demo")


@dataclass(frozen=True)
class DenoiseConfig:
    """``variant="text"`` thresholds at ``sqrt(2 ln m) sigma``; ``"demo"`` at
    ``sqrt(2 ln(p m)) sigma``.  ``depth=None`` means ``floor(log2 m) - 1``."""

    filter: str = "haar"
    depth: int | None = None
    shift: int = 0
    variant: str = "text"
    sigma: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    def depth_for(self, m: int) -> int:
        return self.depth if self.depth is not None else max(int(math.floor(math.log2(m))) - 1, 1)


@dataclass
class DenoiseResult:
    signal: np.ndarray
    sigma: float
    threshold: float
    retained: float  # fraction of detail coefficients surviving the threshold
    depth: int

    def report(self) -> dict:
        return {"sigma_hat": self.sigma, "threshold": self.threshold,
                "retained_fraction": self.retained, "depth": self.depth}


def estimate_sigma(finest) -> float:
    """Noise level from the finest details: root of the mean of the sample
    variances (ddof=1) at even and at odd positions."""
    x = np.asarray(finest, dtype=float).ravel()
    if x.size < 4:
        raise DataError(f"need at least 4 coefficients to estimate sigma, got {x.size}")
    var = (np.var(x[0::2], ddof=1) + np.var(x[1::2], ddof=1)) / 2.0
    return float(math.sqrt(var))


def universal_threshold(m: int, sigma: float, variant: str = "text", p: int | None = None) -> float:
    if m < 2:
        raise ValueError(f"signal length must be >= 2, got {m}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if variant == "text":
        n = m
    elif variant == "demo":
        if p is None or p < 1:
            raise ValueError("the demo threshold needs the depth p >= 1")
        n = p * m
    else:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return math.sqrt(2.0 * math.log(n)) * sigma


def _keep(x: np.ndarray, lam: float) -> np.ndarray:
    return np.where(np.abs(x) > lam, x, 0.0)


def hard_threshold(stack: CoefficientStack1D, lam: float) -> CoefficientStack1D:
    """Zero every detail coefficient with ``|x| <= lam``; coarse untouched."""
    if lam < 0:
        raise ValueError(f"threshold must be non-negative, got {lam}")
    data = stack.data.copy()
    data[stack.m:] = _keep(data[stack.m:], lam)
    return stack.copy(data)


def hard_threshold_2d(grid: CoefficientGrid2D, lam: float) -> CoefficientGrid2D:
    """Threshold every block except the ``c`` block."""
    if lam < 0:
        raise ValueError(f"threshold must be non-negative, got {lam}")
    out = grid.B.copy()
    for b in grid.blocks():
        if b.tag != "c":
            out[b.rows, b.cols] = _keep(out[b.rows, b.cols], lam)
    return grid.copy(out)


def denoise_1d(signal, config: DenoiseConfig | None = None, max_elements=None) -> DenoiseResult:
    """Forward NDWT, sigma from the finest details, hard threshold, inverse."""
    config = config or DenoiseConfig()
    y = np.asarray(signal, dtype=float)
    if y.ndim != 1 or y.size < 4:
        raise DataError(f"need a 1-D signal of length >= 4, got shape {y.shape}")
    m = y.size
    p = config.depth_for(m)
    W = cached_ndwt_matrix(config.filter, m, p, config.shift, max_elements)
    T = build_weight_matrix(m, p)
    stack = forward_1d(W, y)
    sigma = config.sigma if config.sigma is not None else estimate_sigma(stack.finest)
    lam = universal_threshold(m, sigma, config.variant, p)
    kept = hard_threshold(stack, lam)
    details = kept.data[m:]
    retained = float(np.count_nonzero(details)) / details.size
    return DenoiseResult(inverse_1d(W, T, kept), sigma, lam, retained, p)


def denoise_2d(image, config: DenoiseConfig | None = None, max_elements=None) -> DenoiseResult:
    """Same pipeline on the scale-mixing grid; sigma from the finest diagonal block."""
    config = config or DenoiseConfig()
    A = np.asarray(image, dtype=float)
    if A.ndim != 2 or min(A.shape) < 2:
        raise DataError(f"need a 2-D image with sides >= 2, got shape {A.shape}")
    m, n = A.shape
    p = config.depth_for(min(m, n))
    W1 = cached_ndwt_matrix(config.filter, m, p, config.shift, max_elements)
    W2 = cached_ndwt_matrix(config.filter, n, p, config.shift, max_elements)
    grid = forward_2d(W1, W2, A)
    sigma = config.sigma if config.sigma is not None else estimate_sigma(grid.block("d", 1, 1))
    lam = universal_threshold(m * n, sigma, config.variant, p)
    kept = hard_threshold_2d(grid, lam)
    mask = np.ones_like(kept.B, dtype=bool)
    mask[:m, :n] = False
    retained = float(np.count_nonzero(kept.B[mask])) / mask.sum()
    out = inverse_2d(W1, build_weight_matrix(m, p), kept, build_weight_matrix(n, p), W2)
    return DenoiseResult(out, sigma, lam, retained, p)
