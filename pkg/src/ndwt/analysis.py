"""Wavelet spectra, Hurst exponents and compressibility measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DataError
from .transforms import CoefficientGrid2D, CoefficientStack1D


@dataclass
class Spectrum:
    """Levels ``j`` (finer scale = larger ``j``) with ``S_j`` = log2 of the
    mean squared detail coefficient, and the least-squares fit over
    ``fit_range`` (inclusive)."""

    levels: np.ndarray
    S: np.ndarray
    fit_range: tuple
    slope: float
    intercept: float
    hurst: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def points(self) -> list:
        return list(zip(self.levels.tolist(), self.S.tolist()))

    def to_dict(self) -> dict:
        return {
            "levels": self.levels.tolist(),
            "S": self.S.tolist(),
            "fit_range": list(self.fit_range),
            "slope": self.slope,
            "intercept": self.intercept,
            "hurst": self.hurst,
            "log_base": 2,
            **self.meta,
        }


def top_level(m: int) -> int:
    """``J`` with ``J - 1 < log2 m <= J``; depth ``k`` maps to level ``J - k``."""
    return max(int(math.ceil(math.log2(m))), 1)


def wavelet_spectra_2d(grid: CoefficientGrid2D) -> list:
    """``(j, S_j)`` from the diagonal ``d`` blocks with matched depths."""
    if grid.p1 != grid.p2:
        raise DataError(
            f"diagonal spectra need equal depths on both axes, got p1={grid.p1}, p2={grid.p2}"
        )
    J = top_level(min(grid.m, grid.n))
    pts = []
    for depth in range(grid.p1, 0, -1):
        blk = grid.block("d", depth, depth)
        pts.append((J - depth, math.log2(np.mean(blk * blk))))
    return pts


def wavelet_spectra_1d(stack: CoefficientStack1D) -> list:
    J = top_level(stack.m)
    return [(J - k, math.log2(np.mean(stack.detail(k) ** 2))) for k in range(stack.p, 0, -1)]


def default_fit_range(levels) -> tuple:
    """Drop the two finest levels (sampling bias on discrete data), or just
    the finest one, as long as at least 2 levels remain."""
    levels = sorted(levels)
    for drop in (2, 1):
        if len(levels) - drop >= 2:
            return levels[0], levels[-1 - drop]
    return levels[0], levels[-1]


def hurst_from_slope(slope: float) -> float:
    return -(slope + 2.0) / 2.0


def estimate_hurst(points, fit_range=None) -> tuple:
    """OLS slope of ``S_j`` on ``j`` within ``fit_range``; returns
    ``(slope, intercept, hurst)`` with ``hurst = -(slope + 2) / 2``."""
    pts = sorted(points)
    if fit_range is None:
        fit_range = default_fit_range([j for j, _ in pts])
    lo, hi = fit_range
    sel = [(j, s) for j, s in pts if lo <= j <= hi]
    if len(sel) < 2:
        raise DataError(f"fit range {fit_range} covers {len(sel)} level(s); need at least 2")
    x = np.array([j for j, _ in sel], dtype=float)
    y = np.array([s for _, s in sel], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept), hurst_from_slope(float(slope))


def spectrum_2d(grid: CoefficientGrid2D, fit_range=None) -> Spectrum:
    pts = wavelet_spectra_2d(grid)
    levels = [j for j, _ in pts]
    if fit_range is None:
        fit_range = default_fit_range(levels)
    slope, intercept, hurst = estimate_hurst(pts, fit_range)
    return Spectrum(
        np.array(levels), np.array([s for _, s in pts]), tuple(fit_range), slope, intercept, hurst,
        {"filter_rows": grid.filter_rows, "filter_cols": grid.filter_cols, "depth": grid.p1},
    )


def spectrum_1d(stack: CoefficientStack1D, fit_range=None) -> Spectrum:
    # no Hurst conversion for 1-D spectra; only the slope is reported
    pts = wavelet_spectra_1d(stack)
    levels = [j for j, _ in pts]
    if fit_range is None:
        fit_range = default_fit_range(levels)
    slope, intercept, _ = estimate_hurst(pts, fit_range)
    return Spectrum(np.array(levels), np.array([s for _, s in pts]), tuple(fit_range),
                    slope, intercept, None, {"filter": stack.filter, "depth": stack.p})


def _energy_fractions(coefficients) -> np.ndarray:
    x = np.asarray(coefficients, dtype=float).ravel()
    e = x * x
    total = e.sum()
    if x.size == 0 or total == 0.0:
        raise DataError("energy normalisation undefined: all coefficients are zero")
    return e / total


def lorenz_curve(coefficients) -> tuple:
    """Return ``(fraction, cumulative)``: sorted normalised energies
    ``p_k = d_k**2 / sum(d**2)`` accumulated in increasing order against
    ``k / n``."""
    p = np.sort(_energy_fractions(coefficients))
    cum = np.cumsum(p)
    cum[-1] = 1.0
    frac = np.arange(1, p.size + 1) / p.size
    return frac, cum


def normalized_entropy(coefficients) -> float:
    """``-sum(p log p) / log n`` over normalised squared coefficients."""
    p = _energy_fractions(coefficients)
    if p.size < 2:
        raise DataError("normalised entropy needs at least 2 coefficients")
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum() / np.log(p.size))


def d_type_proportion(p: int, mode: str = "scale-mixing") -> Fraction:
    """Share of ``d``-type coefficients in a depth-``p`` 2-D NDWT."""
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    if mode == "scale-mixing":
        return Fraction(p * p, (p + 1) ** 2)
    if mode == "standard":
        return Fraction(p, 3 * p + 1)
    raise ValueError(f"mode must be 'scale-mixing' or 'standard', got {mode!r}")


@dataclass
class CompressReport:
    lorenz: tuple
    entropy: float
    d_proportion: Fraction

    def to_dict(self, samples: int = 101) -> dict:
        frac, cum = self.lorenz
        idx = np.unique(np.linspace(0, frac.size - 1, min(samples, frac.size)).round().astype(int))
        return {
            "entropy": self.entropy,
            "d_proportion": str(self.d_proportion),
            "lorenz": [[float(frac[i]), float(cum[i])] for i in idx],
        }


def compress_report(coefficients, p: int, mode: str) -> CompressReport:
    return CompressReport(lorenz_curve(coefficients), normalized_entropy(coefficients),
                          d_type_proportion(p, mode))
