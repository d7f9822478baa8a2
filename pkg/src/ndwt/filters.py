"""Orthonormal wavelet filters, quadrature mirror high-pass filters and
a trous dilation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._taps import LOWPASS

TOL = 1e-12


@dataclass(frozen=True)
class WaveletFilter:
    name: str
    h: tuple
    g: tuple

    @property
    def length(self) -> int:
        return len(self.h)

    @property
    def vanishing_moments(self) -> int:
        if self.name == "haar":
            return 1
        if self.name.startswith("coif"):
            return self.length // 3
        return self.length // 2

    @property
    def lowpass(self) -> np.ndarray:
        return np.asarray(self.h, dtype=float)

    @property
    def highpass(self) -> np.ndarray:
        return np.asarray(self.g, dtype=float)


@dataclass(frozen=True)
class DilatedFilter:
    base: tuple
    r: int
    taps: tuple

    def __len__(self):
        return len(self.taps)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.taps, dtype=dtype or float)


def derive_qmf(h) -> np.ndarray:
    """High-pass mirror of ``h``: ``g[k] = (-1)**k * h[L-1-k]``."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("low-pass filter must be a non-empty 1-D sequence")
    signs = np.where(np.arange(h.size) % 2 == 0, 1.0, -1.0)
    return signs * h[::-1]


def dilate_filter(f, r: int) -> DilatedFilter:
    """Insert ``2**r - 1`` zeros between neighbouring taps (r upsampling steps)."""
    if r < 0:
        raise ValueError(f"dilation order must be non-negative, got {r}")
    base = np.asarray(f, dtype=float)
    step = 2 ** r
    taps = np.zeros(step * (base.size - 1) + 1)
    taps[::step] = base
    return DilatedFilter(tuple(base.tolist()), int(r), tuple(taps.tolist()))


def check_filter(wf: WaveletFilter, tol: float = TOL) -> None:
    """Raise ``ValueError`` if ``wf`` violates the orthonormal QMF invariants."""
    h, g = wf.lowpass, wf.highpass
    problems = []
    if h.size < 2 or h.size % 2 or g.size != h.size:
        problems.append(f"length {h.size} (need even >= 2, matching g)")
    if abs(h.sum() - np.sqrt(2.0)) > tol:
        problems.append(f"sum(h) - sqrt(2) = {h.sum() - np.sqrt(2.0):.3g}")
    if abs(h @ h - 1.0) > tol:
        problems.append(f"sum(h^2) - 1 = {h @ h - 1.0:.3g}")
    if abs(g.sum()) > tol:
        problems.append(f"sum(g) = {g.sum():.3g}")
    if abs(h @ g) > tol:
        problems.append(f"sum(h*g) = {h @ g:.3g}")
    if problems:
        raise ValueError(f"filter {wf.name!r} invalid: " + "; ".join(problems))


def _build_bank() -> dict:
    bank = {}
    for name, taps in LOWPASS.items():
        h = np.asarray(taps, dtype=float)
        wf = WaveletFilter(name, tuple(h.tolist()), tuple(derive_qmf(h).tolist()))
        check_filter(wf)
        bank[name] = wf
    return bank


_BANK = _build_bank()


def filter_names() -> list:
    return list(_BANK)


def get_filter(name) -> WaveletFilter:
    """Look up a bank filter by name (``haar``, ``db4``..``db20``,
    ``sym8``..``sym20``, ``coif6``, ``coif12``, ``coif18``).

    A ``WaveletFilter`` passed in is returned unchanged.
    """
    if isinstance(name, WaveletFilter):
        return name
    key = str(name).strip().lower()
    try:
        return _BANK[key]
    except KeyError:
        raise ValueError(
            f"unknown filter {name!r}; supported: {', '.join(_BANK)}"
        ) from None
