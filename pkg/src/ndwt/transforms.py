"""Forward and inverse NDWT by matrix multiplication, the standard 2-D NDWT,
and the a trous (circular convolution) cascade used as reference."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .filters import get_filter
from .matrix import (
    Block,
    NDWTMatrix,
    WeightMatrix,
    block_map,
    build_level_matrices,
    check_guard,
)


@dataclass(eq=False)
class CoefficientStack1D:
    """NDWT coefficients of one signal, ``(p+1)*m`` values in ``W @ y`` order:
    coarse first, then details from depth ``p`` down to depth 1."""

    data: np.ndarray
    m: int
    p: int
    filter: str
    shift: int = 0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != ((self.p + 1) * self.m,):
            raise DataError(
                f"expected {(self.p + 1) * self.m} coefficients for m={self.m}, "
                f"p={self.p}; got shape {self.data.shape}"
            )

    @property
    def blocks(self):
        return block_map(self.m, self.p)

    @property
    def levels(self) -> list:
        return [self.data[b.rows] for b in self.blocks]

    @property
    def coarse(self) -> np.ndarray:
        return self.data[: self.m]

    def detail(self, depth: int) -> np.ndarray:
        if not 1 <= depth <= self.p:
            raise KeyError(depth)
        start = (self.p + 1 - depth) * self.m
        return self.data[start:start + self.m]

    @property
    def finest(self) -> np.ndarray:
        return self.detail(1)

    def copy(self, data=None) -> "CoefficientStack1D":
        data = self.data.copy() if data is None else data
        return CoefficientStack1D(data, self.m, self.p, self.filter, self.shift)


def _tag(row_kind: str, col_kind: str) -> str:
    if row_kind == "c":
        return "c" if col_kind == "c" else "h"
    return "v" if col_kind == "c" else "d"


@dataclass(frozen=True)
class GridBlock:
    tag: str
    depth_rows: int
    depth_cols: int
    rows: slice
    cols: slice


@dataclass(eq=False)
class CoefficientGrid2D:
    """Scale-mixing 2-D coefficients ``B`` of shape ``((p1+1)m, (p2+1)n)``.

    Block ``(a, b)`` mixes row-axis block ``a`` with column-axis block ``b``;
    tags: ``c`` both coarse, ``h`` rows coarse only, ``v`` columns coarse
    only, ``d`` both detail.
    """

    B: np.ndarray
    m: int
    n: int
    p1: int
    p2: int
    filter_rows: str
    filter_cols: str
    shift: int = 0

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        want = ((self.p1 + 1) * self.m, (self.p2 + 1) * self.n)
        if self.B.shape != want:
            raise DataError(f"expected grid of shape {want}, got {self.B.shape}")

    def blocks(self) -> list:
        out = []
        for rb in block_map(self.m, self.p1) if self.p1 else [_identity_block(self.m)]:
            for cb in block_map(self.n, self.p2) if self.p2 else [_identity_block(self.n)]:
                out.append(GridBlock(_tag(rb.kind, cb.kind), rb.depth, cb.depth, rb.rows, cb.rows))
        return out

    def block(self, tag: str, depth_rows: int, depth_cols: int) -> np.ndarray:
        for b in self.blocks():
            if (b.tag, b.depth_rows, b.depth_cols) == (tag, depth_rows, depth_cols):
                return self.B[b.rows, b.cols]
        raise KeyError((tag, depth_rows, depth_cols))

    def tagged(self, tag: str) -> list:
        return [self.B[b.rows, b.cols] for b in self.blocks() if b.tag == tag]

    def copy(self, B=None) -> "CoefficientGrid2D":
        B = self.B.copy() if B is None else B
        return CoefficientGrid2D(B, self.m, self.n, self.p1, self.p2,
                                 self.filter_rows, self.filter_cols, self.shift)


def _identity_block(m):
    return Block("c", 0, 0, m)


@dataclass(eq=False)
class StandardGrid2D:
    """Standard 2-D NDWT: one coarse matrix and, per depth ``1..p``, the
    ``h``, ``v`` and ``d`` detail matrices (lists indexed by depth - 1)."""

    c: np.ndarray
    h: list
    v: list
    d: list

    @property
    def p(self) -> int:
        return len(self.d)

    def coefficients(self) -> np.ndarray:
        parts = [self.c.ravel()]
        for j in range(self.p):
            parts += [self.h[j].ravel(), self.v[j].ravel(), self.d[j].ravel()]
        return np.concatenate(parts)


def forward_1d(W: NDWTMatrix, y) -> CoefficientStack1D:
    y = np.asarray(y, dtype=float)
    if y.shape != (W.m,):
        raise DataError(f"signal of shape {y.shape} does not match W built for m={W.m}")
    return CoefficientStack1D(W.W @ y, W.m, W.p, W.filter, W.shift)


def inverse_1d(W: NDWTMatrix, T: WeightMatrix, d) -> np.ndarray:
    data = d.data if isinstance(d, CoefficientStack1D) else np.asarray(d, dtype=float)
    if data.shape != (W.W.shape[0],) or T.diagonal.shape != data.shape:
        raise DataError(
            f"coefficients of shape {data.shape} do not match W {W.W.shape} "
            f"and T of length {T.diagonal.size}"
        )
    return W.W.T @ (T.diagonal * data)


def forward_2d(W1: NDWTMatrix, W2: NDWTMatrix, A) -> CoefficientGrid2D:
    """``B = W1 A W2'``; ``W1`` acts along the row axis (length m), ``W2``
    along the column axis (length n)."""
    A = np.asarray(A, dtype=float)
    if A.shape != (W1.m, W2.m):
        raise DataError(f"matrix of shape {A.shape} does not match W1 (m={W1.m}) / W2 (n={W2.m})")
    B = (W1.W @ A) @ W2.W.T
    return CoefficientGrid2D(B, W1.m, W2.m, W1.p, W2.p, W1.filter, W2.filter, W1.shift)


def inverse_2d(W1: NDWTMatrix, T1: WeightMatrix, B, T2: WeightMatrix, W2: NDWTMatrix) -> np.ndarray:
    """``A = W1' T1 B T2 W2``."""
    B = B.B if isinstance(B, CoefficientGrid2D) else np.asarray(B, dtype=float)
    want = (W1.W.shape[0], W2.W.shape[0])
    if B.shape != want or T1.diagonal.size != want[0] or T2.diagonal.size != want[1]:
        raise DataError(f"grid of shape {B.shape} does not match W1/W2 ({want})")
    return W1.W.T @ (T1.diagonal[:, None] * B * T2.diagonal[None, :]) @ W2.W


def standard_ndwt_2d(filt, A, p: int, shift: int = 0, max_elements=None) -> StandardGrid2D:
    """Standard (single-scale) 2-D NDWT.

    At depth ``j`` the level-``j`` filter matrices are applied to the current
    coarse image on both axes, giving ``h`` (rows low-pass, columns
    high-pass), ``v`` (rows high-pass, columns low-pass) and ``d``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DataError(f"expected a 2-D array, got shape {A.shape}")
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    m, n = A.shape
    check_guard(m, 1, max_elements)
    check_guard(n, 1, max_elements)
    wf = get_filter(filt)
    c = A
    hs, vs, ds = [], [], []
    for j in range(1, p + 1):
        rows = build_level_matrices(wf, m, j, shift)
        cols = build_level_matrices(wf, n, j, shift)
        lo = rows.H @ c
        hi = rows.G @ c
        hs.append(lo @ cols.G.T)
        vs.append(hi @ cols.H.T)
        ds.append(hi @ cols.G.T)
        c = lo @ cols.H.T
    return StandardGrid2D(c, hs, vs, ds)


def _atrous_axis(x: np.ndarray, filt, p: int, shift: int, axis: int) -> np.ndarray:
    """Cascade along ``axis``; blocks stacked along ``axis`` as coarse, then
    details depth p..1.  ``p = 0`` leaves ``x`` untouched."""
    if p == 0:
        return x
    wf = get_filter(filt)
    h, g = wf.lowpass, wf.highpass
    c = x
    details = []
    for j in range(1, p + 1):
        step = 2 ** (j - 1)
        lo = np.zeros_like(c)
        hi = np.zeros_like(c)
        for k in range(h.size):
            # out[i] = sum_k tap_k * c[(i + shift + k*step) mod len]
            shifted = np.roll(c, -(shift + k * step), axis=axis)
            lo += h[k] * shifted
            hi += g[k] * shifted
        details.append(hi)
        c = lo
    return np.concatenate([c] + details[::-1], axis=axis)


def atrous_forward_1d(filt, y, p: int, shift: int = 0) -> CoefficientStack1D:
    """Reference NDWT by the a trous cascade of circular convolutions."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DataError(f"expected a 1-D signal, got shape {y.shape}")
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    wf = get_filter(filt)
    return CoefficientStack1D(_atrous_axis(y, wf, p, shift, 0), y.size, p, wf.name, shift)


def atrous_forward_2d(filter_rows, filter_cols, A, p1: int, p2: int, shift: int = 0) -> CoefficientGrid2D:
    """Separable reference: cascade along the row axis, then the column axis.

    A depth of 0 leaves that axis untransformed.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DataError(f"expected a 2-D array, got shape {A.shape}")
    if p1 < 0 or p2 < 0:
        raise ValueError("depths must be non-negative")
    fr, fc = get_filter(filter_rows), get_filter(filter_cols)
    B = _atrous_axis(_atrous_axis(A, fr, p1, shift, 0), fc, p2, shift, 1)
    m, n = A.shape
    return CoefficientGrid2D(B, m, n, p1, p2, fr.name, fc.name, shift)
