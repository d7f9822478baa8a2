"""Explicit NDWT matrices.

For a filter ``h`` (high-pass ``g``), signal length ``m`` and depth ``p`` the
transform matrix stacks ``p + 1`` square ``m x m`` blocks::

    W = [ H_p ... H_1          ]   coarse approximation, depth p
        [ G_p H_{p-1} ... H_1  ]   details, depth p (coarsest)
        [ ...                  ]
        [ G_2 H_1              ]
        [ G_1                  ]   details, depth 1 (finest)

``H_j`` and ``G_j`` are circulant matrices carrying the filters dilated
``j - 1`` times.  ``W' T W = I`` with ``T`` the diagonal weight matrix
built by :func:`build_weight_matrix`.
"""
from __future__ import annotations

import os
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import DataError, ResourceGuardError
from .filters import WaveletFilter, dilate_filter, get_filter

DEFAULT_MAX_ELEMENTS = 2_000_000_000
ENV_MAX_ELEMENTS = "NDWT_MAX_ELEMENTS"


def element_cap(override=None) -> int:
    """Element cap for a single W: explicit override, else env var, else 2e9."""
    if override is not None:
        return int(override)
    env = os.environ.get(ENV_MAX_ELEMENTS)
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise DataError(f"{ENV_MAX_ELEMENTS}={env!r} is not a number") from None
    return DEFAULT_MAX_ELEMENTS


def check_guard(m: int, p: int, cap=None) -> int:
    required = (p + 1) * m * m
    allowed = element_cap(cap)
    if required > allowed:
        raise ResourceGuardError(required, allowed)
    return required


@dataclass(frozen=True)
class Block:
    kind: str  # "c" (coarse) or "d" (detail)
    depth: int  # decomposition depth, 1 = finest
    start: int
    stop: int

    @property
    def rows(self) -> slice:
        return slice(self.start, self.stop)


def block_map(m: int, p: int) -> list:
    """Row blocks of a depth-``p`` transform: coarse, then details from
    depth ``p`` down to depth 1."""
    blocks = [Block("c", p, 0, m)]
    for i, depth in enumerate(range(p, 0, -1), start=1):
        blocks.append(Block("d", depth, i * m, (i + 1) * m))
    return blocks


@dataclass(frozen=True)
class LevelFilterMatrices:
    H: np.ndarray
    G: np.ndarray
    level: int
    m: int
    shift: int


@dataclass(frozen=True, eq=False)
class NDWTMatrix:
    W: np.ndarray
    m: int
    p: int
    filter: str
    shift: int = 0
    blocks: list = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", block_map(self.m, self.p))

    @property
    def shape(self):
        return self.W.shape

    def block(self, kind: str, depth: int | None = None) -> np.ndarray:
        for b in self.blocks:
            if b.kind == kind and (depth is None or b.depth == depth):
                return self.W[b.rows]
        raise KeyError((kind, depth))


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    diagonal: np.ndarray
    m: int
    p: int

    def __len__(self):
        return self.diagonal.size


def _first_row(taps, m: int, shift: int) -> np.ndarray:
    row = np.zeros(m)
    taps = np.asarray(taps, dtype=float)
    # wrapped taps landing on the same column add up
    np.add.at(row, (shift + np.arange(taps.size)) % m, taps)
    return row


def _circulant(row: np.ndarray) -> np.ndarray:
    m = row.size
    idx = (np.arange(m)[None, :] - np.arange(m)[:, None]) % m
    return row[idx]


def _sparse_circulant(row: np.ndarray) -> sparse.csr_matrix:
    m = row.size
    (nz,) = np.nonzero(row)
    rows = np.repeat(np.arange(m), nz.size)
    cols = (np.arange(m)[:, None] + nz[None, :]).ravel() % m
    vals = np.tile(row[nz], m)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(m, m))


def _level_rows(wf: WaveletFilter, m: int, level: int, shift: int):
    if m < 2:
        raise ValueError(f"signal length must be >= 2, got {m}")
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    h = dilate_filter(wf.h, level - 1).taps
    g = dilate_filter(wf.g, level - 1).taps
    return _first_row(h, m, shift), _first_row(g, m, shift)


def build_level_matrices(filt, m: int, level: int, shift: int = 0) -> LevelFilterMatrices:
    """Circulant ``H_level`` and ``G_level``.

    Row ``i`` holds the dilated taps starting at column ``(i + shift) mod m``.
    """
    wf = get_filter(filt)
    hrow, grow = _level_rows(wf, m, level, shift)
    return LevelFilterMatrices(_circulant(hrow), _circulant(grow), level, m, shift)


def build_ndwt_matrix(filt, m: int, p: int, shift: int = 0, max_elements=None) -> NDWTMatrix:
    """Dense ``(p+1)m x m`` NDWT matrix.

    Raises ``ResourceGuardError`` before allocating anything if
    ``(p + 1) * m**2`` exceeds the element cap.
    """
    wf = get_filter(filt)
    if m < 2:
        raise ValueError(f"signal length must be >= 2, got {m}")
    if p < 1:
        raise ValueError(f"depth must be >= 1, got {p}")
    check_guard(m, p, max_elements)

    W = np.empty(((p + 1) * m, m))
    # running product H_{j-1} ... H_1, starting from the identity
    acc = np.eye(m)
    for j in range(1, p + 1):
        hrow, grow = _level_rows(wf, m, j, shift)
        row = (p + 1 - j) * m
        W[row:row + m] = _sparse_circulant(grow) @ acc
        acc = _sparse_circulant(hrow) @ acc
    W[:m] = acc
    W.flags.writeable = False
    return NDWTMatrix(W, m, p, wf.name, shift)


@lru_cache(maxsize=32)
def _cached(name: str, m: int, p: int, shift: int, cap: int) -> NDWTMatrix:
    return build_ndwt_matrix(name, m, p, shift, cap)


def cached_ndwt_matrix(filt, m: int, p: int, shift: int = 0, max_elements=None) -> NDWTMatrix:
    """Memoised :func:`build_ndwt_matrix` for repeated same-size transforms."""
    return _cached(get_filter(filt).name, int(m), int(p), int(shift), element_cap(max_elements))


def weight_diagonal(m: int, p: int) -> np.ndarray:
    if m < 1 or p < 1:
        raise ValueError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    exps = np.concatenate([[p, p], np.arange(p - 1, 0, -1)])
    return np.repeat(0.5 ** exps, m)


def build_weight_matrix(m: int, p: int) -> WeightMatrix:
    """Diagonal of ``T``: ``2m`` entries ``1/2**p``, then ``m`` entries each of
    ``1/2**(p-1)``, ..., ``1/2``."""
    return WeightMatrix(weight_diagonal(m, p), m, p)


def build_orthonormal_matrix(W: NDWTMatrix, T: WeightMatrix) -> np.ndarray:
    """``V = T**(1/2) W``; its columns are orthonormal."""
    if T.diagonal.size != W.W.shape[0] or (T.m, T.p) != (W.m, W.p):
        raise DataError(
            f"weight matrix for (m={T.m}, p={T.p}) does not fit W of shape {W.W.shape}"
        )
    return np.sqrt(T.diagonal)[:, None] * W.W
