"""Deterministic synthetic signals.

Random generators draw from ``numpy.random.Generator(Philox(seed))``
(counter-based, platform independent); normal variates use numpy's
ziggurat sampler.
"""
from __future__ import annotations

import numpy as np


def rng(seed) -> np.random.Generator:
    if seed is None:
        raise ValueError("a seed is required for reproducible output")
    return np.random.Generator(np.random.Philox(int(seed)))


def doppler(m: int) -> np.ndarray:
    """``sqrt(t(1-t)) sin(2*pi*1.05 / (t + 0.05))`` at ``t = k/m``, ``k = 1..m``."""
    if m < 2:
        raise ValueError(f"length must be >= 2, got {m}")
    t = np.arange(1, m + 1) / m
    s = np.sqrt(t * (1.0 - t)) * np.sin(2.0 * np.pi * 1.05 / (t + 0.05))
    s[-1] = 0.0  # t = 1 exactly; guards against 1 - t rounding
    return s


def gaussian_noise(shape, sigma: float, seed) -> np.ndarray:
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    return sigma * rng(seed).standard_normal(shape)


def fgn_autocovariance(k, H: float) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=float))
    return 0.5 * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def _check_hurst(H):
    if not 0 < H < 1:
        raise ValueError(f"Hurst exponent must lie in (0, 1), got {H}")


def fbm_1d(m: int, H: float, seed) -> np.ndarray:
    """Fractional Brownian motion at ``t = k/m``, ``k = 0..m-1`` (so ``B[0] = 0``
    and ``Var B(t) = t**(2H)``), via Davies-Harte embedding of the increments."""
    _check_hurst(H)
    if m < 2:
        raise ValueError(f"length must be >= 2, got {m}")
    n = m - 1
    gamma = fgn_autocovariance(np.arange(n + 1), H)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        raise ValueError(f"circulant embedding not non-negative for m={m}, H={H}")
    lam = np.clip(lam, 0.0, None)
    size = row.size
    g = rng(seed)
    z = g.standard_normal(size) + 1j * g.standard_normal(size)
    incr = np.fft.fft(np.sqrt(lam / size) * z)[:n].real
    return np.concatenate([[0.0], np.cumsum(incr)]) * (1.0 / m) ** H


def _stein_params(alpha: float):
    if alpha <= 1.5:
        return 1.0, 0.0, alpha / 2.0, 1.0 - alpha / 2.0
    R = 2.0
    beta = alpha * (2 - alpha) / (3 * R * (R * R - 1))
    c2 = (alpha - beta * (R - 1) ** 2 * (R + 2)) / 2
    c0 = beta * (R - 1) ** 3 + 1 - c2
    return R, beta, c2, c0


def _stein_covariance(r, alpha, R, beta, c2, c0):
    out = np.zeros_like(r)
    inner = r <= 1.0
    out[inner] = c0 - r[inner] ** alpha + c2 * r[inner] ** 2
    if beta:
        outer = (r > 1.0) & (r <= R)
        out[outer] = beta * (R - r[outer]) ** 3 / r[outer]
    return out


def fbf_2d(m: int, n: int, H: float, seed) -> np.ndarray:
    """Isotropic fractional Brownian field on the grid ``(i, j) / max(m, n)``.

    Covariance ``(|u|^2H + |v|^2H - |u - v|^2H) / 2``; the origin value is 0.
    Uses Stein's intrinsic circulant embedding: a compactly supported
    stationary field plus a random linear term, simulated exactly on a
    square small enough that every pair of points is within unit distance,
    then rescaled by self-similarity.
    """
    _check_hurst(H)
    if m < 2 or n < 2:
        raise ValueError(f"field sides must be >= 2, got {m}x{n}")
    alpha = 2.0 * H
    R, beta, c2, c0 = _stein_params(alpha)
    N = max(m, n)
    # working spacing: the (N-1)-step square has diagonal <= 1
    steps = int(np.ceil(np.sqrt(2.0) * (N - 1)))
    s = 1.0 / steps
    M = int(np.ceil(R / s)) + 1
    P = 2 * (M - 1)
    idx = np.arange(P)
    d = s * np.minimum(idx, P - idx)
    r = np.hypot(d[:, None], d[None, :])
    cov = _stein_covariance(r, alpha, R, beta, c2, c0)
    lam = np.fft.fft2(cov).real
    if lam.min() < -1e-8 * lam.max():
        raise ValueError(
            f"embedding not non-negative for {m}x{n}, H={H}; try a smaller grid or H"
        )
    lam = np.clip(lam, 0.0, None)
    g = rng(seed)
    z = g.standard_normal((P, P)) + 1j * g.standard_normal((P, P))
    field = np.fft.fft2(np.sqrt(lam / (P * P)) * z).real[:m, :n]
    x = s * np.arange(m)[:, None]
    y = s * np.arange(n)[None, :]
    z1, z2 = g.standard_normal(2)
    field = field - field[0, 0] + np.sqrt(2.0 * c2) * (z1 * x + z2 * y)
    field /= np.sqrt(2.0)
    return field * ((1.0 / N) / s) ** H


def smooth_test_image(m: int, n: int) -> np.ndarray:
    """Smooth deterministic image on ``x = i/m``, ``y = j/n``::

        1 + 0.6 sin(2 pi (x + 0.1)) cos(2 pi 0.75 y)
          + 0.3 cos(2 pi (0.5 x + 1.5 y)) + 0.25 x + 0.15 y
    """
    if m < 16 or n < 16:
        raise ValueError(f"image sides must be >= 16, got {m}x{n}")
    x = np.arange(m)[:, None] / m
    y = np.arange(n)[None, :] / n
    return (
        1.0
        + 0.6 * np.sin(2 * np.pi * (x + 0.1)) * np.cos(2 * np.pi * 0.75 * y)
        + 0.3 * np.cos(2 * np.pi * (0.5 * x + 1.5 * y))
        + 0.25 * x
        + 0.15 * y
    )
