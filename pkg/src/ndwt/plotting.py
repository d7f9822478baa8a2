"""Static SVG figures."""
from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def spectrum_svg(spectrum, path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(spectrum.levels, spectrum.S, "o-.", label="wavelet spectrum")
    lo, hi = spectrum.fit_range
    xs = np.array([lo, hi], dtype=float)
    ax.plot(xs, spectrum.intercept + spectrum.slope * xs, "--",
            label=f"fit, slope {spectrum.slope:.3f}")
    ax.set_xlabel("level j")
    ax.set_ylabel("log2 mean squared coefficient")
    title = f"H = {spectrum.hurst:.3f}" if spectrum.hurst is not None else "1-D spectrum"
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def lorenz_svg(curves: dict, path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, (frac, cum) in curves.items():
        ax.plot(frac, cum, label=label)
    ax.set_xlabel("fraction of coefficients")
    ax.set_ylabel("cumulative normalised energy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def bench_svg(report: dict, path) -> None:
    plt = _plt()
    rows = [r for r in report["results"] if r.get("status") == "ok"]
    labels = [f"{r['size']} {r['filter']}" for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(rows) + 2), 4))
    ax.bar(x - 0.2, [r["matrix"]["first_apply_seconds"] for r in rows], 0.4, label="matrix (incl. build)")
    ax.bar(x + 0.2, [r["convolution"]["median_seconds"] for r in rows], 0.4, label="convolution")
    ax.set_xticks(x, labels, rotation=20)
    ax.set_ylabel("seconds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def signals_svg(series: dict, path) -> None:
    plt = _plt()
    fig, axes = plt.subplots(len(series), 1, figsize=(7, 2.2 * len(series)), sharex=True)
    for ax, (label, y) in zip(np.atleast_1d(axes), series.items()):
        ax.plot(y, lw=0.9)
        ax.set_title(label, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def images_svg(images: dict, path) -> None:
    plt = _plt()
    fig, axes = plt.subplots(1, len(images), figsize=(4 * len(images), 3.5))
    for ax, (label, img) in zip(np.atleast_1d(axes), images.items()):
        ax.imshow(img, cmap="gray", aspect="auto")
        ax.set_title(label, fontsize=9)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
