"""Matrix-vs-convolution timing harness.

Per configuration it times the matrix build, the first application, ``R``
reuses of the same matrices, and ``R`` runs of the a trous cascade on the
same input.  Timings are wall-clock and machine dependent; only the
agreement gate is a pass/fail condition.

``first_apply_seconds`` is the cost of the first result (build plus one
multiplication); ``amortized_apply_seconds`` spreads the build over the
``R`` reuses: ``(build + sum of R applies) / R``.
"""
from __future__ import annotations

import os
import platform
import statistics
import time

import numpy as np
from threadpoolctl import threadpool_info, threadpool_limits

from .errors import ResourceGuardError
from .matrix import build_ndwt_matrix, check_guard
from .siggen import rng
from .transforms import atrous_forward_1d, atrous_forward_2d, forward_1d, forward_2d

AGREEMENT_TOL = 1e-10


def environment() -> dict:
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "cpu_count": os.cpu_count(),
        "blas": [
            {"api": i.get("internal_api"), "threads": i.get("num_threads")}
            for i in threadpool_info()
        ],
        "timing_threads": 1,
    }


def _stats(samples) -> dict:
    return {
        "median_seconds": statistics.median(samples),
        "min_seconds": min(samples),
        "max_seconds": max(samples),
        "mean_seconds": statistics.fmean(samples),
    }


def parse_size(text: str) -> tuple:
    parts = text.lower().replace("*", "x").split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad size {text!r}; use M or MxN") from None
    if len(dims) not in (1, 2) or min(dims) < 2:
        raise ValueError(f"bad size {text!r}; use M or MxN with sides >= 2")
    return dims


def bench_one(size: tuple, depth: int, filt: str, repetitions: int, shift: int = 0,
              seed: int = 0, max_elements=None) -> dict:
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    label = "x".join(str(s) for s in size)
    out = {"size": label, "depth": depth, "filter": filt, "repetitions": repetitions}
    try:
        for side in size:
            check_guard(side, depth, max_elements)
    except ResourceGuardError as exc:
        out.update(status="skipped", reason=str(exc))
        return out

    x = rng(seed).standard_normal(size)
    clock = time.perf_counter
    with threadpool_limits(limits=1):
        t0 = clock()
        if len(size) == 1:
            W = build_ndwt_matrix(filt, size[0], depth, shift, max_elements)
            build = clock() - t0

            def matrix_apply():
                return forward_1d(W, x).data

            def conv_apply():
                return atrous_forward_1d(filt, x, depth, shift).data
        else:
            W1 = build_ndwt_matrix(filt, size[0], depth, shift, max_elements)
            W2 = build_ndwt_matrix(filt, size[1], depth, shift, max_elements)
            build = clock() - t0

            def matrix_apply():
                return forward_2d(W1, W2, x).B

            def conv_apply():
                return atrous_forward_2d(filt, filt, x, depth, depth, shift).B

        applies = []
        for _ in range(repetitions):
            t0 = clock()
            res_matrix = matrix_apply()
            applies.append(clock() - t0)
        convs = []
        for _ in range(repetitions):
            t0 = clock()
            res_conv = conv_apply()
            convs.append(clock() - t0)

    agreement = float(np.max(np.abs(res_matrix - res_conv)))
    out.update(
        status="ok" if agreement <= AGREEMENT_TOL else "FAILED",
        agreement_max_abs_diff=agreement,
        matrix={
            "build_seconds": build,
            "first_apply_seconds": build + applies[0],
            "amortized_apply_seconds": (build + sum(applies)) / repetitions,
            **_stats(applies),
        },
        convolution=_stats(convs),
    )
    return out


def run_bench(sizes, depth: int, filters, repetitions: int, shift: int = 0, seed: int = 0,
              max_elements=None) -> dict:
    results = [
        bench_one(size, depth, f, repetitions, shift, seed, max_elements)
        for size in sizes
        for f in filters
    ]
    return {
        "environment": environment(),
        "agreement_tolerance": AGREEMENT_TOL,
        "results": results,
        "passed": all(r["status"] != "FAILED" for r in results),
    }
