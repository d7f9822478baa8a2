"""``ndwt`` command line.

Exit codes: 0 success, 2 usage error, 3 data error (including a failed
agreement gate), 4 resource-guard error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, bench, io, siggen
from .denoise import DenoiseConfig, denoise_1d, denoise_2d, universal_threshold
from .errors import DataError, ResourceGuardError
from .filters import filter_names, get_filter
from .matrix import build_ndwt_matrix, build_weight_matrix
from .transforms import (
    CoefficientStack1D,
    forward_1d,
    forward_2d,
    inverse_1d,
    inverse_2d,
    standard_ndwt_2d,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_GUARD = 0, 2, 3, 4
DEMO_DOPPLER_SEED = 538


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--filter", default="haar", help="wavelet filter (default: haar)")
    g.add_argument("--filter-rows", help="filter along the row axis of 2-D input (default: --filter)")
    g.add_argument("--filter-cols", help="filter along the column axis of 2-D input (default: --filter)")
    g.add_argument("--depth", type=int, help="decomposition depth")
    g.add_argument("--depth-rows", type=int, help="row-axis depth for 2-D input (default: --depth)")
    g.add_argument("--depth-cols", type=int, help="column-axis depth for 2-D input (default: --depth)")
    g.add_argument("--shift", type=int, default=0, help="circular shift N of the filter matrices")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--jobs", type=int, default=1, help="parallel workers for batches of inputs")
    g.add_argument("--max-elements", type=float,
                   help="element cap for one NDWT matrix (env NDWT_MAX_ELEMENTS, default 2e9)")
    g.add_argument("--output", "-o", help="output path")
    g.add_argument("--format", choices=["csv", "bin", "json", "svg"], help="output format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ndwt", description="Matrix-based non-decimated wavelet transforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filters", parents=[common], help="list available wavelet filters")
    p.add_argument("action", nargs="?", default="list", choices=["list"])

    p = sub.add_parser("gen", parents=[common], help="generate synthetic signals as CSV")
    p.add_argument("kind", choices=["doppler", "noise", "fbm", "fbf", "smooth"])
    p.add_argument("--length", "-m", type=int, default=256, help="length / number of rows")
    p.add_argument("--cols", "-n", type=int, help="number of columns (noise, fbf, smooth)")
    p.add_argument("--hurst", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=1.0)

    p = sub.add_parser("transform", parents=[common], help="forward or inverse NDWT of CSV/PGM data")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--direction", choices=["forward", "inverse"], default="forward")
    p.add_argument("--dims", choices=["1d", "2d"], help="default: 1d for vectors, 2d otherwise")

    p = sub.add_parser("denoise", parents=[common], help="hard-threshold denoising")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--variant", choices=["text", "demo"], default="text",
                   help="text: sqrt(2 ln m) sigma; demo: sqrt(2 ln(p m)) sigma")
    p.add_argument("--sigma", type=float, help="use this noise level instead of estimating it")

    p = sub.add_parser("spectra", parents=[common], help="wavelet spectra and Hurst exponent")
    p.add_argument("input", nargs="?")
    p.add_argument("--fbf-hurst", type=float, help="analyse generated fractional Brownian fields")
    p.add_argument("--size", type=int, nargs=2, default=[256, 256], metavar=("M", "N"))
    p.add_argument("--seeds", type=int, default=1, help="number of generated fields to average")
    p.add_argument("--fit-range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--svg", help="also write the spectrum plot here")

    p = sub.add_parser("compress", parents=[common], help="compressibility of 2-D transforms")
    p.add_argument("input", nargs="?", help="image (default: built-in smooth test image)")
    p.add_argument("--smooth", type=int, nargs=2, default=[64, 64], metavar=("M", "N"))
    p.add_argument("--proportions", action="store_true", help="print d-type proportions only")
    p.add_argument("--svg", help="also write Lorenz curves here")

    p = sub.add_parser("bench", parents=[common], help="matrix vs convolution timing")
    p.add_argument("--sizes", nargs="+", default=["256x256"], help="M or MxN, several allowed")
    p.add_argument("--filters", default="haar", help="comma-separated filters")
    p.add_argument("--repetitions", "-R", type=int, default=100)
    p.add_argument("--svg", help="also write a bar chart here")

    p = sub.add_parser("demo", parents=[common], help="reproduce the worked examples")
    p.add_argument("name", choices=["lena-like", "doppler"])
    return parser


def _cap(args):
    return None if args.max_elements is None else int(args.max_elements)


def _emit_json(obj, args) -> None:
    text = json.dumps(obj, indent=1)
    if args.output and args.format != "svg":
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def _outputs(args, inputs, suffix: str) -> list:
    if len(inputs) == 1:
        if not args.output:
            raise UsageError("--output is required")
        return [Path(args.output)]
    if not args.output:
        raise UsageError("--output must name a directory for several inputs")
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    return [outdir / (Path(i).stem + suffix) for i in inputs]


def _run_batch(fn, pairs, jobs: int) -> list:
    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda pr: fn(*pr), pairs))
    return [fn(*pr) for pr in pairs]


def cmd_filters(args) -> int:
    print(f"{'name':<8}{'taps':>6}{'vanishing moments':>20}")
    for name in filter_names():
        wf = get_filter(name)
        print(f"{name:<8}{wf.length:>6}{wf.vanishing_moments:>20}")
    return EXIT_OK


def cmd_gen(args) -> int:
    kind, m = args.kind, args.length
    n = args.cols
    if kind in ("noise", "fbm", "fbf") and args.seed is None:
        raise UsageError(f"gen {kind} needs --seed")
    if kind == "doppler":
        out = siggen.doppler(m)
    elif kind == "noise":
        out = siggen.gaussian_noise(m if n is None else (m, n), args.sigma, args.seed)
    elif kind == "fbm":
        out = siggen.fbm_1d(m, args.hurst, args.seed)
    elif kind == "fbf":
        out = siggen.fbf_2d(m, n or m, args.hurst, args.seed)
    else:
        out = siggen.smooth_test_image(m, n or m)
    if args.output:
        io.write_csv(args.output, out)
    else:
        io.write_csv(sys.stdout, out)
    return EXIT_OK


def _forward_one(args, src: str, dst: Path) -> str:
    A = io.read_array(src)
    dims = args.dims or ("1d" if min(A.shape) == 1 else "2d")
    cap = _cap(args)
    if dims == "1d":
        y = A.ravel()
        p = args.depth or 3
        W = build_ndwt_matrix(args.filter, y.size, p, args.shift, cap)
        coeffs = forward_1d(W, y)
        summary = f"forward 1d: m={y.size} p={p} filter={W.filter} -> {coeffs.data.size} coefficients"
    else:
        fr, fc = args.filter_rows or args.filter, args.filter_cols or args.filter
        p1 = args.depth_rows or args.depth or 3
        p2 = args.depth_cols or args.depth or 3
        m, n = A.shape
        # check both guards before building either matrix
        from .matrix import check_guard
        check_guard(m, p1, cap)
        check_guard(n, p2, cap)
        W1 = build_ndwt_matrix(fr, m, p1, args.shift, cap)
        W2 = build_ndwt_matrix(fc, n, p2, args.shift, cap)
        coeffs = forward_2d(W1, W2, A)
        summary = (f"forward 2d: {m}x{n} p=({p1},{p2}) filters=({W1.filter},{W2.filter}) "
                   f"-> {coeffs.B.shape[0]}x{coeffs.B.shape[1]}")
    if args.format == "csv" or (args.format is None and dst.suffix.lower() == ".csv"):
        io.export_coefficients_csv(dst, coeffs)
    else:
        io.save_coefficients(dst, coeffs)
    return f"{summary} -> {dst}"


def _inverse_one(args, src: str, dst: Path) -> str:
    coeffs = io.read_coefficients(src)
    cap = _cap(args)
    if isinstance(coeffs, CoefficientStack1D):
        W = build_ndwt_matrix(coeffs.filter, coeffs.m, coeffs.p, coeffs.shift, cap)
        out = inverse_1d(W, build_weight_matrix(coeffs.m, coeffs.p), coeffs)
        summary = f"inverse 1d: {coeffs.data.size} coefficients -> m={coeffs.m}"
    else:
        W1 = build_ndwt_matrix(coeffs.filter_rows, coeffs.m, coeffs.p1, coeffs.shift, cap)
        W2 = build_ndwt_matrix(coeffs.filter_cols, coeffs.n, coeffs.p2, coeffs.shift, cap)
        out = inverse_2d(W1, build_weight_matrix(coeffs.m, coeffs.p1), coeffs,
                         build_weight_matrix(coeffs.n, coeffs.p2), W2)
        summary = f"inverse 2d: {coeffs.B.shape[0]}x{coeffs.B.shape[1]} -> {coeffs.m}x{coeffs.n}"
    io.write_csv(dst, out)
    return f"{summary} -> {dst}"


def cmd_transform(args) -> int:
    forward = args.direction == "forward"
    suffix = (".csv" if args.format == "csv" else ".bin") if forward else ".csv"
    outs = _outputs(args, args.inputs, suffix)
    fn = (lambda s, d: _forward_one(args, s, d)) if forward else (lambda s, d: _inverse_one(args, s, d))
    for line in _run_batch(fn, list(zip(args.inputs, outs)), args.jobs):
        print(line)
    return EXIT_OK


def _denoise_one(args, src: str, dst: Path) -> str:
    A = io.read_array(src)
    cfg = DenoiseConfig(args.filter, args.depth, args.shift, args.variant, args.sigma)
    if min(A.shape) == 1:
        res = denoise_1d(A.ravel(), cfg, _cap(args))
    else:
        res = denoise_2d(A, cfg, _cap(args))
    io.write_csv(dst, res.signal)
    report = {"input": str(src), "output": str(dst), "filter": cfg.filter, "shift": cfg.shift,
              "variant": cfg.variant, **res.report()}
    dst.with_suffix(".json").write_text(json.dumps(report, indent=1) + "\n")
    return (f"denoised {src}: sigma_hat={res.sigma:.6g} threshold={res.threshold:.6g} "
            f"retained={res.retained:.3f} -> {dst}")


def cmd_denoise(args) -> int:
    outs = _outputs(args, args.inputs, ".csv")
    for line in _run_batch(lambda s, d: _denoise_one(args, s, d), list(zip(args.inputs, outs)), args.jobs):
        print(line)
    return EXIT_OK


def _default_spectra_depth(m: int, n: int) -> int:
    return max(int(math.floor(math.log2(min(m, n)))) - 2, 2)


def cmd_spectra(args) -> int:
    cap = _cap(args)
    fit = tuple(args.fit_range) if args.fit_range else None
    fr, fc = args.filter_rows or args.filter, args.filter_cols or args.filter
    if args.fbf_hurst is not None:
        if args.input:
            raise UsageError("give either an input file or --fbf-hurst, not both")
        if args.seed is None:
            raise UsageError("--fbf-hurst needs --seed")
        m, n = args.size
        seeds = [args.seed + k for k in range(args.seeds)]
        images = (siggen.fbf_2d(m, n, args.fbf_hurst, s) for s in seeds)
        source = {"generated": "fbf", "true_hurst": args.fbf_hurst, "seeds": seeds}
    else:
        if not args.input:
            raise UsageError("spectra needs an input file or --fbf-hurst")
        A = io.read_array(args.input)
        source = {"input": args.input}
        if min(A.shape) == 1:
            y = A.ravel()
            p = args.depth or max(int(math.floor(math.log2(y.size))) - 2, 2)
            W = build_ndwt_matrix(args.filter, y.size, p, args.shift, cap)
            spec = analysis.spectrum_1d(forward_1d(W, y), fit)
            _write_spectrum(args, spec, {**source, **spec.to_dict()})
            return EXIT_OK
        m, n = A.shape
        images = [A]
    p = args.depth or _default_spectra_depth(m, n)
    W1 = build_ndwt_matrix(fr, m, p, args.shift, cap)
    W2 = build_ndwt_matrix(fc, n, p, args.shift, cap)
    spectra = [analysis.spectrum_2d(forward_2d(W1, W2, img), fit) for img in images]
    first = spectra[0]
    mean_S = np.mean([s.S for s in spectra], axis=0)
    slope, intercept, _ = analysis.estimate_hurst(list(zip(first.levels.tolist(), mean_S.tolist())),
                                                  first.fit_range)
    hursts = [s.hurst for s in spectra]
    combined = analysis.Spectrum(first.levels, mean_S, first.fit_range, slope, intercept,
                                 float(np.mean(hursts)), first.meta)
    report = {**source, **combined.to_dict(), "slope": float(np.mean([s.slope for s in spectra])),
              "hurst_per_seed": hursts, "size": [m, n]}
    _write_spectrum(args, combined, report)
    return EXIT_OK


def _write_spectrum(args, spec, report) -> None:
    if args.format == "svg":
        if not args.output:
            raise UsageError("--format svg needs --output")
        from .plotting import spectrum_svg
        spectrum_svg(spec, args.output)
    elif args.format == "csv":
        if not args.output:
            raise UsageError("--format csv needs --output")
        io.write_csv(args.output, np.column_stack([spec.levels, spec.S]))
    else:
        _emit_json(report, args)
    if args.svg:
        from .plotting import spectrum_svg
        spectrum_svg(spec, args.svg)


def cmd_compress(args) -> int:
    p = args.depth or 3
    if args.proportions:
        print(f"scale-mixing d-type proportion: {analysis.d_type_proportion(p, 'scale-mixing')}")
        print(f"standard d-type proportion: {analysis.d_type_proportion(p, 'standard')}")
        return EXIT_OK
    if args.input:
        A, source = io.read_array(args.input), args.input
    else:
        A, source = siggen.smooth_test_image(*args.smooth), f"smooth_test_image{tuple(args.smooth)}"
    m, n = A.shape
    cap = _cap(args)
    W1 = build_ndwt_matrix(args.filter, m, p, args.shift, cap)
    W2 = build_ndwt_matrix(args.filter, n, p, args.shift, cap)
    mix = analysis.compress_report(forward_2d(W1, W2, A).B, p, "scale-mixing")
    std = analysis.compress_report(standard_ndwt_2d(args.filter, A, p, args.shift, cap).coefficients(),
                                   p, "standard")
    mix_d, std_d = mix.to_dict(), std.to_dict()
    report = {
        "source": source, "filter": get_filter(args.filter).name, "depth": p,
        "entropy_scale_mixing": mix.entropy, "entropy_standard": std.entropy,
        "d_proportion_scale_mixing": mix_d["d_proportion"], "d_proportion_standard": std_d["d_proportion"],
        "lorenz_scale_mixing": mix_d["lorenz"], "lorenz_standard": std_d["lorenz"],
    }
    _emit_json(report, args)
    if args.svg:
        from .plotting import lorenz_svg
        lorenz_svg({"scale-mixing": mix.lorenz, "standard": std.lorenz}, args.svg)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [bench.parse_size(s) for s in args.sizes]
    filters = [get_filter(f.strip()).name for f in args.filters.split(",") if f.strip()]
    depth = args.depth or 4
    report = bench.run_bench(sizes, depth, filters, args.repetitions, args.shift,
                             args.seed or 0, _cap(args))
    _emit_json(report, args)
    if args.svg:
        from .plotting import bench_svg
        bench_svg(report, args.svg)
    for r in report["results"]:
        if r["status"] == "ok":
            print(f"{r['size']} {r['filter']}: matrix first {r['matrix']['first_apply_seconds']:.4f}s "
                  f"amortized {r['matrix']['amortized_apply_seconds']:.4f}s, convolution "
                  f"{r['convolution']['median_seconds']:.4f}s, agreement {r['agreement_max_abs_diff']:.2e}",
                  file=sys.stderr)
        else:
            print(f"{r['size']} {r['filter']}: {r['status']} {r.get('reason', '')}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_DATA


def _demo_lena_like(args, outdir: Path) -> int:
    from .plotting import images_svg
    m, n = 256, 512
    A = siggen.smooth_test_image(m, n)
    p = args.depth or int(math.floor(math.log(min(m, n)))) - 2
    cap = _cap(args)
    W1 = build_ndwt_matrix(args.filter, m, p, args.shift, cap)
    W2 = build_ndwt_matrix(args.filter, n, p, args.shift, cap)
    grid = forward_2d(W1, W2, A)
    R = inverse_2d(W1, build_weight_matrix(m, p), grid, build_weight_matrix(n, p), W2)
    err = float(np.max(np.abs(R - A)))
    io.write_csv(outdir / "original.csv", A)
    io.write_csv(outdir / "reconstructed.csv", R)
    io.save_coefficients(outdir / "transformed.bin", grid)
    step = max(1, grid.B.shape[0] // 512)
    images_svg({"original": A, "scale-mixing NDWT (log |B|)": np.log1p(np.abs(grid.B[::step, ::step])),
                "reconstructed": R}, outdir / "demo.svg")
    report = {"demo": "lena-like", "size": [m, n], "depth": p, "filter": W1.filter,
              "coefficient_shape": list(grid.B.shape), "max_abs_error": err, "passed": err < 1e-9}
    (outdir / "report.json").write_text(json.dumps(report, indent=1) + "\n")
    print(json.dumps(report, indent=1))
    return EXIT_OK if report["passed"] else EXIT_DATA


def _demo_doppler(args, outdir: Path) -> int:
    from .plotting import signals_svg
    m, sigma = 250, 0.05
    seed = DEMO_DOPPLER_SEED if args.seed is None else args.seed
    clean = siggen.doppler(m)
    noisy = clean + siggen.gaussian_noise(m, sigma, seed)
    p = args.depth or int(math.floor(math.log2(m))) - 1
    res = denoise_1d(noisy, DenoiseConfig(args.filter, p, args.shift, "demo"), _cap(args))
    mse_noisy = float(np.mean((noisy - clean) ** 2))
    mse_denoised = float(np.mean((res.signal - clean) ** 2))
    for name, y in (("clean", clean), ("noisy", noisy), ("denoised", res.signal)):
        io.write_csv(outdir / f"{name}.csv", y)
    signals_svg({"clean": clean, "noisy": noisy, "denoised": res.signal}, outdir / "demo.svg")
    report = {"demo": "doppler", "m": m, "sigma": sigma, "seed": seed, "filter": get_filter(args.filter).name,
              **res.report(), "threshold_rule": "sqrt(2 ln(p m)) sigma_hat",
              "threshold_check": universal_threshold(m, res.sigma, "demo", p),
              "mse_noisy": mse_noisy, "mse_denoised": mse_denoised}
    (outdir / "report.json").write_text(json.dumps(report, indent=1) + "\n")
    print(json.dumps(report, indent=1))
    return EXIT_OK


def cmd_demo(args) -> int:
    outdir = Path(args.output or f"demo-{args.name}")
    outdir.mkdir(parents=True, exist_ok=True)
    if args.name == "lena-like":
        return _demo_lena_like(args, outdir)
    return _demo_doppler(args, outdir)


COMMANDS = {
    "filters": cmd_filters, "gen": cmd_gen, "transform": cmd_transform, "denoise": cmd_denoise,
    "spectra": cmd_spectra, "compress": cmd_compress, "bench": cmd_bench, "demo": cmd_demo,
}


def _validate(args) -> None:
    # flag-level problems are usage errors, reported before any input is read
    for flag in ("filter", "filter_rows", "filter_cols"):
        if getattr(args, flag, None) is not None:
            get_filter(getattr(args, flag))
    for flag in ("depth", "depth_rows", "depth_cols"):
        value = getattr(args, flag, None)
        if value is not None and value < 1:
            raise UsageError(f"--{flag.replace('_', '-')} must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.max_elements is not None and args.max_elements < 0:
        raise UsageError("--max-elements must be non-negative")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except ResourceGuardError as exc:
        print(f"ndwt: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DataError, OSError) as exc:
        print(f"ndwt: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, ValueError, KeyError) as exc:
        print(f"ndwt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
