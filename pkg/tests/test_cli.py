import json

import numpy as np
import pytest

from ndwt import io
from ndwt.cli import main
from ndwt.denoise import universal_threshold
from ndwt.siggen import doppler, gaussian_noise


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_filters_listing(capsys):
    code, out, _ = run(capsys, "filters")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 21 and lines[1].split() == ["haar", "2", "1"]


def test_usage_errors(capsys):
    assert run(capsys, "nope")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "gen", "noise", "-m", 8)[0] == 2
    code, _, err = run(capsys, "transform", "x.csv", "--filter", "db5", "-o", "y.bin")
    assert code == 2 and "supported" in err


def test_gen_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "gen", "fbm", "-m", 64, "--hurst", 0.3, "--seed", 4, "-o", a)[0] == 0
    assert run(capsys, "gen", "fbm", "-m", 64, "--hurst", 0.3, "--seed", 4, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "gen", "fbf", "-m", 16, "-n", 24, "--seed", 1, "-o", a)[0] == 0
    assert io.read_csv(a).shape == (16, 24)
    code, out, _ = run(capsys, "gen", "doppler", "-m", 10)
    assert code == 0 and len(out.splitlines()) == 10


def test_transform_roundtrip_1d(tmp_path, capsys, gen):
    y = gen.standard_normal(255)
    src = tmp_path / "y.csv"
    io.write_csv(src, y)
    code, out, _ = run(capsys, "transform", src, "--filter", "db6", "--depth", 4, "-o", tmp_path / "y.bin")
    assert code == 0 and "m=255 p=4" in out
    code, _, _ = run(capsys, "transform", tmp_path / "y.bin", "--direction", "inverse", "-o", tmp_path / "r.csv")
    assert code == 0
    assert np.abs(io.read_vector(tmp_path / "r.csv") - y).max() < 1e-9


def test_transform_csv_coefficients(tmp_path, capsys, gen):
    src = tmp_path / "y.csv"
    y = gen.standard_normal(40)
    io.write_csv(src, y)
    assert run(capsys, "transform", src, "--format", "csv", "-o", tmp_path / "c.csv")[0] == 0
    assert (tmp_path / "c.blocks.json").exists()
    assert run(capsys, "transform", tmp_path / "c.csv", "--direction", "inverse", "-o", tmp_path / "r.csv")[0] == 0
    assert np.abs(io.read_vector(tmp_path / "r.csv") - y).max() < 1e-9


def test_transform_2d_mixed_filters(tmp_path, capsys, gen):
    A = gen.standard_normal((37, 51))
    io.write_csv(tmp_path / "a.csv", A)
    code, out, _ = run(capsys, "transform", tmp_path / "a.csv", "--filter-rows", "haar", "--filter-cols", "db4",
                       "--depth-rows", 2, "--depth-cols", 3, "-o", tmp_path / "a.bin")
    assert code == 0 and "111x204" in out
    g = io.load_coefficients(tmp_path / "a.bin")
    assert (g.filter_rows, g.filter_cols) == ("haar", "db4")
    assert run(capsys, "transform", tmp_path / "a.bin", "--direction", "inverse", "-o", tmp_path / "r.csv")[0] == 0
    assert np.abs(io.read_csv(tmp_path / "r.csv") - A).max() < 1e-9


def test_transform_truncated_container(tmp_path, capsys, gen):
    io.write_csv(tmp_path / "y.csv", gen.standard_normal(16))
    run(capsys, "transform", tmp_path / "y.csv", "-o", tmp_path / "y.bin")
    raw = (tmp_path / "y.bin").read_bytes()
    (tmp_path / "t.bin").write_bytes(raw[: len(raw) // 2])
    code, _, err = run(capsys, "transform", tmp_path / "t.bin", "--direction", "inverse", "-o", tmp_path / "r.csv")
    assert code == 3 and "data error" in err
    assert not (tmp_path / "r.csv").exists()


def test_transform_bad_csv(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("1,2,oops\n")
    assert run(capsys, "transform", tmp_path / "bad.csv", "-o", tmp_path / "o.bin")[0] == 3
    assert run(capsys, "transform", tmp_path / "missing.csv", "-o", tmp_path / "o.bin")[0] == 3


def test_guard_exit_code(tmp_path, capsys, monkeypatch):
    io.write_csv(tmp_path / "y.csv", np.ones(100))
    out = tmp_path / "y.bin"
    code, _, err = run(capsys, "transform", tmp_path / "y.csv", "--depth", 3, "--max-elements", 1000, "-o", out)
    assert code == 4 and "40,000" in err and "1,000" in err
    assert not out.exists()
    monkeypatch.setenv("NDWT_MAX_ELEMENTS", "500")
    assert run(capsys, "transform", tmp_path / "y.csv", "-o", out)[0] == 4
    assert not out.exists()


def test_batch_with_jobs(tmp_path, capsys, gen):
    inputs = []
    for k in range(4):
        p = tmp_path / f"s{k}.csv"
        io.write_csv(p, gen.standard_normal(32 + k))
        inputs.append(p)
    outdir = tmp_path / "out"
    code, out, _ = run(capsys, "transform", *inputs, "--jobs", 3, "-o", outdir)
    assert code == 0 and len(out.splitlines()) == 4
    assert sorted(p.name for p in outdir.iterdir()) == ["s0.bin", "s1.bin", "s2.bin", "s3.bin"]
    assert run(capsys, "transform", *inputs)[0] == 2


def test_denoise_command(tmp_path, capsys):
    y = doppler(250) + gaussian_noise(250, 0.05, 2)
    io.write_csv(tmp_path / "y.csv", y)
    code, out, _ = run(capsys, "denoise", tmp_path / "y.csv", "--variant", "demo", "-o", tmp_path / "d.csv")
    assert code == 0 and "threshold" in out
    rep = json.loads((tmp_path / "d.json").read_text())
    assert rep["depth"] == 6 and rep["variant"] == "demo"
    assert rep["threshold"] == pytest.approx(universal_threshold(250, rep["sigma_hat"], "demo", 6))
    assert io.read_vector(tmp_path / "d.csv").shape == (250,)


def test_spectra_generated(tmp_path, capsys):
    code, out, _ = run(capsys, "spectra", "--fbf-hurst", 0.5, "--seed", 3, "--depth", 6,
                       "--svg", tmp_path / "s.svg")
    assert code == 0
    rep = json.loads(out)
    assert 0.25 <= rep["hurst"] <= 0.75
    assert rep["levels"] == [2, 3, 4, 5, 6, 7]
    assert (tmp_path / "s.svg").read_text().lstrip().startswith("<?xml")
    assert run(capsys, "spectra", "--fbf-hurst", 0.5)[0] == 2
    assert run(capsys, "spectra")[0] == 2


def test_spectra_file_and_fit_range(tmp_path, capsys, gen):
    io.write_csv(tmp_path / "a.csv", gen.standard_normal((64, 64)))
    code, _, _ = run(capsys, "spectra", tmp_path / "a.csv", "--depth", 4, "--fit-range", 2, 5,
                     "-o", tmp_path / "s.json")
    assert code == 0
    rep = json.loads((tmp_path / "s.json").read_text())
    assert rep["fit_range"] == [2, 5]
    # white noise has a flat diagonal spectrum
    assert abs(rep["slope"]) < 0.3
    assert run(capsys, "spectra", tmp_path / "a.csv", "--fit-range", 5, 5)[0] == 3


def test_compress_command(tmp_path, capsys):
    code, out, _ = run(capsys, "compress", "--proportions", "--depth", 3)
    assert code == 0 and "9/16" in out and "3/10" in out
    code, _, _ = run(capsys, "compress", "--depth", 3, "-o", tmp_path / "c.json", "--svg", tmp_path / "l.svg")
    assert code == 0
    rep = json.loads((tmp_path / "c.json").read_text())
    assert rep["entropy_scale_mixing"] < rep["entropy_standard"]
    assert rep["lorenz_scale_mixing"][-1] == [1.0, 1.0]
    assert (tmp_path / "l.svg").exists()


def test_bench_command(tmp_path, capsys):
    code, _, err = run(capsys, "bench", "--sizes", "64", "32x40", "--depth", 3, "--filters", "haar,db4",
                       "-R", 3, "-o", tmp_path / "b.json", "--svg", tmp_path / "b.svg")
    assert code == 0
    rep = json.loads((tmp_path / "b.json").read_text())
    assert rep["passed"] and len(rep["results"]) == 4
    for r in rep["results"]:
        assert r["status"] == "ok" and r["agreement_max_abs_diff"] <= 1e-10
        assert r["matrix"]["amortized_apply_seconds"] <= r["matrix"]["first_apply_seconds"]
    assert rep["environment"]["timing_threads"] == 1
    assert (tmp_path / "b.svg").exists()


def test_bench_guard_skips(tmp_path, capsys):
    code, _, _ = run(capsys, "bench", "--sizes", "64", "--max-elements", 100, "-R", 1, "-o", tmp_path / "b.json")
    assert code == 0
    rep = json.loads((tmp_path / "b.json").read_text())
    assert rep["results"][0]["status"] == "skipped"
    assert run(capsys, "bench", "--sizes", "1x5")[0] == 2


def test_demo_lena_like(tmp_path, capsys):
    code, out, _ = run(capsys, "demo", "lena-like", "-o", tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["depth"] == 3 and rep["max_abs_error"] < 1e-9 and rep["coefficient_shape"] == [1024, 2048]
    for name in ("original.csv", "reconstructed.csv", "transformed.bin", "demo.svg"):
        assert (tmp_path / name).exists()


def test_demo_doppler(tmp_path, capsys):
    code, _, _ = run(capsys, "demo", "doppler", "-o", tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["seed"] == 538 and rep["depth"] == 6
    assert rep["mse_denoised"] < rep["mse_noisy"]
    assert rep["threshold"] == pytest.approx(rep["threshold_check"], abs=1e-15)
    assert rep["threshold"] == pytest.approx(universal_threshold(250, rep["sigma_hat"], "demo", 6))
    clean = io.read_vector(tmp_path / "clean.csv")
    np.testing.assert_array_equal(clean, doppler(250))
