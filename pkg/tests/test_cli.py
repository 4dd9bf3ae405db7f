import csv
import json

import numpy as np
import pytest

from needlets import make_manifold, random_function
from needlets.cli import main


def run(*argv):
    return main(list(argv))


def test_manifold_info(capsys):
    assert run("manifold", "info", "--manifold", "circle", "--omega", "4") == 0
    info = json.loads(capsys.readouterr().out)
    assert info["kind"] == "circle"
    assert info["dim_E_omega"] == 5


def test_lattice_build_example(tmp_path):
    code = run("lattice", "build", "--manifold", "circle", "--rho", "0.3927", "--seed", "1",
               "--out", str(tmp_path))
    assert code == 0
    lat = json.loads((tmp_path / "lattice.json").read_text())
    assert len(lat["points"]) == 16
    report = json.loads((tmp_path / "lattice_report.json").read_text())
    assert report["passed"] is True


def test_lattice_build_rejects_bad_rho(tmp_path):
    assert run("lattice", "build", "--manifold", "sphere2", "--rho", "10", "--out", str(tmp_path)) == 1


def test_missing_required_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("lattice", "build", "--manifold", "circle", "--out", str(tmp_path))
    assert exc.value.code == 2


def test_cubature_build(tmp_path):
    code = run("cubature", "build", "--manifold", "circle", "--omega", "16", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "cubature_report.json").read_text())
    residual = next(c for c in report["checks"] if c["name"] == "exactness residual")
    assert residual["value"] <= 1e-9
    cub = json.loads((tmp_path / "cubature.json").read_text())
    assert min(cub["weights"]) > 0


def test_cubature_oversized_rho_fails(tmp_path, capsys):
    code = run("cubature", "build", "--manifold", "circle", "--omega", "64", "--rho", "1.5",
               "--out", str(tmp_path))
    assert code == 1
    assert "rho" in capsys.readouterr().err


def test_frame_build_verify_roundtrip(tmp_path):
    assert run("frame", "build", "--manifold", "circle", "--a", "2", "--jmax", "2", "--seed", "7",
               "--out", str(tmp_path)) == 0
    archive = tmp_path / "frame.json"
    assert run("frame", "verify", "--archive", str(archive), "--seed", "9", "--out", str(tmp_path)) == 0
    report = json.loads((tmp_path / "frame_verify_report.json").read_text())
    assert report["passed"] is True
    assert str(archive) in report["inputs"]


def test_frame_verify_corrupt_archive_fails(tmp_path):
    assert run("frame", "build", "--manifold", "circle", "--a", "2", "--jmax", "2", "--seed", "7",
               "--out", str(tmp_path)) == 0
    data = json.loads((tmp_path / "frame.json").read_text())
    data["levels"][1]["weights"][0] *= -1.0
    bad = tmp_path / "frame_bad.json"
    bad.write_text(json.dumps(data))
    assert run("frame", "verify", "--archive", str(bad), "--seed", "9", "--out", str(tmp_path)) == 1


def test_frame_analyze_synthesize_roundtrip(tmp_path):
    assert run("frame", "build", "--manifold", "circle", "--a", "2", "--jmax", "2", "--seed", "7",
               "--out", str(tmp_path)) == 0
    M = make_manifold("circle")
    f = random_function(M, 16.0, np.random.default_rng(0), zero_mean=True)
    fn = tmp_path / "fn.json"
    fn.write_text(json.dumps(f.to_dict()))
    archive = str(tmp_path / "frame.json")
    assert run("frame", "analyze", "--archive", archive, "--input", str(fn), "--out", str(tmp_path)) == 0
    with open(tmp_path / "coefficients.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert set(rows[0]) == {"j", "k", "value"}
    assert run("frame", "synthesize", "--archive", archive, "--coeffs",
               str(tmp_path / "coefficients.csv"), "--out", str(tmp_path)) == 0
    g = json.loads((tmp_path / "function.json").read_text())
    back = np.asarray(g["coeffs"])
    assert np.allclose(back[: len(f.coeffs)], f.coeffs, atol=1e-10)
    assert np.allclose(back[len(f.coeffs):], 0.0, atol=1e-10)


def test_frame_localization(tmp_path):
    assert run("frame", "build", "--manifold", "circle", "--a", "2", "--jmax", "2", "--seed", "7",
               "--out", str(tmp_path)) == 0
    code = run("frame", "localization", "--archive", str(tmp_path / "frame.json"),
               "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "localization_report.json").read_text())
    assert report["passed"] is True


def test_besov_q_inf_refused(tmp_path, capsys):
    code = run("besov", "compare", "--q", "inf", "--out", str(tmp_path))
    assert code == 2
    assert "q = inf" in capsys.readouterr().err


def test_besov_estimate(tmp_path):
    code = run("besov", "estimate", "--jmax", "5", "--alpha", "0.5", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "besov_estimate_report.json").read_text())
    assert abs(report["estimates"][0]["estimate"] - 0.5) <= 0.25


def test_env_var_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NEEDLETS_OUT", str(tmp_path))
    assert run("lattice", "build", "--manifold", "circle", "--rho", "0.5") == 0
    assert (tmp_path / "lattice.json").exists()


def test_reports_are_deterministic(tmp_path):
    out1, out2 = tmp_path / "one", tmp_path / "two"
    for out in (out1, out2):
        assert run("cubature", "build", "--manifold", "torus2", "--omega", "9",
                   "--seed", "3", "--out", str(out)) == 0
    for name in ("cubature.json", "cubature_report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_plots_rendered(tmp_path):
    code = run("cubature", "build", "--manifold", "circle", "--omega", "16",
               "--out", str(tmp_path), "--plot")
    assert code == 0
    assert (tmp_path / "cubature_weights.png").stat().st_size > 0
