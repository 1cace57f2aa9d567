import json
import os

import pandas as pd
import pytest

from src.cli import EXIT_FAMILY_MISMATCH, EXIT_MALFORMED, EXIT_UNKNOWN_OPERATOR, main
from tests.conftest import family_path, signal_path

FAST_FLAGS = ["--initial-grid", "256", "--refine-levels", "2"]


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_classify_vaaler(capsys, tmp_path):
    profile = str(tmp_path / "profile.csv")
    assert main(["classify", family_path("vaaler.json"), "--profile", profile, *FAST_FLAGS]) == 0
    report = _json_output(capsys)
    assert report["case"] == "PositiveEssInf"
    assert report["essinf_estimate"] == pytest.approx(0.7854, abs=1e-4)
    frame = pd.read_csv(profile)
    assert list(frame.columns) == ["x", "re_det", "im_det", "abs_det", "cond"]


def test_classify_with_delta(capsys):
    assert main(["classify", family_path("vaaler.json"), "--delta", "1.5", *FAST_FLAGS]) == 0
    verdict = _json_output(capsys)
    assert (verdict["stable_sampling"], verdict["interpolation_set"]) == ("no", "yes")


@pytest.mark.parametrize("name, code", [("diffquot_eps1.json", 2), ("shifted_collision.json", 3)])
def test_classify_degenerate_families(name, code, capsys):
    assert main(["classify", family_path(name), *FAST_FLAGS]) == code


def test_malformed_inputs(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["classify", str(broken)]) == EXIT_MALFORMED
    assert main(["classify"]) == EXIT_MALFORMED
    assert main(["verify", "hermite"]) == EXIT_MALFORMED
    assert main(["--help"]) == 0


def test_unknown_operator():
    assert main(["classify", family_path("unknown_operator.json")]) == EXIT_UNKNOWN_OPERATOR


def test_closed_form_mismatch(tmp_path):
    prefix = str(tmp_path / "k")
    args = ["kernels", family_path("vaaler.json"), prefix, "--closed-form", "shifted"]
    assert main(args) == EXIT_FAMILY_MISMATCH


def test_missing_closed_form_falls_back_to_the_case(tmp_path):
    prefix = str(tmp_path / "k")
    args = ["kernels", family_path("diffquot_eps1.json"), prefix, "--closed-form", "diffquot", *FAST_FLAGS]
    assert main(args) == 2
    assert not os.path.exists(f"{prefix}_kernels.csv")


def test_kernels_writes_spectra_and_values(tmp_path, capsys):
    prefix = str(tmp_path / "vaaler")
    args = ["kernels", family_path("vaaler.json"), prefix, "--closed-form", "littmann", "--x-points", "11"]
    assert main(args) == 0
    summary = _json_output(capsys)
    assert summary["N"] == 2
    assert summary["biorthogonality_residual"] < 1e-8
    assert len(pd.read_csv(f"{prefix}_kernels.csv")) == 11
    assert os.path.exists(f"{prefix}_spectra.csv")


def test_synthesized_kernels(tmp_path, capsys):
    prefix = str(tmp_path / "synth")
    args = ["kernels", family_path("vaaler.json"), prefix, "--grid", "16", *FAST_FLAGS]
    assert main(args) == 0
    assert _json_output(capsys)["biorthogonality_residual"] < 1e-6


def test_reconstruct_writes_outputs(tmp_path, capsys):
    prefix = str(tmp_path / "run")
    args = [
        "reconstruct",
        family_path("shannon.json"),
        signal_path("sinc.json"),
        "--closed-form",
        "sinc",
        "--M",
        "5",
        "--grid-points",
        "11",
        "--out",
        prefix,
    ]
    assert main(args) == 0
    summary = _json_output(capsys)
    assert summary["sup_err"] < 1e-12
    assert summary["frame_ratio"] == pytest.approx(1.0)
    assert len(pd.read_csv(f"{prefix}_reconstruction.csv")) == 11
    assert len(pd.read_csv(f"{prefix}_samples.csv")) == 11
    with open(f"{prefix}_summary.json") as f:
        assert json.load(f)["M"] == 5


def test_verify_with_a_settings_file(tmp_path, capsys):
    settings = tmp_path / "settings.json"
    settings.write_text(json.dumps({"criterion": {"initial_grid": 256, "refine_levels": 2}}))
    assert main(["--settings", str(settings), "verify", "vaaler"]) == 0
    assert "checks passed" in capsys.readouterr().out


@pytest.mark.parametrize("name", ["shifted3.json", "diffquot_half.json", "littmann3.json"])
def test_classify_families_with_formulas(name, capsys):
    assert main(["classify", family_path(name), *FAST_FLAGS]) == 0
    assert _json_output(capsys)["case"] == "PositiveEssInf"


def test_reconstruct_with_littmann_kernels(tmp_path, capsys):
    prefix = str(tmp_path / "littmann")
    args = [
        "reconstruct",
        family_path("littmann3.json"),
        signal_path("combination.json"),
        "--closed-form",
        "littmann",
        "--M",
        "20",
        "--grid-points",
        "21",
        "--out",
        prefix,
    ]
    assert main(args) == 0
    summary = _json_output(capsys)
    assert summary["N"] == 3
    assert summary["frame_ratio"] > 1e-3
    assert len(pd.read_csv(f"{prefix}_samples.csv")) == 3 * 41


def test_dynamical_closed_form_with_truncated_series(tmp_path, capsys):
    prefix = str(tmp_path / "dyn")
    args = [
        "kernels",
        family_path("dynamical_shift.json"),
        prefix,
        "--closed-form",
        "dynamical",
        "--dynamical-method",
        "series",
        "--j-dyn",
        "8",
        "--x-points",
        "11",
    ]
    assert main(args) == 0
    assert _json_output(capsys)["kernels"] == "dynamical-series"


def test_dynamical_method_from_the_settings_file(tmp_path, capsys):
    settings = tmp_path / "settings.json"
    settings.write_text(json.dumps({"kernels": {"dynamical_method": "series", "j_dyn": 8}}))
    args = ["--settings", str(settings), "kernels", family_path("dynamical_shift.json"), str(tmp_path / "dyn")]
    assert main([*args, "--closed-form", "dynamical", "--x-points", "11"]) == 0
    assert _json_output(capsys)["kernels"] == "dynamical-series"


def test_classify_with_a_root_threshold(capsys):
    assert main(["classify", family_path("vaaler.json"), "--tol-root", "1e-6", *FAST_FLAGS]) == 0
    assert _json_output(capsys)["case"] == "PositiveEssInf"


def test_reconstruct_reports_probe_ratios(tmp_path, capsys):
    args = ["reconstruct", family_path("vaaler.json"), signal_path("sinc.json"), "--closed-form", "littmann"]
    assert main([*args, "--M", "20", "--grid-points", "11", "--out", str(tmp_path / "v")]) == 0
    summary = _json_output(capsys)
    assert 1e-3 < summary["probe_ratio_min"] <= summary["probe_ratio_max"]
