"""Tests for the command-line entry point."""

import json
from pathlib import Path

import pytest

from bayeslens.main import main
from bayeslens.services.model_service import load_model

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
HMM = str(SAMPLES / "hmm.json")
LOCAL_LEVEL = str(SAMPLES / "local_level.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_push(capsys):
    """Test pushing a state through a morphism."""
    code, out, _ = run(capsys, "--model", HMM, "push", "uniform", "sensor")
    assert code == 0
    data = json.loads(out)
    assert data["states"]["uniform_sensor"]["object"] == "Reading"
    assert data["states"]["uniform_sensor"]["probs"] == pytest.approx([0.55, 0.45])
    assert data["objects"]["Reading"] == ["wet", "dry"]


def test_flags_after_subcommand(capsys):
    """Test global flags are accepted after the subcommand."""
    code, out, _ = run(capsys, "push", "uniform", "sensor", "--model", HMM, "--output", "pretty")
    assert code == 0
    assert out.startswith("{\n  ")
    assert json.loads(out)["states"]["uniform_sensor"]["probs"] == pytest.approx([0.55, 0.45])


def test_invert(capsys):
    """Test the ordinary inverse."""
    code, out, _ = run(capsys, "--model", HMM, "invert", "uniform", "sensor")
    assert code == 0
    inverse = json.loads(out)["morphisms"]["inverse"]
    assert (inverse["dom"], inverse["cod"]) == ("Reading", "Weather")
    assert inverse["rows"][0] == pytest.approx([0.9 / 1.1, 0.2 / 1.1])


def test_invert_supported(capsys):
    """Test the supported inverse at a Dirac prior."""
    code, out, _ = run(capsys, "--model", HMM, "invert", "certain_rain", "sensor", "--supported")
    assert code == 0
    data = json.loads(out)
    assert data["morphisms"]["inverse"]["rows"] == [[1.0], [1.0]]
    assert data["objects"]["Weather_support"] == ["rain"]
    assert data["morphisms"]["prior_section"]["rows"] == [[1.0, 0.0]]


def test_support(capsys):
    """Test the support of a Dirac state."""
    code, out, _ = run(capsys, "--model", HMM, "support", "certain_rain")
    assert code == 0
    data = json.loads(out)
    assert data["carrier"] == "Weather_support"
    assert data["carrier_indices"] == [0]
    assert data["morphisms"]["retraction"]["rows"] == [[1.0], [1.0]]


def test_filter(capsys):
    """Test filtering the sample observation sequence."""
    code, out, _ = run(
        capsys, "--model", HMM, "filter",
        "--dynamics", "stay", "--observe", "sensor", "--init", "uniform",
        "--obs-file", str(SAMPLES / "hmm_obs.json"),
    )
    assert code == 0
    data = json.loads(out)
    assert len(data["beliefs"]) == 6
    first = data["states"][data["beliefs"][0]]
    assert first["probs"] == pytest.approx([0.8182, 0.1818], abs=1e-4)
    assert data["log_likelihood"] < 0


def test_filter_gaussian(capsys):
    """Test filtering the local-level sample."""
    code, out, _ = run(
        capsys, "--model", LOCAL_LEVEL, "filter",
        "--dynamics", "drift", "--observe", "measure", "--init", "start",
        "--obs-file", str(SAMPLES / "local_level_obs.json"),
    )
    assert code == 0
    data = json.loads(out)
    assert len(data["beliefs"]) == 5
    assert data["states"]["belief_1"]["cov"][0][0] == pytest.approx(4.25 / 5.25)


def test_laws(capsys):
    """Test running one law on a few cases."""
    code, out, _ = run(capsys, "laws", "--cases", "2", "--max-dim", "3", "--instance", "finite", "--law", "comonoid")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert [r["law"] for r in data["reports"]] == ["comonoid"]


def test_exit_codes(capsys, tmp_path):
    """Test each error class maps to its exit code."""
    code, _, err = run(capsys, "--model", HMM, "push", "nobody", "sensor")
    assert code == 2 and err.startswith("error:")
    assert run(capsys, "push", "uniform", "sensor")[0] == 2
    assert run(capsys, "laws", "--law", "no-such-law", "--cases", "1")[0] == 2
    assert run(capsys, "--model", HMM, "--tol", "0.6", "support", "uniform")[0] == 4

    model = tmp_path / "model.json"
    model.write_text(json.dumps({
        "objects": {"X": ["a", "b"], "Y": ["c"]},
        "morphisms": {"g": {"dom": "Y", "cod": "Y", "rows": [[1.0]]}},
        "states": {"s": {"object": "X", "probs": [0.5, 0.5]}},
    }))
    assert run(capsys, "--model", str(model), "push", "s", "g")[0] == 3

    observations = tmp_path / "obs.json"
    observations.write_text(json.dumps(["sun"]))
    code, _, err = run(
        capsys, "--model", HMM, "filter",
        "--dynamics", "stay", "--observe", "stay", "--init", "certain_rain",
        "--obs-file", str(observations),
    )
    assert code == 5
    assert "step 0" in err


def write_model(tmp_path, data) -> str:
    path = tmp_path / "model.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_invert_gaussian(capsys, tmp_path):
    """Test the inverse of x -> x + N(0,1) at N(0,1) is y -> N(y/2, 1/2)."""
    model = write_model(tmp_path, {
        "objects": {"Line": {"dim": 1}},
        "morphisms": {"noise": {"dom": "Line", "cod": "Line", "A": [[1.0]], "b": [0.0], "Sigma": [[1.0]]}},
        "states": {"prior": {"object": "Line", "mean": [0.0], "cov": [[1.0]]}},
    })
    code, out, _ = run(capsys, "--model", model, "invert", "prior", "noise")
    assert code == 0
    inverse = json.loads(out)["morphisms"]["inverse"]
    assert inverse["A"] == pytest.approx([[0.5]], abs=1e-12)
    assert inverse["b"] == pytest.approx([0.0], abs=1e-12)
    assert inverse["Sigma"] == pytest.approx([[0.5]], abs=1e-12)


def test_support_gaussian_rank_one(capsys, tmp_path):
    """Test a rank-1 covariance on R^2 gives the normalised diagonal as section basis."""
    model = write_model(tmp_path, {
        "objects": {"Plane": {"dim": 2}},
        "states": {"ridge": {"object": "Plane", "mean": [1.0, -1.0], "cov": [[1.0, 1.0], [1.0, 1.0]]}},
    })
    code, out, _ = run(capsys, "--model", model, "support", "ridge")
    assert code == 0
    data = json.loads(out)
    assert data["carrier"] == "Plane_support"
    assert data["objects"]["Plane_support"] == {"dim": 1}
    section = data["morphisms"]["section"]
    assert section["A"] == pytest.approx([[2 ** -0.5], [2 ** -0.5]], abs=1e-10)
    assert section["b"] == pytest.approx([1.0, -1.0])
    assert "carrier_indices" not in data


def test_laws_single_gaussian_law(capsys):
    """Test selecting one law on the gaussian instance yields one report."""
    code, out, _ = run(capsys, "laws", "--law", "copy-inverse", "--instance", "gaussian", "--cases", "3")
    assert code == 0
    data = json.loads(out)
    assert len(data["reports"]) == 1
    report = data["reports"][0]
    assert (report["law"], report["instance"], report["passed"]) == ("copy-inverse", "gaussian", True)


def test_invert_supported_output_reloads(capsys, tmp_path):
    """Test the supported-inverse output is itself a loadable model file."""
    code, out, _ = run(capsys, "--model", HMM, "invert", "certain_rain", "sensor", "--supported")
    assert code == 0
    path = tmp_path / "inverse.json"
    path.write_text(out)
    reloaded = load_model(path)
    inverse = reloaded.morphism("inverse")
    assert inverse.cod == reloaded.morphism("prior_section").dom
    assert inverse.dom == reloaded.morphism("pushforward_section").dom
    assert inverse.rows.tolist() == json.loads(out)["morphisms"]["inverse"]["rows"]
