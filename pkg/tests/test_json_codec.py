"""Tests for JSON emission."""

import json

import numpy as np

from bayeslens.models.report import CaseFailure
from bayeslens.utils.json_codec import dumps


def test_floats_keep_full_precision():
    """Test doubles reload bit for bit."""
    assert json.loads(dumps([0.1 + 0.2]))[0] == 0.1 + 0.2
    assert dumps(1.0) == "1.0"
    assert dumps(-0.0) == "-0.0"


def test_non_finite_values():
    """Test infinities and NaN become strings."""
    assert json.loads(dumps([float("inf"), float("-inf"), float("nan")])) == ["Infinity", "-Infinity", "NaN"]


def test_numpy_and_models():
    """Test numpy values and pydantic models are encoded."""
    data = {"rows": np.eye(2), "n": np.int64(3), "ok": np.bool_(True), "case": CaseFailure(case_index=1, residual=0.5)}
    assert json.loads(dumps(data)) == {
        "rows": [[1.0, 0.0], [0.0, 1.0]],
        "n": 3,
        "ok": True,
        "case": {"case_index": 1, "residual": 0.5, "error": None},
    }


def test_pretty_matches_compact():
    """Test pretty output indents but decodes to the same value as compact output."""
    data = {"rows": np.array([[0.5, 0.5], [1.0 / 3.0, 2.0 / 3.0]]), "bad": float("inf")}
    text = dumps(data, pretty=True)
    assert "\n  \"rows\"" in text
    assert json.loads(text) == json.loads(dumps(data))
    assert ":" in dumps(data) and ": " not in dumps(data)


def test_every_double_round_trips():
    """Test awkward doubles survive emission unchanged."""
    values = [5e-324, 1.7976931348623157e308, 2.0 ** -52, 1.0 / 3.0, 0.1]
    assert json.loads(dumps(values)) == values
