"""Tests for the finite instance."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from bayeslens.categories.finstoch import FINSTOCH, StochMap, check_stochastic, deterministic, state, uniform
from bayeslens.categories.markov import compose, copy, finite_object, tensor, tensor_objects
from bayeslens.core.errors import IndexOutOfRange


def test_pushforward(noisy, skewed):
    """Test the pushforward of the worked example."""
    np.testing.assert_allclose(compose(skewed, noisy).probs, [0.5, 0.5])


def test_permutations_compose():
    """Test deterministic permutations compose as permutations."""
    x = finite_object([0, 1, 2])
    shift = deterministic(x, x, lambda i: (i + 1) % 3)
    twice = deterministic(x, x, lambda i: (i + 2) % 3)
    assert compose(shift, shift) == twice


def test_deterministic_constant():
    """Test the constant map has a column of ones."""
    x, y = finite_object([0, 1, 2]), finite_object(["p", "q"])
    f = deterministic(x, y, [0, 0, 0])
    np.testing.assert_array_equal(f.rows, [[1, 0], [1, 0], [1, 0]])


def test_deterministic_out_of_range():
    """Test images outside the codomain are rejected."""
    x = finite_object([0, 1])
    with pytest.raises(IndexOutOfRange):
        deterministic(x, x, [0, 2])


def test_copy_is_diagonal_map(ab):
    """Test copy equals the deterministic diagonal map."""
    assert copy(ab) == deterministic(ab, tensor_objects(ab, ab), lambda i: 3 * i)


def test_tensor_of_points():
    """Test the tensor of two point states is the point at the pair."""
    x, y = finite_object(["a", "b"]), finite_object(["c", "d", "e"])
    pair = tensor(FINSTOCH.point(x, "a"), FINSTOCH.point(y, "e"))
    assert pair == FINSTOCH.point(tensor_objects(x, y), ["a", "e"])


def test_check_stochastic():
    """Test row-sum and sign violations are reported per row."""
    x = finite_object([0, 1])
    f = StochMap(dom=x, cod=x, rows=[[0.5, 0.6], [-0.1, 1.1]])
    assert [r.code for r in check_stochastic(f)] == ["ROW_SUM", "NEGATIVE_ENTRY"]
    assert check_stochastic(uniform(x)) == []


def test_shape_is_checked(ab):
    """Test rows must match the signature."""
    with pytest.raises(ValidationError):
        StochMap(dom=ab, cod=ab, rows=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def test_rows_are_read_only(noisy):
    """Test morphisms cannot be mutated in place."""
    with pytest.raises(ValueError):
        noisy.rows[0, 0] = 1.0


def test_log_predictive(ab):
    """Test log predictive probabilities of labels."""
    pi = state(ab, [0.5, 0.5])
    assert math.isclose(FINSTOCH.log_predictive(pi, "a"), math.log(0.5))
    assert FINSTOCH.log_predictive(state(ab, [1.0, 0.0]), "b") == float("-inf")


def test_perturb_off_support_keeps_supported_rows(noisy, rng):
    """Test perturbation only redraws rows outside the support."""
    support = FINSTOCH.support_of(state(noisy.dom, [1.0, 0.0]), 1e-12)
    perturbed = FINSTOCH.perturb_off_support(noisy, support, rng)
    np.testing.assert_array_equal(perturbed.rows[0], noisy.rows[0])
    np.testing.assert_allclose(perturbed.rows.sum(axis=1), [1.0, 1.0])


def test_fingerprint_ignores_rounding_noise(ab):
    """Test states equal up to 1e-15 share a fingerprint."""
    assert FINSTOCH.fingerprint(state(ab, [0.3, 0.7])) == FINSTOCH.fingerprint(state(ab, [0.3 + 1e-15, 0.7]))


def test_fingerprint_separates_support_patterns(ab):
    """Test states that round together but straddle the support cutoff get different fingerprints."""
    above, below = 1.4e-12, 6e-13
    assert FINSTOCH.fingerprint(state(ab, [above, 1.0 - above])) != FINSTOCH.fingerprint(state(ab, [below, 1.0 - below]))
