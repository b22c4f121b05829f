"""Tests for the Gaussian instance."""

import numpy as np
import pytest
from pydantic import ValidationError

from bayeslens.categories.finstoch import FINSTOCH, StochMap, state
from bayeslens.categories.gauss import GAUSS, affine, gaussian_state, invert_gauss
from bayeslens.categories.markov import allclose, compose, copy, finite_object, gaussian_object, identity, tensor
from bayeslens.core.config import settings
from bayeslens.core.errors import DimMismatch
from bayeslens.services.case_generator import CaseGen


@pytest.fixture
def standard(line):
    return gaussian_state(line, [0.0], [[1.0]])


@pytest.fixture
def add_noise(line):
    return affine(line, line, [[1.0]], [0.0], [[1.0]])


def test_variances_add(standard, add_noise):
    """Test N(0,1) pushed through x + N(0,1) is N(0,2)."""
    pushed = compose(standard, add_noise)
    np.testing.assert_allclose(pushed.mean, [0.0])
    np.testing.assert_allclose(pushed.cov, [[2.0]])


def test_identity_is_neutral(add_noise, line):
    """Test composing with the identity leaves a map unchanged."""
    assert compose(identity(line), add_noise) == add_noise


def test_deterministic_maps_compose(line):
    """Test deterministic affine maps compose affinely with no noise."""
    f = affine(line, line, [[2.0]], [1.0])
    g = affine(line, line, [[3.0]], [-1.0])
    fg = compose(f, g)
    np.testing.assert_allclose(fg.A, [[6.0]])
    np.testing.assert_allclose(fg.b, [2.0])
    np.testing.assert_array_equal(fg.Sigma, [[0.0]])


def test_tensor(line):
    """Test tensor of identities and block-diagonal product states."""
    assert tensor(identity(line), identity(line)) == identity(gaussian_object(2))
    pi = tensor(gaussian_state(line, [1.0], [[2.0]]), gaussian_state(line, [3.0], [[4.0]]))
    np.testing.assert_array_equal(pi.cov, [[2.0, 0.0], [0.0, 4.0]])
    np.testing.assert_array_equal(pi.mean, [1.0, 3.0])


def test_copy_stacks_identities(line):
    """Test copy duplicates the coordinate."""
    np.testing.assert_array_equal(copy(line).A, [[1.0], [1.0]])


def test_inverse_of_noisy_identity(standard, add_noise):
    """Test the closed-form inverse of x + N(0,1) at N(0,1)."""
    h = invert_gauss(add_noise, standard)
    np.testing.assert_allclose(h.A, [[0.5]])
    np.testing.assert_allclose(h.b, [0.0], atol=1e-15)
    np.testing.assert_allclose(h.Sigma, [[0.5]])


@pytest.fixture(scope="module")
def grid():
    points = np.round(np.arange(-8000, 8001) * 1e-3, 3)
    return points, finite_object(range(points.size))


@pytest.mark.parametrize("problem", range(20))
def test_inverse_matches_grid_posterior(grid, line, problem):
    """Test the closed form against FinStoch inversion on a grid over [-8, 8] with step 1e-3."""
    rng = np.random.default_rng([20, problem])
    mu0, var0 = rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0)
    a, b, noise = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2.0)
    y = a * mu0 + b + rng.normal() * np.sqrt(a * a * var0 + noise)

    h = invert_gauss(affine(line, line, [[a]], [b], [[noise]]), gaussian_state(line, [mu0], [[var0]]))

    x, points = grid
    prior = np.exp(-0.5 * (x - mu0) ** 2 / var0)
    # channel x -> {saw y, saw something else}: mass of a 1e-3 bin around y
    hit = 1e-3 * np.exp(-0.5 * (y - a * x - b) ** 2 / noise) / np.sqrt(2 * np.pi * noise)
    channel = StochMap(dom=points, cod=finite_object(["y", "other"]), rows=np.column_stack([hit, 1.0 - hit]))
    posterior = FINSTOCH.bayes_invert(channel, state(points, prior / prior.sum()), 1e-12).rows[0]

    mean = float(posterior @ x)
    var = float(posterior @ (x - mean) ** 2)
    assert float(h.A[0, 0] * y + h.b[0]) == pytest.approx(mean, abs=1e-3)
    assert float(h.Sigma[0, 0]) == pytest.approx(var, abs=1e-3)


def test_inverse_covariance_stays_psd_on_generated_cases():
    """Test inversion never yields an indefinite covariance on the default gaussian case stream."""
    gen = CaseGen(seed=1, cases=100, instance_mix="gaussian")
    for case_index in range(gen.cases):
        s = gen.sampler(case_index)
        x, y = s.obj(), s.obj()
        f = s.morphism(x, y)
        for pi in s.priors(x):
            h = invert_gauss(f, pi)
            scale = max(1.0, float(np.max(np.abs(h.Sigma))))
            assert np.linalg.eigvalsh(h.Sigma).min() >= -1e-12 * scale
            np.testing.assert_array_equal(h.Sigma, h.Sigma.T)


def test_inverse_covariance_of_ill_conditioned_predictive(line):
    """Test a nearly noiseless observation of a wide prior keeps a PSD posterior."""
    plane = gaussian_object(2)
    pi = gaussian_state(plane, [0.0, 0.0], [[1e6, 999.0], [999.0, 1.0]])
    f = affine(plane, line, [[1.0, 1e3]], [0.0], [[1e-9]])
    h = invert_gauss(f, pi)
    assert np.linalg.eigvalsh(h.Sigma).min() >= -settings.PSD_TOL * max(1.0, float(np.max(np.abs(h.Sigma))))


def test_inverse_of_invertible_deterministic_map():
    """Test an invertible noiseless map inverts to its matrix inverse."""
    plane = gaussian_object(2)
    A = np.array([[2.0, 1.0], [0.0, 1.0]])
    f = affine(plane, plane, A, [1.0, -1.0])
    pi = gaussian_state(plane, [0.5, 0.5], [[1.0, 0.2], [0.2, 2.0]])
    h = invert_gauss(f, pi)
    np.testing.assert_allclose(h.A, np.linalg.inv(A), atol=1e-9)
    np.testing.assert_allclose(h.Sigma, np.zeros((2, 2)), atol=1e-9)


def test_inverse_dimension_check(add_noise):
    """Test a prior of the wrong dimension is rejected."""
    with pytest.raises(DimMismatch):
        invert_gauss(add_noise, gaussian_state(gaussian_object(2), [0.0, 0.0], np.eye(2)))


def test_support_of_degenerate_state():
    """Test the support of N((0,3), diag(1,0)) is the line x2 = 3."""
    pi = gaussian_state(gaussian_object(2), [0.0, 3.0], [[1.0, 0.0], [0.0, 0.0]])
    support = GAUSS.support_of(pi, 1e-10)
    assert support.carrier.dim == 1
    np.testing.assert_allclose(support.section.A, [[1.0], [0.0]])
    np.testing.assert_allclose(support.section.b, [0.0, 3.0])
    assert allclose(compose(support.section, support.retraction), identity(support.carrier))


def test_fingerprint_records_support_rank(line):
    """Test states that round to the same key but differ in rank get different fingerprints."""
    dirac = gaussian_state(line, [0.0], [[0.0]])
    tiny = gaussian_state(line, [0.0], [[1e-13]])
    assert GAUSS.fingerprint(dirac) != GAUSS.fingerprint(tiny)
    assert GAUSS.fingerprint(tiny) == GAUSS.fingerprint(gaussian_state(line, [0.0], [[1e-13]]))


def test_support_of_full_and_dirac_states():
    """Test full-rank supports are identities and Dirac supports are points."""
    plane = gaussian_object(2)
    full = GAUSS.support_of(gaussian_state(plane, [1.0, 2.0], np.eye(2)), 1e-10)
    assert full.is_full
    dirac = GAUSS.support_of(gaussian_state(plane, [1.0, 2.0], np.zeros((2, 2))), 1e-10)
    assert dirac.carrier.dim == 0 and dirac.carrier.is_unit
    np.testing.assert_array_equal(dirac.section.b, [1.0, 2.0])


def test_covariance_checks(line):
    """Test asymmetric or indefinite covariances are rejected."""
    plane = gaussian_object(2)
    with pytest.raises(ValidationError):
        gaussian_state(plane, [0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValidationError):
        gaussian_state(line, [0.0], [[-1.0]])


def test_log_predictive(standard):
    """Test log densities, including the degenerate case."""
    assert np.isclose(GAUSS.log_predictive(standard, [0.0]), -0.5 * np.log(2 * np.pi))
    point = GAUSS.point(standard.cod, [2.0])
    assert GAUSS.log_predictive(point, [2.0]) == 0.0
    assert GAUSS.log_predictive(point, [1.0]) == float("-inf")
