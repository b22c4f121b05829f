"""Tests for the shared Markov-category operations."""

import numpy as np
import pytest
from pydantic import ValidationError

from bayeslens.categories.finstoch import StochMap, state
from bayeslens.categories.gauss import affine, gaussian_state
from bayeslens.categories.markov import (
    allclose,
    as_equal,
    compose,
    copy,
    delete,
    finite_object,
    gaussian_object,
    identity,
    joint_residual,
    marginals,
    residual,
    swap,
    tensor,
    tensor_objects,
    unit_object,
)
from bayeslens.core.errors import (
    DimMismatch,
    DomainMismatch,
    IndexOutOfRange,
    InstanceMismatch,
    NotAProduct,
    SignatureMismatch,
)


def test_tensor_objects_row_major():
    """Test that finite tensor labels are ordered row-major."""
    x = finite_object(["a", "b"])
    y = finite_object(["x", "y", "z"])
    xy = tensor_objects(x, y)
    assert xy.size == 6
    assert xy.labels[1] == ("a", "y")
    assert xy.labels[3] == ("b", "x")
    assert xy.factors == (x, y)


def test_unit_is_strict(ab):
    """Test that tensoring with the unit leaves objects and maps unchanged."""
    assert tensor_objects(ab, unit_object("finite")) == ab
    assert tensor_objects(gaussian_object(2), unit_object("gaussian")) == gaussian_object(2)
    f = StochMap(dom=ab, cod=ab, rows=[[0.5, 0.5], [0.1, 0.9]])
    assert tensor(f, identity(unit_object("finite"))) == f


def test_identity_laws(noisy, ab, cd):
    """Test identity is a unit for composition."""
    assert compose(identity(ab), noisy) == noisy
    assert compose(noisy, identity(cd)) == noisy


def test_delete_is_natural(noisy, ab, cd):
    """Test f followed by delete is delete."""
    assert allclose(compose(noisy, delete(cd)), delete(ab))


def test_copy_matrix(ab):
    """Test copy on a two-point object."""
    np.testing.assert_array_equal(copy(ab).rows, [[1, 0, 0, 0], [0, 0, 0, 1]])


def test_swap_involution():
    """Test swap composed with swap is the identity."""
    x = finite_object(["a", "b"])
    y = finite_object([0, 1, 2])
    assert compose(swap(x, y), swap(y, x)) == identity(tensor_objects(x, y))
    u, v = gaussian_object(2), gaussian_object(3)
    assert compose(swap(u, v), swap(v, u)) == identity(tensor_objects(u, v))


def test_tensor_identities():
    """Test tensor of identities is the identity."""
    x, y = finite_object([0, 1]), finite_object([0, 1, 2])
    assert tensor(identity(x), identity(y)) == identity(tensor_objects(x, y))


def test_marginals_of_joint_table():
    """Test marginals read off a 2x2 joint table."""
    x = finite_object(["a", "b"])
    pi = state(tensor_objects(x, x), [0.1, 0.2, 0.3, 0.4])
    left, right = marginals(pi)
    np.testing.assert_allclose(left.probs, [0.3, 0.7])
    np.testing.assert_allclose(right.probs, [0.4, 0.6])
    assert left.cod == x and right.cod == x


def test_marginals_of_product(ab, cd):
    """Test marginals recover the factors of a product state."""
    left, right = state(ab, [0.2, 0.8]), state(cd, [0.6, 0.4])
    got_left, got_right = marginals(tensor(left, right))
    assert allclose(got_left, left) and allclose(got_right, right)


def test_marginals_gaussian_block_diag():
    """Test gaussian marginals are block projections."""
    x, y = gaussian_object(1), gaussian_object(2)
    pi_x = gaussian_state(x, [1.0], [[2.0]])
    pi_y = gaussian_state(y, [-1.0, 0.5], [[1.0, 0.3], [0.3, 1.0]])
    left, right = marginals(tensor(pi_x, pi_y))
    assert allclose(left, pi_x) and allclose(right, pi_y)


def test_marginals_explicit_split():
    """Test marginals with an explicit factorisation of a plain object."""
    x = finite_object([0, 1])
    flat = finite_object([(0, 0), (0, 1), (1, 0), (1, 1)])
    pi = state(flat, [0.1, 0.2, 0.3, 0.4])
    left, _ = marginals(pi, (x, x))
    np.testing.assert_allclose(left.probs, [0.3, 0.7])


def test_marginals_need_a_product(ab):
    """Test marginals of a state on a plain object raise NotAProduct."""
    with pytest.raises(NotAProduct):
        marginals(state(ab, [0.5, 0.5]))
    with pytest.raises(NotAProduct):
        marginals(state(finite_object([0, 1, 2]), [0.2, 0.3, 0.5]), (ab, ab))


def test_compose_signature_errors(noisy, ab):
    """Test composition rejects mismatched signatures."""
    with pytest.raises(DomainMismatch):
        compose(noisy, noisy)
    u, v = gaussian_object(1), gaussian_object(2)
    with pytest.raises(DimMismatch):
        compose(affine(u, v, [[1.0], [1.0]]), affine(u, u, [[1.0]]))
    with pytest.raises(InstanceMismatch):
        compose(identity(ab), identity(u))


def test_as_equal_ignores_unsupported_rows(ab):
    """Test almost-sure equality only looks at supported rows."""
    pi = state(ab, [1.0, 0.0])
    f = StochMap(dom=ab, cod=ab, rows=[[0.5, 0.5], [1.0, 0.0]])
    g = StochMap(dom=ab, cod=ab, rows=[[0.5, 0.5], [0.0, 1.0]])
    assert as_equal(f, f, pi)
    assert as_equal(f, g, pi)
    assert joint_residual(f, g, pi) == 0.0
    assert not as_equal(f, g, state(ab, [0.5, 0.5]))


def test_residual_signature(noisy, ab):
    """Test residual refuses morphisms of different signatures."""
    with pytest.raises(SignatureMismatch):
        residual(noisy, identity(ab))


def test_object_validation():
    """Test duplicate labels and unknown labels are rejected."""
    with pytest.raises(ValidationError):
        finite_object(["a", "a"])
    with pytest.raises(IndexOutOfRange):
        finite_object(["a"]).index_of("b")
    assert finite_object([["a", 1]]).index_of(["a", 1]) == 0
