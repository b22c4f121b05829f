"""Markov-category signature and the operations derived from it.

Objects carry an instance tag ("finite" or "gaussian"). The tensor product is
strict: finite labels are tuples concatenated in row-major order and the unit
is the one-point object whose only label is the empty tuple, so the
associator and both unitors are identity morphisms.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from functools import lru_cache, reduce
from typing import Any, ClassVar, Dict, Hashable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from bayeslens.core.config import settings
from bayeslens.core.errors import (
    DimMismatch,
    DomainMismatch,
    InstanceMismatch,
    NotAProduct,
    SignatureMismatch,
)

logger = logging.getLogger(__name__)

InstanceKind = Literal["finite", "gaussian"]
Atom = Union[str, int]
Word = Tuple[Atom, ...]


class MarkovObject(BaseModel):
    """An object of one of the two instances.

    Finite objects are described by an ordered tuple of label words, Gaussian
    objects by their dimension. ``factors`` records how a tensor object was
    built; it is bookkeeping only and does not take part in equality.
    """

    model_config = ConfigDict(frozen=True)

    kind: InstanceKind
    labels: Optional[Tuple[Word, ...]] = None
    dim: Optional[int] = None
    factors: Tuple["MarkovObject", ...] = ()

    @model_validator(mode="after")
    def _check_descriptor(self) -> "MarkovObject":
        if self.kind == "finite":
            if self.dim is not None or not self.labels:
                raise ValueError("finite objects need a non-empty label list and no dimension")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError(f"finite labels must be pairwise distinct: {self.labels}")
        else:
            if self.labels is not None or self.dim is None or self.dim < 0:
                raise ValueError("gaussian objects need a non-negative dimension and no labels")
        return self

    @property
    def size(self) -> int:
        """Number of labels (finite) or dimension (gaussian)."""
        return len(self.labels) if self.kind == "finite" else self.dim

    @property
    def is_unit(self) -> bool:
        if self.kind == "finite":
            return self.labels == ((),)
        return self.dim == 0

    def index_of(self, label: Any) -> int:
        """Position of a label (atom, word or list) in a finite object."""
        word = as_word(label)
        try:
            return self.labels.index(word)
        except (ValueError, AttributeError):
            from bayeslens.core.errors import IndexOutOfRange
            raise IndexOutOfRange(f"label {label!r} is not in {self!r}")

    def display_labels(self) -> list:
        return [display_label(word) for word in self.labels]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MarkovObject):
            return NotImplemented
        return (self.kind, self.labels, self.dim) == (other.kind, other.labels, other.dim)

    def __hash__(self) -> int:
        return hash((self.kind, self.labels, self.dim))

    def __repr__(self) -> str:
        if self.kind == "finite":
            return f"Fin{self.display_labels()}"
        return f"R^{self.dim}"


def as_word(label: Any) -> Word:
    """Turn a user label (atom or list) into a label word."""
    if isinstance(label, (list, tuple)):
        return tuple(label)
    return (label,)


def display_label(word: Word) -> Any:
    """Inverse of ``as_word``: single atoms are shown bare, products as lists."""
    return word[0] if len(word) == 1 else list(word)


def finite_object(labels: Sequence[Any]) -> MarkovObject:
    return MarkovObject(kind="finite", labels=tuple(as_word(label) for label in labels))


def gaussian_object(dim: int) -> MarkovObject:
    return MarkovObject(kind="gaussian", dim=dim)


def unit_object(kind: InstanceKind) -> MarkovObject:
    """The monoidal unit I of an instance."""
    if kind == "finite":
        return MarkovObject(kind="finite", labels=((),))
    return MarkovObject(kind="gaussian", dim=0)


def tensor_objects(x: MarkovObject, y: MarkovObject) -> MarkovObject:
    """Strict tensor of objects, recording the factorisation (x, y)."""
    if x.kind != y.kind:
        raise InstanceMismatch(f"cannot tensor {x.kind} object with {y.kind} object")
    if x.kind == "finite":
        labels = tuple(a + b for a in x.labels for b in y.labels)
        return MarkovObject(kind="finite", labels=labels, factors=(x, y))
    return MarkovObject(kind="gaussian", dim=x.dim + y.dim, factors=(x, y))


class Morphism(BaseModel, ABC):
    """A morphism dom -> cod of one instance. Immutable.

    ``f >> g`` composes (f then g) and ``f @ g`` tensors. ``==`` is exact
    equality of signature and representation arrays.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dom: MarkovObject
    cod: MarkovObject

    @model_validator(mode="after")
    def _check_same_instance(self) -> "Morphism":
        if self.dom.kind != self.cod.kind:
            raise ValueError(f"dom is {self.dom.kind} but cod is {self.cod.kind}")
        return self

    @abstractmethod
    def arrays(self) -> Tuple[np.ndarray, ...]:
        """Representation arrays, in a fixed order, used for comparisons."""

    @property
    def kind(self) -> InstanceKind:
        return self.dom.kind

    @property
    def is_state(self) -> bool:
        return self.dom.is_unit

    def __rshift__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return tensor(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        if type(self) is not type(other) or self.dom != other.dom or self.cod != other.cod:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays()))

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.dom, self.cod))


# A state is a morphism out of the unit.
State = Morphism


class SupportObject(BaseModel):
    """Support of a state: carrier object with section i and retraction r."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base: MarkovObject
    state: Morphism
    carrier: MarkovObject
    section: Morphism
    retraction: Morphism

    @property
    def is_full(self) -> bool:
        return self.carrier == self.base and self.section == identity(self.base)


class MarkovCategory(ABC):
    """Operations every concrete instance provides."""

    kind: ClassVar[InstanceKind]

    @property
    @abstractmethod
    def default_support_tol(self) -> float: ...

    @property
    @abstractmethod
    def default_tolerance(self) -> float: ...

    @abstractmethod
    def identity(self, obj: MarkovObject) -> Morphism: ...

    @abstractmethod
    def compose(self, f: Morphism, g: Morphism) -> Morphism: ...

    @abstractmethod
    def tensor(self, f: Morphism, g: Morphism) -> Morphism: ...

    @abstractmethod
    def copy(self, obj: MarkovObject) -> Morphism: ...

    @abstractmethod
    def delete(self, obj: MarkovObject) -> Morphism: ...

    @abstractmethod
    def swap(self, x: MarkovObject, y: MarkovObject) -> Morphism: ...

    @abstractmethod
    def as_equal_residual(self, f: Morphism, g: Morphism, pi: State) -> float:
        """Largest pi-visible disagreement between f and g."""

    @abstractmethod
    def support_of(self, pi: State, tol: float) -> SupportObject: ...

    @abstractmethod
    def bayes_invert(self, f: Morphism, pi: State, tol: float) -> Morphism: ...

    @abstractmethod
    def perturb_off_support(self, h: Morphism, support: SupportObject, rng: np.random.Generator) -> Morphism:
        """Return a morphism equal to h on the support and redrawn off it."""

    @abstractmethod
    def point(self, obj: MarkovObject, value: Any) -> State:
        """Dirac state at a label (finite) or vector (gaussian)."""

    @abstractmethod
    def log_predictive(self, state: State, value: Any) -> float: ...

    @abstractmethod
    def fingerprint(self, pi: State, tol: Optional[float] = None) -> Hashable:
        """Quantised key identifying a state for family caches.

        The key also records the support pattern at tol (the instance default
        when None), so states that round together but straddle the support
        cutoff get different keys.
        """


_INSTANCES: Dict[str, MarkovCategory] = {}


def register_instance(instance: MarkovCategory) -> MarkovCategory:
    _INSTANCES[instance.kind] = instance
    return instance


def instance_for(kind: str) -> MarkovCategory:
    """Look up the instance for a kind tag."""
    if kind not in _INSTANCES:
        # Instances register themselves on import
        from bayeslens.categories import finstoch, gauss  # noqa: F401
    return _INSTANCES[kind]


def _factor_shape(obj: MarkovObject) -> Tuple:
    return tuple((factor, _factor_shape(factor)) for factor in obj.factors)


class StateHandle:
    """Hashable wrapper around a state, keyed by its exact representation."""

    __slots__ = ("state", "key")

    def __init__(self, pi: State):
        self.state = pi
        self.key = (
            type(pi).__name__,
            pi.cod,
            _factor_shape(pi.cod),
            tuple((np.asarray(a, dtype=float) + 0.0).tobytes() for a in pi.arrays()),
        )

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StateHandle) and self.key == other.key


@lru_cache(maxsize=settings.STATE_CACHE_SIZE)
def _cached_support(handle: StateHandle, tol: float) -> SupportObject:
    return instance_for(handle.state.kind).support_of(handle.state, tol)


def cached_support(pi: State, tol: float) -> SupportObject:
    """Support of pi at tol, memoised on the exact state."""
    return _cached_support(StateHandle(pi), tol)


def quantize(array: np.ndarray, decimals: int = 12) -> bytes:
    # + 0.0 folds -0.0 into 0.0
    return (np.round(np.asarray(array, dtype=float), decimals) + 0.0).tobytes()


def with_signature(m: Morphism, dom: MarkovObject, cod: MarkovObject) -> Morphism:
    """Re-label a morphism with equal objects (e.g. to restore factorisations)."""
    if m.dom != dom or m.cod != cod:
        raise SignatureMismatch(f"cannot retype {m.dom!r} -> {m.cod!r} as {dom!r} -> {cod!r}")
    return m.model_copy(update={"dom": dom, "cod": cod})


def identity(obj: MarkovObject) -> Morphism:
    return instance_for(obj.kind).identity(obj)


def copy(obj: MarkovObject) -> Morphism:
    return instance_for(obj.kind).copy(obj)


def delete(obj: MarkovObject) -> Morphism:
    return instance_for(obj.kind).delete(obj)


def swap(x: MarkovObject, y: MarkovObject) -> Morphism:
    if x.kind != y.kind:
        raise InstanceMismatch(f"cannot swap {x.kind} object with {y.kind} object")
    return instance_for(x.kind).swap(x, y)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """Sequential composition f ⨟ g.

    Raises:
        InstanceMismatch: f and g belong to different instances.
        DomainMismatch: cod(f) differs from dom(g) (DimMismatch for gaussian).
    """
    if f.kind != g.kind:
        raise InstanceMismatch(f"cannot compose {f.kind} morphism with {g.kind} morphism")
    if f.cod != g.dom:
        error = DimMismatch if f.kind == "gaussian" else DomainMismatch
        raise error(f"codomain {f.cod!r} does not match domain {g.dom!r}")
    return instance_for(f.kind).compose(f, g)


def compose_all(*morphisms: Morphism) -> Morphism:
    return reduce(compose, morphisms)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    """Parallel composition f ⊗ g.

    Raises:
        InstanceMismatch: f and g belong to different instances.
    """
    if f.kind != g.kind:
        raise InstanceMismatch(f"cannot tensor {f.kind} morphism with {g.kind} morphism")
    return instance_for(f.kind).tensor(f, g)


def tensor_all(*morphisms: Morphism) -> Morphism:
    return reduce(tensor, morphisms)


def marginals(
    pi: State,
    split: Optional[Tuple[MarkovObject, MarkovObject]] = None,
) -> Tuple[State, State]:
    """Marginals (pi_L, pi_R) of a state on X ⊗ Y.

    Args:
        pi: State whose target is a tensor object.
        split: Explicit factorisation (X, Y); defaults to the recorded one.

    Returns:
        pi ⨟ (id_X ⊗ delete_Y) and pi ⨟ (delete_X ⊗ id_Y), typed on X and Y.

    Raises:
        NotAProduct: No factorisation is available or it does not match.
    """
    if not pi.is_state:
        raise SignatureMismatch(f"marginals expects a state, got a morphism out of {pi.dom!r}")
    if split is None:
        if len(pi.cod.factors) != 2:
            raise NotAProduct(f"{pi.cod!r} carries no recorded factorisation")
        split = pi.cod.factors
    left, right = split
    product = tensor_objects(left, right)
    if product != pi.cod:
        raise NotAProduct(f"{pi.cod!r} is not {left!r} ⊗ {right!r}")
    pi = with_signature(pi, pi.dom, product)
    pi_left = compose(pi, tensor(identity(left), delete(right)))
    pi_right = compose(pi, tensor(delete(left), identity(right)))
    return with_signature(pi_left, pi.dom, left), with_signature(pi_right, pi.dom, right)


def residual(f: Morphism, g: Morphism) -> float:
    """Largest absolute entrywise difference between two morphisms."""
    if f.kind != g.kind:
        raise InstanceMismatch(f"cannot compare {f.kind} morphism with {g.kind} morphism")
    if f.dom != g.dom or f.cod != g.cod:
        raise SignatureMismatch(
            f"cannot compare {f.dom!r} -> {f.cod!r} with {g.dom!r} -> {g.cod!r}"
        )
    worst = 0.0
    for a, b in zip(f.arrays(), g.arrays()):
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


def allclose(f: Morphism, g: Morphism, tol: Optional[float] = None) -> bool:
    tol = default_tolerance(f.kind) if tol is None else tol
    return residual(f, g) <= tol


def default_tolerance(kind: str) -> float:
    return instance_for(kind).default_tolerance


def _check_as_signature(f: Morphism, g: Morphism, pi: State) -> None:
    if not pi.is_state:
        raise SignatureMismatch("almost-sure equality needs a state")
    if f.dom != pi.cod or g.dom != pi.cod or f.cod != g.cod:
        raise SignatureMismatch(
            f"almost-sure comparison of {f.dom!r} -> {f.cod!r} and {g.dom!r} -> {g.cod!r} at a state on {pi.cod!r}"
        )


def as_equal_residual(f: Morphism, g: Morphism, pi: State) -> float:
    """Instance-specific measure of how far f and g are from pi-almost equal."""
    _check_as_signature(f, g, pi)
    return instance_for(pi.kind).as_equal_residual(f, g, pi)


def as_equal(f: Morphism, g: Morphism, pi: State, tol: Optional[float] = None) -> bool:
    """Whether f is pi-almost equal to g within tol.

    Raises:
        SignatureMismatch: f, g and pi do not line up.
    """
    tol = settings.TOLERANCE if tol is None else tol
    return as_equal_residual(f, g, pi) <= tol


def joint_state(f: Morphism, pi: State) -> State:
    """pi ⨟ copy ⨟ (id ⊗ f), the joint of the prior and f's output."""
    return compose_all(pi, copy(pi.cod), tensor(identity(pi.cod), f))


def joint_residual(f: Morphism, g: Morphism, pi: State) -> float:
    """Almost-sure disagreement read off the defining joint states."""
    _check_as_signature(f, g, pi)
    return residual(joint_state(f, pi), joint_state(g, pi))
