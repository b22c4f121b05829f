"""JSON model file schema."""

from typing import Dict, List, Union

from pydantic import BaseModel, ConfigDict, Field

Atom = Union[str, int]
LabelSpec = Union[Atom, List[Atom]]
ObjectRef = Union[str, List[str]]


class GaussianObjectSpec(BaseModel):
    """Euclidean object given by its dimension."""
    model_config = ConfigDict(extra="forbid")
    dim: int = Field(ge=0)


class StochMapSpec(BaseModel):
    """Finite morphism: one row per domain label."""
    model_config = ConfigDict(extra="forbid")
    dom: ObjectRef
    cod: ObjectRef
    rows: List[List[float]]


class GaussMapSpec(BaseModel):
    """Affine-Gaussian morphism x ↦ A x + b + N(0, Sigma)."""
    model_config = ConfigDict(extra="forbid")
    dom: ObjectRef
    cod: ObjectRef
    A: List[List[float]]
    b: List[float]
    Sigma: List[List[float]]


class FiniteStateSpec(BaseModel):
    """Distribution over the labels of a finite object."""
    model_config = ConfigDict(extra="forbid")
    object: ObjectRef
    probs: List[float]


class GaussStateSpec(BaseModel):
    """Gaussian state with mean and (possibly singular) covariance."""
    model_config = ConfigDict(extra="forbid")
    object: ObjectRef
    mean: List[float]
    cov: List[List[float]]


class ModelFile(BaseModel):
    """Named objects, morphisms and states. Unknown top-level keys are ignored."""
    model_config = ConfigDict(extra="ignore")
    objects: Dict[str, Union[GaussianObjectSpec, List[LabelSpec]]] = Field(default_factory=dict)
    morphisms: Dict[str, Union[StochMapSpec, GaussMapSpec]] = Field(default_factory=dict)
    states: Dict[str, Union[FiniteStateSpec, GaussStateSpec]] = Field(default_factory=dict)
