"""Loading, validating and emitting JSON model files."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from bayeslens.categories.finstoch import StochMap, check_stochastic
from bayeslens.categories.gauss import GaussMap
from bayeslens.categories.markov import (
    MarkovObject,
    Morphism,
    State,
    finite_object,
    gaussian_object,
    tensor_objects,
    unit_object,
)
from bayeslens.core.config import settings
from bayeslens.core.errors import ModelValidationError, SignatureMismatch, ValidationReason
from bayeslens.models.model_file import (
    FiniteStateSpec,
    GaussianObjectSpec,
    ModelFile,
    ObjectRef,
    StochMapSpec,
)

logger = logging.getLogger(__name__)


class LoadedModel(BaseModel):
    """A model file with every reference resolved and every matrix validated."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    objects: Dict[str, MarkovObject] = Field(default_factory=dict)
    morphisms: Dict[str, Morphism] = Field(default_factory=dict)
    states: Dict[str, Morphism] = Field(default_factory=dict)

    def morphism(self, name: str) -> Morphism:
        if name not in self.morphisms:
            raise ModelValidationError([ValidationReason(code="UNKNOWN_MORPHISM", msg=f"no morphism named '{name}'")])
        return self.morphisms[name]

    def state(self, name: str) -> State:
        if name not in self.states:
            raise ModelValidationError([ValidationReason(code="UNKNOWN_STATE", msg=f"no state named '{name}'")])
        return self.states[name]


def _pydantic_reasons(prefix: str, error: ValidationError) -> List[ValidationReason]:
    return [
        ValidationReason(code="INVALID_VALUE", msg=f"{prefix}: {e['msg']}")
        for e in error.errors()
    ]


def _resolve(objects: Dict[str, MarkovObject], ref: ObjectRef, where: str) -> MarkovObject:
    names = [ref] if isinstance(ref, str) else list(ref)
    missing = [name for name in names if name not in objects]
    if missing:
        raise ModelValidationError(
            [ValidationReason(code="UNKNOWN_OBJECT", msg=f"{where} refers to unknown object '{name}'") for name in missing]
        )
    if not names:
        raise ModelValidationError([ValidationReason(code="EMPTY_REF", msg=f"{where} has an empty object list")])
    result = objects[names[0]]
    for name in names[1:]:
        result = tensor_objects(result, objects[name])
    return result


def _matrix(name: str, field: str, rows: List[List[float]], shape: tuple) -> List[ValidationReason]:
    """Shape reasons naming the offending row."""
    n_rows, n_cols = shape
    reasons = []
    if len(rows) != n_rows:
        reasons.append(ValidationReason(code="SHAPE", msg=f"{name}.{field} has {len(rows)} rows, expected {n_rows}"))
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            reasons.append(
                ValidationReason(code="SHAPE", msg=f"{name}.{field} row {i} has {len(row)} entries, expected {n_cols}")
            )
    return reasons


def _finite_entries(name: str, field: str, values: Any) -> List[ValidationReason]:
    array = np.asarray(values, dtype=float)
    bad = np.argwhere(~np.isfinite(array))
    return [
        ValidationReason(code="NON_FINITE", msg=f"{name}.{field} entry {tuple(int(i) for i in index)} is not finite")
        for index in bad
    ]


def _build_stoch(name: str, dom: MarkovObject, cod: MarkovObject, rows: List[List[float]]) -> StochMap:
    reasons = _matrix(name, "rows", rows, (dom.size, cod.size))
    if reasons:
        raise ModelValidationError(reasons)
    reasons = _finite_entries(name, "rows", rows)
    if reasons:
        raise ModelValidationError(reasons)
    f = StochMap(dom=dom, cod=cod, rows=rows)
    reasons = [
        ValidationReason(code=r.code, msg=f"{name}: {r.msg}")
        for r in check_stochastic(f, settings.STOCHASTIC_TOL)
    ]
    if reasons:
        raise ModelValidationError(reasons)
    return f


def _build_gauss(name: str, dom: MarkovObject, cod: MarkovObject, A: Any, b: Any, Sigma: Any) -> GaussMap:
    m, n = dom.dim, cod.dim
    reasons = _matrix(name, "A", A, (n, m))
    if len(b) != n:
        reasons.append(ValidationReason(code="SHAPE", msg=f"{name}.b has {len(b)} entries, expected {n}"))
    reasons.extend(_matrix(name, "Sigma", Sigma, (n, n)))
    if reasons:
        raise ModelValidationError(reasons)
    for field, values in (("A", A), ("b", b), ("Sigma", Sigma)):
        reasons.extend(_finite_entries(name, field, values))
    if reasons:
        raise ModelValidationError(reasons)
    try:
        return GaussMap(dom=dom, cod=cod, A=np.asarray(A, dtype=float).reshape(n, m), b=b, Sigma=Sigma)
    except ValidationError as e:
        raise ModelValidationError(_pydantic_reasons(name, e))


def _build_object(name: str, spec: Any) -> MarkovObject:
    try:
        if isinstance(spec, GaussianObjectSpec):
            return gaussian_object(spec.dim)
        return finite_object(spec)
    except ValidationError as e:
        raise ModelValidationError(_pydantic_reasons(f"object '{name}'", e))


def build_model(model_file: ModelFile) -> LoadedModel:
    """
    Resolve references and validate every entry of a parsed model file.

    Args:
        model_file: Parsed ModelFile.

    Returns:
        LoadedModel with constructed objects, morphisms and states.

    Raises:
        ModelValidationError: An entry is malformed; the reasons name the
            offending row or entry.
        SignatureMismatch: A morphism mixes finite and gaussian objects.
    """
    objects = {name: _build_object(name, spec) for name, spec in model_file.objects.items()}
    model = LoadedModel(objects=objects)

    for name, spec in model_file.morphisms.items():
        dom = _resolve(objects, spec.dom, f"morphism '{name}'.dom")
        cod = _resolve(objects, spec.cod, f"morphism '{name}'.cod")
        if dom.kind != cod.kind:
            raise SignatureMismatch(f"morphism '{name}' goes from a {dom.kind} object to a {cod.kind} object")
        if isinstance(spec, StochMapSpec):
            if dom.kind != "finite":
                raise ModelValidationError([ValidationReason(code="WRONG_KIND", msg=f"morphism '{name}' has rows but gaussian objects")])
            model.morphisms[name] = _build_stoch(name, dom, cod, spec.rows)
        else:
            if dom.kind != "gaussian":
                raise ModelValidationError([ValidationReason(code="WRONG_KIND", msg=f"morphism '{name}' has A, b, Sigma but finite objects")])
            model.morphisms[name] = _build_gauss(name, dom, cod, spec.A, spec.b, spec.Sigma)

    for name, spec in model_file.states.items():
        obj = _resolve(objects, spec.object, f"state '{name}'.object")
        if isinstance(spec, FiniteStateSpec):
            if obj.kind != "finite":
                raise ModelValidationError([ValidationReason(code="WRONG_KIND", msg=f"state '{name}' has probs but a gaussian object")])
            model.states[name] = _build_stoch(name, unit_object("finite"), obj, [spec.probs])
        else:
            if obj.kind != "gaussian":
                raise ModelValidationError([ValidationReason(code="WRONG_KIND", msg=f"state '{name}' has mean and cov but a finite object")])
            n = obj.dim
            model.states[name] = _build_gauss(name, unit_object("gaussian"), obj, [[] for _ in range(n)], spec.mean, spec.cov)

    logger.info(
        f"Loaded model: {len(model.objects)} objects, {len(model.morphisms)} morphisms, {len(model.states)} states"
    )
    return model


def parse_model(data: Any) -> LoadedModel:
    """Validate raw JSON data and build the model."""
    try:
        model_file = ModelFile.model_validate(data)
    except ValidationError as e:
        raise ModelValidationError(
            [
                ValidationReason(code="SCHEMA", msg=f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}")
                for err in e.errors()
            ]
        )
    return build_model(model_file)


def read_json(path: Union[str, Path]) -> Any:
    """
    Read a JSON document.

    Raises:
        ModelValidationError: The file is missing or not valid JSON.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not read {path}: {e}")
        raise ModelValidationError([ValidationReason(code="UNREADABLE", msg=f"{path}: {e}")])


def load_model(path: Union[str, Path]) -> LoadedModel:
    logger.info(f"Loading model from {path}")
    return parse_model(read_json(path))


class Fragment:
    """Accumulates objects, morphisms and states into a ModelFile-shaped dict."""

    def __init__(self):
        self.objects: Dict[str, Any] = {}
        self._names: Dict[MarkovObject, str] = {}
        self.morphisms: Dict[str, Any] = {}
        self.states: Dict[str, Any] = {}

    def add_object(self, obj: MarkovObject, hint: str) -> str:
        """Name for obj, reusing an existing entry for an equal object."""
        if obj in self._names:
            return self._names[obj]
        name, suffix = hint, 1
        while name in self.objects:
            suffix += 1
            name = f"{hint}{suffix}"
        if obj.kind == "finite":
            self.objects[name] = obj.display_labels()
        else:
            self.objects[name] = {"dim": obj.dim}
        self._names[obj] = name
        return name

    def add_state(self, name: str, pi: State, object_hint: str = "X") -> None:
        obj = self.add_object(pi.cod, object_hint)
        if pi.kind == "finite":
            self.states[name] = {"object": obj, "probs": pi.rows[0]}
        else:
            self.states[name] = {"object": obj, "mean": pi.b, "cov": pi.Sigma}

    def add_morphism(self, name: str, f: Morphism, dom_hint: str = "X", cod_hint: str = "Y") -> None:
        dom = self.add_object(f.dom, dom_hint)
        cod = self.add_object(f.cod, cod_hint)
        if f.kind == "finite":
            self.morphisms[name] = {"dom": dom, "cod": cod, "rows": f.rows}
        else:
            self.morphisms[name] = {"dom": dom, "cod": cod, "A": f.A, "b": f.b, "Sigma": f.Sigma}

    def to_dict(self, **extra: Any) -> Dict[str, Any]:
        data: Dict[str, Any] = {"objects": self.objects}
        if self.morphisms:
            data["morphisms"] = self.morphisms
        if self.states:
            data["states"] = self.states
        data.update(extra)
        return data
