"""FinStoch: finite sets and row-stochastic matrices."""

from __future__ import annotations

import logging
from typing import Any, Callable, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import field_validator, model_validator

from bayeslens.core.config import settings
from bayeslens.core.errors import EmptySupport, IndexOutOfRange, ValidationReason
from bayeslens.categories.markov import (
    MarkovCategory,
    MarkovObject,
    Morphism,
    SupportObject,
    as_word,
    quantize,
    register_instance,
    tensor_objects,
    unit_object,
)

logger = logging.getLogger(__name__)


class StochMap(Morphism):
    """Matrix with one row per domain label and one column per codomain label."""

    rows: np.ndarray

    @field_validator("rows", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        return np.array(value, dtype=float)

    @model_validator(mode="after")
    def _check_rows(self) -> "StochMap":
        if self.dom.kind != "finite":
            raise ValueError("stochastic maps live between finite objects")
        expected = (self.dom.size, self.cod.size)
        if self.rows.shape != expected:
            raise ValueError(f"rows have shape {self.rows.shape}, expected {expected}")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("rows must be finite")
        self.rows.setflags(write=False)
        return self

    def arrays(self) -> Tuple[np.ndarray, ...]:
        return (self.rows,)

    @property
    def probs(self) -> np.ndarray:
        """Distribution of a state."""
        return self.rows[0]


def state(obj: MarkovObject, probs: Sequence[float]) -> StochMap:
    return StochMap(dom=unit_object("finite"), cod=obj, rows=np.asarray(probs, dtype=float)[None, :])


def uniform(obj: MarkovObject) -> StochMap:
    return state(obj, np.full(obj.size, 1.0 / obj.size))


def deterministic(
    dom: MarkovObject,
    cod: MarkovObject,
    mapping: Union[Callable[[int], int], Sequence[int]],
) -> StochMap:
    """0/1 matrix of a function between label indices.

    Raises:
        IndexOutOfRange: Some image is not an index of cod.
    """
    images = [int(mapping(x)) if callable(mapping) else int(mapping[x]) for x in range(dom.size)]
    bad = [y for y in images if not 0 <= y < cod.size]
    if bad:
        raise IndexOutOfRange(f"images {bad} fall outside {cod!r}")
    rows = np.zeros((dom.size, cod.size))
    rows[np.arange(dom.size), images] = 1.0
    return StochMap(dom=dom, cod=cod, rows=rows)


def check_stochastic(f: StochMap, tol: Optional[float] = None) -> List[ValidationReason]:
    """Reasons why f is not row-stochastic; empty when it is."""
    tol = settings.STOCHASTIC_TOL if tol is None else tol
    reasons = []
    for i, row in enumerate(f.rows):
        if np.any(row < -tol):
            reasons.append(ValidationReason(code="NEGATIVE_ENTRY", msg=f"row {i} has a negative entry"))
        total = float(row.sum())
        if abs(total - 1.0) > tol:
            reasons.append(ValidationReason(code="ROW_SUM", msg=f"row {i} sums to {total!r}"))
    return reasons


class FinStoch(MarkovCategory):
    kind = "finite"

    @property
    def default_support_tol(self) -> float:
        return settings.SUPPORT_TOL

    @property
    def default_tolerance(self) -> float:
        return settings.TOLERANCE

    def identity(self, obj: MarkovObject) -> StochMap:
        return StochMap(dom=obj, cod=obj, rows=np.eye(obj.size))

    def compose(self, f: StochMap, g: StochMap) -> StochMap:
        return StochMap(dom=f.dom, cod=g.cod, rows=f.rows @ g.rows)

    def tensor(self, f: StochMap, g: StochMap) -> StochMap:
        return StochMap(
            dom=tensor_objects(f.dom, g.dom),
            cod=tensor_objects(f.cod, g.cod),
            rows=np.kron(f.rows, g.rows),
        )

    def copy(self, obj: MarkovObject) -> StochMap:
        n = obj.size
        return deterministic(obj, tensor_objects(obj, obj), lambda x: x * n + x)

    def delete(self, obj: MarkovObject) -> StochMap:
        return StochMap(dom=obj, cod=unit_object("finite"), rows=np.ones((obj.size, 1)))

    def swap(self, x: MarkovObject, y: MarkovObject) -> StochMap:
        nx, ny = x.size, y.size
        return deterministic(
            tensor_objects(x, y),
            tensor_objects(y, x),
            lambda k: (k % ny) * nx + k // ny,
        )

    def as_equal_residual(self, f: StochMap, g: StochMap, pi: StochMap) -> float:
        weighted = pi.probs[:, None] * (f.rows - g.rows)
        return float(np.max(np.abs(weighted))) if weighted.size else 0.0

    def support_of(self, pi: StochMap, tol: float) -> SupportObject:
        base = pi.cod
        keep = np.flatnonzero(pi.probs > tol)
        if keep.size == 0:
            raise EmptySupport(f"no label of {base!r} has mass above {tol!r}")
        if keep.size == base.size:
            ident = self.identity(base)
            return SupportObject(base=base, state=pi, carrier=base, section=ident, retraction=ident)

        carrier = MarkovObject(kind="finite", labels=tuple(base.labels[k] for k in keep))
        position = {int(x): j for j, x in enumerate(keep)}
        section = deterministic(carrier, base, lambda j: int(keep[j]))
        # off-support labels go to the first supported one
        retraction = deterministic(base, carrier, lambda x: position.get(x, 0))
        logger.debug(f"support of state on {base!r} keeps {keep.size} of {base.size} labels")
        return SupportObject(base=base, state=pi, carrier=carrier, section=section, retraction=retraction)

    def bayes_invert(self, f: StochMap, pi: StochMap, tol: float) -> StochMap:
        probs = pi.probs
        supported_x = np.flatnonzero(probs > tol)
        if supported_x.size == 0:
            raise EmptySupport(f"prior on {pi.cod!r} has no mass above {tol!r}")

        joint = probs[:, None] * f.rows
        evidence = joint.sum(axis=0)
        seen = evidence > tol
        posterior = np.zeros((f.cod.size, f.dom.size))
        posterior[seen] = (joint[:, seen] / evidence[seen]).T
        # unseen observations get a Dirac at the first supported prior label
        posterior[~seen, supported_x[0]] = 1.0
        return StochMap(dom=f.cod, cod=f.dom, rows=posterior)

    def perturb_off_support(self, h: StochMap, support: SupportObject, rng: np.random.Generator) -> StochMap:
        on_support = support.section.rows.sum(axis=0) > 0
        rows = np.array(h.rows)
        for y in np.flatnonzero(~on_support):
            rows[y] = rng.dirichlet(np.ones(h.cod.size))
        return StochMap(dom=h.dom, cod=h.cod, rows=rows)

    def point(self, obj: MarkovObject, value: Any) -> StochMap:
        probs = np.zeros(obj.size)
        probs[obj.index_of(as_word(value))] = 1.0
        return state(obj, probs)

    def log_predictive(self, pi: StochMap, value: Any) -> float:
        p = float(pi.probs[pi.cod.index_of(as_word(value))])
        return float(np.log(p)) if p > 0 else float("-inf")

    def fingerprint(self, pi: StochMap, tol: Optional[float] = None) -> Hashable:
        tol = self.default_support_tol if tol is None else tol
        return ("finite", pi.cod.labels, quantize(pi.rows), (pi.probs > tol).tobytes())


FINSTOCH = register_instance(FinStoch())
