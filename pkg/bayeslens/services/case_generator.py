"""Seeded generators for objects, states and morphisms used by the law harness."""

import logging
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from bayeslens.categories.finstoch import StochMap, state
from bayeslens.categories.gauss import GaussMap, gaussian_state
from bayeslens.categories.markov import (
    MarkovObject,
    Morphism,
    State,
    finite_object,
    gaussian_object,
    instance_for,
    tensor,
)
from bayeslens.core.config import settings

logger = logging.getLogger(__name__)

InstanceMix = Literal["finite", "gaussian", "both"]


class CaseGen(BaseModel):
    """Parameters of a reproducible case stream."""

    seed: int = Field(default_factory=lambda: settings.LAW_SEED, ge=0, lt=2**64)
    max_dim: int = Field(default_factory=lambda: settings.LAW_MAX_DIM, ge=2)
    sparsity: float = Field(default_factory=lambda: settings.LAW_SPARSITY, ge=0.0, lt=1.0)
    instance_mix: InstanceMix = "both"
    cases: int = Field(default_factory=lambda: settings.LAW_CASES, ge=1)
    priors_per_case: int = Field(default_factory=lambda: settings.LAW_PRIORS_PER_CASE, ge=1)

    def kind_of_case(self, case_index: int) -> str:
        if self.instance_mix == "both":
            return "finite" if case_index % 2 == 0 else "gaussian"
        return self.instance_mix

    def sampler(self, case_index: int, attempt: int = 0, max_dim: Optional[int] = None) -> "CaseSampler":
        """Sampler for one case; depends only on (seed, case_index, attempt)."""
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, case_index, attempt]))
        return CaseSampler(
            kind=self.kind_of_case(case_index),
            rng=rng,
            max_dim=self.max_dim if max_dim is None else max_dim,
            sparsity=self.sparsity,
            priors=self.priors_per_case,
        )


class CaseSampler:
    """Draws random values of one instance from a dedicated generator."""

    def __init__(self, kind: str, rng: np.random.Generator, max_dim: int, sparsity: float, priors: int):
        self.kind = kind
        self.rng = rng
        self.max_dim = max(2, max_dim)
        self.sparsity = sparsity
        self.priors_per_case = priors

    @property
    def instance(self):
        return instance_for(self.kind)

    def dim(self) -> int:
        return int(self.rng.integers(2, self.max_dim + 1))

    def obj(self, size: Optional[int] = None) -> MarkovObject:
        size = self.dim() if size is None else size
        if self.kind == "finite":
            return finite_object(range(size))
        return gaussian_object(size)

    def _row(self, n: int) -> np.ndarray:
        row = self.rng.dirichlet(np.ones(n))
        zeros = self.rng.random(n) < self.sparsity
        if zeros.all():
            zeros[self.rng.integers(n)] = False
        row[zeros] = 0.0
        return row / row.sum()

    def _covariance(self, n: int) -> np.ndarray:
        G = self.rng.normal(size=(n, n))
        G[:, self.rng.random(n) < self.sparsity] = 0.0
        return G @ G.T

    def state(self, obj: MarkovObject) -> State:
        if self.kind == "finite":
            return state(obj, self._row(obj.size))
        n = obj.dim
        return gaussian_state(obj, self.rng.normal(size=n), self._covariance(n))

    def morphism(self, dom: MarkovObject, cod: MarkovObject) -> Morphism:
        if self.kind == "finite":
            rows = np.vstack([self._row(cod.size) for _ in range(dom.size)])
            return StochMap(dom=dom, cod=cod, rows=rows)
        m, n = dom.dim, cod.dim
        return GaussMap(
            dom=dom,
            cod=cod,
            A=self.rng.normal(size=(n, m)),
            b=self.rng.normal(size=n),
            Sigma=self._covariance(n),
        )

    def adversarial_state(self, obj: MarkovObject, variant: int) -> State:
        """Dirac, uniform-like or very sparse states, selected by variant."""
        n = obj.size
        if self.kind == "finite":
            if variant % 3 == 0:
                probs = np.zeros(n)
                probs[self.rng.integers(n)] = 1.0
            elif variant % 3 == 1:
                probs = np.full(n, 1.0 / n)
            else:
                probs = np.zeros(n)
                keep = self.rng.choice(n, size=2, replace=False)
                probs[keep] = 0.5
            return state(obj, probs)

        mean = self.rng.normal(size=n)
        if variant % 3 == 0:
            cov = np.zeros((n, n))
        elif variant % 3 == 1:
            cov = np.eye(n)
        else:
            v = self.rng.normal(size=(n, 1))
            cov = v @ v.T
        return gaussian_state(obj, mean, cov)

    def priors(self, obj: MarkovObject, count: Optional[int] = None) -> List[State]:
        """Random states on obj followed by the three adversarial variants."""
        count = self.priors_per_case if count is None else count
        states = [self.state(obj) for _ in range(count)]
        states.extend(self.adversarial_state(obj, variant) for variant in range(3))
        return states

    def product_state(self, x: MarkovObject, y: MarkovObject) -> State:
        return tensor(self.state(x), self.state(y))

    def agreeing(self, h: Morphism, pi: State) -> Morphism:
        """A morphism equal to h on the support of pi and redrawn off it."""
        from bayeslens.services.support_service import support_of

        return self.instance.perturb_off_support(h, support_of(pi), self.rng)
