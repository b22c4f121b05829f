"""Gauss: Euclidean spaces and affine maps with additive Gaussian noise.

A morphism R^m -> R^n is a triple (A, b, Sigma) meaning x ↦ A x + b + N(0, Sigma).
Singular covariances are allowed, so Dirac states and deterministic maps are
morphisms too.
"""

from __future__ import annotations

import logging
from typing import Any, Hashable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import ValidationInfo, field_validator, model_validator
from scipy.stats import multivariate_normal

from bayeslens.core.config import settings
from bayeslens.core.errors import DimMismatch
from bayeslens.categories.markov import (
    MarkovCategory,
    MarkovObject,
    Morphism,
    SupportObject,
    cached_support,
    quantize,
    register_instance,
    tensor_objects,
    unit_object,
)

logger = logging.getLogger(__name__)


def _dims(info: ValidationInfo) -> Tuple[Optional[int], Optional[int]]:
    dom, cod = info.data.get("dom"), info.data.get("cod")
    return (dom.dim if dom else None), (cod.dim if cod else None)


class GaussMap(Morphism):
    """Affine-Gaussian map with matrix A (cod x dom), offset b and noise Sigma."""

    A: np.ndarray
    b: np.ndarray
    Sigma: np.ndarray

    @field_validator("A", mode="before")
    @classmethod
    def _as_matrix(cls, value: Any, info: ValidationInfo) -> np.ndarray:
        m, n = _dims(info)
        array = np.array(value, dtype=float)
        if m is not None and n is not None and array.size == m * n:
            array = array.reshape(n, m)
        return array

    @field_validator("b", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> np.ndarray:
        return np.array(value, dtype=float).reshape(-1)

    @field_validator("Sigma", mode="before")
    @classmethod
    def _as_covariance(cls, value: Any, info: ValidationInfo) -> np.ndarray:
        _, n = _dims(info)
        array = np.array(value, dtype=float)
        if n is not None and array.size == n * n:
            array = array.reshape(n, n)
        return array

    @model_validator(mode="after")
    def _check_parameters(self) -> "GaussMap":
        if self.dom.kind != "gaussian":
            raise ValueError("affine-Gaussian maps live between Euclidean objects")
        m, n = self.dom.dim, self.cod.dim
        if self.A.shape != (n, m):
            raise ValueError(f"A has shape {self.A.shape}, expected {(n, m)}")
        if self.b.shape != (n,):
            raise ValueError(f"b has shape {self.b.shape}, expected {(n,)}")
        if self.Sigma.shape != (n, n):
            raise ValueError(f"Sigma has shape {self.Sigma.shape}, expected {(n, n)}")
        for array in self.arrays():
            if not np.all(np.isfinite(array)):
                raise ValueError("parameters must be finite")
        if n:
            scale = max(1.0, float(np.max(np.abs(self.Sigma))))
            if np.max(np.abs(self.Sigma - self.Sigma.T)) > settings.SYMMETRY_TOL * scale:
                raise ValueError("Sigma is not symmetric")
            if float(np.linalg.eigvalsh(self.Sigma).min()) < -settings.PSD_TOL * scale:
                raise ValueError("Sigma is not positive semidefinite")
        for array in self.arrays():
            array.setflags(write=False)
        return self

    def arrays(self) -> Tuple[np.ndarray, ...]:
        return (self.A, self.b, self.Sigma)

    @property
    def mean(self) -> np.ndarray:
        return self.b

    @property
    def cov(self) -> np.ndarray:
        return self.Sigma


def gaussian_state(obj: MarkovObject, mean: Sequence[float], cov: Any) -> GaussMap:
    n = obj.dim
    return GaussMap(dom=unit_object("gaussian"), cod=obj, A=np.zeros((n, 0)), b=mean, Sigma=cov)


def affine(
    dom: MarkovObject,
    cod: MarkovObject,
    A: Any,
    b: Optional[Sequence[float]] = None,
    Sigma: Any = None,
) -> GaussMap:
    """Build a map, defaulting to zero offset and zero noise."""
    n = cod.dim
    return GaussMap(
        dom=dom,
        cod=cod,
        A=A,
        b=np.zeros(n) if b is None else b,
        Sigma=np.zeros((n, n)) if Sigma is None else Sigma,
    )


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.T) / 2.0


def _pinv(matrix: np.ndarray, tol: float) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(matrix.shape[::-1])
    return scipy.linalg.pinvh(matrix, atol=0.0, rtol=tol)


def _clip_negative_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return matrix
    eigvals, eigvecs = scipy.linalg.eigh(matrix)
    if eigvals.min() >= 0.0:
        return matrix
    return (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T


def invert_gauss(f: GaussMap, pi: GaussMap, tol: Optional[float] = None) -> GaussMap:
    """Closed-form Bayesian inverse of f at the prior pi.

    Uses the pseudo-inverse of the predictive covariance with relative
    cutoff tol, so degenerate observation models are handled.

    Raises:
        DimMismatch: pi does not live on the domain of f.
    """
    if pi.cod.dim != f.dom.dim:
        raise DimMismatch(f"prior on R^{pi.cod.dim} cannot be pushed through a map out of R^{f.dom.dim}")
    tol = settings.PINV_RCOND if tol is None else tol
    mu0, cov0 = pi.b, pi.Sigma
    predictive = symmetrize(f.A @ cov0 @ f.A.T + f.Sigma)
    gain = cov0 @ f.A.T @ _pinv(predictive, tol)
    shift = mu0 - gain @ (f.A @ mu0 + f.b)
    # Joseph form: a sum of two PSD terms, so no cancellation below zero
    residual_map = np.eye(f.dom.dim) - gain @ f.A
    cov = residual_map @ cov0 @ residual_map.T + gain @ f.Sigma @ gain.T
    cov = symmetrize(_clip_negative_eigenvalues(cov))
    return GaussMap(dom=f.cod, cod=f.dom, A=gain, b=shift, Sigma=cov)


class Gauss(MarkovCategory):
    kind = "gaussian"

    @property
    def default_support_tol(self) -> float:
        return settings.PINV_RCOND

    @property
    def default_tolerance(self) -> float:
        return settings.GAUSS_TOLERANCE

    def identity(self, obj: MarkovObject) -> GaussMap:
        return affine(obj, obj, np.eye(obj.dim))

    def compose(self, f: GaussMap, g: GaussMap) -> GaussMap:
        return GaussMap(
            dom=f.dom,
            cod=g.cod,
            A=g.A @ f.A,
            b=g.A @ f.b + g.b,
            Sigma=g.A @ f.Sigma @ g.A.T + g.Sigma,
        )

    def tensor(self, f: GaussMap, g: GaussMap) -> GaussMap:
        return GaussMap(
            dom=tensor_objects(f.dom, g.dom),
            cod=tensor_objects(f.cod, g.cod),
            A=scipy.linalg.block_diag(f.A, g.A),
            b=np.concatenate([f.b, g.b]),
            Sigma=scipy.linalg.block_diag(f.Sigma, g.Sigma),
        )

    def copy(self, obj: MarkovObject) -> GaussMap:
        eye = np.eye(obj.dim)
        return affine(obj, tensor_objects(obj, obj), np.vstack([eye, eye]))

    def delete(self, obj: MarkovObject) -> GaussMap:
        return affine(obj, unit_object("gaussian"), np.zeros((0, obj.dim)))

    def swap(self, x: MarkovObject, y: MarkovObject) -> GaussMap:
        m, n = x.dim, y.dim
        A = np.zeros((m + n, m + n))
        A[:n, m:] = np.eye(n)
        A[n:, :m] = np.eye(m)
        return affine(tensor_objects(x, y), tensor_objects(y, x), A)

    def as_equal_residual(self, f: GaussMap, g: GaussMap, pi: GaussMap) -> float:
        from bayeslens.categories.markov import compose, residual

        section = cached_support(pi, self.default_support_tol).section
        return residual(compose(section, f), compose(section, g))

    def support_of(self, pi: GaussMap, tol: float) -> SupportObject:
        base = pi.cod
        n = base.dim
        ident = self.identity(base)
        if n == 0:
            return SupportObject(base=base, state=pi, carrier=base, section=ident, retraction=ident)

        eigvals, eigvecs = scipy.linalg.eigh(pi.Sigma)
        top = float(eigvals.max())
        keep = eigvals > tol * top if top > 0 else np.zeros(n, dtype=bool)
        k = int(keep.sum())
        if k == n:
            return SupportObject(base=base, state=pi, carrier=base, section=ident, retraction=ident)

        order = np.argsort(eigvals[keep])[::-1]
        basis = eigvecs[:, keep][:, order]
        for j in range(k):
            if basis[np.argmax(np.abs(basis[:, j])), j] < 0:
                basis[:, j] *= -1.0
        carrier = MarkovObject(kind="gaussian", dim=k)
        mu = pi.b
        section = affine(carrier, base, basis, mu)
        retraction = affine(base, carrier, basis.T, -basis.T @ mu)
        logger.debug(f"support of state on R^{n} has rank {k}")
        return SupportObject(base=base, state=pi, carrier=carrier, section=section, retraction=retraction)

    def bayes_invert(self, f: GaussMap, pi: GaussMap, tol: float) -> GaussMap:
        return invert_gauss(f, pi, tol)

    def perturb_off_support(self, h: GaussMap, support: SupportObject, rng: np.random.Generator) -> GaussMap:
        if support.is_full:
            return h
        basis, mu = support.section.A, support.section.b
        n = h.dom.dim
        # project out the support directions so the change vanishes on mu + span(basis)
        complement = np.eye(n) - basis @ basis.T
        noise = rng.normal(size=(h.cod.dim, n)) @ complement
        return GaussMap(dom=h.dom, cod=h.cod, A=h.A + noise, b=h.b - noise @ mu, Sigma=h.Sigma)

    def point(self, obj: MarkovObject, value: Any) -> GaussMap:
        vector = np.array(value, dtype=float).reshape(-1)
        if vector.shape != (obj.dim,):
            raise DimMismatch(f"observation of length {vector.size} does not fit R^{obj.dim}")
        return gaussian_state(obj, vector, np.zeros((obj.dim, obj.dim)))

    def log_predictive(self, pi: GaussMap, value: Any) -> float:
        vector = np.array(value, dtype=float).reshape(-1)
        if vector.shape != (pi.cod.dim,):
            raise DimMismatch(f"observation of length {vector.size} does not fit R^{pi.cod.dim}")
        support = cached_support(pi, self.default_support_tol)
        if support.carrier.dim == 0:
            return 0.0 if np.allclose(vector, pi.b) else float("-inf")
        return float(multivariate_normal(mean=pi.b, cov=pi.Sigma, allow_singular=True).logpdf(vector))

    def fingerprint(self, pi: GaussMap, tol: Optional[float] = None) -> Hashable:
        tol = self.default_support_tol if tol is None else tol
        rank = cached_support(pi, tol).carrier.dim
        return ("gaussian", pi.cod.dim, quantize(pi.b), quantize(pi.Sigma), rank)


GAUSS = register_instance(Gauss())
