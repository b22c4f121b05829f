"""Supports, restriction and Bayesian inversion, with and without supports."""

import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict

from bayeslens.categories.markov import (
    Morphism,
    State,
    SupportObject,
    cached_support,
    compose,
    compose_all,
    instance_for,
)
from bayeslens.core.errors import DomainMismatch, SignatureMismatch

logger = logging.getLogger(__name__)


def _support_tol(kind: str, tol: Optional[float]) -> float:
    return instance_for(kind).default_support_tol if tol is None else tol


def _check_prior(f: Morphism, pi: State) -> None:
    if not pi.is_state:
        raise SignatureMismatch(f"expected a state, got a morphism out of {pi.dom!r}")
    if f.dom != pi.cod:
        raise DomainMismatch(f"state on {pi.cod!r} cannot feed a morphism out of {f.dom!r}")


def support_of(pi: State, tol: Optional[float] = None) -> SupportObject:
    """
    Compute the support object of a state.

    Args:
        pi: State on X.
        tol: Support threshold; the instance default when None.

    Returns:
        SupportObject with carrier X_pi, section i and retraction r.

    Raises:
        EmptySupport: No label carries mass above tol.
    """
    if not pi.is_state:
        raise SignatureMismatch(f"expected a state, got a morphism out of {pi.dom!r}")
    return cached_support(pi, _support_tol(pi.kind, tol))


def restrict(f: Morphism, pi: State, tol: Optional[float] = None) -> Morphism:
    """
    Restrict f to supports: i_pi ⨟ f ⨟ r_{pi ⨟ f}.

    Raises:
        DomainMismatch: pi does not live on the domain of f.
    """
    _check_prior(f, pi)
    source = support_of(pi, tol)
    target = support_of(compose(pi, f), tol)
    return compose_all(source.section, f, target.retraction)


def bayes_invert(f: Morphism, pi: State, tol: Optional[float] = None) -> Morphism:
    """
    Ordinary Bayesian inverse of f at the prior pi.

    Observations outside the support of pi ⨟ f get the Dirac row at the
    first supported prior label (finite instance).

    Args:
        f: Morphism X -> Y.
        pi: Prior on X.
        tol: Evidence threshold (finite) or pseudo-inverse cutoff (gaussian).

    Returns:
        Morphism Y -> X.

    Raises:
        DomainMismatch: pi does not live on the domain of f.
    """
    _check_prior(f, pi)
    logger.debug(f"inverting {f.dom!r} -> {f.cod!r}")
    return instance_for(f.kind).bayes_invert(f, pi, _support_tol(f.kind, tol))


class InversionContext(BaseModel):
    """Prior, forward map and both support objects of one inversion problem."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    prior: Morphism
    forward: Morphism
    prior_support: SupportObject
    pushforward_support: SupportObject


def inversion_context(f: Morphism, pi: State, tol: Optional[float] = None) -> InversionContext:
    _check_prior(f, pi)
    return InversionContext(
        prior=pi,
        forward=f,
        prior_support=support_of(pi, tol),
        pushforward_support=support_of(compose(pi, f), tol),
    )


def to_ordinary(g: Morphism, ctx: InversionContext) -> Morphism:
    """
    Turn an inverse between supports into an ordinary inverse.

    Computes r_{pi ⨟ f} ⨟ g ⨟ i_pi.

    Raises:
        SignatureMismatch: g is not typed Y_{pi ⨟ f} -> X_pi.
    """
    if g.dom != ctx.pushforward_support.carrier or g.cod != ctx.prior_support.carrier:
        raise SignatureMismatch(
            f"expected {ctx.pushforward_support.carrier!r} -> {ctx.prior_support.carrier!r}, "
            f"got {g.dom!r} -> {g.cod!r}"
        )
    return compose_all(ctx.pushforward_support.retraction, g, ctx.prior_support.section)


def to_supported(h: Morphism, ctx: InversionContext) -> Morphism:
    """
    Turn an ordinary inverse into the inverse between supports.

    Computes i_{pi ⨟ f} ⨟ h ⨟ r_pi.

    Raises:
        SignatureMismatch: h is not typed Y -> X.
    """
    if h.dom != ctx.forward.cod or h.cod != ctx.forward.dom:
        raise SignatureMismatch(
            f"expected {ctx.forward.cod!r} -> {ctx.forward.dom!r}, got {h.dom!r} -> {h.cod!r}"
        )
    return compose_all(ctx.pushforward_support.section, h, ctx.prior_support.retraction)


def bayes_invert_supported(f: Morphism, pi: State, tol: Optional[float] = None) -> Morphism:
    """
    The unique Bayesian inverse typed between supports, Y_{pi ⨟ f} -> X_pi.

    Raises:
        DomainMismatch: pi does not live on the domain of f.
        EmptySupport: pi has no support at tol.
    """
    ctx = inversion_context(f, pi, tol)
    return to_supported(bayes_invert(f, pi, tol), ctx)
