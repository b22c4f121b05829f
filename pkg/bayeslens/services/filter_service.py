"""Forward filtering of hidden Markov models through the section S."""

import logging
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from bayeslens.categories.markov import Morphism, State, compose, instance_for
from bayeslens.core.config import settings
from bayeslens.core.errors import SignatureMismatch, UnsupportedObservation
from bayeslens.services.lens_service import section_s
from bayeslens.services.support_service import InversionContext, inversion_context, to_ordinary

logger = logging.getLogger(__name__)


def _check_model(belief: State, dynamics: Morphism, observe: Morphism) -> None:
    if not belief.is_state:
        raise SignatureMismatch(f"belief must be a state, got a morphism out of {belief.dom!r}")
    if dynamics.dom != belief.cod or dynamics.cod != belief.cod:
        raise SignatureMismatch(f"dynamics {dynamics.dom!r} -> {dynamics.cod!r} is not an endomorphism of {belief.cod!r}")
    if observe.dom != belief.cod:
        raise SignatureMismatch(f"observation model reads {observe.dom!r}, belief lives on {belief.cod!r}")


def _guard_observation(ctx: InversionContext, obs: Any, tol: Optional[float]) -> None:
    """Reject observations outside the support of the predictive distribution."""
    predictive = compose(ctx.prior, ctx.forward)
    instance = instance_for(predictive.kind)
    if predictive.kind == "finite":
        tol = instance.default_support_tol if tol is None else tol
        p = float(predictive.rows[0, predictive.cod.index_of(obs)])
        if p <= tol:
            raise UnsupportedObservation(f"observation {obs!r} has predictive probability {p!r}")
        return

    support = ctx.pushforward_support
    observed = instance.point(predictive.cod, obs)
    projected = compose(compose(observed, support.retraction), support.section)
    vector = observed.b
    moved = float(np.max(np.abs(projected.b - vector))) if vector.size else 0.0
    if moved > settings.GAUSS_TOLERANCE * max(1.0, float(np.linalg.norm(vector))):
        raise UnsupportedObservation(f"observation {list(vector)} lies {moved!r} off the predictive support")


def filter_step(
    belief: State,
    dynamics: Morphism,
    observe: Morphism,
    obs: Any,
    tol: Optional[float] = None,
) -> State:
    """
    One predict-update step.

    Predicts with ``dynamics``, inverts ``observe`` between supports at the
    predicted state and evaluates the resulting posterior map at ``obs``.

    Args:
        belief: Current belief on X.
        dynamics: Transition X -> X.
        observe: Observation model X -> O.
        obs: Observed label (finite) or vector (gaussian).
        tol: Support threshold.

    Returns:
        The updated belief on X.

    Raises:
        UnsupportedObservation: obs lies outside the predictive support.
    """
    _check_model(belief, dynamics, observe)
    predicted = compose(belief, dynamics)
    ctx = inversion_context(observe, predicted, tol)
    _guard_observation(ctx, obs, tol)

    posterior = to_ordinary(section_s(observe, tol).at(predicted), ctx)
    observed = instance_for(observe.kind).point(observe.cod, obs)
    return compose(observed, posterior)


def filter_sequence(
    init: State,
    dynamics: Morphism,
    observe: Morphism,
    observations: Sequence[Any],
    tol: Optional[float] = None,
) -> Tuple[List[State], float]:
    """
    Run filter_step over a sequence of observations.

    Args:
        init: Belief before the first transition.
        dynamics: Transition X -> X.
        observe: Observation model X -> O.
        observations: Labels or vectors, one per step.
        tol: Support threshold.

    Returns:
        The beliefs after each step and the log-likelihood of the sequence.

    Raises:
        UnsupportedObservation: Carries the index of the offending step.
    """
    instance = instance_for(init.kind)
    beliefs = []
    log_likelihood = 0.0
    belief = init
    for step, obs in enumerate(observations):
        try:
            predictive = compose(compose(belief, dynamics), observe)
            belief = filter_step(belief, dynamics, observe, obs, tol)
        except UnsupportedObservation as e:
            logger.error(f"Filtering stopped at step {step}: {e}")
            raise UnsupportedObservation(str(e), step=step) from e
        log_likelihood += instance.log_predictive(predictive, obs)
        beliefs.append(belief)

    logger.info(f"Filtered {len(beliefs)} observations, log-likelihood {log_likelihood}")
    return beliefs, log_likelihood
