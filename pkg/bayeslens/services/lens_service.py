"""Dependent Bayesian charts and lenses, the sections T and S, and the oplaxator."""

import logging
from typing import Callable, Hashable, Optional, Tuple

from bayeslens.categories.markov import (
    MarkovObject,
    Morphism,
    State,
    compose,
    copy,
    delete,
    identity,
    instance_for,
    marginals,
    tensor,
    tensor_objects,
    with_signature,
)
from bayeslens.core.errors import InstanceMismatch, SignatureMismatch
from bayeslens.models.lens import Chart, ChartObject, IndexedFamily, Lens, memoize_on_state
from bayeslens.services.support_service import bayes_invert_supported, restrict, support_of

logger = logging.getLogger(__name__)


def support_family(obj: MarkovObject, tol: Optional[float] = None) -> IndexedFamily:
    """Family pi ↦ X_pi of support objects over obj."""
    return IndexedFamily(
        base=obj,
        assign=lambda pi: support_of(pi, tol).carrier,
        key=lambda pi: instance_for(pi.kind).fingerprint(pi, tol),
    )


def product_family(left: IndexedFamily, right: IndexedFamily) -> IndexedFamily:
    """Family pi ↦ A(pi_L) ⊗ B(pi_R) over the product of the two bases."""
    split = (left.base, right.base)

    def assign(pi: State) -> MarkovObject:
        pi_left, pi_right = marginals(pi, split)
        return tensor_objects(left.at(pi_left), right.at(pi_right))

    def key(pi: State) -> Hashable:
        pi_left, pi_right = marginals(pi, split)
        return left.key_of(pi_left), right.key_of(pi_right)

    return IndexedFamily(base=tensor_objects(left.base, right.base), assign=assign, key=key)


def supported_object(obj: MarkovObject, tol: Optional[float] = None) -> ChartObject:
    """Image of obj under the sections: obj paired with its support family."""
    return ChartObject(forward=obj, fibre=support_family(obj, tol))


def tensor_chart_objects(left: ChartObject, right: ChartObject) -> ChartObject:
    return ChartObject(
        forward=tensor_objects(left.forward, right.forward),
        fibre=product_family(left.fibre, right.fibre),
    )


def identity_chart(obj: ChartObject) -> Chart:
    return Chart(
        source=obj,
        target=obj,
        fwd=identity(obj.forward),
        fibre_fwd=lambda pi: identity(obj.fibre.at(pi)),
    )


def identity_lens(obj: ChartObject) -> Lens:
    return Lens(
        source=obj,
        target=obj,
        fwd=identity(obj.forward),
        bwd=lambda pi: identity(obj.fibre.at(pi)),
    )


def _check_composable(first: Morphism, second: Morphism) -> None:
    if first.kind != second.kind:
        raise InstanceMismatch(f"cannot compose {first.kind} with {second.kind}")
    if first.cod != second.dom:
        raise SignatureMismatch(f"forward maps do not chain: {first.cod!r} vs {second.dom!r}")


def compose_chart(c1: Chart, c2: Chart) -> Chart:
    """
    Compose charts: forward maps compose and fibre maps compose at pi and pi ⨟ f.

    Raises:
        SignatureMismatch: The forward maps do not chain, or the middle
            families disagree at an evaluated state.
    """
    _check_composable(c1.fwd, c2.fwd)

    def fibre_fwd(pi: State) -> Morphism:
        return compose(c1.at(pi), c2.at(compose(pi, c1.fwd)))

    return Chart(source=c1.source, target=c2.target, fwd=compose(c1.fwd, c2.fwd), fibre_fwd=fibre_fwd)


def compose_lens(l1: Lens, l2: Lens) -> Lens:
    """
    Compose lenses: bwd(pi) = l2.bwd(pi ⨟ f) ⨟ l1.bwd(pi).

    Raises:
        SignatureMismatch: The forward maps do not chain, or the middle
            families disagree at an evaluated state.
    """
    _check_composable(l1.fwd, l2.fwd)

    def bwd(pi: State) -> Morphism:
        return compose(l2.at(compose(pi, l1.fwd)), l1.at(pi))

    return Lens(source=l1.source, target=l2.target, fwd=compose(l1.fwd, l2.fwd), bwd=bwd)


def section_t(f: Morphism, tol: Optional[float] = None) -> Chart:
    """
    The section T: supports on objects, restrictions on morphisms.

    Args:
        f: Morphism X -> Y.
        tol: Support threshold.

    Returns:
        Chart from (X, pi ↦ X_pi) to (Y, rho ↦ Y_rho) with fibre map restrict(f, pi).
    """
    return Chart(
        source=supported_object(f.dom, tol),
        target=supported_object(f.cod, tol),
        fwd=f,
        fibre_fwd=memoize_on_state(lambda pi: restrict(f, pi, tol)),
    )


def section_s(f: Morphism, tol: Optional[float] = None) -> Lens:
    """
    The section S: each morphism paired with its inverses between supports.

    Args:
        f: Morphism X -> Y.
        tol: Support threshold.

    Returns:
        Lens whose backward map at pi is bayes_invert_supported(f, pi).
    """
    return Lens(
        source=supported_object(f.dom, tol),
        target=supported_object(f.cod, tol),
        fwd=f,
        bwd=memoize_on_state(lambda pi: bayes_invert_supported(f, pi, tol)),
    )


def tensor_chart(c1: Chart, c2: Chart) -> Chart:
    """
    Monoidal product of charts; the fibre at pi is c1 at pi_L tensored with c2 at pi_R.

    Raises:
        InstanceMismatch: The charts live in different instances.
    """
    if c1.fwd.kind != c2.fwd.kind:
        raise InstanceMismatch(f"cannot tensor {c1.fwd.kind} chart with {c2.fwd.kind} chart")
    split = (c1.fwd.dom, c2.fwd.dom)

    def fibre_fwd(pi: State) -> Morphism:
        pi_left, pi_right = marginals(pi, split)
        return tensor(c1.at(pi_left), c2.at(pi_right))

    return Chart(
        source=tensor_chart_objects(c1.source, c2.source),
        target=tensor_chart_objects(c1.target, c2.target),
        fwd=tensor(c1.fwd, c2.fwd),
        fibre_fwd=fibre_fwd,
    )


def tensor_lens(l1: Lens, l2: Lens) -> Lens:
    """
    Monoidal product of lenses; the backward map at pi is l1 at pi_L tensored with l2 at pi_R.

    Raises:
        InstanceMismatch: The lenses live in different instances.
    """
    if l1.fwd.kind != l2.fwd.kind:
        raise InstanceMismatch(f"cannot tensor {l1.fwd.kind} lens with {l2.fwd.kind} lens")
    split = (l1.fwd.dom, l2.fwd.dom)

    def bwd(pi: State) -> Morphism:
        pi_left, pi_right = marginals(pi, split)
        return tensor(l1.at(pi_left), l2.at(pi_right))

    return Lens(
        source=tensor_chart_objects(l1.source, l2.source),
        target=tensor_chart_objects(l1.target, l2.target),
        fwd=tensor(l1.fwd, l2.fwd),
        bwd=bwd,
    )


def oplax_gamma(x: MarkovObject, y: MarkovObject, pi: State, tol: Optional[float] = None) -> Morphism:
    """
    Comparison map (X ⊗ Y)_pi -> X_{pi_L} ⊗ Y_{pi_R}, i.e. i_pi ⨟ (r_{pi_L} ⊗ r_{pi_R}).

    Raises:
        NotAProduct: The target of pi is not X ⊗ Y.
    """
    pi_left, pi_right = marginals(pi, (x, y))
    joint = support_of(pi, tol)
    projections = tensor(support_of(pi_left, tol).retraction, support_of(pi_right, tol).retraction)
    return compose(joint.section, projections)


def stat_lens(
    f: Morphism,
    source_fibre: MarkovObject,
    target_fibre: MarkovObject,
    bwd: Callable[[State], Morphism],
) -> Lens:
    """
    Embed a non-dependent lens as a dependent one with constant families.

    Args:
        f: Forward morphism X -> Y.
        source_fibre: Fixed fibre S over X.
        target_fibre: Fixed fibre R over Y.
        bwd: Backward map pi ↦ (R -> S).
    """
    return Lens(
        source=ChartObject(forward=f.dom, fibre=IndexedFamily.constant_family(f.dom, source_fibre)),
        target=ChartObject(forward=f.cod, fibre=IndexedFamily.constant_family(f.cod, target_fibre)),
        fwd=f,
        bwd=bwd,
    )


def left_projection(obj: MarkovObject) -> Morphism:
    """L = id ⊗ delete : X ⊗ X -> X."""
    product = tensor_objects(obj, obj)
    return with_signature(tensor(identity(obj), delete(obj)), product, obj)


def copy_inverse_iso(pi: State, tol: Optional[float] = None) -> Tuple[Morphism, Morphism]:
    """
    Isomorphism (X ⊗ X)_{pi ⨟ copy} ≅ X_pi given by inverting copy.

    Args:
        pi: State on X.
        tol: Support threshold.

    Returns:
        (C♯_pi, L♯_{pi ⨟ C}) where C♯_pi: (X ⊗ X)_{pi ⨟ C} -> X_pi and
        L♯_{pi ⨟ C}: X_{pi ⨟ C ⨟ L} -> (X ⊗ X)_{pi ⨟ C}.
    """
    obj = pi.cod
    duplicate = copy(obj)
    copy_sharp = bayes_invert_supported(duplicate, pi, tol)
    left_sharp = bayes_invert_supported(left_projection(obj), compose(pi, duplicate), tol)
    return copy_sharp, left_sharp


def comonoid_charts(obj: MarkovObject, tol: Optional[float] = None) -> Tuple[Chart, Chart]:
    """
    Comultiplication and counit charts on T(obj).

    The comultiplication fibre at pi is restrict(copy, pi) followed by the
    oplaxator at pi ⨟ copy; the counit fibre is restrict(delete, pi).
    """
    duplicate = copy(obj)
    source = supported_object(obj, tol)
    unit = delete(obj).cod

    def comult_fibre(pi: State) -> Morphism:
        return compose(restrict(duplicate, pi, tol), oplax_gamma(obj, obj, compose(pi, duplicate), tol))

    comult = Chart(
        source=source,
        target=tensor_chart_objects(supported_object(obj, tol), supported_object(obj, tol)),
        fwd=duplicate,
        fibre_fwd=comult_fibre,
    )
    counit = Chart(
        source=source,
        target=supported_object(unit, tol),
        fwd=delete(obj),
        fibre_fwd=lambda pi: restrict(delete(obj), pi, tol),
    )
    return comult, counit


def lax_mu(x: MarkovObject, y: MarkovObject, tol: Optional[float] = None) -> Lens:
    """
    Laxator S(X) ⊗ S(Y) -> S(X ⊗ Y): identity forward, oplaxator backward.
    """
    product = tensor_objects(x, y)

    return Lens(
        source=tensor_chart_objects(supported_object(x, tol), supported_object(y, tol)),
        target=supported_object(product, tol),
        fwd=identity(product),
        bwd=lambda pi: oplax_gamma(x, y, pi, tol),
    )
