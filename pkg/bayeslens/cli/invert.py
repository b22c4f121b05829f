"""invert: Bayesian inverse of a morphism at a prior, optionally between supports."""

import argparse
import logging

from bayeslens.cli.common import emit, object_name, require_model, tolerance
from bayeslens.services.model_service import Fragment
from bayeslens.services.support_service import bayes_invert, inversion_context, to_supported

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("invert", parents=parents, help="Bayesian inverse of MORPHISM at STATE")
    parser.add_argument("state")
    parser.add_argument("morphism")
    parser.add_argument(
        "--supported", action="store_true",
        help="type the inverse between supports and print the support maps",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = require_model(args)
    pi, f = model.state(args.state), model.morphism(args.morphism)
    tol = tolerance(args)
    dom_name = object_name(model, f.dom, "X")
    cod_name = object_name(model, f.cod, "Y")

    logger.info(f"Inverting {args.morphism} at {args.state} (supported={args.supported}, tol={tol})")
    inverse = bayes_invert(f, pi, tol)
    fragment = Fragment()
    if not args.supported:
        fragment.add_morphism("inverse", inverse, cod_name, dom_name)
        emit(fragment.to_dict(), args)
        return 0

    ctx = inversion_context(f, pi, tol)
    supported = to_supported(inverse, ctx)
    prior_support, pushforward_support = ctx.prior_support, ctx.pushforward_support
    # declare base objects first so equal carriers reuse their names
    fragment.add_object(f.dom, dom_name)
    fragment.add_object(f.cod, cod_name)
    fragment.add_morphism("inverse", supported, f"{cod_name}_support", f"{dom_name}_support")
    fragment.add_morphism("prior_section", prior_support.section, f"{dom_name}_support", dom_name)
    fragment.add_morphism("prior_retraction", prior_support.retraction, dom_name, f"{dom_name}_support")
    fragment.add_morphism("pushforward_section", pushforward_support.section, f"{cod_name}_support", cod_name)
    fragment.add_morphism("pushforward_retraction", pushforward_support.retraction, cod_name, f"{cod_name}_support")
    emit(fragment.to_dict(), args)
    return 0
