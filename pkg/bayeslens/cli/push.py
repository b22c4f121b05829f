"""push: pushforward of a state along a morphism."""

import argparse
import logging

from bayeslens.categories.markov import compose
from bayeslens.cli.common import emit, object_name, require_model
from bayeslens.services.model_service import Fragment

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("push", parents=parents, help="print STATE ⨟ MORPHISM")
    parser.add_argument("state")
    parser.add_argument("morphism")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = require_model(args)
    pi, f = model.state(args.state), model.morphism(args.morphism)
    logger.info(f"Pushing {args.state} through {args.morphism}")
    result = compose(pi, f)

    fragment = Fragment()
    fragment.add_state(f"{args.state}_{args.morphism}", result, object_name(model, result.cod, "Y"))
    emit(fragment.to_dict(), args)
    return 0
