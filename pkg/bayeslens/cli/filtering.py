"""filter: forward filtering of an observation sequence."""

import argparse

from bayeslens.cli.common import emit, object_name, require_model, tolerance
from bayeslens.core.errors import ModelValidationError, ValidationReason
from bayeslens.services.filter_service import filter_sequence
from bayeslens.services.model_service import Fragment, read_json


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("filter", parents=parents, help="filter observations through an HMM")
    parser.add_argument("--dynamics", required=True, help="transition morphism X -> X")
    parser.add_argument("--observe", required=True, help="observation morphism X -> O")
    parser.add_argument("--init", required=True, help="initial belief on X")
    parser.add_argument("--obs-file", required=True, help="JSON array of labels or vectors")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = require_model(args)
    dynamics, observe = model.morphism(args.dynamics), model.morphism(args.observe)
    init = model.state(args.init)
    observations = read_json(args.obs_file)
    if not isinstance(observations, list):
        raise ModelValidationError(
            [ValidationReason(code="OBSERVATIONS", msg=f"{args.obs_file} must hold a JSON array")]
        )

    beliefs, log_likelihood = filter_sequence(init, dynamics, observe, observations, tolerance(args))

    fragment = Fragment()
    hint = object_name(model, init.cod, "X")
    names = []
    for step, belief in enumerate(beliefs, start=1):
        names.append(f"belief_{step}")
        fragment.add_state(names[-1], belief, hint)
    emit(fragment.to_dict(beliefs=names, log_likelihood=log_likelihood), args)
    return 0
