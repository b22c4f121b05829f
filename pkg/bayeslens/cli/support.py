"""support: support object of a state with its section and retraction."""

import argparse

import numpy as np

from bayeslens.cli.common import emit, object_name, require_model, tolerance
from bayeslens.services.model_service import Fragment
from bayeslens.services.support_service import support_of


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("support", parents=parents, help="support of STATE")
    parser.add_argument("state")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = require_model(args)
    pi = model.state(args.state)
    support = support_of(pi, tolerance(args))

    fragment = Fragment()
    base = fragment.add_object(support.base, object_name(model, support.base, "X"))
    carrier = fragment.add_object(support.carrier, f"{base}_support")
    fragment.add_morphism("section", support.section, carrier, base)
    fragment.add_morphism("retraction", support.retraction, base, carrier)

    extra = {"carrier": carrier}
    if pi.kind == "finite":
        extra["carrier_indices"] = np.argmax(support.section.rows, axis=1)
    emit(fragment.to_dict(**extra), args)
    return 0
