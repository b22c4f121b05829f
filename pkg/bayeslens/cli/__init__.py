"""Command-line interface: one module per subcommand."""

import argparse

from bayeslens import __version__
from bayeslens.cli import filtering, invert, laws, push, support

COMMANDS = [push, invert, support, laws, filtering]


def global_options(suppress: bool) -> argparse.ArgumentParser:
    """Options accepted before or after the subcommand name.

    Subparsers get SUPPRESS defaults so they do not overwrite values given
    before the subcommand.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--model", default=default(None), help="path to a JSON model file")
    options.add_argument(
        "--tol", type=float, default=default(None),
        help="numeric tolerance (default: BAYESLENS_TOLERANCE, 1e-9)",
    )
    options.add_argument("--output", choices=["json", "pretty"], default=default("json"))
    options.add_argument("--log-level", default=default(None), help="logging level (default: BAYESLENS_LOG_LEVEL)")
    return options


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayeslens",
        description="Dependent Bayesian lenses over finite and Gaussian Markov categories.",
        parents=[global_options(suppress=False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [global_options(suppress=True)]
    for command in COMMANDS:
        command.register(subparsers, parents)
    return parser
