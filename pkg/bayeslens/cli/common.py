"""Helpers shared by the subcommands."""

import argparse
import sys
from typing import Any, Dict

from bayeslens.categories.markov import MarkovObject
from bayeslens.core.config import settings
from bayeslens.core.errors import ModelValidationError, ValidationReason
from bayeslens.services.model_service import LoadedModel, load_model
from bayeslens.utils.json_codec import dumps


def require_model(args: argparse.Namespace) -> LoadedModel:
    if not args.model:
        raise ModelValidationError([ValidationReason(code="MISSING_MODEL", msg=f"{args.command} needs --model")])
    return load_model(args.model)


def tolerance(args: argparse.Namespace) -> float:
    return settings.TOLERANCE if args.tol is None else args.tol


def object_name(model: LoadedModel, obj: MarkovObject, fallback: str) -> str:
    """Name of obj in the model, or fallback when it is not declared there."""
    for name, declared in model.objects.items():
        if declared == obj:
            return name
    return fallback


def emit(data: Dict[str, Any], args: argparse.Namespace) -> None:
    sys.stdout.write(dumps(data, pretty=args.output == "pretty") + "\n")
