"""laws: run the law catalogue on a seeded case stream."""

import argparse
import logging

from bayeslens.cli.common import emit
from bayeslens.core.config import settings
from bayeslens.services.case_generator import CaseGen
from bayeslens.services.law_service import run_all

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("laws", parents=parents, help="run the randomised law suite")
    parser.add_argument("--seed", type=int, default=settings.LAW_SEED)
    parser.add_argument("--cases", type=int, default=settings.LAW_CASES)
    parser.add_argument("--max-dim", type=int, default=settings.LAW_MAX_DIM)
    parser.add_argument("--sparsity", type=float, default=settings.LAW_SPARSITY)
    parser.add_argument("--instance", choices=["finite", "gaussian", "both"], default="both")
    parser.add_argument("--law", action="append", help="law to run (repeatable; default: all)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    gen = CaseGen(
        seed=args.seed,
        cases=args.cases,
        max_dim=args.max_dim,
        sparsity=args.sparsity,
        instance_mix=args.instance,
    )
    # --tol overrides the per-law tolerances only when given
    reports = run_all(gen, tol=args.tol, names=args.law)
    passed = all(report.passed for report in reports)
    logger.info(f"{sum(r.passed for r in reports)} of {len(reports)} laws passed")
    emit({"objects": {}, "reports": reports, "passed": passed}, args)
    return 0 if passed else 1
