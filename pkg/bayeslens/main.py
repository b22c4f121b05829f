"""Command-line entry point."""

import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from bayeslens.cli import build_parser
from bayeslens.core.config import settings
from bayeslens.core.errors import BayesLensError

logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, run the chosen subcommand and map failures to exit codes.

    Returns:
        0 on success, 1 when a law fails, otherwise the exit code of the
        raised error (2 validation, 3 signature, 4 empty support,
        5 unsupported observation)
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except BayesLensError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"{args.command} rejected input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
