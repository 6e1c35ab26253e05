#!/usr/bin/env python3
"""
genlame - Main entry point.

Command-line toolkit for the generalized Jacobi functions and the
generalized Lamé equation.
"""

import logging
import sys

from src.cli.cli_runner import run
from src.utils.logger import get_logger, setup_logging


def main():
    """Main application entry point."""
    # Console level is raised or lowered by --log-level once arguments are parsed
    setup_logging(log_level=logging.WARNING)
    logger = get_logger(__name__)

    exit_code = run(sys.argv[1:])
    logger.debug(f"Exiting with code: {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
