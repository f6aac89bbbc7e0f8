"""Main application entry point."""

import os
import sys

from src.core.logger import logger


def run():
    """Entry point for the ``corplex`` script."""
    from src.cli import main

    logger.debug(f"[Startup] corplex {' '.join(sys.argv[1:])}")
    main()


if __name__ == "__main__":
    sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    run()
