"""Run the wigner-reconstruct command line: ``python src/main.py <subcommand> ...``."""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
