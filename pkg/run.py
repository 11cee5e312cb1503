#!/usr/bin/env python3
"""
Stable Match Lab: Entry Point

`python run.py <command> ...`; `python run.py serve` starts the HTTP API.
"""

import sys

from dotenv import load_dotenv

# ---------------------------------------------------------
# Load Environment Variables
# ---------------------------------------------------------
load_dotenv()

from app.cli.main import main  # noqa: E402  (settings are read at import)


if __name__ == "__main__":
    sys.exit(main())
