#!/usr/bin/env python3
"""
Entry point for the polariton sweep tool.

    cmd/sweep/main.py run config.json fig13 out/
    cmd/sweep/main.py validate config.json
    cmd/sweep/main.py list-presets
"""

import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
