#!/usr/bin/env python3
"""Run the shipped end-to-end demo configuration."""

import sys
from pathlib import Path

from momentct.cli import main

if __name__ == "__main__":
    demo = Path(__file__).resolve().parents[1] / "configs" / "uniform_demo.ini"
    sys.exit(main(["pipeline", "-c", str(demo), *sys.argv[1:]]))
