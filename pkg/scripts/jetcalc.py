#!/usr/bin/env python3
"""
Thin wrapper so the CLI can be run from a checkout without installing
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.cli import main

if __name__ == "__main__":
    main()
