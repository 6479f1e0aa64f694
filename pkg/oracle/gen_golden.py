#!/usr/bin/env python3
"""Regenerate the golden tables in this directory.

Usage: python oracle/gen_golden.py [outdir]
Equivalent to `fasris oracle gen --out oracle`.  Regeneration is
deterministic and must reproduce the committed CSVs byte for byte.
"""

import sys

from fasris.oraclegen import generate_all

if __name__ == "__main__":
    generate_all(sys.argv[1] if len(sys.argv) > 1 else "oracle")
