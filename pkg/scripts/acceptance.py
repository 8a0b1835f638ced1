#!/usr/bin/env python3
"""Run the acceptance suite, streaming one PASS/FAIL line per criterion."""

import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    suite = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    sys.exit(pytest.main(["-q", "-s", str(suite), *sys.argv[1:]]))
