#!/usr/bin/env python3
"""Extreme gap on the one-dimensional graph C*diag(d-1, -1, ..., -1)."""

import argparse
import json

from nctheta import run_delta_example

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=3)
    args = ap.parse_args()
    print(json.dumps(run_delta_example(args.d).to_json(), indent=2))
