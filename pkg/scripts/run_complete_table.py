#!/usr/bin/env python3
"""Table of theta, theta-minus and theta-plus for K_n and Q_n over all cones."""

import argparse
import json

from nctheta import run_complete_graph_table

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=3)
    args = ap.parse_args()
    print(json.dumps(run_complete_graph_table(args.n_max).to_json(), indent=2))
