#!/usr/bin/env python3
"""Random-subspace survey of theta-minus[ppt] and theta-plus[ppt]."""

import argparse
import json

from nctheta import run_random_survey

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--subspace-dim", type=int, default=4)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    rep = run_random_survey(dim=args.dim, subspace_dim=args.subspace_dim,
                            count=args.count, seed=args.seed, jobs=args.jobs)
    print(json.dumps(rep.to_json(), indent=2))
