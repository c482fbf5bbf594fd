#!/usr/bin/env python3
"""One-bit transmission bound for the non-maximally-entangled channel family.

Direct SDP for m <= 4; analytic scaling-lemma evaluation for larger m
(m = 26 is the case where the bound drops below 2).
"""

import argparse
import json

from nctheta import run_nonmaximal_channel

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=3)
    args = ap.parse_args()
    print(json.dumps(run_nonmaximal_channel(2, args.m).to_json(), indent=2))
