#!/usr/bin/env python3
"""Three-state ensemble whose characteristic graph certifies one-way-LOCC
indistinguishability via theta-plus[ppt] = infinity."""

import json

from nctheta import run_locc1_example

if __name__ == "__main__":
    print(json.dumps(run_locc1_example().to_json(), indent=2))
