#!/usr/bin/env python3
"""Seeded sweep of randomized cross-checks between the data and model routes.

Alternates references that are implementable by construction with
adversarial ones, runs the implementability decision both from trajectories
and from the state-space oracles, synthesizes the controller on positives,
and verifies the closed loop.  Equivalent to `canonctrl proptest` but handy
for scripted parameter studies.
"""

import argparse
import json
import sys
import time

from canonctrl.harness import HarnessConfig, run_batch
from canonctrl.subspace import RankTolerance


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=100)
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument("--q-w-max", type=int, default=2)
    parser.add_argument("--q-c-max", type=int, default=2)
    parser.add_argument("--n-max", type=int, default=3)
    parser.add_argument("--rank-tol", type=float, default=1e-10)
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    args = parser.parse_args()

    cfg = HarnessConfig(
        q_w_max=args.q_w_max,
        q_c_max=args.q_c_max,
        n_max=args.n_max,
        rank_tol=RankTolerance(args.rank_tol),
    )
    t0 = time.time()
    report = run_batch(args.cases, args.base_seed, cfg)
    report["base_seed"] = args.base_seed
    report["elapsed_s"] = round(time.time() - t0, 2)
    payload = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(payload + "\n")
        print(f"report written to {args.out}", file=sys.stderr)
    else:
        print(payload)
    return 0 if not report["failures"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
