"""Mean S as a function of churn rate, averaged over seeds."""

import argparse
from statistics import fmean, stdev

from teamstability.experiments import mean_stability
from teamstability.synth import TeamingPolicy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--steps", type=int, default=11)
    args = ap.parse_args()

    print("churn_rate,mean_S,sd_S")
    for k in range(args.steps):
        rate = k / (args.steps - 1)
        vals = [
            mean_stability(TeamingPolicy("churn", args.n, args.m, (3, 5), churn_rate=rate, seed=s))
            for s in range(args.seeds)
        ]
        print(f"{rate:.2f},{fmean(vals):.4f},{stdev(vals):.4f}")


if __name__ == "__main__":
    main()
