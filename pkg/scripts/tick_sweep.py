"""Calls to TICK until timeout: simulated mean against 2^p (2^p + 1)."""
import argparse
import csv
import statistics
import sys

from ipsim.transforms.tick import expected_ticks, simulate_ticks


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-p", type=int, default=5)
    ap.add_argument("--runs", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args(argv)
    writer = csv.writer(sys.stdout)
    writer.writerow(["p", "runs", "mean", "stdev", "exact_mean"])
    for p in range(1, args.max_p + 1):
        runs = simulate_ticks(p, args.seed, args.runs)
        writer.writerow([p, args.runs, statistics.fmean(runs), statistics.stdev(runs), expected_ticks(p)])


if __name__ == "__main__":
    main()
