"""Mean runtime of the random-walk clock against its closed form, written as CSV."""
import argparse
import csv
import sys

from ipsim.harness import monte_carlo
from ipsim.provers import constant_prover
from ipsim.transforms.clock import ClockParams, build_poly_clock


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--c", type=int, default=1)
    ap.add_argument("--lengths", default="4:10")
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)
    lo, hi = map(int, args.lengths.split(":"))
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["t", "c", "n", "n0", "trials", "cutoff", "runtime_mean", "runtime_var", "closed_form"])
    for n in range(lo, hi + 1):
        params = ClockParams(args.t, args.c, n)
        expected = params.sweep_runtime(n) if args.t == 1 else params.expected_runtime(n)
        stats = monte_carlo(build_poly_clock(params), constant_prover("_"), "0" * n,
                            args.trials, 100 * int(expected) + 100, args.seed)
        row = stats.row()
        writer.writerow([args.t, args.c, n, n, args.trials, stats.cutoff,
                         row["runtime_mean"], row["runtime_var"], expected])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
