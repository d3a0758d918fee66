"""Print the scenario census for 4..N vertices under both filter modes."""
import argparse
import time

from ctxgraph.graphs import FILTER_MODES, census, enumerate_scenarios


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    for mode in FILTER_MODES:
        t0 = time.perf_counter()
        records = enumerate_scenarios(args.max_n, mode)
        counts = census(records)
        print(f"filter={mode:8s} total={len(records):3d} "
              + " ".join(f"{k}={v}" for k, v in counts.items())
              + f"  ({time.perf_counter() - t0:.2f} s)")
        for n in range(4, args.max_n + 1):
            by_n = census(r for r in records if r.graph.n == n)
            print(f"    n={n}: " + " ".join(f"{k}={v}" for k, v in by_n.items()))


if __name__ == "__main__":
    main()
