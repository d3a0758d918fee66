"""Search evidence for the even-cycle layout: how far the 6-cycle witness gets in d=4.

The 6-cycle witness has classical bound 4 and quantum value 6 cos(pi/6).
This runs the see-saw in a single d-dimensional register for a list of d and
prints the best value found, together with the smallest commutator norm over
the non-edges of the optimizer. The see-saw only enforces the edges, so a
near-zero entry means the optimizer's compatibility graph has extra edges and
is not the cycle.
"""
import argparse
import itertools

import numpy as np

from ctxgraph.graphs import cycle_graph
from ctxgraph.marginals import OutcomeSpace
from ctxgraph.polytope import ncycle_quantum_value, ncycle_witness
from ctxgraph.quantum import IdealMeasurement, commutator_norm
from ctxgraph.seesaw import seesaw_max


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--dims", default="4,5,6")
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.n
    w = ncycle_witness(range(n), OutcomeSpace.uniform(n))
    print(f"n={n}: classical bound {n - 2}, quantum value {ncycle_quantum_value(n):.6f}")
    for d in map(int, args.dims.split(",")):
        res = seesaw_max(w, cycle_graph(n), d, restarts=args.restarts, seed=args.seed)
        ms = [IdealMeasurement.from_dense(p) for p in res.projectors]
        non_edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if (j - i) % n not in (1, n - 1)]
        norms = {e: commutator_norm(ms[e[0]], ms[e[1]]) for e in non_edges}
        worst = min(norms, key=norms.get)
        print(f"  d={d}: best {res.value:.6f}  restarts min/median {min(res.restarts):.4f}/"
              f"{np.median(res.restarts):.4f}  smallest non-edge commutator {norms[worst]:.1e} at {worst}")


if __name__ == "__main__":
    main()
