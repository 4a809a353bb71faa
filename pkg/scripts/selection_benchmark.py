"""Node counts and agreement of the selection strategies on synthetic instances."""

import argparse
import time

import numpy as np

from krselect.metrics import Line
from krselect.select import Criterion, SelectionProblem, branch_and_bound, exhaustive_search, sequential_search
from krselect.synth import selection_instance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=30)
    ap.add_argument("--r", type=int, default=12)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    stats = {"bb_nodes": [], "ex_nodes": [], "fwd_hit": 0, "bwd_hit": 0, "bb_exact": 0}
    t0 = time.perf_counter()
    for _ in range(args.instances):
        X, y = selection_instance(rng, args.r, args.n)
        P = SelectionProblem(X, y, (Line(),) * args.r, args.k)
        J = Criterion(P)
        bb, ex = branch_and_bound(P, J), exhaustive_search(P, J)
        stats["bb_nodes"].append(bb.nodes_evaluated)
        stats["ex_nodes"].append(ex.nodes_evaluated)
        stats["bb_exact"] += bb.j_value == ex.j_value
        stats["fwd_hit"] += sequential_search(P, "forward", J).j_value == ex.j_value
        stats["bwd_hit"] += sequential_search(P, "backward", J).j_value == ex.j_value
    m = args.instances
    print(f"r={args.r} k={args.k} n={args.n} instances={m} ({time.perf_counter() - t0:.1f}s)")
    print(f"exhaustive nodes: {np.mean(stats['ex_nodes']):.0f}")
    print(f"B&B nodes: mean {np.mean(stats['bb_nodes']):.1f}, max {max(stats['bb_nodes'])}")
    print(f"B&B optimal: {stats['bb_exact']}/{m}; forward optimal: {stats['fwd_hit']}/{m}; backward optimal: {stats['bwd_hit']}/{m}")


if __name__ == "__main__":
    main()
