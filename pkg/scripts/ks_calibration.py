"""Rejection rate of the bootstrap K-S test on nodes drawn from the fitted model.

    python3 scripts/ks_calibration.py --nodes 200 --bootstrap 1000
"""
import argparse
import time

import numpy as np

from linkburst.interevent import InterEventConfig, fit_population
from linkburst.synth import NodeGroup, SynthConfig, gen_trace
from linkburst.trace import build_node_series


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=200)
    ap.add_argument("--bootstrap", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    half = args.nodes // 2
    cfg = SynthConfig(groups=(NodeGroup("poisson", half, rate=1 / 9.0e4),
                              NodeGroup("bursty", args.nodes - half, alpha=1.0, lambda_s=1e6)),
                      seed=args.seed, horizon_weeks=52, sink_nodes=500 * args.nodes)
    tr, _ = gen_trace(cfg)
    t0 = time.perf_counter()
    icfg = InterEventConfig(n_bootstrap=args.bootstrap, threads=args.threads)
    pop = fit_population(tr, build_node_series(tr), icfg, seed=args.seed)
    dt = time.perf_counter() - t0
    poisson = pop.node < half
    for name, mask in (("poisson", poisson), ("bursty", ~poisson), ("all", np.ones_like(poisson))):
        for level in (0.05, 0.1, 0.2):
            print(f"{name:8s} level {level:.2f}: rejected {(pop.ks_p[mask] < level).mean():.3f}")
    print(f"{pop.node.size} nodes, {dt:.1f} s")


if __name__ == "__main__":
    main()
