"""AIC selection rates vs number of gaps per node.

Poisson nodes should pick the exponential, bursty nodes the cutoff power law.
Prints one row per sample size:

    python3 scripts/selection_power.py --nodes 500 --sizes 30 60 120 350 1000
"""
import argparse

import numpy as np

from linkburst.interevent import InterEventSample, fit_samples
from linkburst.synth import node_rng, sample_cutoff_gaps


def rates(n_gaps, nodes, seed):
    rng = np.random.default_rng(seed)
    poisson = [InterEventSample(i, np.maximum(rng.exponential(9e4, n_gaps).round(), 1.0),
                                n_gaps + 1, 0) for i in range(nodes)]
    bursty = [InterEventSample(nodes + i, np.maximum(
        sample_cutoff_gaps(node_rng(seed, i), n_gaps, 1.0, 1e6, 1.0).round(), 1.0), n_gaps + 1, 0)
        for i in range(nodes)]
    sel = fit_samples(poisson + bursty).pareto_selected
    return 1 - sel[:nodes].mean(), sel[nodes:].mean()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=500)
    ap.add_argument("--sizes", type=int, nargs="+", default=[30, 60, 120, 350, 1000, 3000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("n_gaps,poisson_exponential,bursty_pareto")
    for n in args.sizes:
        e, p = rates(n, args.nodes, args.seed)
        print(f"{n},{e:.3f},{p:.3f}")


if __name__ == "__main__":
    main()
