"""Full-scale timing run: 60k nodes, 8M events, full pipeline.

    python3 scripts/bench_full_scale.py --out /tmp/bench --seed 0
"""
import argparse
import json
import resource
import time
from pathlib import Path

from linkburst.config import RunConfig
from linkburst.pipeline import run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="bench_out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--nodes", type=int, default=60_000)
    ap.add_argument("--events", type=int, default=8_000_000)
    ap.add_argument("--bootstrap-nodes", type=int, default=200)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)

    t0 = time.perf_counter()
    run("synth", RunConfig(out=str(out / "synth"), seed=args.seed, synth_nodes=args.nodes,
                           synth_events=args.events))
    print(f"synth: {time.perf_counter() - t0:.1f} s")

    trace = str(out / "synth" / "trace.tsv")
    for sub in ("stats", "all"):
        t0 = time.perf_counter()
        m = run(sub, RunConfig(input=trace, out=str(out / sub), seed=args.seed,
                               bootstrap_nodes=args.bootstrap_nodes, threads=args.threads))
        print(f"{sub}: {time.perf_counter() - t0:.1f} s  stages {json.dumps(m['stage_seconds'])}")
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(f"peak rss: {peak:.0f} MB")


if __name__ == "__main__":
    main()
