"""``linkburst`` command line."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import SUBCOMMANDS, ConfigError, RunConfig
from .pipeline import StageError, error_record, run


def build_parser():
    p = argparse.ArgumentParser(prog="linkburst", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)
    d = RunConfig()
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        if name != "synth":
            sp.add_argument("input", help="edge list: src, dst, ts per line (tab or comma)")
            sp.add_argument("--format", dest="fmt", default=d.fmt,
                            choices=["auto", "tab", "comma"])
        sp.add_argument("--out", default=d.out, help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=d.threads)
        if name == "synth":
            sp.add_argument("--nodes", dest="synth_nodes", type=int, default=d.synth_nodes)
            sp.add_argument("--events", dest="synth_events", type=int, default=None,
                            help="keep only the earliest EVENTS edges")
            sp.add_argument("--sink-nodes", dest="synth_sink_nodes", type=int, default=0,
                            help="pair events with a pool of throwaway partner nodes")
            continue
        sp.add_argument("--dt-seconds", type=int, default=d.dt_seconds)
        sp.add_argument("--theta1", type=float, default=d.theta1)
        sp.add_argument("--theta2", type=float, default=d.theta2)
        sp.add_argument("--min-degree", type=int, default=d.min_degree)
        sp.add_argument("--alpha-bin", type=float, default=d.alpha_bin)
        sp.add_argument("--degree-bin", type=int, default=d.degree_bin)
        sp.add_argument("--bootstrap", dest="n_bootstrap", type=int, default=d.n_bootstrap)
        sp.add_argument("--bootstrap-nodes", type=int, default=None,
                        help="bootstrap only the N lowest-id fitted nodes")
        sp.add_argument("--ks-level", type=float, default=d.ks_level)
    return p


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    subcommand = args.pop("subcommand")
    out = args.get("out", "out")
    try:
        cfg = RunConfig(**args)
        manifest = run(subcommand, cfg)
    except (ConfigError, StageError) as e:
        rec = error_record(e, subcommand)
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "error.json").write_text(json.dumps(rec, indent=2) + "\n")
        except OSError:
            pass
        print(json.dumps(rec), file=sys.stderr)
        return 2 if isinstance(e, ConfigError) else 1
    for w in manifest["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    print(f"{subcommand}: wrote {len(manifest['outputs'])} files to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
