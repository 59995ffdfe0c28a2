"""Command line: ``gsatlab gen|run|analyze|report``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .campaign import CampaignConfig, Store, StoreError, default_output_dir, run_campaign
from .cnf import emit_dimacs, generate_random_ksat
from .report import REPORTS, MissingCampaignError, analyze, report


def _campaign_args(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=500, help="number of variables")
    p.add_argument("--ratio", type=float, default=4.3, help="clauses per variable")
    p.add_argument("--clauses", type=int, default=None, help="explicit clause count (overrides --ratio)")
    p.add_argument("--k", type=int, default=3, help="literals per clause")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", type=Path, default=None, help="output path (default: $GSATLAB_OUT/<name>)")


def _config(a, **over) -> CampaignConfig:
    return CampaignConfig(
        num_vars=a.n, ratio=a.ratio, k=a.k, clause_count=a.clauses, master_seed=a.seed,
        problems=getattr(a, "problems", 1), tries=getattr(a, "tries", 1),
        max_flips=getattr(a, "max_flips", None), horizon=getattr(a, "horizon", None),
        workers=getattr(a, "workers", 1), **over,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsatlab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit one random k-SAT problem as DIMACS")
    _campaign_args(g)
    g.add_argument("--index", type=int, default=0, help="problem index within the campaign seed space")

    r = sub.add_parser("run", help="run a campaign into a store")
    _campaign_args(r)
    r.add_argument("--problems", type=int, default=500)
    r.add_argument("--tries", type=int, default=10)
    r.add_argument("--max-flips", type=int, default=None, help="default 2.5 N")
    r.add_argument("--horizon", type=int, default=None, help="curve horizon (default max-flips)")
    r.add_argument("--workers", type=int, default=1)

    an = sub.add_parser("analyze", help="write curves/phases/fits CSV for a store")
    an.add_argument("--out", type=Path, required=True, help="store directory")

    rp = sub.add_parser("report", help="reproduce a named figure or table")
    rp.add_argument("which", choices=REPORTS)
    rp.add_argument("--out", type=Path, required=True, help="primary store directory")
    rp.add_argument("--store", type=Path, action="append", default=[], help="additional store (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "gen":
            cfg = _config(args)
            text = emit_dimacs(generate_random_ksat(cfg.problem_spec(args.index)))
            if args.out is None:
                sys.stdout.write(text)
            else:
                args.out.write_text(text)
        elif args.command == "run":
            cfg = _config(args)
            out = args.out or default_output_dir(cfg)
            run_campaign(cfg, out)
            print(out)
        elif args.command == "analyze":
            store = Store(args.out)
            for name, text in analyze(store).items():
                (store.path / "reports" / name).parent.mkdir(parents=True, exist_ok=True)
                (store.path / "reports" / name).write_text(text)
                print(store.path / "reports" / name)
        elif args.command == "report":
            paths = [args.out, *args.store]
            missing = [str(p) for p in paths if not (p / "manifest.json").exists()]
            if missing:
                raise MissingCampaignError(f"missing campaigns: {', '.join(missing)}")
            stores = [Store(p) for p in paths]
            files = report(stores, args.which, stores[0].path / "reports")
            for name, text in files.items():
                print(f"== {name}")
                print(text, end="")
    except (StoreError, MissingCampaignError, ValueError, OSError) as e:
        print(f"gsatlab: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
