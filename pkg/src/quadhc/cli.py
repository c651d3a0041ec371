"""Command line entry points: planted-sweep, dataset-run, kernel-dump, replay."""

import argparse
import json
import sys

from .harness import (
    SweepConfig,
    dataset_run,
    kernel_dump,
    planted_sweep,
    replay_row,
)


def _load_config_file(path):
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            try:
                import tomli as tomllib
            except ImportError:
                raise SystemExit(
                    "TOML config requires Python 3.11+ or the tomli package"
                )
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


def _cmd_planted_sweep(args):
    base = {}
    if args.config:
        base = _load_config_file(args.config)
    overrides = {
        "n0": args.n0,
        "levels": args.levels,
        "mu": args.mu,
        "sigma": args.sigma,
        "delta_grid": _float_list(args.delta_grid) if args.delta_grid else None,
        "p_grid": _float_list(args.p_grid) if args.p_grid else None,
        "methods": tuple(args.methods.split(",")) if args.methods else None,
        "trials": args.trials,
        "eta": args.eta,
        "master_seed": args.master_seed,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    config = SweepConfig.from_dict(base)

    def progress(row):
        print(
            f"[{row['status']}] {row['method']} delta={row['delta']} "
            f"p={row['p']} trial={row['trial']} "
            f"aari={row['metric_value']} ({row['elapsed_s']}s)",
            flush=True,
        )

    manifest = planted_sweep(config, progress=progress if args.verbose else None)
    manifest.save(args.out, svg=args.svg)
    failed = [r for r in manifest.rows if r["status"] != "ok"]
    print(f"wrote {args.out}: {len(manifest.rows)} rows, {len(failed)} failed")
    return 1 if failed else 0


def _cmd_dataset_run(args):
    manifest = dataset_run(
        features_csv=args.features,
        quadruplets_csv=args.quadruplets,
        triplets_csv=args.triplets,
        p_grid=_float_list(args.p_grid),
        methods=tuple(args.methods.split(",")),
        trials=args.trials,
        master_seed=args.master_seed,
        outdir=args.out,
        warn=lambda msg: print(f"warning: {msg}", file=sys.stderr),
    )
    manifest.save(args.out, svg=args.svg)
    failed = [r for r in manifest.rows if r["status"] != "ok"]
    print(f"wrote {args.out}: {len(manifest.rows)} rows, {len(failed)} failed")
    return 1 if failed else 0


def _cmd_kernel_dump(args):
    kern, queries = kernel_dump(
        mode=args.mode,
        out_path=args.out,
        matrix_csv=args.matrix,
        quadruplets_csv=args.quadruplets,
        n_items=args.n_items,
        q=args.q,
        num_references=args.num_references,
        seed=args.seed,
    )
    note = f", queries_used={queries}" if queries is not None else ""
    print(f"wrote {args.out}: {kern.n}x{kern.n} kernel{note}")
    return 0


def _cmd_replay(args):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    row = replay_row(
        manifest["config"], args.method, args.delta_index, args.p_index, args.trial
    )
    print(json.dumps(row, indent=2, sort_keys=True))
    if args.expect is not None:
        got = float(row["metric_value"])
        want = float(args.expect)
        if got != want:
            print(f"MISMATCH: replayed {got!r}, recorded {want!r}")
            return 1
        print("replay matches recorded value exactly")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="quadhc",
        description="Comparison-based hierarchical clustering experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("planted-sweep", help="Monte Carlo sweep on the planted model")
    ps.add_argument("--config", help="TOML or JSON config file")
    ps.add_argument("--n0", type=int)
    ps.add_argument("--levels", type=int)
    ps.add_argument("--mu", type=float)
    ps.add_argument("--sigma", type=float)
    ps.add_argument("--delta-grid", dest="delta_grid", help="comma-separated")
    ps.add_argument("--p-grid", dest="p_grid", help="comma-separated")
    ps.add_argument("--methods", help="comma-separated method names")
    ps.add_argument("--trials", type=int)
    ps.add_argument("--eta", type=float)
    ps.add_argument("--master-seed", dest="master_seed", type=int)
    ps.add_argument("--out", required=True)
    ps.add_argument("--svg", action="store_true", help="emit charts")
    ps.add_argument("--verbose", action="store_true")
    ps.set_defaults(func=_cmd_planted_sweep)

    ds = sub.add_parser("dataset-run", help="cluster a dataset from features or comparisons")
    src = ds.add_mutually_exclusive_group(required=True)
    src.add_argument("--features", help="feature CSV, one row per item")
    src.add_argument("--quadruplets", help="comparison CSV with header i,j,k,l")
    src.add_argument("--triplets", help="comparison CSV with header i,j,k")
    ds.add_argument("--p-grid", dest="p_grid", default="0.1")
    ds.add_argument("--methods", default="4K-AL,4-AL,SL,CL")
    ds.add_argument("--trials", type=int, default=1)
    ds.add_argument("--master-seed", dest="master_seed", type=int, default=0)
    ds.add_argument("--out", required=True)
    ds.add_argument("--svg", action="store_true")
    ds.set_defaults(func=_cmd_dataset_run)

    kd = sub.add_parser("kernel-dump", help="write one kernel matrix as CSV")
    kd.add_argument("--mode", choices=("active", "passive"), required=True)
    kd.add_argument("--matrix", help="similarity matrix CSV (active mode)")
    kd.add_argument("--quadruplets", help="comparison CSV (passive mode)")
    kd.add_argument("--n-items", dest="n_items", type=int)
    kd.add_argument("--q", type=float, default=0.5)
    kd.add_argument("--num-references", dest="num_references", type=int, default=1)
    kd.add_argument("--seed", type=int, default=0)
    kd.add_argument("--out", required=True)
    kd.set_defaults(func=_cmd_kernel_dump)

    rp = sub.add_parser("replay", help="re-run one recorded sweep row")
    rp.add_argument("--manifest", required=True)
    rp.add_argument("--method", required=True)
    rp.add_argument("--delta-index", dest="delta_index", type=int, required=True)
    rp.add_argument("--p-index", dest="p_index", type=int, required=True)
    rp.add_argument("--trial", type=int, required=True)
    rp.add_argument("--expect", help="recorded metric value to verify against")
    rp.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
