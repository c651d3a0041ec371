"""Experiment orchestration: planted-model sweeps, dataset runs, kernel
dumps, and row replay.

Every random choice descends from (master_seed, grid indices, trial,
method) through a splitmix64 chain, so any recorded row can be rerun in
isolation and reproduces its metric bit for bit. Passive methods within one
(cell, trial) share a single comparison sample; active methods get fresh
oracles so their query counts stay per-method.
"""

import csv
import hashlib
import json
import math
import os
import platform
import time
from dataclasses import dataclass, field

import numpy as np

from .kernel import ActiveKernelConfig, active_kernel, average_linkage_on_kernel, passive_kernel
from .metrics import aari, cosine_similarity_matrix, dasgupta_cost
from .oracle import ActiveOracle, QuadrupletSet, ingest_triplets, read_triplets_csv, sample_passive
from .ordinal import complete_linkage, single_linkage
from .pairs import num_pairs
from .planted import PlantedConfig, SimilarityMatrix, generate_planted
from .quadlink import InitialPartitionConfig, four_al
from .svg import line_chart

SCHEMA_VERSION = 1
RESULTS_COLUMNS = [
    "method",
    "delta_index",
    "delta",
    "p_index",
    "p",
    "trial",
    "metric",
    "metric_value",
    "queries",
    "observed",
    "data_seed",
    "method_seed",
    "passive_seed",
    "elapsed_s",
    "status",
    "error",
]
SUMMARY_COLUMNS = [
    "method",
    "delta",
    "p",
    "metric",
    "mean",
    "std",
    "trials_ok",
    "trials_failed",
]

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64, state


def derive_seed(master_seed: int, *parts) -> int:
    """Stable seed derivation; parts may be ints or strings."""
    state = master_seed & _MASK64
    out = 0
    for part in parts:
        if isinstance(part, str):
            digest = hashlib.blake2b(part.encode(), digest_size=8).digest()
            value = int.from_bytes(digest, "little")
        else:
            value = int(part) & _MASK64
        state ^= (value * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03) & _MASK64
        out, state = _splitmix64(state)
    return out


def parse_method(name: str):
    """Return (kind, initial_m); 4-AL-I<m> encodes initial cluster size m."""
    if name in ("SL", "CL", "4K-AL", "4K-AL-act", "4-AL"):
        return name, 0
    if name.startswith("4-AL-I"):
        try:
            m = int(name[len("4-AL-I"):])
        except ValueError:
            raise ValueError(f"unknown method {name!r}") from None
        if m < 1:
            raise ValueError(f"initial cluster size in {name!r} must be >= 1")
        return "4-AL-I", m
    raise ValueError(f"unknown method {name!r}")


@dataclass(frozen=True)
class SweepConfig:
    n0: int
    levels: int
    mu: float
    sigma: float
    delta_grid: tuple
    p_grid: tuple
    methods: tuple
    trials: int
    eta: float = 0.25
    master_seed: int = 0

    def __post_init__(self):
        if not self.delta_grid or not self.p_grid:
            raise ValueError("delta and p grids must be non-empty")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        for m in self.methods:
            parse_method(m)
        for p in self.p_grid:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"sampling probability {p} outside [0, 1]")

    def to_dict(self):
        return {
            "n0": self.n0,
            "levels": self.levels,
            "mu": self.mu,
            "sigma": self.sigma,
            "delta_grid": list(self.delta_grid),
            "p_grid": list(self.p_grid),
            "methods": list(self.methods),
            "trials": self.trials,
            "eta": self.eta,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            n0=int(d["n0"]),
            levels=int(d["levels"]),
            mu=float(d["mu"]),
            sigma=float(d["sigma"]),
            delta_grid=tuple(float(x) for x in d["delta_grid"]),
            p_grid=tuple(float(x) for x in d["p_grid"]),
            methods=tuple(d["methods"]),
            trials=int(d["trials"]),
            eta=float(d.get("eta", 0.25)),
            master_seed=int(d.get("master_seed", 0)),
        )


def recovery_threshold(eta: float, trials: int) -> float:
    """Lower empirical-rate bound for a success probability of 1 - eta,
    two binomial standard deviations of slack."""
    return (1.0 - eta) - 2.0 * math.sqrt(eta * (1.0 - eta) / trials)


def active_reference_count(n: int, p: float, q: float) -> int:
    """Number of reference pairs matching the expected passive budget:
    round(E|observed| / (n * E|landmarks per reference|)), at least 1.
    References repeat freely (each carries a fresh landmark set), so the
    count is not limited by the number of distinct pairs."""
    expected_q = p * num_pairs(num_pairs(n))
    expected_s = q * n
    return max(1, round(expected_q / (n * expected_s)))


@dataclass
class RunManifest:
    config: dict
    rows: list = field(default_factory=list)
    kind: str = "planted_sweep"

    def environment(self):
        from . import __version__
        from .backend import backend_name

        return {
            "quadhc": __version__,
            "numpy": np.__version__,
            "backend": backend_name(),
            "python": platform.python_version(),
            "schema_version": SCHEMA_VERSION,
        }

    def summary_rows(self):
        groups = {}
        for row in self.rows:
            key = (row["method"], row["delta"], row["p"], row["metric"])
            groups.setdefault(key, []).append(row)
        out = []
        for (method, delta, p, metric), rows in sorted(
            groups.items(), key=lambda kv: tuple(str(x) for x in kv[0])
        ):
            values = [r["metric_value"] for r in rows if r["status"] == "ok"]
            failed = sum(1 for r in rows if r["status"] != "ok")
            out.append(
                {
                    "method": method,
                    "delta": delta,
                    "p": p,
                    "metric": metric,
                    "mean": float(np.mean(values)) if values else "",
                    "std": float(np.std(values)) if values else "",
                    "trials_ok": len(values),
                    "trials_failed": failed,
                }
            )
        return out

    def save(self, outdir, svg=False):
        os.makedirs(outdir, exist_ok=True)
        results_path = os.path.join(outdir, "results.csv")
        with open(results_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=RESULTS_COLUMNS)
            writer.writeheader()
            for row in sorted(
                self.rows,
                key=lambda r: (
                    str(r["delta"]),
                    str(r["p"]),
                    r["trial"],
                    r["method"],
                ),
            ):
                writer.writerow({k: row.get(k, "") for k in RESULTS_COLUMNS})
        with open(os.path.join(outdir, "summary.csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
            writer.writeheader()
            for row in self.summary_rows():
                writer.writerow(row)
        manifest = {
            "kind": self.kind,
            "config": self.config,
            "environment": self.environment(),
            "results_columns": RESULTS_COLUMNS,
            "summary_columns": SUMMARY_COLUMNS,
            "n_rows": len(self.rows),
            "all_ok": all(r["status"] == "ok" for r in self.rows),
        }
        with open(os.path.join(outdir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        if svg:
            self._write_charts(outdir)
        return results_path

    def _write_charts(self, outdir):
        metric = self.rows[0]["metric"] if self.rows else "metric"
        xkey = "delta" if self.kind == "planted_sweep" else "p"
        panels = {}
        for row in self.summary_rows():
            if row["mean"] == "":
                continue
            panel = row["p"] if xkey == "delta" else ""
            panels.setdefault(panel, {}).setdefault(row["method"], []).append(
                (row[xkey], row["mean"], row["std"])
            )
        for panel, methods in panels.items():
            series = []
            for name, pts in sorted(methods.items()):
                pts.sort()
                series.append(
                    {
                        "name": name,
                        "x": [a for a, _, _ in pts],
                        "y": [b for _, b, _ in pts],
                        "std": [c for _, _, c in pts],
                    }
                )
            suffix = f"_p{panel}" if panel != "" else ""
            label = f" (p={panel})" if panel != "" else ""
            line_chart(
                series,
                os.path.join(outdir, f"{metric}{suffix}.svg"),
                title=f"{metric} vs {xkey}{label}",
                xlabel=xkey,
                ylabel=metric,
                y_range=(0.0, 1.05) if metric == "aari" else None,
            )

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            manifest = json.load(fh)
        out = cls(config=manifest["config"], kind=manifest["kind"])
        results = os.path.join(os.path.dirname(path), "results.csv")
        if os.path.exists(results):
            with open(results, newline="") as fh:
                for row in csv.DictReader(fh):
                    out.rows.append(row)
        return out


def _run_planted_method(method, matrix, hierarchy, qs, p, method_seed):
    """Returns (aari value, queries, observed)."""
    n = matrix.n
    kind, init_m = parse_method(method)
    if kind in ("SL", "CL"):
        oracle = ActiveOracle(matrix)
        run = single_linkage if kind == "SL" else complete_linkage
        dend, queries = run(oracle, n)
        return aari(hierarchy, dend), queries, ""
    if kind == "4K-AL":
        kern = passive_kernel(qs, n)
        dend = average_linkage_on_kernel(kern)
        return aari(hierarchy, dend), "", len(qs)
    if kind == "4K-AL-act":
        oracle = ActiveOracle(matrix)
        q = math.log(n) / n
        config = ActiveKernelConfig(
            q=q,
            num_references=active_reference_count(n, p, q),
            seed=method_seed,
        )
        kern, queries = active_kernel(oracle, n, config)
        dend = average_linkage_on_kernel(kern)
        return aari(hierarchy, dend), queries, ""
    if kind == "4-AL":
        dend = four_al(qs, InitialPartitionConfig.singletons(), n)
        return aari(hierarchy, dend), "", len(qs)
    if kind == "4-AL-I":
        dend = four_al(
            qs,
            InitialPartitionConfig.from_ground_truth(init_m),
            n,
            hierarchy=hierarchy,
            seed=method_seed,
        )
        return aari(hierarchy, dend), "", len(qs)
    raise ValueError(f"unhandled method {method!r}")


def _needs_passive(methods):
    return any(parse_method(m)[0] in ("4K-AL", "4-AL", "4-AL-I") for m in methods)


def planted_sweep(config: SweepConfig, progress=None) -> RunManifest:
    manifest = RunManifest(config=config.to_dict(), kind="planted_sweep")
    for di, delta in enumerate(config.delta_grid):
        for pi, p in enumerate(config.p_grid):
            for trial in range(config.trials):
                data_seed = derive_seed(
                    config.master_seed, "data", di, pi, trial
                )
                planted = PlantedConfig(
                    n0=config.n0,
                    levels=config.levels,
                    mu=config.mu,
                    delta=delta,
                    sigma=config.sigma,
                    seed=data_seed,
                )
                matrix, hierarchy = generate_planted(planted)
                passive_seed = ""
                qs = None
                if _needs_passive(config.methods):
                    passive_seed = derive_seed(
                        config.master_seed, "passive", di, pi, trial
                    )
                    qs = sample_passive(matrix, p, passive_seed)
                for method in config.methods:
                    method_seed = derive_seed(
                        config.master_seed, "method", method, di, pi, trial
                    )
                    row = {
                        "method": method,
                        "delta_index": di,
                        "delta": delta,
                        "p_index": pi,
                        "p": p,
                        "trial": trial,
                        "metric": "aari",
                        "data_seed": data_seed,
                        "method_seed": method_seed,
                        "passive_seed": passive_seed,
                    }
                    start = time.perf_counter()
                    try:
                        value, queries, observed = _run_planted_method(
                            method, matrix, hierarchy, qs, p, method_seed
                        )
                        row.update(
                            metric_value=value,
                            queries=queries,
                            observed=observed,
                            status="ok",
                            error="",
                        )
                    except Exception as exc:  # sweep continues per-row
                        row.update(
                            metric_value="",
                            queries="",
                            observed="",
                            status="error",
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    row["elapsed_s"] = round(time.perf_counter() - start, 4)
                    manifest.rows.append(row)
                    if progress is not None:
                        progress(row)
    return manifest


def replay_row(manifest_config: dict, method: str, delta_index: int,
               p_index: int, trial: int):
    """Re-run one recorded row from its derived seeds; bit-identical."""
    config = SweepConfig.from_dict(manifest_config)
    di = int(delta_index)
    pi = int(p_index)
    trial = int(trial)
    delta = config.delta_grid[di]
    p = config.p_grid[pi]
    data_seed = derive_seed(config.master_seed, "data", di, pi, trial)
    planted = PlantedConfig(
        n0=config.n0,
        levels=config.levels,
        mu=config.mu,
        delta=delta,
        sigma=config.sigma,
        seed=data_seed,
    )
    matrix, hierarchy = generate_planted(planted)
    qs = None
    if _needs_passive([method]):
        passive_seed = derive_seed(config.master_seed, "passive", di, pi, trial)
        qs = sample_passive(matrix, p, passive_seed)
    method_seed = derive_seed(config.master_seed, "method", method, di, pi, trial)
    value, queries, observed = _run_planted_method(
        method, matrix, hierarchy, qs, p, method_seed
    )
    return {
        "method": method,
        "delta": delta,
        "p": p,
        "trial": trial,
        "metric": "aari",
        "metric_value": value,
        "queries": queries,
        "observed": observed,
    }


def load_features_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for ln, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(
                    f"{path}: line {ln}: expected {width} columns, "
                    f"got {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no feature rows")
    return np.array(rows, dtype=np.float64)


DATASET_SCALE_WARNING = 240


def dataset_run(
    features_csv=None,
    quadruplets_csv=None,
    triplets_csv=None,
    p_grid=(0.1,),
    methods=("4K-AL", "4-AL", "SL", "CL"),
    trials: int = 1,
    master_seed: int = 0,
    outdir=None,
    warn=None,
) -> RunManifest:
    """Cluster one dataset given features or raw comparisons.

    Feature input builds cosine similarities, then samples comparisons per
    p; the metric is the tree cost against those similarities. Comparison
    input (quadruplet or triplet files) supports only the passive methods
    and emits dendrograms instead of costs.
    """
    sources = [s for s in (features_csv, quadruplets_csv, triplets_csv) if s]
    if len(sources) != 1:
        raise ValueError("provide exactly one of features/quadruplets/triplets")
    manifest = RunManifest(
        config={
            "input": str(sources[0]),
            "p_grid": list(p_grid),
            "methods": list(methods),
            "trials": trials,
            "master_seed": master_seed,
        },
        kind="dataset_run",
    )
    for m in methods:
        parse_method(m)

    if features_csv:
        features = load_features_csv(features_csv)
        matrix = cosine_similarity_matrix(features)
        n = matrix.n
        if n > DATASET_SCALE_WARNING and warn is not None:
            warn(
                f"{n} items: preference linkage cost grows with items x "
                f"observed comparisons; expect long runtimes"
            )
        hierarchy = None
        for pi, p in enumerate(p_grid):
            for trial in range(trials):
                passive_seed = derive_seed(master_seed, "passive", 0, pi, trial)
                qs = None
                if _needs_passive(methods):
                    qs = sample_passive(matrix, p, passive_seed)
                for method in methods:
                    kind, init_m = parse_method(method)
                    if kind == "4-AL-I":
                        raise ValueError(
                            "ground-truth initial clusters need a planted model"
                        )
                    method_seed = derive_seed(
                        master_seed, "method", method, 0, pi, trial
                    )
                    row = {
                        "method": method,
                        "delta_index": "",
                        "delta": "",
                        "p_index": pi,
                        "p": p,
                        "trial": trial,
                        "metric": "dasgupta_cost",
                        "data_seed": "",
                        "method_seed": method_seed,
                        "passive_seed": passive_seed,
                    }
                    start = time.perf_counter()
                    try:
                        dend, queries, observed = _run_dataset_method(
                            method, matrix, qs, p, method_seed
                        )
                        row.update(
                            metric_value=dasgupta_cost(matrix, dend),
                            queries=queries,
                            observed=observed,
                            status="ok",
                            error="",
                        )
                        if outdir:
                            _emit_dendrogram(outdir, method, pi, trial, dend)
                    except Exception as exc:
                        row.update(
                            metric_value="",
                            queries="",
                            observed="",
                            status="error",
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    row["elapsed_s"] = round(time.perf_counter() - start, 4)
                    manifest.rows.append(row)
        return manifest

    if quadruplets_csv:
        qs = QuadrupletSet.from_csv(quadruplets_csv)
    else:
        qs = ingest_triplets(read_triplets_csv(triplets_csv))
    n = qs.n_items
    passive_only = [m for m in methods if parse_method(m)[0] in ("4K-AL", "4-AL")]
    if warn is not None and len(passive_only) < len(methods):
        warn("comparison-only input: active methods skipped (no similarities)")
    for method in passive_only:
        row = {
            "method": method,
            "delta_index": "",
            "delta": "",
            "p_index": 0,
            "p": "",
            "trial": 0,
            "metric": "dendrogram",
            "data_seed": "",
            "method_seed": "",
            "passive_seed": "",
        }
        start = time.perf_counter()
        try:
            if method == "4K-AL":
                dend = average_linkage_on_kernel(passive_kernel(qs, n))
            else:
                dend = four_al(qs, InitialPartitionConfig.singletons(), n)
            row.update(
                metric_value="",
                queries="",
                observed=len(qs),
                status="ok",
                error="",
            )
            if outdir:
                _emit_dendrogram(outdir, method, 0, 0, dend)
        except Exception as exc:
            row.update(
                metric_value="",
                queries="",
                observed="",
                status="error",
                error=f"{type(exc).__name__}: {exc}",
            )
        row["elapsed_s"] = round(time.perf_counter() - start, 4)
        manifest.rows.append(row)
    return manifest


def _run_dataset_method(method, matrix, qs, p, method_seed):
    n = matrix.n
    kind, _ = parse_method(method)
    if kind in ("SL", "CL"):
        oracle = ActiveOracle(matrix)
        run = single_linkage if kind == "SL" else complete_linkage
        dend, queries = run(oracle, n)
        return dend, queries, ""
    if kind == "4K-AL":
        return average_linkage_on_kernel(passive_kernel(qs, n)), "", len(qs)
    if kind == "4K-AL-act":
        oracle = ActiveOracle(matrix)
        q = math.log(n) / n
        config = ActiveKernelConfig(
            q=q,
            num_references=active_reference_count(n, p, q),
            seed=method_seed,
        )
        kern, queries = active_kernel(oracle, n, config)
        return average_linkage_on_kernel(kern), queries, ""
    if kind == "4-AL":
        return four_al(qs, InitialPartitionConfig.singletons(), n), "", len(qs)
    raise ValueError(f"unhandled method {method!r}")


def _emit_dendrogram(outdir, method, p_index, trial, dend):
    os.makedirs(outdir, exist_ok=True)
    safe = method.replace("/", "_")
    base = os.path.join(outdir, f"dendrogram_{safe}_p{p_index}_t{trial}")
    dend.to_linkage_csv(base + ".csv")
    with open(base + ".nwk", "w") as fh:
        fh.write(dend.to_newick() + "\n")


def kernel_dump(
    mode: str,
    out_path,
    matrix_csv=None,
    quadruplets_csv=None,
    n_items=None,
    q: float = 0.5,
    num_references: int = 1,
    seed: int = 0,
):
    """Compute and write one kernel matrix as CSV.

    mode 'active' reads a similarity matrix and queries it through an
    oracle, echoing queries_used in a footer comment; mode 'passive' reads
    a quadruplet file.
    """
    if mode == "active":
        if not matrix_csv:
            raise ValueError("active mode needs a similarity matrix CSV")
        matrix = SimilarityMatrix.from_csv(matrix_csv)
        oracle = ActiveOracle(matrix)
        config = ActiveKernelConfig(q=q, num_references=num_references, seed=seed)
        kern, queries = active_kernel(oracle, matrix.n, config)
        kern.to_csv(out_path, queries_used=queries)
        return kern, queries
    if mode == "passive":
        if not quadruplets_csv:
            raise ValueError("passive mode needs a quadruplet CSV")
        qs = QuadrupletSet.from_csv(quadruplets_csv, n_items=n_items)
        kern = passive_kernel(qs, qs.n_items)
        kern.to_csv(out_path)
        return kern, None
    raise ValueError(f"unknown kernel mode {mode!r}")
