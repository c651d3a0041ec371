"""Proxy-similarity kernels from comparisons, and average linkage on them.

Two similar items should sit on the same side of any reference similarity
when compared against a third item. The active kernel picks reference
pairs and a Bernoulli landmark set and asks the oracle; the passive kernel
reuses whatever comparisons were sampled up front, every pair acting as a
reference. Entries stay exact integers throughout.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from ._kernels import passive_kernel_matrix
from .dendrogram import Dendrogram
from .engine import IntegerAverageStrategy, agglomerate
from .pairs import num_pairs, pair_decode_arr

DIAG_SENTINEL = np.iinfo(np.int64).max


@dataclass(frozen=True)
class ActiveKernelConfig:
    q: float
    num_references: int
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError("landmark probability q must be in (0, 1]")
        if self.num_references < 1:
            raise ValueError("need at least one reference pair")


class KernelMatrix:
    """Symmetric integer proxy similarities; the diagonal is a sentinel."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("square matrix required")
        off = ~np.eye(entries.shape[0], dtype=bool)
        if not np.array_equal(entries.T[off], entries[off]):
            raise ValueError("kernel must be exactly symmetric off-diagonal")
        entries = entries.copy()
        np.fill_diagonal(entries, DIAG_SENTINEL)
        entries.setflags(write=False)
        self.n = entries.shape[0]
        self.entries = entries

    def off_diagonal(self) -> np.ndarray:
        out = self.entries.copy()
        np.fill_diagonal(out, 0)
        return out

    def to_csv(self, path, queries_used=None):
        with open(path, "w", newline="") as fh:
            fh.write(f"n,{self.n}\n")
            writer = csv.writer(fh)
            for i, row in enumerate(self.entries):
                writer.writerow(
                    ["" if i == j else int(v) for j, v in enumerate(row)]
                )
            if queries_used is not None:
                fh.write(f"# queries_used,{int(queries_used)}\n")

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            header = fh.readline().strip().split(",")
            if len(header) != 2 or header[0] != "n":
                raise ValueError(f"{path}: first line must be 'n,<count>'")
            n = int(header[1])
            rows = []
            for line in fh:
                if line.startswith("#"):
                    continue
                rows.append([int(v) if v else 0 for v in line.strip().split(",")])
        mat = np.array(rows, dtype=np.int64)
        if mat.shape != (n, n):
            raise ValueError(f"{path}: expected {n}x{n} matrix")
        return cls(mat)


@dataclass
class KernelBuildInfo:
    reference_pairs: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    landmarks: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    per_reference_queries: np.ndarray = field(
        default_factory=lambda: np.empty(0, np.int64)
    )
    queries_used: int = 0


def active_kernel(oracle, n: int, config: ActiveKernelConfig, return_info=False):
    """Landmark kernel from actively chosen comparisons.

    Each reference pair is drawn uniformly (references may repeat) and gets
    its own Bernoulli(q) landmark set. K_ij sums, over references and their
    landmarks k not in {i, j}, the product of the signs of (i,k) vs the
    reference and (j,k) vs the reference; exact ties contribute 0, and a
    landmark whose pair with i or j coincides with the reference is skipped
    for that entry. A reference whose landmark set comes up empty is
    redrawn once and skipped if still empty. Returns (KernelMatrix,
    queries_used).
    """
    if n < 3:
        raise ValueError("active kernel needs at least 3 items")
    if oracle.n != n:
        raise ValueError("oracle item count mismatch")
    npairs = num_pairs(n)
    rng = np.random.Generator(np.random.Philox(config.seed))
    refs = rng.integers(0, npairs, size=config.num_references).astype(np.int64)
    masks = rng.random((config.num_references, n)) < config.q
    empty = ~masks.any(axis=1)
    if empty.any():
        masks[empty] = rng.random((int(empty.sum()), n)) < config.q
    keep = masks.any(axis=1)
    if not keep.any():
        raise RuntimeError(
            "every landmark set came up empty after one resample; increase q"
        )
    refs = refs[keep]
    masks = masks[keep]
    row_idx, col_k = np.nonzero(masks)
    ref_col = refs[row_idx]

    before = oracle.query_count
    acc = np.zeros((n, n), dtype=np.float64)
    items = np.arange(n, dtype=np.int64)[:, None]
    chunk = max(64, 2_000_000 // n)
    for c0 in range(0, ref_col.size, chunk):
        kc = col_k[c0:c0 + chunk][None, :]
        rc = ref_col[c0:c0 + chunk][None, :]
        lo = np.minimum(items, kc)
        hi = np.maximum(items, kc)
        pc = (lo * (2 * n - lo - 1)) // 2 + (hi - lo - 1)
        sel = (items != kc) & (pc != rc)
        signs = np.zeros(sel.shape, dtype=np.float32)
        flat_sel = sel.ravel()
        signs.ravel()[flat_sel] = oracle.compare_batch_signs(
            pc.ravel()[flat_sel], np.broadcast_to(rc, sel.shape).ravel()[flat_sel]
        )
        acc += (signs @ signs.T).astype(np.float64)
    kern = KernelMatrix(np.round(acc).astype(np.int64))
    queries = oracle.query_count - before
    if not return_info:
        return kern, queries
    sizes = masks.sum(axis=1).astype(np.int64)
    ra, rb = pair_decode_arr(refs, n)
    ref_touches = masks[np.arange(refs.size), ra] | masks[np.arange(refs.size), rb]
    per_ref = n * sizes - sizes * (sizes + 1) // 2 - ref_touches.astype(np.int64)
    info = KernelBuildInfo(
        reference_pairs=refs,
        landmarks=masks,
        per_reference_queries=per_ref,
        queries_used=queries,
    )
    return kern, queries, info


def passive_kernel(qs, n: int, with_certificate=False):
    """Kernel from a fixed comparison set: every pair is a reference and a
    term contributes only when both constituent comparisons were observed.

    Grouped accumulation: per (reference pair, shared item) bucket, each
    within-bucket item pair adds the product of its signs. Equal to the
    direct five-index evaluation, entry by entry.

    with_certificate additionally returns the per-entry count of
    contributing terms, which bounds |K_ij| elementwise.
    """
    if n < 3:
        raise ValueError("passive kernel needs at least 3 items")
    if qs.n_items != n:
        raise ValueError("comparison set item count mismatch")
    if n + 1 >= (1 << 15):
        raise ValueError("passive kernel supports n < 32767")
    npairs = num_pairs(n)
    codes = np.arange(npairs, dtype=np.int64)
    pa = np.ascontiguousarray(pair_decode_arr(codes, n)[0])
    pb = np.ascontiguousarray(pair_decode_arr(codes, n)[1])
    winner = qs.winner.astype(np.int64)
    loser = qs.loser.astype(np.int64)
    kern = KernelMatrix(passive_kernel_matrix(winner, loser, pa, pb, n, npairs))
    if not with_certificate:
        return kern
    return kern, _term_counts(winner, loser, pa, pb, n)


def _term_counts(pw, pl, pair_a, pair_b, n):
    """Per-entry count of contributing kernel terms: the bucket expansion
    with every sign collapsed to one."""
    bucket = np.concatenate(
        [
            pl * n + pair_a[pw],
            pl * n + pair_b[pw],
            pw * n + pair_a[pl],
            pw * n + pair_b[pl],
        ]
    )
    item = np.concatenate([pair_b[pw], pair_a[pw], pair_b[pl], pair_a[pl]])
    order = np.argsort(bucket, kind="stable")
    bucket = bucket[order]
    item = item[order]
    out = np.zeros(n * n, dtype=np.int64)
    if bucket.size:
        starts = np.flatnonzero(np.r_[True, bucket[1:] != bucket[:-1]])
        sizes = np.diff(np.r_[starts, bucket.size])
        for d in np.unique(sizes):
            if d < 2:
                continue
            sel = starts[sizes == d]
            iu, ju = np.triu_indices(d, 1)
            block = item[sel[:, None] + np.arange(d)]
            codes = (block[:, iu] * n + block[:, ju]).ravel()
            out += np.bincount(codes, minlength=out.size)
    cert = out.reshape(n, n)
    return cert + cert.T


def average_linkage_on_kernel(kernel: KernelMatrix) -> Dendrogram:
    """Classic average linkage with the kernel as the similarity, exact
    integer cross-sum bookkeeping, merged sums added on merge."""
    if kernel.n < 2:
        raise ValueError("need at least 2 items")
    strategy = IntegerAverageStrategy(kernel.off_diagonal())
    return agglomerate(strategy, [[i] for i in range(kernel.n)])
