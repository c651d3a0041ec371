"""Average-linkage-style agglomeration driven directly by comparisons.

A passively observed quadruplet "(i,j) beats (k,l)" is a vote that the
cluster pair split by (i,j) should merge before the pair split by (k,l).
Votes aggregate into a preference relation between cluster pairs; a cluster
pair's similarity is its mean preference over all other pairs. Counts stay
integers grouped by the opposite side's size product, so the argmax each
round is settled exactly (float scores only pre-filter candidates).
"""

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import preference_counts
from .dendrogram import Dendrogram
from .engine import LinkageStrategy, agglomerate, exact_filtered_argmax, validate_partition
from .pairs import pair_decode_arr

_EPS = np.finfo(np.float64).eps


class MergeConsistencyError(AssertionError):
    """The merged preference table stopped matching its convex-combination
    reconstruction from the pre-merge table."""


@dataclass(frozen=True)
class InitialPartitionConfig:
    mode: str
    m: int = 0
    path: str = ""

    @classmethod
    def singletons(cls):
        return cls(mode="singletons")

    @classmethod
    def from_ground_truth(cls, m: int):
        if m < 1:
            raise ValueError("initial cluster size m must be positive")
        return cls(mode="ground_truth", m=m)

    @classmethod
    def from_file(cls, path):
        return cls(mode="file", path=str(path))

    def build(self, n: int, hierarchy=None, seed: int = 0):
        if self.mode == "singletons":
            return [[i] for i in range(n)]
        if self.mode == "ground_truth":
            if hierarchy is None:
                raise ValueError("ground-truth initial clusters need the hierarchy")
            if hierarchy.n_items != n:
                raise ValueError("hierarchy size mismatch")
            if self.m > hierarchy.n0:
                raise ValueError(
                    f"initial cluster size {self.m} exceeds pure cluster size "
                    f"{hierarchy.n0}"
                )
            rng = np.random.Generator(np.random.Philox(seed))
            clusters = []
            for block in hierarchy.pure_clusters:
                members = np.array(block, dtype=np.int64)
                rng.shuffle(members)
                full, rest = divmod(members.size, self.m)
                for c in range(full):
                    clusters.append(sorted(members[c * self.m:(c + 1) * self.m].tolist()))
                if rest:
                    clusters.append(sorted(members[full * self.m:].tolist()))
            return clusters
        if self.mode == "file":
            return load_partition_csv(self.path, n)
        raise ValueError(f"unknown initial partition mode {self.mode!r}")


def load_partition_csv(path, n: int):
    assignment = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["item_index", "cluster_id"]:
            raise ValueError(f"{path}: expected header item_index,cluster_id")
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                item, cid = int(row[0]), int(row[1])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            if item in assignment:
                raise ValueError(f"{path}: line {ln}: item {item} assigned twice")
            assignment[item] = cid
    if set(assignment) != set(range(n)):
        raise ValueError(f"{path}: items must cover 0..{n - 1} exactly")
    clusters = {}
    for item, cid in assignment.items():
        clusters.setdefault(cid, []).append(item)
    return [sorted(clusters[cid]) for cid in sorted(clusters)]


def _cluster_of_array(partition, n: int) -> np.ndarray:
    out = np.full(n, -1, dtype=np.int64)
    for cid, members in enumerate(partition):
        for item in members:
            out[item] = cid
    return out


def _split_cells(qs, cluster_of):
    """Cluster splits of winner and loser pairs, -1 when a pair falls
    inside one cluster or touches an unassigned item."""
    n = qs.n_items
    pa, pb = pair_decode_arr(np.arange(qs.n_pairs, dtype=np.int64), n)
    ca = cluster_of[pa]
    cb = cluster_of[pb]
    lo = np.minimum(ca, cb)
    hi = np.maximum(ca, cb)
    cell = np.where((lo < 0) | (lo == hi), -1, lo * (1 << 20) + hi)
    return cell[qs.winner], cell[qs.loser]


def _decode_cell(cell: int):
    return int(cell) >> 20, int(cell) & ((1 << 20) - 1)


class ClusterPreferenceTable:
    """Sparse signed counts over ordered pairs of cluster pairs.

    signed_count((p,q),(r,s)) is the number of observed quadruplets whose
    winner splits across {p,q} and loser across {r,s}, minus the reverse;
    antisymmetric by construction, zero on the diagonal.
    """

    def __init__(self, counts):
        self._counts = counts

    @classmethod
    def build(cls, qs, partition, n: int = None):
        n = qs.n_items if n is None else n
        validate_partition(partition, n)
        cluster_of = _cluster_of_array(partition, n)
        cw, cl = _split_cells(qs, cluster_of)
        ok = (cw >= 0) & (cl >= 0) & (cw != cl)
        cw = cw[ok]
        cl = cl[ok]
        counts = {}
        for w, l in zip(cw.tolist(), cl.tolist()):
            if w < l:
                key, delta = (w, l), 1
            else:
                key, delta = (l, w), -1
            counts[key] = counts.get(key, 0) + delta
        return cls({k: v for k, v in counts.items() if v != 0})

    def signed_count(self, pq, rs) -> int:
        p, q = sorted(pq)
        r, s = sorted(rs)
        if p == q or r == s:
            raise ValueError("cluster pairs need two distinct clusters")
        a = p * (1 << 20) + q
        b = r * (1 << 20) + s
        if a == b:
            return 0
        if a < b:
            return self._counts.get((a, b), 0)
        return -self._counts.get((b, a), 0)

    def keys(self):
        for a, b in self._counts:
            yield _decode_cell(a), _decode_cell(b)

    def total_magnitude(self) -> int:
        return sum(abs(v) for v in self._counts.values())


def preference(qs, partition, p: int, q: int, r: int, s: int) -> float:
    """Net preference of cluster pair (p,q) over (r,s), normalized by the
    four cluster sizes. Exact rational, converted once to float."""
    if p == q or r == s:
        raise ValueError("cluster pairs must consist of two distinct clusters")
    k = len(partition)
    for c in (p, q, r, s):
        if not (0 <= c < k):
            raise ValueError(f"cluster index {c} out of range")
    validate_partition(partition, qs.n_items)
    table = ClusterPreferenceTable.build(qs, partition)
    count = table.signed_count((p, q), (r, s))
    denom = (
        len(partition[p]) * len(partition[q]) * len(partition[r]) * len(partition[s])
    )
    return float(Fraction(count, denom))


def cluster_similarity(qs, partition, p: int, q: int) -> float:
    """Mean preference of (p,q) over all ordered cluster pairs, the linkage
    value the agglomeration maximizes. Exact rational accumulation."""
    k = len(partition)
    if k < 2:
        raise ValueError("need at least two clusters")
    if p == q:
        raise ValueError("cluster pair must consist of two distinct clusters")
    validate_partition(partition, qs.n_items)
    table = ClusterPreferenceTable.build(qs, partition)
    sizes = [len(c) for c in partition]
    total = Fraction(0)
    for r in range(k):
        for s in range(k):
            if r == s:
                continue
            count = table.signed_count((p, q), (r, s))
            if count:
                total += Fraction(
                    count, sizes[p] * sizes[q] * sizes[r] * sizes[s]
                )
    return float(total / (k * (k - 1)))


class PreferenceStrategy(LinkageStrategy):
    """Per-round exact argmax of the preference linkage.

    Each round remaps every observed quadruplet onto the current partition
    in one pass, accumulating integer counts per (cluster pair, opposite
    size-product class). Scores are floats only to shortlist candidates;
    survivors are compared with exact big-integer arithmetic, ties falling
    to the lexicographically smallest id pair. Dead quadruplets (a side
    inside one cluster, or both sides on the same cluster pair) are compacted
    away once they outnumber a quarter of the array.
    """

    def __init__(self, qs, initial):
        n = qs.n_items
        validate_partition(initial, n)
        covered = {m for c in initial for m in c}
        if len(covered) != n:
            raise ValueError("preference linkage needs a full partition")
        self.n = n
        k0 = len(initial)
        self._max_id = 2 * k0 - 1
        self._cluster_of = _cluster_of_array(initial, n).astype(np.int32)
        self._sizes = np.zeros(self._max_id, dtype=np.int64)
        for cid, members in enumerate(initial):
            self._sizes[cid] = len(members)
        self._ids = list(range(k0))
        pa, pb = pair_decode_arr(np.arange(qs.n_pairs, dtype=np.int64), n)
        self._pa = pa.astype(np.int32)
        self._pb = pb.astype(np.int32)
        self._pw = qs.winner.astype(np.int32)
        self._pl = qs.loser.astype(np.int32)

    def _paircell(self, rank, k):
        ra = rank[self._cluster_of[self._pa]]
        rb = rank[self._cluster_of[self._pb]]
        lo = np.minimum(ra, rb).astype(np.int64)
        hi = np.maximum(ra, rb).astype(np.int64)
        cell = lo * (2 * k - lo - 1) // 2 + (hi - lo - 1)
        return np.where(lo == hi, -1, cell).astype(np.int32)

    def argmax_pair(self):
        ids = np.array(self._ids, dtype=np.int64)
        k = ids.size
        rank = np.full(self._max_id, -1, dtype=np.int32)
        rank[ids] = np.arange(k, dtype=np.int32)
        sz = self._sizes[ids]
        iu, ju = np.triu_indices(k, 1)
        spcell = sz[iu] * sz[ju]
        denoms = np.unique(spcell)
        ndenom = denoms.size
        dci = np.searchsorted(denoms, spcell).astype(np.int16)
        paircell = self._paircell(rank, k)
        ncells = spcell.size
        acc = np.zeros(ncells * ndenom, dtype=np.int64)
        dead = preference_counts(self._pw, self._pl, paircell, dci, ndenom, acc)
        counts = acc.reshape(ncells, ndenom)
        invd = 1.0 / denoms
        raw = counts @ invd
        absraw = np.abs(counts) @ invd
        scores = raw / spcell
        err = float(np.max((ndenom + 2) * _EPS * (absraw / spcell)))

        lcm = math.lcm(*(int(d) for d in denoms))
        mult = [lcm // int(d) for d in denoms]
        cache = {}

        def exact_value(c):
            if c not in cache:
                row = counts[c]
                cache[c] = sum(
                    int(row[d]) * mult[d] for d in range(ndenom) if row[d]
                )
            return cache[c]

        def exact_greater(x, y):
            return exact_value(x) * int(spcell[y]) > exact_value(y) * int(
                spcell[x]
            )

        best = exact_filtered_argmax(scores, err, exact_greater)
        if dead > 0.25 * self._pw.size and self._pw.size > 1024:
            u = paircell[self._pw]
            v = paircell[self._pl]
            alive = (u >= 0) & (v >= 0) & (u != v)
            self._pw = self._pw[alive]
            self._pl = self._pl[alive]
        return int(ids[iu[best]]), int(ids[ju[best]])

    def notify_merge(self, a, b, new_id):
        sel = (self._cluster_of == a) | (self._cluster_of == b)
        self._cluster_of[sel] = new_id
        self._sizes[new_id] = self._sizes[a] + self._sizes[b]
        self._ids.remove(a)
        self._ids.remove(b)
        self._ids.append(new_id)


class _AuditedPreferenceStrategy(PreferenceStrategy):
    """Rebuilds the preference table around every merge and asserts the
    convex-combination identity exactly (rational arithmetic)."""

    def __init__(self, qs, initial):
        super().__init__(qs, initial)
        self._qs = qs
        self.audited_merges = 0

    def _table(self):
        partition = [
            np.flatnonzero(self._cluster_of == cid).tolist() for cid in self._ids
        ]
        remap = {cid: pos for pos, cid in enumerate(self._ids)}
        return ClusterPreferenceTable.build(self._qs, partition), remap

    def notify_merge(self, a, b, new_id):
        before, remap_b = self._table()
        sz = {cid: int(self._sizes[cid]) for cid in self._ids}
        super().notify_merge(a, b, new_id)
        after, remap_a = self._table()
        ids_after = [cid for cid in self._ids]
        wa, wb = sz[a], sz[b]
        for x in ids_after:
            if x == new_id:
                continue
            for ri, r in enumerate(ids_after):
                for s in ids_after[ri + 1:]:
                    if new_id in (r, s) or x in (r, s):
                        continue
                    merged = Fraction(
                        after.signed_count(
                            (remap_a[new_id], remap_a[x]), (remap_a[r], remap_a[s])
                        ),
                        (wa + wb) * sz[x] * sz[r] * sz[s],
                    )
                    part_a = Fraction(
                        before.signed_count(
                            (remap_b[a], remap_b[x]), (remap_b[r], remap_b[s])
                        ),
                        wa * sz[x] * sz[r] * sz[s],
                    )
                    part_b = Fraction(
                        before.signed_count(
                            (remap_b[b], remap_b[x]), (remap_b[r], remap_b[s])
                        ),
                        wb * sz[x] * sz[r] * sz[s],
                    )
                    expect = (wa * part_a + wb * part_b) / (wa + wb)
                    if merged != expect:
                        raise MergeConsistencyError(
                            f"merge {a}+{b}->{new_id}: preference of "
                            f"({new_id},{x}) vs ({r},{s}) is {merged}, "
                            f"convex combination gives {expect}"
                        )
        self.audited_merges += 1


def four_al(
    qs,
    initial: InitialPartitionConfig,
    n: int,
    hierarchy=None,
    seed: int = 0,
    verify_merge_consistency: bool = False,
) -> Dendrogram:
    """Agglomerate by the preference linkage from the given initial clusters.

    The dendrogram always has n leaves; non-singleton initial clusters are
    chained in index order underneath their cluster node.
    """
    if qs.n_items != n:
        raise ValueError(
            f"comparison set covers {qs.n_items} items, expected {n}"
        )
    clusters = initial.build(n, hierarchy=hierarchy, seed=seed)
    if verify_merge_consistency:
        strategy = _AuditedPreferenceStrategy(qs, clusters)
    else:
        strategy = PreferenceStrategy(qs, clusters)
    return agglomerate(strategy, clusters)
