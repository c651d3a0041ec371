"""Independent brute-force reference implementations used as test oracles.

Everything here favors clarity over speed: direct loops, Fraction
arithmetic where values are compared exactly, full re-scans each round.
None of it shares code with the production paths it checks.
"""

from fractions import Fraction

import numpy as np

from quadhc.dendrogram import Dendrogram
from quadhc.pairs import num_pairs, pair_index


def random_similarity(n, rng, distinct=True):
    """Symmetric matrix with iid uniform scores, distinct by default."""
    from quadhc.planted import SimilarityMatrix

    if distinct:
        vals = rng.permutation(num_pairs(n)).astype(np.float64)
        vals += rng.random(num_pairs(n))  # distinct with probability 1
    else:
        vals = rng.integers(0, 3, num_pairs(n)).astype(np.float64)
    mat = np.zeros((n, n))
    iu, ju = np.triu_indices(n, 1)
    mat[iu, ju] = vals
    mat[ju, iu] = vals
    np.fill_diagonal(mat, np.nan)
    return SimilarityMatrix(mat)


def _merge_loop(n, best_pair_fn):
    clusters = {i: [i] for i in range(n)}
    rows = []
    nid = n
    while len(clusters) > 1:
        a, b = best_pair_fn(clusters)
        rows.append((a, b, nid))
        clusters[nid] = clusters.pop(a) + clusters.pop(b)
        nid += 1
    return Dendrogram(n, np.array(rows, dtype=np.int64))


def brute_extreme_linkage(matrix, mode):
    """Single ('max') or complete ('min') linkage, re-scanning every
    cross-cluster pair each round."""
    w = matrix.entries
    agg = max if mode == "max" else min

    def best(clusters):
        ids = sorted(clusters)
        best_val = None
        best_pair = None
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                val = agg(
                    w[i, j] for i in clusters[ids[x]] for j in clusters[ids[y]]
                )
                key = (ids[x], ids[y])
                if best_val is None or val > best_val or (
                    val == best_val and key < best_pair
                ):
                    best_val = val
                    best_pair = key
        return best_pair

    return _merge_loop(matrix.n, best)


def brute_average_linkage(kernel_entries):
    """Average linkage on integer scores, exact Fraction means."""
    k = np.asarray(kernel_entries)
    n = k.shape[0]

    def best(clusters):
        ids = sorted(clusters)
        best_val = None
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                mem_x = clusters[ids[x]]
                mem_y = clusters[ids[y]]
                total = sum(int(k[i, j]) for i in mem_x for j in mem_y)
                val = Fraction(total, len(mem_x) * len(mem_y))
                key = (ids[x], ids[y])
                if best_val is None or val > best_val or (
                    val == best_val and key < best_pair
                ):
                    best_val = val
                    best_pair = key
        return best_pair

    return _merge_loop(n, best)


def brute_passive_kernel(qs, n):
    """Direct five-index evaluation of the passive proxy kernel."""
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            total = 0
            for k in range(n):
                for l in range(k + 1, n):
                    ref = pair_index(k, l, n)
                    for r in range(n):
                        if r in (i, j):
                            continue
                        pi = pair_index(min(i, r), max(i, r), n)
                        pj = pair_index(min(j, r), max(j, r), n)
                        si = 0 if pi == ref else qs.orientation(pi, ref)
                        sj = 0 if pj == ref else qs.orientation(pj, ref)
                        total += si * sj
            out[i, j] = total
    return out


def brute_active_kernel(matrix, refs, landmark_masks, n):
    """Direct evaluation of the landmark kernel from the true scores:
    indicator difference (0 on exact ties), each reference paired with its
    own landmark set, a landmark skipped for an entry when its pair with
    either item is the reference."""
    w = matrix.entries
    from quadhc.pairs import pair_decode

    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            total = 0
            for ref, mask in zip(refs, landmark_masks):
                a, b = pair_decode(int(ref), n)
                wref = w[a, b]
                for k in np.flatnonzero(mask):
                    if k in (i, j):
                        continue
                    if {i, k} == {a, b} or {j, k} == {a, b}:
                        continue
                    si = int(w[i, k] > wref) - int(w[i, k] < wref)
                    sj = int(w[j, k] > wref) - int(w[j, k] < wref)
                    total += si * sj
            out[i, j] = total
    return out


def brute_preference(qs, partition, p, q, r, s):
    """Six-loop evaluation of the pairwise cluster preference, exact."""
    total = 0
    for i in partition[p]:
        for j in partition[q]:
            wp = pair_index(min(i, j), max(i, j), qs.n_items)
            for k in partition[r]:
                for l in partition[s]:
                    lp = pair_index(min(k, l), max(k, l), qs.n_items)
                    if wp == lp:
                        continue
                    total += int(qs.orientation(wp, lp) == 1)
                    total -= int(qs.orientation(lp, wp) == 1)
    denom = (
        len(partition[p]) * len(partition[q]) * len(partition[r]) * len(partition[s])
    )
    return Fraction(total, denom)


def brute_cluster_similarity(qs, partition, p, q):
    k = len(partition)
    total = Fraction(0)
    for r in range(k):
        for s in range(k):
            if r == s:
                continue
            total += brute_preference(qs, partition, p, q, r, s)
    return total / (k * (k - 1))


def brute_four_al(qs, n):
    """Preference-linkage agglomeration from singletons, re-evaluating the
    naive linkage for every cluster pair each round."""
    clusters = {i: [i] for i in range(n)}
    rows = []
    nid = n
    while len(clusters) > 1:
        ids = sorted(clusters)
        partition = [clusters[c] for c in ids]
        best_val = None
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                val = brute_cluster_similarity(qs, partition, x, y)
                key = (ids[x], ids[y])
                if best_val is None or val > best_val or (
                    val == best_val and key < best_pair
                ):
                    best_val = val
                    best_pair = key
        a, b = best_pair
        rows.append((a, b, nid))
        clusters[nid] = clusters.pop(a) + clusters.pop(b)
        nid += 1
    return Dendrogram(n, np.array(rows, dtype=np.int64))


def brute_ari(labels1, labels2):
    """Pair-counting adjusted agreement."""
    l1 = np.asarray(labels1)
    l2 = np.asarray(labels2)
    n = l1.size
    together = 0
    a1 = 0
    a2 = 0
    for i in range(n):
        for j in range(i + 1, n):
            s1 = l1[i] == l1[j]
            s2 = l2[i] == l2[j]
            together += s1 and s2
            a1 += s1
            a2 += s2
    total = n * (n - 1) // 2
    expected = a1 * a2 / total
    maximum = (a1 + a2) / 2
    if maximum == expected:
        return 1.0
    return (together - expected) / (maximum - expected)


def brute_dasgupta(matrix, dendrogram):
    """Pair-sum of similarity times smallest containing cluster, walking
    the merge list per pair."""
    n = matrix.n
    members = {node: {node} for node in range(n)}
    order = []
    for left, right, new in dendrogram.merges:
        members[int(new)] = members[int(left)] | members[int(right)]
        order.append(int(new))
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for node in order:
                if i in members[node] and j in members[node]:
                    total += matrix.entries[i, j] * len(members[node])
                    break
    return total


def exhaustive_average_strategy(matrix):
    """Engine strategy computing exact Fraction means of a known score
    matrix (floats are exact binary rationals)."""
    from quadhc.engine import LinkageStrategy

    class _Strategy(LinkageStrategy):
        def __init__(self):
            self.clusters = {i: [i] for i in range(matrix.n)}

        def argmax_pair(self):
            ids = sorted(self.clusters)
            best_val = None
            best_pair = None
            for x in range(len(ids)):
                for y in range(x + 1, len(ids)):
                    total = Fraction(0)
                    for i in self.clusters[ids[x]]:
                        for j in self.clusters[ids[y]]:
                            total += Fraction(float(matrix.entries[i, j]))
                    val = total / (
                        len(self.clusters[ids[x]]) * len(self.clusters[ids[y]])
                    )
                    key = (ids[x], ids[y])
                    if best_val is None or val > best_val or (
                        val == best_val and key < best_pair
                    ):
                        best_val = val
                        best_pair = key
            return best_pair

        def notify_merge(self, a, b, new_id):
            self.clusters[new_id] = self.clusters.pop(a) + self.clusters.pop(b)

    return _Strategy()
