"""Generic agglomeration: repeatedly merge the argmax cluster pair.

The engine is oblivious to how cluster-level similarity is computed. A
strategy owns that: it returns the best current pair on demand and is told
about every merge. Strategies break ties by the lexicographically smallest
(smaller id, larger id) cluster pair; the engine validates returned pairs
and assembles the dendrogram.
"""

import numpy as np

from .dendrogram import Dendrogram, expand_to_leaves


class ContractViolation(RuntimeError):
    """A strategy returned a pair that is not two distinct active clusters."""


class LinkageStrategy:
    """Interface: argmax_pair() -> (id, id); notify_merge(a, b, new_id)."""

    def argmax_pair(self):
        raise NotImplementedError

    def notify_merge(self, a, b, new_id):
        raise NotImplementedError


def validate_partition(clusters, n_items=None):
    seen = set()
    for mem in clusters:
        if len(mem) == 0:
            raise ValueError("empty cluster in partition")
        for m in mem:
            if m in seen:
                raise ValueError(f"item {m} appears in two clusters")
            if n_items is not None and not (0 <= m < n_items):
                raise ValueError(f"item {m} out of range")
            seen.add(m)
    return seen


def agglomerate(strategy, initial, expand=True):
    """Run |initial| - 1 merges driven by the strategy's argmax pair.

    initial is a list of item lists (cluster id = position). The returned
    dendrogram has one leaf per item: non-singleton initial clusters are
    chained in index order below the cluster-level merges.
    """
    k0 = len(initial)
    if k0 < 2:
        raise ValueError("initial partition needs at least 2 clusters")
    validate_partition(initial)
    active = [True] * k0
    rows = []
    for step in range(k0 - 1):
        pair = strategy.argmax_pair()
        if pair is None or len(pair) != 2:
            raise ContractViolation(f"strategy returned {pair!r}")
        a, b = int(pair[0]), int(pair[1])
        if a > b:
            a, b = b, a
        if a == b or a < 0 or b >= k0 + step or not (active[a] and active[b]):
            raise ContractViolation(
                f"strategy returned invalid pair ({a}, {b}) at step {step}"
            )
        new_id = k0 + step
        rows.append((a, b, new_id))
        active[a] = False
        active[b] = False
        active.append(True)
        strategy.notify_merge(a, b, new_id)
    cluster_tree = Dendrogram(k0, np.array(rows, dtype=np.int64))
    if not expand:
        return cluster_tree
    return expand_to_leaves(cluster_tree, initial)


def exact_filtered_argmax(scores, err, exact_greater):
    """Index of the exact maximum, smallest index on exact ties.

    scores are float approximations with absolute error at most err;
    exact_greater(i, j) decides the true comparison for the survivors.
    """
    best_float = float(np.max(scores))
    cand = np.flatnonzero(scores >= best_float - 2.0 * err)
    best = int(cand[0])
    for c in cand[1:]:
        if exact_greater(int(c), best):
            best = int(c)
    return best


class ScoreMatrixStrategy(LinkageStrategy):
    """Linkage on a fully known pairwise score matrix.

    combine picks the row update on merge: 'max' gives single linkage,
    'min' complete linkage. Scores are compared as stored (integer rank
    surrogates give exact order); the first row-major maximum wins, which
    is the lexicographic tiebreak since active ids stay ascending.
    """

    def __init__(self, scores, combine="max"):
        scores = np.asarray(scores)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise ValueError("square score matrix required")
        if combine not in ("max", "min"):
            raise ValueError("combine must be 'max' or 'min'")
        n = scores.shape[0]
        self.n = n
        self.combine = combine
        size = 2 * n - 1
        if np.issubdtype(scores.dtype, np.integer):
            self._mat = np.zeros((size, size), dtype=np.int64)
        else:
            self._mat = np.zeros((size, size), dtype=np.float64)
        self._mat[:n, :n] = scores
        self._ids = list(range(n))

    def argmax_pair(self):
        ids = np.array(self._ids)
        sub = self._mat[np.ix_(ids, ids)]
        iu, ju = np.triu_indices(ids.size, 1)
        flat = sub[iu, ju]
        pos = int(np.argmax(flat))
        return int(ids[iu[pos]]), int(ids[ju[pos]])

    def notify_merge(self, a, b, new_id):
        op = np.maximum if self.combine == "max" else np.minimum
        row = op(self._mat[a], self._mat[b])
        self._mat[new_id, :] = row
        self._mat[:, new_id] = row
        self._ids.remove(a)
        self._ids.remove(b)
        self._ids.append(new_id)


class IntegerAverageStrategy(LinkageStrategy):
    """Average linkage over an integer score matrix, exact arithmetic.

    Keeps cross-cluster score sums as integers; the merged sum is the sum of
    the parts, so the mean never suffers float accumulation. Near-ties in
    the float means are settled by integer cross-multiplication.
    """

    def __init__(self, scores):
        scores = np.asarray(scores)
        if not np.issubdtype(scores.dtype, np.integer):
            raise ValueError("integer score matrix required")
        n = scores.shape[0]
        size = 2 * n - 1
        self.n = n
        self._sums = np.zeros((size, size), dtype=np.int64)
        self._sums[:n, :n] = scores
        np.fill_diagonal(self._sums[:n, :n], 0)
        self._sizes = np.zeros(size, dtype=np.int64)
        self._sizes[:n] = 1
        self._ids = list(range(n))

    def argmax_pair(self):
        ids = np.array(self._ids)
        sub = self._sums[np.ix_(ids, ids)]
        sizes = self._sizes[ids]
        iu, ju = np.triu_indices(ids.size, 1)
        sums = sub[iu, ju]
        denom = sizes[iu] * sizes[ju]
        scores = sums / denom

        def exact_greater(x, y):
            # compare sums[x]/denom[x] with sums[y]/denom[y] exactly
            return int(sums[x]) * int(denom[y]) > int(sums[y]) * int(denom[x])

        pos = exact_filtered_argmax(scores, 0.0, exact_greater)
        return int(ids[iu[pos]]), int(ids[ju[pos]])

    def notify_merge(self, a, b, new_id):
        row = self._sums[a] + self._sums[b]
        self._sums[new_id, :] = row
        self._sums[:, new_id] = row
        self._sums[new_id, new_id] = 0
        self._sizes[new_id] = self._sizes[a] + self._sizes[b]
        self._ids.remove(a)
        self._ids.remove(b)
        self._ids.append(new_id)
