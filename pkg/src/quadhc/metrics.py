"""Evaluation: ARI, level-averaged ARI, tree cost, cosine scores, and the
closed-form probability that one noisy similarity exceeds another."""

import math

import numpy as np

from .planted import SimilarityMatrix


def _as_labels(partition, n=None):
    """Accept either a flat label sequence or a list of member lists."""
    if isinstance(partition, np.ndarray) and partition.ndim == 1:
        return partition.astype(np.int64)
    items = list(partition)
    if items and np.isscalar(items[0]):
        return np.array(items, dtype=np.int64)
    labels = {}
    for cid, members in enumerate(partition):
        for m in members:
            if m in labels:
                raise ValueError(f"item {m} in two clusters")
            labels[m] = cid
    if n is None:
        n = len(labels)
    if set(labels) != set(range(n)):
        raise ValueError("partition must cover 0..n-1")
    return np.array([labels[i] for i in range(n)], dtype=np.int64)


def ari(p1, p2) -> float:
    """Adjusted Rand Index between two partitions of the same items.

    Accepts label arrays or lists of clusters. 1 for identical partitions;
    0 expectation under random agreement; degenerate identical-trivial
    partitions score 1.
    """
    l1 = _as_labels(p1)
    l2 = _as_labels(p2)
    if l1.size != l2.size:
        raise ValueError("partitions cover different item sets")
    n = l1.size
    if n < 2:
        raise ValueError("need at least two items")
    _, i1 = np.unique(l1, return_inverse=True)
    _, i2 = np.unique(l2, return_inverse=True)
    k1 = int(i1.max()) + 1
    k2 = int(i2.max()) + 1
    cont = np.zeros((k1, k2), dtype=np.int64)
    np.add.at(cont, (i1, i2), 1)

    def comb2(x):
        return x * (x - 1) // 2

    index = int(np.sum(comb2(cont)))
    a = int(np.sum(comb2(cont.sum(axis=1))))
    b = int(np.sum(comb2(cont.sum(axis=0))))
    total = comb2(n)
    expected = a * b / total
    maximum = (a + b) / 2.0
    if maximum == expected:
        return 1.0
    return (index - expected) / (maximum - expected)


def aari(truth, dendrogram) -> float:
    """Mean ARI over the planted levels 1..L, cutting the learned tree at
    2**ell clusters per level. 1 iff every level cut matches.

    A learned dendrogram has no intrinsic levels; the partition with
    exactly 2**ell clusters (the last 2**ell - 1 merges undone) stands in,
    and agrees with the planted levels on the reference tree. For a
    chaining-sensitive view of the same tree see
    Dendrogram.depth_partition.
    """
    if truth.levels < 1:
        raise ValueError("level-averaged ARI needs at least one level")
    if dendrogram.n_leaves != truth.n_items:
        raise ValueError(
            f"dendrogram has {dendrogram.n_leaves} leaves, "
            f"hierarchy has {truth.n_items} items"
        )
    values = []
    for ell in range(1, truth.levels + 1):
        ref = truth.level_partition(ell)
        got = dendrogram.cut_at(2 ** ell)
        values.append(ari(ref, got))
    return float(np.mean(values))


def dasgupta_cost(matrix, dendrogram) -> float:
    """Sum over unordered pairs of similarity times the size of the smallest
    tree cluster containing both; lower is better."""
    if dendrogram.n_leaves != matrix.n:
        raise ValueError("leaf count does not match similarity matrix")
    sizes = dendrogram.lca_sizes()
    iu, ju = np.triu_indices(matrix.n, 1)
    return float(np.sum(matrix.entries[iu, ju] * sizes[iu, ju]))


def cosine_similarity_matrix(features) -> SimilarityMatrix:
    """Pairwise cosine similarity of feature rows; rejects zero-norm rows."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("feature matrix must be 2-d")
    norms = np.linalg.norm(x, axis=1)
    bad = np.flatnonzero(norms == 0)
    if bad.size:
        raise ValueError(f"zero-norm feature row at index {int(bad[0])}")
    unit = x / norms[:, None]
    w = unit @ unit.T
    upper = np.triu(w, 1)
    w = upper + upper.T
    np.fill_diagonal(w, np.nan)
    return SimilarityMatrix(w)


def beta_expected(ell: float, delta: float, sigma: float) -> float:
    """2*P(one score beats another whose mean sits ell*delta lower) - 1
    for independent Gaussian scores with common spread sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return math.erf(ell * delta / (2.0 * sigma))
