"""Comparison-only single and complete linkage.

Both algorithms only ever need the order of the hidden pairwise scores, so
they are driven by one comparison-sort of all pairs through the active
oracle. The resulting ranks act as surrogate similarities for the classic
linkage recursions; any strictly monotone transform of the hidden scores
leaves the ranks, and therefore the dendrograms, unchanged.
"""

from dataclasses import dataclass

import numpy as np

from .engine import ScoreMatrixStrategy, agglomerate
from .pairs import num_pairs, pair_decode_arr


@dataclass(frozen=True)
class PairRankTable:
    """Strict total order over all pairs: rank 1 is the least similar."""

    n_items: int
    ranks: np.ndarray  # rank per pair index, 1..num_pairs

    @property
    def order(self) -> np.ndarray:
        """Pair indices sorted by ascending similarity."""
        return np.argsort(self.ranks, kind="stable")


def rank_all_pairs(oracle, n: int) -> PairRankTable:
    """Merge-sort all pair indices by oracle comparisons."""
    if n < 2:
        raise ValueError("need at least two items")
    m = num_pairs(n)
    src = list(range(m))
    dst = [0] * m
    width = 1
    while width < m:
        for lo in range(0, m, 2 * width):
            mid = min(lo + width, m)
            hi = min(lo + 2 * width, m)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                # ascending: emit the right element when left is greater
                if oracle.compare_codes(src[i], src[j]):
                    dst[k] = src[j]
                    j += 1
                else:
                    dst[k] = src[i]
                    i += 1
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
        src, dst = dst, src
        width *= 2
    ranks = np.empty(m, dtype=np.int64)
    ranks[src] = np.arange(1, m + 1)
    return PairRankTable(n, ranks)


def _rank_matrix(table: PairRankTable) -> np.ndarray:
    n = table.n_items
    mat = np.zeros((n, n), dtype=np.int64)
    codes = np.arange(num_pairs(n), dtype=np.int64)
    a, b = pair_decode_arr(codes, n)
    mat[a, b] = table.ranks
    mat[b, a] = table.ranks
    return mat


def _ordinal_linkage(oracle, n, combine):
    if oracle.n != n:
        raise ValueError(f"oracle covers {oracle.n} items, expected {n}")
    before = oracle.query_count
    table = rank_all_pairs(oracle, n)
    strategy = ScoreMatrixStrategy(_rank_matrix(table), combine=combine)
    dendrogram = agglomerate(strategy, [[i] for i in range(n)])
    return dendrogram, oracle.query_count - before


def single_linkage(oracle, n: int):
    """Comparison-only single linkage; returns (dendrogram, queries_used)."""
    return _ordinal_linkage(oracle, n, "max")


def complete_linkage(oracle, n: int):
    """Comparison-only complete linkage; returns (dendrogram, queries_used)."""
    return _ordinal_linkage(oracle, n, "min")
