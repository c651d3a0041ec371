"""Noisy hierarchical block-model similarities and their ground truth.

Items are grouped into 2**levels pure clusters of n0 consecutive indices;
the clusters sit at the bottom of a complete binary tree. A pair merging at
tree level ell has expected similarity mu - (levels - ell)*delta, observed
with independent Gaussian noise of standard deviation sigma. sigma = 0 is
the exact noiseless case.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dendrogram import Dendrogram, chain_merges
from .pairs import num_pairs

MAX_ITEMS = 1 << 20


@dataclass(frozen=True)
class PlantedConfig:
    n0: int
    levels: int
    mu: float
    delta: float
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("n0 must be a positive integer")
        if self.levels < 0:
            raise ValueError("levels must be non-negative")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")
        if self.n0 * (2 ** self.levels) > MAX_ITEMS:
            raise OverflowError(
                f"n0 * 2**levels exceeds the supported size {MAX_ITEMS}"
            )

    @property
    def n_items(self) -> int:
        return self.n0 * (2 ** self.levels)

    def to_dict(self):
        return {
            "n0": self.n0,
            "levels": self.levels,
            "mu": self.mu,
            "delta": self.delta,
            "sigma": self.sigma,
            "seed": self.seed,
        }


class SimilarityMatrix:
    """Symmetric latent scores; the diagonal is a sentinel, never read."""

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("square matrix required")
        off = ~np.eye(entries.shape[0], dtype=bool)
        if not np.array_equal(entries.T[off], entries[off]):
            raise ValueError("matrix must be exactly symmetric off-diagonal")
        self.n = entries.shape[0]
        self.entries = entries
        self.entries.setflags(write=False)

    def condensed(self) -> np.ndarray:
        """Upper-triangle values in pair-index order."""
        iu, ju = np.triu_indices(self.n, 1)
        return self.entries[iu, ju]

    def transform(self, fn) -> "SimilarityMatrix":
        """Apply an elementwise map to the off-diagonal scores."""
        out = fn(self.entries.copy())
        np.fill_diagonal(out, np.nan)
        return SimilarityMatrix(out)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(f"n,{self.n}\n")
            writer = csv.writer(fh)
            for row in self.entries:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            header = fh.readline().strip().split(",")
            if len(header) != 2 or header[0] != "n":
                raise ValueError(f"{path}: first line must be 'n,<count>'")
            n = int(header[1])
            rows = [[float(v) for v in row] for row in csv.reader(fh)]
        mat = np.array(rows, dtype=np.float64)
        if mat.shape != (n, n):
            raise ValueError(f"{path}: expected {n}x{n} matrix, got {mat.shape}")
        return cls(mat)


class GroundTruthHierarchy:
    """The planted complete binary tree over pure clusters."""

    def __init__(self, levels: int, n0: int):
        if levels < 0 or n0 < 1:
            raise ValueError("invalid hierarchy shape")
        self.levels = levels
        self.n0 = n0
        self.n_items = n0 * (2 ** levels)

    @property
    def n_pure_clusters(self) -> int:
        return 2 ** self.levels

    @property
    def pure_clusters(self):
        return [
            range(g * self.n0, (g + 1) * self.n0)
            for g in range(self.n_pure_clusters)
        ]

    def _check_index(self, i):
        if not (0 <= i < self.n_items):
            raise ValueError(f"item {i} out of range")

    def lca_level(self, i: int, j: int) -> int:
        """Tree level of the least common ancestor of two distinct items."""
        self._check_index(i)
        self._check_index(j)
        if i == j:
            raise ValueError("lca level of an item with itself is undefined")
        gi = i // self.n0
        gj = j // self.n0
        return self.levels - (gi ^ gj).bit_length()

    def lca_level_matrix(self) -> np.ndarray:
        g = np.arange(self.n_items, dtype=np.int64) // self.n0
        xor = g[:, None] ^ g[None, :]
        bl = np.frexp(xor.astype(np.float64))[1]
        return self.levels - bl

    def level_partition(self, ell: int) -> np.ndarray:
        """Labels of the planted partition into 2**ell groups."""
        if not (0 <= ell <= self.levels):
            raise ValueError(f"level {ell} outside 0..{self.levels}")
        g = np.arange(self.n_items, dtype=np.int64) // self.n0
        return g >> (self.levels - ell)


def expected_similarity(
    h: GroundTruthHierarchy, config: PlantedConfig, i: int, j: int
) -> float:
    return config.mu - (h.levels - h.lca_level(i, j)) * config.delta


def generate_planted(config: PlantedConfig):
    """Draw one similarity matrix from the planted model.

    Entry (i, j), i < j is mu_ij + Normal(0, sigma^2); draws come from a
    counter-based Philox stream in pair-index order, so identical configs
    give bit-identical matrices regardless of evaluation order.
    """
    h = GroundTruthHierarchy(config.levels, config.n0)
    n = config.n_items
    lca = h.lca_level_matrix()
    entries = config.mu - (config.levels - lca) * config.delta
    entries = entries.astype(np.float64)
    if config.sigma > 0:
        rng = np.random.Generator(np.random.Philox(config.seed))
        noise = rng.normal(0.0, config.sigma, size=num_pairs(n))
        iu, ju = np.triu_indices(n, 1)
        entries[iu, ju] += noise
        entries[ju, iu] = entries[iu, ju]
    np.fill_diagonal(entries, np.nan)
    return SimilarityMatrix(entries), h


def ground_truth_dendrogram(h: GroundTruthHierarchy) -> Dendrogram:
    """Reference tree: index-order chains inside pure clusters, then the
    planted binary merges bottom-up; its cut at 2**ell equals the planted
    level-ell partition."""
    n = h.n_items
    if n == 1:
        return Dendrogram(1, np.empty((0, 3), dtype=np.int64))
    rows = []
    nid = n
    roots = []
    for block in h.pure_clusters:
        chain, root = chain_merges(list(block), nid)
        rows.extend(chain)
        nid += len(chain)
        roots.append(root)
    for _ in range(h.levels):
        nxt = []
        for g in range(0, len(roots), 2):
            rows.append((roots[g], roots[g + 1], nid))
            nxt.append(nid)
            nid += 1
        roots = nxt
    return Dendrogram(n, np.array(rows, dtype=np.int64))


def standard_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))
