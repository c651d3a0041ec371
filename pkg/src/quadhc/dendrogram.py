"""Binary merge trees (dendrograms) and their cuts.

A dendrogram over n leaves is an ordered list of n-1 merges. Leaves carry
ids 0..n-1; the merge at step t creates node n+t from two previously
unmerged nodes. Merge order is the only notion of height.
"""

import csv

import numpy as np


class Dendrogram:
    def __init__(self, n_leaves: int, merges):
        merges = np.asarray(merges, dtype=np.int64)
        if n_leaves < 1:
            raise ValueError("dendrogram needs at least one leaf")
        if merges.shape != (max(n_leaves - 1, 0), 3) and not (
            n_leaves == 1 and merges.size == 0
        ):
            raise ValueError(
                f"expected {n_leaves - 1} merges of (left, right, new), "
                f"got shape {merges.shape}"
            )
        merges = merges.reshape(max(n_leaves - 1, 0), 3)
        used = np.zeros(2 * n_leaves - 1, dtype=bool)
        for t, (left, right, new) in enumerate(merges):
            if new != n_leaves + t:
                raise ValueError(f"merge {t}: new node must be {n_leaves + t}")
            for node in (left, right):
                if not (0 <= node < n_leaves + t):
                    raise ValueError(f"merge {t}: node {node} not yet created")
                if used[node]:
                    raise ValueError(f"merge {t}: node {node} merged twice")
                used[node] = True
            if left == right:
                raise ValueError(f"merge {t}: cannot merge node {left} with itself")
        self.n_leaves = int(n_leaves)
        self._merges = merges
        self._members_cache = {}

    @property
    def merges(self):
        return self._merges

    @property
    def n_nodes(self):
        return 2 * self.n_leaves - 1

    def __eq__(self, other):
        return (
            isinstance(other, Dendrogram)
            and self.n_leaves == other.n_leaves
            and np.array_equal(self._merges, other._merges)
        )

    def __repr__(self):
        return f"Dendrogram(n_leaves={self.n_leaves})"

    def members(self, node: int) -> np.ndarray:
        """Sorted leaf indices under a node."""
        if not (0 <= node < self.n_nodes):
            raise ValueError(f"node {node} out of range")
        if node < self.n_leaves:
            return np.array([node], dtype=np.int64)
        cached = self._members_cache.get(node)
        if cached is None:
            left, right, _ = self._merges[node - self.n_leaves]
            cached = np.sort(
                np.concatenate([self.members(int(left)), self.members(int(right))])
            )
            self._members_cache[node] = cached
        return cached

    def cut_at(self, k: int) -> np.ndarray:
        """Labels of the partition with exactly k clusters.

        Performs the first n-k merges, equivalently undoes the last k-1.
        Labels are densified in order of smallest member.
        """
        n = self.n_leaves
        if not (1 <= k <= n):
            raise ValueError(f"cut size {k} outside 1..{n}")
        node_of = np.arange(n, dtype=np.int64)
        for t in range(n - k):
            left, right, new = self._merges[t]
            lm = self.members(int(left))
            rm = self.members(int(right))
            node_of[lm] = new
            node_of[rm] = new
        _, labels = np.unique(node_of, return_inverse=True)
        # relabel so cluster labels follow smallest-member order
        first = np.full(labels.max() + 1, n, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            first[labels[i]] = i
        order = np.argsort(first, kind="stable")
        remap = np.empty_like(order)
        remap[order] = np.arange(order.size)
        return remap[labels]

    def node_depths(self) -> np.ndarray:
        """Depth of every node; the root has depth 0."""
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for left, right, new in self._merges[::-1]:
            depths[left] = depths[new] + 1
            depths[right] = depths[new] + 1
        return depths

    def depth_partition(self, ell: int) -> np.ndarray:
        """Partition of the leaves at tree depth ell.

        Clusters are the nodes sitting at depth exactly ell; a leaf shallower
        than ell stands alone. Labels follow smallest-member order.
        """
        if ell < 0:
            raise ValueError("depth must be non-negative")
        n = self.n_leaves
        depths = self.node_depths()
        labels = np.full(n, -1, dtype=np.int64)
        nxt = 0
        for node in range(self.n_nodes):
            if depths[node] == ell:
                members = self.members(node)
                if labels[members[0]] == -1:
                    labels[members] = nxt
                    nxt += 1
        for i in range(n):
            if labels[i] == -1:
                labels[i] = nxt
                nxt += 1
        first = np.full(nxt, n, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            first[labels[i]] = i
        order = np.argsort(first, kind="stable")
        remap = np.empty_like(order)
        remap[order] = np.arange(order.size)
        return remap[labels]

    def lca_sizes(self) -> np.ndarray:
        """Matrix of |smallest cluster containing both leaves|, diagonal 1."""
        n = self.n_leaves
        out = np.ones((n, n), dtype=np.int64)
        for t in range(n - 1):
            left, right, _ = self._merges[t]
            lm = self.members(int(left))
            rm = self.members(int(right))
            size = lm.size + rm.size
            out[np.ix_(lm, rm)] = size
            out[np.ix_(rm, lm)] = size
        return out

    def to_newick(self) -> str:
        n = self.n_leaves
        if n == 1:
            return "0;"
        texts = {}
        for t, (left, right, new) in enumerate(self._merges):
            lt = texts.pop(int(left), None) or str(int(left))
            rt = texts.pop(int(right), None) or str(int(right))
            texts[int(new)] = f"({lt},{rt})"
        root = self._merges[-1][2]
        return texts[int(root)] + ";"

    def to_linkage_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "left", "right", "new", "height"])
            for t, (left, right, new) in enumerate(self._merges):
                writer.writerow([t, int(left), int(right), int(new), t + 1])

    @classmethod
    def from_linkage_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rows.append((int(row["left"]), int(row["right"]), int(row["new"])))
        return cls(len(rows) + 1, np.array(rows, dtype=np.int64))


def chain_merges(members, start_new_id):
    """Merges chaining the given leaves in the listed order.

    Returns (merge rows, root node id). A single member chains to itself.
    """
    members = list(members)
    rows = []
    root = members[0]
    nid = start_new_id
    for m in members[1:]:
        rows.append((root, m, nid))
        root = nid
        nid += 1
    return rows, root


def expand_to_leaves(cluster_dendrogram: Dendrogram, clusters) -> Dendrogram:
    """Turn a dendrogram over clusters into one over their member items.

    Members of each cluster are first chained in ascending index order; the
    cluster-level merges then apply on top of the chain roots. Leaf ids are
    the member items themselves; the result has sum(len(c)) leaves.
    """
    k0 = len(clusters)
    if cluster_dendrogram.n_leaves != k0:
        raise ValueError("cluster count mismatch")
    n = sum(len(c) for c in clusters)
    rows = []
    nid = n
    root_of = {}
    for cid, mem in enumerate(clusters):
        chain, root = chain_merges(sorted(int(m) for m in mem), nid)
        rows.extend(chain)
        nid += len(chain)
        root_of[cid] = root
    for left, right, new in cluster_dendrogram.merges:
        rows.append((root_of[int(left)], root_of[int(right)], nid))
        root_of[int(new)] = nid
        nid += 1
    return Dendrogram(n, np.array(rows, dtype=np.int64))


def random_dendrogram(n: int, rng) -> Dendrogram:
    """Random merge order: each step joins a uniformly random cluster pair."""
    active = list(range(n))
    rows = []
    nid = n
    while len(active) > 1:
        i, j = rng.choice(len(active), size=2, replace=False)
        a, b = active[int(i)], active[int(j)]
        if a > b:
            a, b = b, a
        active = [x for x in active if x not in (a, b)]
        active.append(nid)
        rows.append((a, b, nid))
        nid += 1
    return Dendrogram(n, np.array(rows, dtype=np.int64))
