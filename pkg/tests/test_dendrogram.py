import numpy as np
import pytest

from quadhc.dendrogram import (
    Dendrogram,
    chain_merges,
    expand_to_leaves,
    random_dendrogram,
)


def test_members_and_cuts():
    d = Dendrogram(4, np.array([[0, 1, 4], [2, 3, 5], [4, 5, 6]]))
    assert d.members(4).tolist() == [0, 1]
    assert d.members(6).tolist() == [0, 1, 2, 3]
    np.testing.assert_array_equal(d.cut_at(4), [0, 1, 2, 3])
    np.testing.assert_array_equal(d.cut_at(2), [0, 0, 1, 1])
    np.testing.assert_array_equal(d.cut_at(1), [0, 0, 0, 0])
    with pytest.raises(ValueError):
        d.cut_at(0)
    with pytest.raises(ValueError):
        d.cut_at(5)


def test_cut_refinement_property():
    rng = np.random.default_rng(0)
    for seed in range(5):
        d = random_dendrogram(9, np.random.default_rng(seed))
        for k in range(2, 10):
            fine = d.cut_at(k)
            coarse = d.cut_at(k - 1)
            assert len(set(fine)) == k
            # every fine cluster sits inside one coarse cluster
            mapping = {}
            for f, c in zip(fine, coarse):
                assert mapping.setdefault(f, c) == c
    _ = rng


def test_newick_and_csv(tmp_path):
    d = Dendrogram(3, np.array([[1, 2, 3], [0, 3, 4]]))
    assert d.to_newick() == "(0,(1,2));"
    path = tmp_path / "linkage.csv"
    d.to_linkage_csv(path)
    assert Dendrogram.from_linkage_csv(path) == d


def test_single_leaf():
    d = Dendrogram(1, np.empty((0, 3)))
    assert d.to_newick() == "0;"
    np.testing.assert_array_equal(d.cut_at(1), [0])


def test_chain_merges():
    rows, root = chain_merges([3, 5, 7], 10)
    assert rows == [(3, 5, 10), (10, 7, 11)]
    assert root == 11
    rows, root = chain_merges([4], 10)
    assert rows == []
    assert root == 4


def test_expand_to_leaves():
    cluster_tree = Dendrogram(3, np.array([[0, 1, 3], [3, 2, 4]]))
    clusters = [[0, 1], [2], [3, 4, 5]]
    d = expand_to_leaves(cluster_tree, clusters)
    assert d.n_leaves == 6
    # chains first: members of each cluster merge in index order
    np.testing.assert_array_equal(d.cut_at(3), [0, 0, 1, 2, 2, 2])
    np.testing.assert_array_equal(d.cut_at(2), [0, 0, 0, 1, 1, 1])
    with pytest.raises(ValueError):
        expand_to_leaves(cluster_tree, [[0], [1]])


def test_lca_sizes_matches_brute():
    d = random_dendrogram(8, np.random.default_rng(3))
    sizes = d.lca_sizes()
    for i in range(8):
        for j in range(8):
            if i == j:
                continue
            node = next(
                int(new)
                for left, right, new in d.merges
                if i in d.members(int(new)) and j in d.members(int(new))
            )
            assert sizes[i, j] == d.members(node).size


def test_depth_partition():
    # balanced tree: depth partitions equal the k-cluster cuts
    d = Dendrogram(4, np.array([[0, 1, 4], [2, 3, 5], [4, 5, 6]]))
    np.testing.assert_array_equal(d.depth_partition(0), [0, 0, 0, 0])
    np.testing.assert_array_equal(d.depth_partition(1), d.cut_at(2))
    np.testing.assert_array_equal(d.depth_partition(2), d.cut_at(4))
    # caterpillar: depth 2 holds a pair, a mid leaf, and a shallow leaf
    chain = Dendrogram(4, np.array([[0, 1, 4], [4, 2, 5], [5, 3, 6]]))
    np.testing.assert_array_equal(chain.depth_partition(2), [0, 0, 1, 2])
    np.testing.assert_array_equal(chain.depth_partition(3), [0, 1, 2, 3])
    with pytest.raises(ValueError):
        chain.depth_partition(-1)


def test_random_dendrogram_valid():
    for seed in range(5):
        d = random_dendrogram(7, np.random.default_rng(seed))
        assert d.n_leaves == 7
        assert sorted(d.cut_at(7)) == list(range(7))


def test_equality():
    a = Dendrogram(3, np.array([[0, 1, 3], [3, 2, 4]]))
    b = Dendrogram(3, np.array([[0, 1, 3], [3, 2, 4]]))
    c = Dendrogram(3, np.array([[1, 2, 3], [0, 3, 4]]))
    assert a == b
    assert a != c
