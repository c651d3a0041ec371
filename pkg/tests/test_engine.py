import numpy as np
import pytest

from quadhc.engine import (
    ContractViolation,
    IntegerAverageStrategy,
    LinkageStrategy,
    ScoreMatrixStrategy,
    agglomerate,
)
from quadhc.planted import PlantedConfig, generate_planted

from oracles import (
    brute_average_linkage,
    brute_extreme_linkage,
    exhaustive_average_strategy,
    random_similarity,
)


def test_two_cluster_merge():
    strat = ScoreMatrixStrategy(np.array([[0, 1], [1, 0]]))
    d = agglomerate(strat, [[0], [1]])
    assert d.merges.tolist() == [[0, 1, 2]]


def test_average_linkage_on_noiseless_blocks():
    # four singleton pure clusters: the two level-1 sibling pairs merge first
    w, _ = generate_planted(PlantedConfig(n0=1, levels=2, mu=0.8, delta=0.1, sigma=0.0))
    strat = exhaustive_average_strategy(w)
    d = agglomerate(strat, [[i] for i in range(4)])
    assert d.merges.tolist() == [[0, 1, 4], [2, 3, 5], [4, 5, 6]]


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_single_linkage_strategy_matches_brute(n):
    for seed in range(4):
        w = random_similarity(n, np.random.default_rng(seed * 17 + n))
        strat = ScoreMatrixStrategy(np.nan_to_num(w.entries), combine="max")
        got = agglomerate(strat, [[i] for i in range(n)])
        assert got == brute_extreme_linkage(w, "max")


def test_integer_average_strategy_matches_brute():
    rng = np.random.default_rng(5)
    for trial in range(10):
        n = int(rng.integers(3, 8))
        scores = rng.integers(-20, 20, (n, n))
        scores = np.triu(scores, 1)
        scores = scores + scores.T
        got = agglomerate(IntegerAverageStrategy(scores), [[i] for i in range(n)])
        assert got == brute_average_linkage(scores)


def test_permutation_equivariance():
    n = 8
    for seed in range(5):
        rng = np.random.default_rng(seed)
        w = random_similarity(n, rng)
        perm = rng.permutation(n)
        permuted = w.entries[np.ix_(perm, perm)].copy()
        from quadhc.planted import SimilarityMatrix

        wp = SimilarityMatrix(permuted)
        d1 = agglomerate(
            ScoreMatrixStrategy(np.nan_to_num(w.entries), "max"),
            [[i] for i in range(n)],
        )
        d2 = agglomerate(
            ScoreMatrixStrategy(np.nan_to_num(wp.entries), "max"),
            [[i] for i in range(n)],
        )
        # permuted run must produce the correspondingly relabeled tree:
        # compare every cut as a set of frozensets after undoing the labels
        for k in range(1, n + 1):
            c1 = d1.cut_at(k)
            c2 = d2.cut_at(k)
            parts1 = {
                frozenset(np.flatnonzero(c1 == c).tolist()) for c in range(k)
            }
            parts2 = {
                frozenset(perm[np.flatnonzero(c2 == c)].tolist()) for c in range(k)
            }
            assert parts1 == parts2


def test_all_equal_scores_tiebreak_lexicographic():
    scores = np.ones((4, 4), dtype=np.int64)
    d = agglomerate(ScoreMatrixStrategy(scores), [[i] for i in range(4)])
    assert d.merges.tolist() == [[0, 1, 4], [2, 3, 5], [4, 5, 6]]


def test_merge_counts_and_ids():
    n = 6
    w = random_similarity(n, np.random.default_rng(2))
    d = agglomerate(
        ScoreMatrixStrategy(np.nan_to_num(w.entries), "min"),
        [[i] for i in range(n)],
    )
    assert d.merges.shape == (n - 1, 3)
    inputs = np.concatenate([d.merges[:, 0], d.merges[:, 1]])
    assert len(set(inputs.tolist())) == inputs.size  # each node merged once


class _BadStrategy(LinkageStrategy):
    def argmax_pair(self):
        return (0, 0)

    def notify_merge(self, a, b, new_id):
        pass


class _StaleStrategy(LinkageStrategy):
    def __init__(self):
        self.calls = 0

    def argmax_pair(self):
        self.calls += 1
        return (0, 1)  # stale after the first merge

    def notify_merge(self, a, b, new_id):
        pass


def test_contract_violations():
    with pytest.raises(ContractViolation):
        agglomerate(_BadStrategy(), [[0], [1], [2]])
    with pytest.raises(ContractViolation):
        agglomerate(_StaleStrategy(), [[0], [1], [2]])
    with pytest.raises(ValueError):
        agglomerate(_BadStrategy(), [[0]])
    with pytest.raises(ValueError):
        agglomerate(_BadStrategy(), [[0, 1], [1]])


def test_unexpanded_cluster_tree():
    scores = np.array([[0, 5, 1], [5, 0, 2], [1, 2, 0]])
    d = agglomerate(ScoreMatrixStrategy(scores), [[0, 1], [2], [3]], expand=False)
    assert d.n_leaves == 3
    d_full = agglomerate(ScoreMatrixStrategy(scores), [[0, 1], [2], [3]])
    assert d_full.n_leaves == 4
    np.testing.assert_array_equal(d_full.cut_at(3), [0, 0, 1, 2])
