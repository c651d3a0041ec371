import numpy as np
import pytest

from quadhc.pairs import (
    canonical_pair,
    num_pairs,
    pair_decode,
    pair_decode_arr,
    pair_index,
    pair_index_arr,
)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 13])
def test_roundtrip_exhaustive(n):
    seen = []
    for a in range(n):
        for b in range(a + 1, n):
            idx = pair_index(a, b, n)
            assert pair_decode(idx, n) == (a, b)
            seen.append(idx)
    assert seen == list(range(num_pairs(n)))  # lexicographic rank


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    for n in (5, 240, 28680):
        m = num_pairs(n)
        idx = np.unique(
            np.concatenate([[0, 1, m - 2, m - 1], rng.integers(0, m, 500)])
        )
        a, b = pair_decode_arr(idx, n)
        for i, aa, bb in zip(idx.tolist(), a.tolist(), b.tolist()):
            assert (aa, bb) == pair_decode(i, n)
        assert np.array_equal(pair_index_arr(a, b, n), idx)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        pair_index(2, 2, 5)
    with pytest.raises(ValueError):
        pair_index(3, 2, 5)
    with pytest.raises(ValueError):
        pair_decode(10, 5)
    with pytest.raises(ValueError):
        canonical_pair(4, 4)
    assert canonical_pair(5, 2) == (2, 5)
