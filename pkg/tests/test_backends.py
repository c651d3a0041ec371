"""The numba kernels and their numpy twins must agree bit for bit."""

import numpy as np
import pytest

from quadhc.backend import NUMBA_ENABLED
from quadhc._kernels import (
    _passive_kernel_numpy,
    _pref_counts_np,
    preference_counts,
)
from quadhc.oracle import sample_passive
from quadhc.pairs import num_pairs, pair_decode_arr

from oracles import random_similarity


def _random_round_inputs(rng, n_quads=2000, n_pairs=300, n_cells=40, ndenom=3):
    pw = rng.integers(0, n_pairs, n_quads).astype(np.int32)
    pl = rng.integers(0, n_pairs, n_quads).astype(np.int32)
    paircell = rng.integers(-1, n_cells, n_pairs).astype(np.int32)
    dci = rng.integers(0, ndenom, n_cells).astype(np.int16)
    return pw, pl, paircell, dci


@pytest.mark.parametrize("seed", range(5))
def test_preference_counts_backends_agree(seed):
    rng = np.random.default_rng(seed)
    pw, pl, paircell, dci = _random_round_inputs(rng)
    ndenom = int(dci.max()) + 1
    acc_np = np.zeros(40 * ndenom, dtype=np.int64)
    dead_np = _pref_counts_np(pw, pl, paircell, dci, ndenom, acc_np)
    acc_sel = np.zeros_like(acc_np)
    dead_sel = preference_counts(pw, pl, paircell, dci, ndenom, acc_sel)
    assert dead_np == dead_sel
    assert np.array_equal(acc_np, acc_sel)
    if NUMBA_ENABLED:
        from quadhc._kernels import _pref_counts_nb

        acc_nb = np.zeros_like(acc_np)
        dead_nb = _pref_counts_nb(pw, pl, paircell, dci, ndenom, acc_nb)
        assert dead_nb == dead_np
        assert np.array_equal(acc_nb, acc_np)


@pytest.mark.parametrize("seed", range(3))
def test_passive_kernel_backends_agree(seed):
    n = 9
    w = random_similarity(n, np.random.default_rng(seed))
    qs = sample_passive(w, 0.4, seed=seed)
    npairs = num_pairs(n)
    pa, pb = pair_decode_arr(np.arange(npairs), n)
    args = (
        qs.winner.astype(np.int64),
        qs.loser.astype(np.int64),
        pa,
        pb,
        n,
        npairs,
    )
    k_np = _passive_kernel_numpy(*args)
    if NUMBA_ENABLED:
        from quadhc._kernels import _passive_kernel_numba

        k_nb = _passive_kernel_numba(*args)
        assert np.array_equal(k_np, k_nb)
    from quadhc._kernels import passive_kernel_matrix

    assert np.array_equal(passive_kernel_matrix(*args), k_np)
