"""Hot inner loops, in numba and pure-numpy variants.

Two computations dominate runtime at full scale (hundreds of items, tens of
millions of observed quadruplets):

* per-round accumulation of signed preference counts over cluster pairs,
  grouped by the opposite side's size-product class (preference linkage);
* bucketing every observed comparison by (reference pair, shared item) and
  accumulating within-bucket sign products into the proxy kernel matrix.

Both variants return bit-identical integers. Selection follows
backend.NUMBA_ENABLED; benchmarks/bench_backends.py times one against the
other.
"""

import numpy as np

from .backend import NUMBA_ENABLED


# ---------------------------------------------------------------------------
# preference-count accumulation (one agglomeration round)
# ---------------------------------------------------------------------------

def _pref_counts_py(pw, pl, paircell, dci, ndenom, acc):
    dead = 0
    for t in range(pw.shape[0]):
        u = paircell[pw[t]]
        v = paircell[pl[t]]
        if u < 0 or v < 0 or u == v:
            dead += 1
            continue
        acc[u * ndenom + dci[v]] += 1
        acc[v * ndenom + dci[u]] -= 1
    return dead


def _pref_counts_np(pw, pl, paircell, dci, ndenom, acc):
    u = paircell[pw]
    v = paircell[pl]
    alive = (u >= 0) & (v >= 0) & (u != v)
    dead = int(pw.shape[0] - np.count_nonzero(alive))
    u = u[alive].astype(np.int64)
    v = v[alive].astype(np.int64)
    plus = u * ndenom + dci[v]
    minus = v * ndenom + dci[u]
    acc += np.bincount(plus, minlength=acc.size)
    acc -= np.bincount(minus, minlength=acc.size)
    return dead


# ---------------------------------------------------------------------------
# passive kernel: bucket by (reference pair, shared item), accumulate products
# ---------------------------------------------------------------------------
# Every observation "pair w beats pair l" expands to four bucket entries:
# under reference l the items of w carry sign +1, under reference w the items
# of l carry sign -1. Entries are stored as sign*(item+1) in int16.

def _bucket_count_py(pw, pl, pair_a, pair_b, nitems, counts):
    for t in range(pw.shape[0]):
        w = pw[t]
        l = pl[t]
        counts[l * nitems + pair_a[w]] += 1
        counts[l * nitems + pair_b[w]] += 1
        counts[w * nitems + pair_a[l]] += 1
        counts[w * nitems + pair_b[l]] += 1


def _bucket_fill_py(pw, pl, pair_a, pair_b, nitems, heads, entries):
    for t in range(pw.shape[0]):
        w = pw[t]
        l = pl[t]
        aw = pair_a[w]
        bw = pair_b[w]
        al = pair_a[l]
        bl = pair_b[l]
        h = l * nitems + aw
        entries[heads[h]] = bw + 1
        heads[h] += 1
        h = l * nitems + bw
        entries[heads[h]] = aw + 1
        heads[h] += 1
        h = w * nitems + al
        entries[heads[h]] = -(bl + 1)
        heads[h] += 1
        h = w * nitems + bl
        entries[heads[h]] = -(al + 1)
        heads[h] += 1


def _bucket_accumulate_py(offsets, entries, kern):
    nb = offsets.shape[0] - 1
    for g in range(nb):
        s = offsets[g]
        e = offsets[g + 1]
        for x in range(s, e):
            ex = entries[x]
            if ex > 0:
                ix = ex - 1
                sx = 1
            else:
                ix = -ex - 1
                sx = -1
            for y in range(x + 1, e):
                ey = entries[y]
                if ey > 0:
                    kern[ix, ey - 1] += sx
                else:
                    kern[ix, -ey - 1] -= sx


if NUMBA_ENABLED:
    from numba import njit

    _pref_counts_nb = njit(cache=True)(_pref_counts_py)
    _bucket_count_nb = njit(cache=True)(_bucket_count_py)
    _bucket_fill_nb = njit(cache=True)(_bucket_fill_py)
    _bucket_accumulate_nb = njit(cache=True)(_bucket_accumulate_py)


def preference_counts(pw, pl, paircell, dci, ndenom, acc):
    """Accumulate signed counts into acc[cell*ndenom + class(other cell)].

    Returns the number of quadruplets that can no longer contribute (a side
    fell inside one cluster, or both sides straddle the same cluster pair);
    both conditions are permanent, so callers may compact on that signal.
    """
    if NUMBA_ENABLED:
        return _pref_counts_nb(pw, pl, paircell, dci, ndenom, acc)
    return _pref_counts_np(pw, pl, paircell, dci, ndenom, acc)


def _passive_kernel_numba(pw, pl, pair_a, pair_b, nitems, npairs):
    nbuckets = npairs * nitems
    counts = np.zeros(nbuckets, np.int32)
    _bucket_count_nb(pw, pl, pair_a, pair_b, nitems, counts)
    offsets = np.zeros(nbuckets + 1, np.int64)
    np.cumsum(counts, out=offsets[1:])
    entries = np.empty(int(offsets[-1]), np.int16)
    heads = offsets[:-1].copy()
    _bucket_fill_nb(pw, pl, pair_a, pair_b, nitems, heads, entries)
    kern = np.zeros((nitems, nitems), np.int64)
    _bucket_accumulate_nb(offsets, entries, kern)
    return kern + kern.T


def _passive_kernel_numpy(pw, pl, pair_a, pair_b, nitems, npairs):
    pw64 = pw.astype(np.int64)
    pl64 = pl.astype(np.int64)
    bucket = np.concatenate([
        pl64 * nitems + pair_a[pw],
        pl64 * nitems + pair_b[pw],
        pw64 * nitems + pair_a[pl],
        pw64 * nitems + pair_b[pl],
    ])
    entry = np.concatenate([
        pair_b[pw].astype(np.int64) + 1,
        pair_a[pw].astype(np.int64) + 1,
        -(pair_b[pl].astype(np.int64) + 1),
        -(pair_a[pl].astype(np.int64) + 1),
    ])
    order = np.argsort(bucket, kind="stable")
    bucket = bucket[order]
    entry = entry[order]
    kflat = np.zeros(nitems * nitems, np.int64)
    if bucket.size:
        starts = np.flatnonzero(np.r_[True, bucket[1:] != bucket[:-1]])
        sizes = np.diff(np.r_[starts, bucket.size])
        for d in np.unique(sizes):
            if d < 2:
                continue
            sel = starts[sizes == d]
            iu, ju = np.triu_indices(d, 1)
            step = max(1, 8_000_000 // (d * d))
            for c0 in range(0, sel.size, step):
                ss = sel[c0:c0 + step]
                block = entry[ss[:, None] + np.arange(d)]
                items = np.abs(block) - 1
                signs = np.sign(block)
                codes = (items[:, iu] * nitems + items[:, ju]).ravel()
                wts = (signs[:, iu] * signs[:, ju]).ravel().astype(np.float64)
                kflat += np.bincount(
                    codes, weights=wts, minlength=kflat.size
                ).astype(np.int64)
    kern = kflat.reshape(nitems, nitems)
    return kern + kern.T


def passive_kernel_matrix(pw, pl, pair_a, pair_b, nitems, npairs):
    """Dense integer proxy-similarity matrix from observed comparisons.

    pw/pl are winner/loser pair indices per observation; pair_a/pair_b decode
    a pair index to its two items. The diagonal of the result is zero.
    """
    if NUMBA_ENABLED:
        return _passive_kernel_numba(pw, pl, pair_a, pair_b, nitems, npairs)
    return _passive_kernel_numpy(pw, pl, pair_a, pair_b, nitems, npairs)
