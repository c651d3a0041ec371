"""Triangular index codecs for unordered pairs.

An unordered pair (a, b) with a < b over n items is addressed by its
row-major upper-triangle index, which is also its lexicographic rank:

    index(a, b) = a*(2n - a - 1)//2 + (b - a - 1)

The same codec, applied with n replaced by the number of pairs, addresses
unordered pairs-of-pairs. All codecs are exact integer arithmetic; the
vectorized decoders use a float sqrt seed corrected to the exact answer.
"""

import numpy as np


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(a: int, b: int, n: int) -> int:
    """Lexicographic rank of the pair (a, b), requires 0 <= a < b < n."""
    if not (0 <= a < b < n):
        raise ValueError(f"invalid pair ({a}, {b}) for n={n}")
    return a * (2 * n - a - 1) // 2 + (b - a - 1)


def pair_decode(idx: int, n: int):
    """Inverse of pair_index for a single index."""
    if not (0 <= idx < num_pairs(n)):
        raise ValueError(f"pair index {idx} out of range for n={n}")
    a = int((2 * n - 1 - ((2 * n - 1) ** 2 - 8 * idx) ** 0.5) // 2)
    # float sqrt can land one off; fix with exact offsets
    while a > 0 and a * (2 * n - a - 1) // 2 > idx:
        a -= 1
    while (a + 1) * (2 * n - a - 2) // 2 <= idx and a + 1 < n - 1:
        a += 1
    b = idx - a * (2 * n - a - 1) // 2 + a + 1
    return a, b


def pair_index_arr(a, b, n: int):
    """Vectorized pair_index; caller guarantees a < b elementwise."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return a * (2 * n - a - 1) // 2 + (b - a - 1)


_DECODE_CHUNK = 1 << 22


def pair_decode_arr(idx, n: int):
    """Vectorized pair_decode. Exact for n*(n-1)/2 < 2**52.

    All arithmetic runs in float64 on integers below 2**52, so it is exact;
    the sqrt seed sits within 1e-9 of the real root, hence one correction
    in each direction pins the row. Large inputs are chunked to bound the
    temporaries."""
    idx = np.asarray(idx)
    if idx.size > _DECODE_CHUNK:
        out_a = np.empty(idx.size, dtype=np.int64)
        out_b = np.empty(idx.size, dtype=np.int64)
        for s in range(0, idx.size, _DECODE_CHUNK):
            e = min(s + _DECODE_CHUNK, idx.size)
            out_a[s:e], out_b[s:e] = pair_decode_arr(idx[s:e], n)
        return out_a, out_b
    idxf = idx.astype(np.float64)
    t = 2.0 * n - 1.0
    a = np.floor((t - np.sqrt(t * t - 8.0 * idxf)) * 0.5)
    np.clip(a, 0.0, n - 2.0, out=a)
    off = a * (t - a) * 0.5
    down = off > idxf
    if down.any():
        a = a - down
        off = a * (t - a) * 0.5
    a1 = a + 1.0
    nxt = a1 * (t - a1) * 0.5
    bump = (nxt <= idxf) & (a1 <= n - 2.0)
    if bump.any():
        a = np.where(bump, a1, a)
        off = np.where(bump, nxt, off)
    b = idxf - off + a + 1.0
    return a.astype(np.int64), b.astype(np.int64)


def canonical_pair(i: int, j: int):
    """Order two distinct item indices as (min, max)."""
    if i == j:
        raise ValueError(f"degenerate pair ({i}, {j})")
    return (i, j) if i < j else (j, i)
