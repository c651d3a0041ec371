"""Quadruplet comparison access: active oracle and passive sampling.

All similarity access during clustering goes through ordered comparisons of
unordered item pairs. The active oracle answers "is pair p more similar
than pair q" on demand, counting distinct queries; the passive sampler
draws, once, an independent Bernoulli(p) subset of all pairs-of-pairs and
records each outcome.

Exact score ties only arise on degenerate data (the noiseless model,
duplicated feature rows). The boolean comparison order breaks them by pair
index, smaller index more similar, so sorting-based algorithms stay
deterministic; the sign interfaces report 0 instead, and a tied
pair-of-pairs yields no passive observation, because no strict statement
exists for it.
"""

import csv
import math
from typing import NamedTuple

import numpy as np

from .pairs import canonical_pair, num_pairs, pair_decode_arr, pair_index


class PairId(NamedTuple):
    a: int
    b: int


def make_pair(i: int, j: int) -> PairId:
    return PairId(*canonical_pair(int(i), int(j)))


class Quadruplet(NamedTuple):
    winner: PairId
    loser: PairId


def _as_pair_code(p, n: int) -> int:
    if isinstance(p, (int, np.integer)):
        if not (0 <= p < num_pairs(n)):
            raise ValueError(f"pair index {p} out of range")
        return int(p)
    a, b = canonical_pair(int(p[0]), int(p[1]))
    return pair_index(a, b, n)


class ActiveOracle:
    """Adaptive quadruplet queries against a hidden similarity matrix.

    query_count counts distinct pair-of-pairs only; repeating a query hits
    the answer cache and does not increment it.
    """

    def __init__(self, matrix):
        self.n = matrix.n
        self._w = matrix.condensed()
        self._w.setflags(write=False)
        self._npairs = num_pairs(self.n)
        self._seen = set()
        self._seen_arr = np.empty(0, dtype=np.int64)
        self._pending = []

    def _fold_pending(self):
        if not self._pending:
            return
        stack = np.unique(np.concatenate(self._pending))
        self._pending.clear()
        if stack.size:
            self._seen_arr = np.union1d(self._seen_arr, stack)
        if self._seen and self._seen_arr.size:
            arr = np.fromiter(self._seen, dtype=np.int64, count=len(self._seen))
            pos = np.minimum(
                np.searchsorted(self._seen_arr, arr), self._seen_arr.size - 1
            )
            for c in arr[self._seen_arr[pos] == arr]:
                self._seen.discard(int(c))

    @property
    def query_count(self) -> int:
        self._fold_pending()
        return len(self._seen) + int(self._seen_arr.size)

    def _pop_code(self, pc: int, qc: int) -> int:
        lo, hi = (pc, qc) if pc < qc else (qc, pc)
        return lo * self._npairs + hi

    def _record(self, code: int):
        if code in self._seen:
            return
        pos = np.searchsorted(self._seen_arr, code)
        if pos < self._seen_arr.size and self._seen_arr[pos] == code:
            return
        self._seen.add(code)

    def compare_codes(self, pc: int, qc: int) -> bool:
        """True iff pair pc is more similar than pair qc (tie: lower index)."""
        if pc == qc:
            raise ValueError("cannot compare a pair with itself")
        self._record(self._pop_code(pc, qc))
        wp = self._w[pc]
        wq = self._w[qc]
        if wp != wq:
            return bool(wp > wq)
        return pc < qc

    def compare(self, p, q) -> bool:
        pc = _as_pair_code(p, self.n)
        qc = _as_pair_code(q, self.n)
        return self.compare_codes(pc, qc)

    def compare_sign(self, p, q) -> int:
        """Three-way comparison: +1 if p beats q, -1 if q beats p, 0 on an
        exact tie (no strict statement exists for tied scores)."""
        pc = _as_pair_code(p, self.n)
        qc = _as_pair_code(q, self.n)
        if pc == qc:
            raise ValueError("cannot compare a pair with itself")
        self._record(self._pop_code(pc, qc))
        wp = self._w[pc]
        wq = self._w[qc]
        return int(np.sign(wp - wq))

    def compare_batch_signs(self, p_codes, q_codes) -> np.ndarray:
        """Vectorized three-way comparisons (+1, -1, or 0 on exact ties).

        New queries accumulate in a pending buffer; reading query_count
        folds them into the distinct-query set.
        """
        p_codes = np.asarray(p_codes, dtype=np.int64)
        q_codes = np.asarray(q_codes, dtype=np.int64)
        if np.any(p_codes == q_codes):
            raise ValueError("cannot compare a pair with itself")
        lo = np.minimum(p_codes, q_codes)
        hi = np.maximum(p_codes, q_codes)
        self._pending.append(lo * self._npairs + hi)
        wp = self._w[p_codes]
        wq = self._w[q_codes]
        return np.sign(wp - wq).astype(np.int8)


class QuadrupletSet:
    """Immutable set of oriented pair comparisons.

    Stored as parallel winner/loser pair-index arrays sorted by the
    canonical pair-of-pairs code; at most one orientation per unordered
    pair-of-pairs.
    """

    def __init__(self, n_items: int, winner, loser, _validated=False, _presorted=False):
        winner = np.asarray(winner, dtype=np.int64)
        loser = np.asarray(loser, dtype=np.int64)
        if winner.shape != loser.shape or winner.ndim != 1:
            raise ValueError("winner/loser arrays must be parallel 1-d")
        npairs = num_pairs(n_items)
        if not _validated:
            if winner.size and (
                winner.min() < 0
                or loser.min() < 0
                or max(winner.max(), loser.max()) >= npairs
            ):
                raise ValueError("pair index out of range")
            if np.any(winner == loser):
                raise ValueError("a pair cannot beat itself")
        codes = np.minimum(winner, loser) * npairs + np.maximum(winner, loser)
        if not _presorted:
            order = np.argsort(codes, kind="stable")
            codes = codes[order]
            winner = winner[order]
            loser = loser[order]
        if codes.size > 1 and np.any(codes[1:] == codes[:-1]):
            raise ValueError("duplicate orientation for a pair-of-pairs")
        self.n_items = int(n_items)
        self.n_pairs = npairs
        self.winner = winner
        self.loser = loser
        self._codes = codes
        for arr in (self.winner, self.loser, self._codes):
            arr.setflags(write=False)
        self._by_ref = None

    def __len__(self):
        return int(self.winner.size)

    def orientation(self, p, q) -> int:
        """+1 if p beats q, -1 if q beats p, 0 if unobserved."""
        pc = _as_pair_code(p, self.n_items)
        qc = _as_pair_code(q, self.n_items)
        if pc == qc:
            raise ValueError("degenerate pair-of-pairs")
        lo, hi = (pc, qc) if pc < qc else (qc, pc)
        code = lo * self.n_pairs + hi
        pos = np.searchsorted(self._codes, code)
        if pos >= self._codes.size or self._codes[pos] != code:
            return 0
        return 1 if self.winner[pos] == pc else -1

    def contains(self, winner, loser) -> bool:
        return self.orientation(winner, loser) == 1

    def observations(self):
        """Iterate Quadruplet records (test-scale convenience)."""
        from .pairs import pair_decode

        for w, l in zip(self.winner, self.loser):
            yield Quadruplet(
                PairId(*pair_decode(int(w), self.n_items)),
                PairId(*pair_decode(int(l), self.n_items)),
            )

    def by_reference(self, p) -> tuple:
        """(other pair indices, signs): sign +1 means the other pair beats p."""
        if self._by_ref is None:
            refs = np.concatenate([self.loser, self.winner])
            other = np.concatenate([self.winner, self.loser])
            sign = np.concatenate(
                [
                    np.ones(len(self), dtype=np.int8),
                    -np.ones(len(self), dtype=np.int8),
                ]
            )
            order = np.argsort(refs, kind="stable")
            refs = refs[order]
            counts = np.bincount(refs, minlength=self.n_pairs)
            offsets = np.zeros(self.n_pairs + 1, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            self._by_ref = (offsets, other[order], sign[order])
        pc = _as_pair_code(p, self.n_items)
        offsets, other, sign = self._by_ref
        s, e = offsets[pc], offsets[pc + 1]
        return other[s:e], sign[s:e]

    def to_csv(self, path):
        aw, bw = pair_decode_arr(self.winner, self.n_items)
        al, bl = pair_decode_arr(self.loser, self.n_items)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "k", "l"])
            for row in zip(aw, bw, al, bl):
                writer.writerow([int(v) for v in row])

    @classmethod
    def from_csv(cls, path, n_items=None):
        quads = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["i", "j", "k", "l"]:
                raise ValueError(f"{path}: expected header i,j,k,l")
            for ln, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    i, j, k, l = (int(v) for v in row)
                except ValueError as exc:
                    raise ValueError(f"{path}: line {ln}: {exc}") from None
                quads.append((i, j, k, l))
        if n_items is None:
            n_items = 1 + max(max(q) for q in quads) if quads else 0
        winner = []
        loser = []
        for ln, (i, j, k, l) in enumerate(quads, start=2):
            try:
                wc = pair_index(*canonical_pair(i, j), n_items)
                lc = pair_index(*canonical_pair(k, l), n_items)
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            winner.append(wc)
            loser.append(lc)
        return cls(n_items, winner, loser)


def _bernoulli_positions(m_total: int, p: float, rng) -> np.ndarray:
    """Positions of successes of m_total independent Bernoulli(p) draws,
    generated through geometric gaps so memory stays proportional to the
    number of successes."""
    if p <= 0.0 or m_total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(m_total, dtype=np.int64)
    log_q = math.log1p(-p)
    chunks = []
    pos = -1  # last success position
    chunk = 1 << 19
    while True:
        u = rng.random(chunk)
        gaps = np.floor(np.log1p(-u) / log_q).astype(np.int64)
        idx = pos + np.cumsum(gaps + 1)
        if idx.size == 0:
            break
        if idx[-1] >= m_total:
            chunks.append(idx[idx < m_total])
            break
        chunks.append(idx)
        pos = int(idx[-1])
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


def sample_passive(matrix, p: float, seed: int) -> QuadrupletSet:
    """Observe each unordered pair-of-pairs independently with probability p.

    Enumeration covers all {(i,j), (k,l)} with (i,j) before (k,l) in pair
    order; items may overlap across the two pairs. The orientation is the
    true strict comparison. A sampled pair-of-pairs whose hidden scores tie
    exactly admits no strict statement and yields no observation (this only
    happens on degenerate data such as the noiseless model).
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"sampling probability {p} outside [0, 1]")
    n = matrix.n
    npairs = num_pairs(n)
    m_total = num_pairs(npairs)
    if m_total >= 1 << 62:
        raise OverflowError("pair-of-pairs domain exceeds the index type")
    rng = np.random.Generator(np.random.Philox(seed))
    codes = _bernoulli_positions(m_total, p, rng)
    p1, p2 = pair_decode_arr(codes, npairs)
    w = matrix.condensed()
    w1 = w[p1]
    w2 = w[p2]
    strict = w1 != w2
    p1 = p1[strict]
    p2 = p2[strict]
    first_wins = w1[strict] > w2[strict]
    winner = np.where(first_wins, p1, p2)
    loser = np.where(first_wins, p2, p1)
    return QuadrupletSet(n, winner, loser, _validated=True, _presorted=True)


def ingest_triplets(triplets, n_items=None) -> QuadrupletSet:
    """Convert "i is more similar to j than to k" statements.

    Each triplet becomes the quadruplet (i,j) beats (i,k). Duplicates
    collapse; contradictory orientations resolve by majority and exact ties
    are dropped.
    """
    votes = {}
    max_idx = -1
    for t in triplets:
        i, j, k = (int(v) for v in t)
        if len({i, j, k}) != 3:
            raise ValueError(f"malformed triplet {t!r}: repeated index")
        max_idx = max(max_idx, i, j, k)
        wp = canonical_pair(i, j)
        lp = canonical_pair(i, k)
        key = (wp, lp) if wp < lp else (lp, wp)
        sign = 1 if wp < lp else -1  # +1: first pair of key wins
        votes[key] = votes.get(key, 0) + sign
    if n_items is None:
        n_items = max_idx + 1
    winner = []
    loser = []
    for (pa, pb), v in sorted(votes.items()):
        if v == 0:
            continue
        wp, lp = (pa, pb) if v > 0 else (pb, pa)
        winner.append(pair_index(*wp, n_items))
        loser.append(pair_index(*lp, n_items))
    return QuadrupletSet(n_items, winner, loser)


def read_triplets_csv(path):
    triplets = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["i", "j", "k"]:
            raise ValueError(f"{path}: expected header i,j,k")
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                triplets.append(tuple(int(v) for v in row))
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            if len(triplets[-1]) != 3:
                raise ValueError(f"{path}: line {ln}: expected three indices")
    return triplets
