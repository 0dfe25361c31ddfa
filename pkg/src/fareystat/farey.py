"""Enumeration of the n-dimensional Farey set F_Q and exact counting on the torus.

Points are stored as integer arrays ``p`` (shape (N, n)) and ``q`` (shape (N,)),
sorted lexicographically by ``(q, p)``.  Range queries go through a lazily
built :class:`GridIndex`; every candidate is then decided by the exact
predicate in :mod:`fareystat.sets`.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .numtheory import build_table, zeta_real
from .sets import TestSet

DEFAULT_MEMORY_BUDGET = 2 * 1024 ** 3
MAX_CELLS_PER_AXIS = 1024
EXACT_FLOAT_INT = 2 ** 53
# float margin for candidate search; decisions are made by the exact predicate
SEARCH_EPS = 1e-11
QUERY_CHUNK = 1 << 15

Rational = Union[int, float, Fraction]


class FareyTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FareyPoint:
    p: tuple
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        if any(not 0 <= c < self.q for c in self.p):
            raise ValueError("coordinates must satisfy 0 <= p_i < q")
        if math.gcd(*self.p, self.q) != 1:
            raise ValueError("(p, q) is not primitive")

    def as_fractions(self) -> tuple:
        return tuple(Fraction(c, self.q) for c in self.p)


def sigma(n: int, Q: float) -> float:
    """Asymptotic size Q^(n+1) / ((n+1) zeta(n+1)) of F_Q."""
    if n < 1 or Q < 1:
        raise ValueError("need n >= 1 and Q >= 1")
    return Q ** (n + 1) / ((n + 1) * zeta_real(n + 1))


def scale(n: int, Q: float) -> float:
    """The length scale sigma_Q^(-1/n) applied to test sets."""
    return sigma(n, Q) ** (-1.0 / n)


def cardinality(n: int, Q: int) -> int:
    """Exact |F_Q| = sum_{q <= Q} J_n(q)."""
    return int(sum(build_table(Q, n).jordan[1:].tolist()))


class FareySequence:
    """The Farey points of level ``Q`` in [0,1)^n."""

    def __init__(self, n: int, Q: int, p: np.ndarray, q: np.ndarray):
        self.n = n
        self.Q = Q
        self.p = p
        self.q = q
        self.p.setflags(write=False)
        self.q.setflags(write=False)
        self._index: Optional[GridIndex] = None

    def __len__(self) -> int:
        return len(self.q)

    def __iter__(self) -> Iterator[FareyPoint]:
        for row, q in zip(self.p.tolist(), self.q.tolist()):
            yield FareyPoint(tuple(row), q)

    def __getitem__(self, i: int) -> FareyPoint:
        return FareyPoint(tuple(int(c) for c in self.p[i]), int(self.q[i]))

    @property
    def sigma(self) -> float:
        return sigma(self.n, self.Q)

    @property
    def scale(self) -> float:
        return scale(self.n, self.Q)

    def values(self) -> np.ndarray:
        return self.p / self.q[:, None].astype(np.float64)

    def index(self, rho: Optional[float] = None) -> "GridIndex":
        """Grid index sized for query sets of diameter ``rho``.

        The cached index is reused unless the query is at least twice as
        fine, or more than twice as coarse, as the one it was built for.
        """
        M = cells_for(rho)
        idx = self._index
        if idx is None or (self.n > 1 and not idx.M / 2 < M < 2 * idx.M):
            idx = GridIndex(self, M)
            self._index = idx
        return idx

    def to_csv(self, path: Union[str, Path]) -> None:
        header = ",".join([f"p{i + 1}" for i in range(self.n)] + ["q"])
        data = np.column_stack([self.p, self.q])
        np.savetxt(path, data, fmt="%d", delimiter=",", header=header, comments="")


def cells_for(rho: Optional[float]) -> int:
    if rho is None or rho <= 0:
        return MAX_CELLS_PER_AXIS
    return int(min(max(math.floor(1.0 / rho), 1), MAX_CELLS_PER_AXIS))


def _prime_factors(q: int) -> list:
    out, r, f = [], q, 2
    while f * f <= r:
        if r % f == 0:
            out.append(f)
            while r % f == 0:
                r //= f
        f += 1
    if r > 1:
        out.append(r)
    return out


def _level_points(n: int, q: int) -> np.ndarray:
    """All p in [0, q)^n with gcd(p, q) = 1, in lexicographic order.

    A vector fails primitivity exactly when some prime factor r of q
    divides every coordinate, i.e. it lies on the strided sublattice rZ^n.
    """
    keep = np.ones((q,) * n, dtype=bool)
    for r in _prime_factors(q):
        keep[(slice(None, None, r),) * n] = False
    if q == 1:
        keep[...] = True
    return np.argwhere(keep)


def enumerate_farey(n: int, Q: int, memory_budget: int = DEFAULT_MEMORY_BUDGET,
                    workers: int = 1) -> FareySequence:
    """All primitive (p, q) with 0 <= p_i < q <= Q, sorted by (q, p)."""
    if n < 1 or Q < 1:
        raise ValueError("need n >= 1 and Q >= 1")
    size = cardinality(n, Q)
    itemsize = 4 if Q < 2 ** 31 else 8
    needed = size * (n + 1) * itemsize
    if needed > memory_budget:
        raise FareyTooLarge(
            f"F_Q for n={n}, Q={Q} has {size} points (~{needed / 2**20:.0f} MiB), "
            f"over the memory budget of {memory_budget / 2**20:.0f} MiB")
    dtype = np.int32 if itemsize == 4 else np.int64

    def chunk(qs: range) -> np.ndarray:
        parts = []
        for q in qs:
            pts = _level_points(n, q).astype(dtype)
            parts.append(np.column_stack([pts, np.full(len(pts), q, dtype=dtype)]))
        return np.concatenate(parts) if parts else np.zeros((0, n + 1), dtype=dtype)

    if workers > 1 and Q > 64:
        bounds = np.linspace(1, Q + 1, workers + 1).astype(int)
        ranges = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(workers) as ex:
            blocks = list(ex.map(chunk, ranges))
    else:
        blocks = [chunk(range(1, Q + 1))]
    data = np.concatenate(blocks)
    assert len(data) == size
    return FareySequence(n, Q, np.ascontiguousarray(data[:, :n]), np.ascontiguousarray(data[:, n]))


class GridIndex:
    """Points bucketed by the cells of an M^n partition of [0,1)^n.

    Points are ordered by the cell coordinates along axes 2..n (the "row")
    and then by their first coordinate, so every cell is a contiguous run
    and the first axis can be range-searched by bisection.  Sort keys are
    ``row << bits | floor(x_1 * 2**bits)``.
    """

    def __init__(self, F: FareySequence, M: int):
        self.n = F.n
        self.M = M
        rows = M ** (self.n - 1)
        row_bits = max(rows - 1, 1).bit_length() if rows > 1 else 0
        self.bits = min(52, 62 - row_bits)
        q64 = F.q.astype(np.int64)
        row = np.zeros(len(F), dtype=np.int64)
        for i in range(1, self.n):
            row = row * M + F.p[:, i].astype(np.int64) * M // q64
        x1 = F.p[:, 0] / q64.astype(np.float64)
        key = (row << self.bits) | np.floor(x1 * 2.0 ** self.bits).astype(np.int64)
        del q64, row, x1
        order = np.argsort(key)
        self.key = key[order]
        del key
        self.p = F.p[order]
        self.q = F.q[order]

    def cell_of(self, i: int) -> tuple:
        """Cell coordinates of the i-th point in index order."""
        return tuple(int(c) * self.M // int(self.q[i]) for c in self.p[i])

    def cell_members(self, cell: Sequence[int]) -> np.ndarray:
        """Index-order positions of the points lying in ``cell``."""
        row = 0
        for c in cell[1:]:
            row = row * self.M + int(c)
        a = np.searchsorted(self.key, row << self.bits, "left")
        b = np.searchsorted(self.key, (row + 1) << self.bits, "left")
        pos = np.arange(a, b)
        first = self.p[a:b, 0].astype(np.int64) * self.M // self.q[a:b]
        return pos[first == cell[0]]

    def candidates(self, X: np.ndarray, lo: np.ndarray, hi: np.ndarray):
        """Superset of the points within the wrapped boxes ``X + [lo, hi]``.

        Returns (query index, point position, shift vector m) arrays; the
        candidate coordinate is ``p / q + m``.
        """
        n, M = self.n, self.M
        B = len(X)
        scale_bits = float(2 ** self.bits)
        groups = []  # (qidx, start, end, shifts)
        row_lo, row_span = [], []
        for i in range(1, n):
            clo = np.floor((X[:, i] + lo[i] - SEARCH_EPS) * M).astype(np.int64)
            chi = np.floor((X[:, i] + hi[i] + SEARCH_EPS) * M).astype(np.int64)
            row_lo.append(clo)
            row_span.append(chi - clo)
        max_span = [int(s.max()) if B else 0 for s in row_span]
        a1 = X[:, 0] + lo[0] - SEARCH_EPS
        b1 = X[:, 0] + hi[0] + SEARCH_EPS
        qall = np.arange(B)
        for offs in np.ndindex(*[s + 1 for s in max_span]) if n > 1 else [()]:
            valid = np.ones(B, dtype=bool)
            row = np.zeros(B, dtype=np.int64)
            shifts = []
            for j, o in enumerate(offs):
                valid &= row_span[j] >= o
                c = row_lo[j] + o
                shifts.append(np.floor_divide(c, M))
                row = row * M + np.mod(c, M)
            for m1 in (-1, 0, 1):
                ok = valid & (a1 - m1 < 1.0) & (b1 - m1 >= 0.0)
                if not ok.any():
                    continue
                idx = qall[ok]
                klo = np.floor(np.clip(a1[idx] - m1, 0.0, 1.0) * scale_bits).astype(np.int64)
                khi = np.minimum(np.floor(np.clip(b1[idx] - m1, 0.0, 1.0) * scale_bits),
                                 scale_bits - 1).astype(np.int64)
                base = row[idx] << self.bits
                start = np.searchsorted(self.key, base + klo, "left")
                end = np.searchsorted(self.key, base + khi, "right")
                sh = np.column_stack([np.full(len(idx), m1, dtype=np.int64)]
                                     + [s[idx] for s in shifts])
                groups.append((idx, start, end, sh))
        if not groups:
            z = np.zeros(0, dtype=np.int64)
            return z, z, np.zeros((0, n), dtype=np.int64)
        qidx = np.concatenate([g[0] for g in groups])
        start = np.concatenate([g[1] for g in groups])
        end = np.concatenate([g[2] for g in groups])
        sh = np.concatenate([g[3] for g in groups])
        lengths = np.maximum(end - start, 0)
        total = int(lengths.sum())
        rep = np.repeat(np.arange(len(qidx)), lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        return qidx[rep], start[rep] + offsets, sh[rep]


def _check_scale(A: TestSet, delta: float) -> None:
    if not delta * A.diameter < 1:
        raise ValueError(f"test set too large for torus wrap: delta*diam(A) = {delta * A.diameter} >= 1")


def to_rational_base(x: Sequence[Rational]) -> tuple[list, int]:
    """Exact common-denominator form of a torus point reduced into [0,1)^n."""
    fr = [Fraction(c) % 1 for c in x]
    den = math.lcm(*(f.denominator for f in fr))
    return [f.numerator * (den // f.denominator) for f in fr], den


def translate_counts(F: FareySequence, base_num, base_den, A: TestSet, delta: float,
                     kmax_hint: int = 0) -> tuple[np.ndarray, int]:
    """|(x + delta*A + Z^n) cap F_Q| for every base point x = base_num / base_den.

    ``base_num`` has shape (B, n) with entries in [0, base_den).  Uses int64
    arithmetic when all numerators provably stay below 2**53, Python integers
    otherwise.  Returns the counts and the number of ball near-boundary hits.
    """
    _check_scale(A, delta)
    base_num = np.asarray(base_num)
    base_den = np.asarray(base_den)
    B = len(base_den)
    counts = np.zeros(B, dtype=np.int64)
    if B == 0:
        return counts, 0
    idx = F.index(delta * A.diameter)
    lo, hi = A.bounds(delta)
    max_den = int(max(base_den.tolist())) if base_den.dtype == object else int(base_den.max())
    use_int64 = 3 * F.Q * max_den < EXACT_FLOAT_INT
    if use_int64:
        base_num = base_num.astype(np.int64)
        base_den = base_den.astype(np.int64)
    else:
        base_num = base_num.astype(object)
        base_den = base_den.astype(object)
    X = np.array([[int(a) / int(d) for a in row] for row, d in zip(base_num, base_den)]) \
        if not use_int64 else base_num / base_den[:, None].astype(np.float64)
    # visiting queries in index order keeps the bisections cache friendly
    sort_keys = [X[:, 0]] + [np.floor(X[:, i] * idx.M) for i in range(F.n - 1, 0, -1)]
    order = np.lexsort(sort_keys) if B > 1 else np.zeros(1, dtype=np.int64)
    near = 0
    for s in range(0, B, QUERY_CHUNK):
        sl = order[s:s + QUERY_CHUNK]
        qi, pos, sh = idx.candidates(X[sl], lo, hi)
        if len(qi) == 0:
            continue
        qq = idx.q[pos].astype(np.int64)
        pp = idx.p[pos].astype(np.int64)
        xd = base_den[sl][qi]
        xn = base_num[sl][qi]
        if not use_int64:
            qq = qq.astype(object)
            pp = pp.astype(object)
            sh = sh.astype(object)
        num = (pp + sh * qq[:, None]) * xd[:, None] - xn * qq[:, None]
        den = qq * xd
        mask, nb = A.contains_diff(num, den, delta)
        near += nb
        counts[sl] += np.bincount(qi[mask].astype(np.int64), minlength=len(sl))
    return counts, near


def count_in_translate(F: FareySequence, x: Sequence[Rational], A: TestSet, delta: float) -> int:
    """Exact |(x + delta*A + Z^n) cap F_Q| for one torus point ``x``."""
    if len(x) != F.n:
        raise ValueError("x has wrong dimension")
    num, den = to_rational_base(x)
    counts, _ = translate_counts(F, np.array([num], dtype=object), np.array([den], dtype=object),
                                 A, delta)
    return int(counts[0])


def count_in_translate_scan(F: FareySequence, x: Sequence[Rational], A: TestSet, delta: float) -> int:
    """Unindexed reference for :func:`count_in_translate`: every point, every shift."""
    _check_scale(A, delta)
    num, den = to_rational_base(x)
    p = F.p.astype(object)
    q = F.q.astype(object)
    xn = np.array(num, dtype=object)
    total = 0
    for m in np.ndindex(*([3] * F.n)):
        shift = np.array(m, dtype=object) - 1
        diff = (p + shift * q[:, None]) * den - xn * q[:, None]
        total += int(np.count_nonzero(A.contains_diff(diff, q * den, delta)[0]))
    return total


def count_in_region(F: FareySequence, D: TestSet) -> int:
    """Exact |F_Q cap D| for a domain D on the torus."""
    return int(np.count_nonzero(domain_mask(F, D)))


def domain_mask(F: FareySequence, D: TestSet) -> np.ndarray:
    out = np.empty(len(F), dtype=bool)
    step = 1 << 22
    for s in range(0, len(F), step):
        sl = slice(s, s + step)
        out[sl] = D.torus_contains(F.p[sl].astype(np.int64), F.q[sl].astype(np.int64))
    return out
