"""Fine-scale statistics of F_Q: void probabilities, point statistics, gaps.

Sample points for the void statistic are dyadic rationals k / 2^b with b
chosen so that all exact-offset numerators stay below 2**53; at the levels
used here the grid spacing (~1e-11) is far below the test-set scale.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .farey import FareySequence, domain_mask, translate_counts
from .report import VerificationReport
from .sets import TestSet

DEFAULT_SAMPLES = 100_000
DEFAULT_KMAX = 64


@dataclass(frozen=True)
class CountDistribution:
    """Empirical law of a count.

    ``counts[k]`` for k <= kmax holds the number of samples with count k and
    ``counts[kmax + 1]`` the number exceeding kmax.  ``total`` is the exact sum
    of all raw counts, so the expectation is not affected by the cap.
    """

    counts: np.ndarray
    samples: int
    kmax: int
    total: int
    metadata: dict = field(default_factory=dict)

    @property
    def mass(self) -> np.ndarray:
        return self.counts[: self.kmax + 1] / self.samples

    @property
    def overflow(self) -> bool:
        return bool(self.counts[self.kmax + 1] > 0)

    @property
    def expectation(self) -> float:
        return self.total / self.samples

    def fractions(self) -> list:
        return [Fraction(int(c), self.samples) for c in self.counts]

    def p(self, k: int) -> float:
        return float(self.counts[k]) / self.samples if k <= self.kmax else 0.0


def _histogram(raw: np.ndarray, kmax: int, metadata: dict) -> CountDistribution:
    clipped = np.minimum(raw, kmax + 1)
    counts = np.bincount(clipped, minlength=kmax + 2).astype(np.int64)
    md = dict(metadata)
    md["overflow"] = bool(counts[kmax + 1] > 0)
    return CountDistribution(counts, int(len(raw)), kmax, int(raw.sum()), md)


def dyadic_bits(Q: int) -> int:
    # need 3 * Q * 2**b < 2**53 for exact int64 offsets
    return 52 - (3 * Q).bit_length()


def sample_points(D: TestSet, count: int, bits: int, seed: int = 0,
                  mode: str = "mc") -> np.ndarray:
    """Dyadic numerators k (shape (m, n)) of sample points k / 2**bits in D."""
    D.validate_domain()
    n = D.n
    scale = 2 ** bits
    if mode == "grid":
        if D.kind == "ball":
            raise ValueError("grid sampling needs a box domain")
        m = max(1, round(count ** (1.0 / n)))
        axes = [np.floor((lo + (np.arange(m) + 0.5) / m * (hi - lo)) * scale).astype(np.int64)
                for lo, hi in zip(D.lo, D.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([g.ravel() for g in mesh]) % scale
    if mode != "mc":
        raise ValueError(f"unknown sampling mode {mode!r}")
    rng = np.random.default_rng(seed)
    if D.kind == "ball":
        out = []
        need = count
        while need > 0:
            z = rng.uniform(-D.radius, D.radius, size=(2 * need + 16, n))
            z = z[D.contains(z)][:need]
            out.append(z)
            need -= len(z)
        z = np.concatenate(out)
        return np.floor(z * scale).astype(np.int64) % scale
    cols = []
    for lo, hi in zip(D.lo, D.hi):
        a = math.ceil(lo * scale)
        b = math.ceil(hi * scale)
        cols.append(rng.integers(a, b, size=count, dtype=np.int64))
    return np.column_stack(cols) % scale


def _parallel_counts(F, num, den, A, delta, workers):
    F.index(delta * A.diameter)  # build once before threads share it
    if workers <= 1 or len(den) < 4096:
        return translate_counts(F, num, den, A, delta)
    parts = np.array_split(np.arange(len(den)), workers)
    with ThreadPoolExecutor(workers) as ex:
        res = list(ex.map(lambda ix: translate_counts(F, num[ix], den[ix], A, delta), parts))
    return np.concatenate([r[0] for r in res]), sum(r[1] for r in res)


def void_statistic(F: FareySequence, A: TestSet, D: Optional[TestSet] = None,
                   samples: int = DEFAULT_SAMPLES, seed: int = 0, mode: str = "mc",
                   kmax: int = DEFAULT_KMAX, workers: int = 1) -> CountDistribution:
    """P_Q(k, D, A): law of |(x + sigma_Q^(-1/n) A + Z^n) cap F_Q| for x uniform in D."""
    D = D or TestSet.torus(F.n)
    bits = dyadic_bits(F.Q)
    num = sample_points(D, samples, bits, seed, mode)
    den = np.full(len(num), 2 ** bits, dtype=np.int64)
    raw, near = _parallel_counts(F, num, den, A, F.scale, workers)
    return _histogram(raw, kmax, _meta(F, A, D, mode=mode, seed=seed,
                                       samples=len(num), ball_near_boundary=near))


def reference_points(F: FareySequence, D: Optional[TestSet]) -> tuple[np.ndarray, np.ndarray]:
    if D is None:
        return F.p.astype(np.int64), F.q.astype(np.int64)
    mask = domain_mask(F, D)
    if not mask.any():
        raise ValueError("no reference points: F_Q cap D is empty")
    return F.p[mask].astype(np.int64), F.q[mask].astype(np.int64)


def point_statistic(F: FareySequence, A: TestSet, D: Optional[TestSet] = None,
                    kmax: int = DEFAULT_KMAX, workers: int = 1,
                    refs: Optional[tuple] = None) -> CountDistribution:
    """P_{0,Q}(k, D, A): the same count seen from each Farey point r in D.

    r counts itself exactly when 0 lies in A under A's boundary convention.
    """
    p, q = refs if refs is not None else reference_points(F, D)
    raw, near = _parallel_counts(F, p, q, A, F.scale, workers)
    return _histogram(raw, kmax, _meta(F, A, D or TestSet.torus(F.n), mode="exact",
                                       seed=None, samples=len(q), ball_near_boundary=near))


def void_curve(F: FareySequence, A: TestSet, s_values: Sequence[float], k: int = 0,
               D: Optional[TestSet] = None, samples: int = DEFAULT_SAMPLES, seed: int = 0,
               mode: str = "mc") -> np.ndarray:
    """P_Q(k, D, s A) along s, reusing one set of sample points for every s."""
    D = D or TestSet.torus(F.n)
    bits = dyadic_bits(F.Q)
    num = sample_points(D, samples, bits, seed, mode)
    den = np.full(len(num), 2 ** bits, dtype=np.int64)
    out = []
    for s in s_values:
        raw, _ = translate_counts(F, num, den, A.scaled(s), F.scale)
        out.append(np.count_nonzero(raw == k) / len(raw))
    return np.array(out)


def point_curve(F: FareySequence, A: TestSet, s_values: Sequence[float], k: int = 0,
                D: Optional[TestSet] = None) -> np.ndarray:
    """P_{0,Q}(k, D, s A) along s."""
    p, q = reference_points(F, D)
    out = []
    for s in s_values:
        raw, _ = translate_counts(F, p, q, A.scaled(s), F.scale)
        out.append(np.count_nonzero(raw == k) / len(raw))
    return np.array(out)


def _sorted_gaps(F: FareySequence) -> tuple[np.ndarray, np.ndarray]:
    if F.n != 1:
        raise ValueError("gap distribution is defined for n = 1 only")
    p = F.p[:, 0].astype(np.int64)
    q = F.q.astype(np.int64)
    order = np.argsort(p / q.astype(np.float64), kind="stable")
    p, q = p[order], q[order]
    pn = np.roll(p, -1)
    qn = np.roll(q, -1)
    pn[-1] += qn[-1]  # wrap around the circle: successor of the last point is 1 + 0/1
    num = pn * q - p * qn
    den = q * qn
    if not (num > 0).all():
        raise ArithmeticError("Farey points not strictly increasing after sort")
    return num, den


def gap_distribution_1d(F: FareySequence) -> np.ndarray:
    """Sorted circular gaps between consecutive fractions, multiplied by sigma_Q."""
    num, den = _sorted_gaps(F)
    return np.sort(F.sigma * (num / den.astype(np.float64)))


def gap_survival(F: FareySequence, s_values: Sequence[float]) -> np.ndarray:
    """Fraction of gaps not containing a point within (0, s] after rescaling.

    Decided with the same exact predicate as :func:`point_statistic` on
    A = (0, s], so the two agree exactly.
    """
    num, den = _sorted_gaps(F)
    out = []
    for s in s_values:
        if s <= 0:
            out.append(1.0)  # (0, 0] is empty
            continue
        hit, _ = TestSet.interval(0.0, s).contains_diff(num[:, None], den, F.scale)
        out.append((len(den) - np.count_nonzero(hit)) / len(den))
    return np.array(out)


def convergence_report(family: Sequence[Sequence[float]], name: str = "convergence",
                       slack: float = 1.5, limit: Optional[Sequence[float]] = None,
                       levels: Optional[Sequence] = None) -> VerificationReport:
    """Check that a sequence of distributions (or curves) settles down.

    Without ``limit`` the successive sup-differences must be non-increasing
    up to a factor ``slack``; with ``limit`` the sup-distances to it must be.
    """
    if len(family) < 3:
        raise ValueError("convergence report needs at least 3 levels")
    width = max(len(f) for f in family)
    arr = np.zeros((len(family), width))
    for i, f in enumerate(family):
        arr[i, : len(f)] = f
    if limit is None:
        seq = np.max(np.abs(np.diff(arr, axis=0)), axis=1)
    else:
        lim = np.zeros(width)
        lim[: len(limit)] = limit
        seq = np.max(np.abs(arr - lim), axis=1)
    ratios = [b / a if a > 0 else (0.0 if b == 0 else math.inf) for a, b in zip(seq[:-1], seq[1:])]
    worst = max(ratios)
    return VerificationReport(name=name, computed=seq.tolist(), reference=None,
                              tolerance=slack, passed=bool(worst <= slack), norm="trend",
                              deviation=float(worst),
                              details={"ratios": ratios, "levels": list(levels or [])})


def _meta(F, A, D, **extra) -> dict:
    md = {"n": F.n, "Q": F.Q, "A": A.describe(), "D": D.describe(),
          "A_contains_origin": A.contains_origin(), "scale": F.scale}
    md.update(extra)
    return md
