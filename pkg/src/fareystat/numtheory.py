"""Exact arithmetic functions, Kloosterman sums and real zeta values.

Tables are plain numpy arrays indexed directly by the integer argument
(index 0 is padding), so ``table.totient[12] == 4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .report import VerificationReport

INT64_MAX = np.iinfo(np.int64).max

# B_2, B_4, ..., B_30
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730), Fraction(8553103, 6), Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322),
]


@dataclass(frozen=True)
class ArithmeticTable:
    limit: int
    totient: np.ndarray
    mobius: np.ndarray
    n: int = 1
    jordan: Optional[np.ndarray] = None

    def __post_init__(self):
        for arr in (self.totient, self.mobius, self.jordan):
            if arr is not None:
                arr.setflags(write=False)


def primes_upto(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def build_table(limit: int, n: int = 1) -> ArithmeticTable:
    """Sieve phi, mu and the Jordan totient J_n for all q <= limit.

    J_n(q) = q^n prod_{p | q} (1 - p^-n); each prime step divides exactly,
    so the arrays stay integral.  When limit**n does not fit in int64 the
    Jordan array falls back to Python integers.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    phi = np.arange(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    if limit ** n <= INT64_MAX:
        jordan = np.arange(limit + 1, dtype=np.int64) ** n
    else:
        jordan = np.array([q ** n for q in range(limit + 1)], dtype=object)
    for p in primes_upto(limit).tolist():
        phi[p::p] -= phi[p::p] // p
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p::p * p] = 0
        pn = p ** n
        jordan[p::p] -= jordan[p::p] // pn
    jordan[0] = 0
    return ArithmeticTable(limit=limit, totient=phi, mobius=mu, n=n, jordan=jordan)


def vector_gcd(v: Sequence[int]) -> int:
    g = math.gcd(*(int(c) for c in v))
    if g == 0:
        raise ValueError("undefined gcd: zero vector")
    return g


def mod_inverse(p: int, q: int) -> int:
    if q < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(p, q) != 1:
        raise ValueError(f"not invertible: gcd({p}, {q}) > 1")
    return pow(p % q, -1, q)


def unit_inverses(q: int) -> tuple[np.ndarray, np.ndarray]:
    """All units p of Z/qZ with their inverses, via a vectorized extended Euclid.

    For q == 1 this returns the single residue 0 paired with 0.
    """
    if q == 1:
        z = np.zeros(1, dtype=np.int64)
        return z, z.copy()
    p = np.arange(1, q, dtype=np.int64)
    p = p[np.gcd(p, q) == 1]
    r0 = np.full(p.shape, q, dtype=np.int64)
    r1 = p.copy()
    t0 = np.zeros_like(p)
    t1 = np.ones_like(p)
    while True:
        active = r1 != 0
        if not active.any():
            break
        quo = np.where(active, r0 // np.where(active, r1, 1), 0)
        r0, r1 = np.where(active, r1, r0), np.where(active, r0 - quo * r1, r1)
        t0, t1 = np.where(active, t1, t0), np.where(active, t0 - quo * t1, t1)
    return p, t0 % q


def kloosterman(m1: int, m2: int, q: int) -> float:
    """K(m1, m2, q) = sum over units p of e((m1 p + m2 pbar) / q).

    K(., ., 1) is 1 by the single-residue convention.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if q == 1:
        return 1.0
    p, pbar = unit_inverses(q)
    phase = ((m1 % q) * p + (m2 % q) * pbar) % q
    ang = (2.0 * math.pi / q) * phase
    re = math.fsum(np.cos(ang))
    im = math.fsum(np.sin(ang))
    if abs(im) > 1e-9 * len(p):
        raise ArithmeticError(f"Kloosterman sum K({m1},{m2},{q}) has imaginary part {im}")
    return re


@dataclass(frozen=True)
class PartialSum:
    value: float
    tail_bound: float
    terms: int


def _tail_bound(s: float, qmax: int) -> float:
    # sum_{q > qmax} q^(1-2s) <= integral_{qmax}^inf x^(1-2s) dx
    return qmax ** (2.0 - 2.0 * s) / (2.0 * s - 2.0)


def kloosterman_zeta_partial(m1: int, m2: int, s: float, qmax: int) -> PartialSum:
    """Truncation of sum_q K(m1, m2, q) q^(-2s) with a bound from |K| <= phi(q) < q."""
    if s <= 1:
        raise ValueError("need s > 1 for an absolutely convergent truncation")
    if m1 == 0 and m2 == 0:
        phi = build_table(qmax).totient[1:]
        vals = phi.astype(float)
    else:
        vals = np.array([kloosterman(m1, m2, q) for q in range(1, qmax + 1)])
    q = np.arange(1, qmax + 1, dtype=float)
    total = math.fsum(vals * q ** (-2.0 * s))
    return PartialSum(total, _tail_bound(s, qmax), qmax)


def zeta_real(s: float) -> float:
    """Riemann zeta at real s > 1 by Euler-Maclaurin summation.

    The head length grows with s so the asymptotic tail terms shrink
    geometrically; the first omitted term bounds the remainder.
    """
    if not s > 1:
        raise ValueError(f"zeta_real: s={s} outside implemented domain (s > 1)")
    if s > 60:
        # 2^-60 is already below double precision relative to 1
        return 1.0 + math.fsum(k ** -s for k in range(2, 6))
    N = 12 + int(s)
    head = math.fsum(k ** -s for k in range(1, N))
    tail = [N ** (1 - s) / (s - 1), 0.5 * N ** -s]
    rising = s  # s (s+1) ... (s+2j-2)
    power = N ** (-s - 1)
    fact = 2.0
    remainder = math.inf
    for j, b in enumerate(_BERNOULLI, start=1):
        term = float(b) / fact * rising * power
        if abs(term) < 1e-17 * head:
            remainder = abs(term)
            break
        tail.append(term)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= N * N
        fact *= (2 * j + 1) * (2 * j + 2)
        remainder = abs(term)
    value = head + math.fsum(tail)
    if remainder > 1e-13 * value:
        raise ArithmeticError(f"zeta_real({s}): remainder {remainder} too large")
    return value


def totient_zeta_identity_check(s: float, qmax: int,
                                tolerance: Optional[float] = None) -> VerificationReport:
    """Compare sum_{q <= qmax} phi(q) q^(-2s) with zeta(2s-1)/zeta(2s).

    The missing tail is positive and below sum_{q > qmax} q^(1-2s), which is
    the default tolerance.
    """
    if s <= 1:
        raise ValueError("need s > 1")
    phi = build_table(qmax).totient[1:].astype(float)
    q = np.arange(1, qmax + 1, dtype=float)
    partial = math.fsum(phi * q ** (-2.0 * s))
    reference = zeta_real(2 * s - 1) / zeta_real(2 * s)
    bound = _tail_bound(s, qmax)
    tol = bound + 1e-12 if tolerance is None else tolerance
    return VerificationReport.compare(
        f"totient zeta identity s={s} Q={qmax}", partial, reference, tol,
        tail_bound=bound)
