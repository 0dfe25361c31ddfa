"""Closed-form one-dimensional limit laws and an interval-arithmetic oracle.

Notation: for a gap length s, ``a = 3 / (pi^2 s)``; for lambda in (0, 1],
``y = sqrt(lambda)``.  Hall's distribution is the probability that a
rescaled Farey gap exceeds s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .quadrature import adaptive_simpson, integrate_panels

PI2_3 = math.pi ** 2 / 3
ORACLE_PMAX = 10 ** 6


@dataclass(frozen=True)
class HallParameters:
    s: float
    lam: float = 1.0

    @property
    def a(self) -> float:
        return hall_a(self.s)

    @property
    def y(self) -> float:
        return math.sqrt(self.lam)


def hall_a(s: float) -> float:
    if s < 0:
        raise ValueError("s must be non-negative")
    return math.inf if s == 0 else 1.0 / (PI2_3 * s)


def p0_triangle(s: float, lam: float) -> float:
    """Probability that the triangle Delta_{s,lambda} holds no primitive point."""
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    a = hall_a(s)
    y = math.sqrt(lam)
    if a >= 1 or y <= a:
        return 1.0
    if a <= 0.25:
        r = math.sqrt(0.25 - a)
        if 0.5 - r <= y <= 0.5 + r:
            return 0.0
    return 1.0 - 1.0 / y + a / (y * y)


def triangle_oracle(s: float, lam: float, pmax_guard: int = ORACLE_PMAX) -> float:
    """Measure of x in [0,1) with no primitive (p, q) such that (p, px+q) is in the triangle.

    For each p >= 1 the admissible x form intervals
    ((L - q)/p, (U - q)/p) with L = p / (lambda s pi^2/3) and U = lambda^(-1/2);
    their union is measured directly.
    """
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    if s <= 0:
        return 1.0
    c = PI2_3 * lam * s
    U = lam ** -0.5
    pmax = math.floor(c * U)
    if pmax > pmax_guard:
        raise ValueError(f"p-range {pmax} exceeds oracle guard")
    intervals = []
    for p in range(1, pmax + 1):
        L = p / c
        if L > U:
            continue
        # q with [(L-q)/p, (U-q)/p] meeting [0, 1)
        for q in range(math.ceil(L - p) - 1, math.floor(U) + 2):
            if math.gcd(p, q) != 1:
                continue
            lo = max((L - q) / p, 0.0)
            hi = min((U - q) / p, 1.0)
            if hi > lo:
                intervals.append((lo, hi))
    intervals.sort()
    covered = []
    cur_lo = cur_hi = None
    for lo, hi in intervals:
        if cur_hi is None or lo > cur_hi + 1e-12:
            if cur_hi is not None:
                covered.append(cur_hi - cur_lo)
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        covered.append(cur_hi - cur_lo)
    return max(0.0, 1.0 - math.fsum(covered))


def hall_cdf(s: float) -> float:
    """Limit probability P_0(0, [0, s]) that a rescaled gap exceeds s."""
    a = hall_a(s)
    if a >= 1:
        return 1.0
    if a >= 0.25:
        return _hall_middle(a)
    return _hall_low(a)


def _hall_middle(a: float) -> float:
    return -1.0 + 2.0 * a - 2.0 * a * math.log(a)


def _hall_low(a: float) -> float:
    r = math.sqrt(max(0.25 - a, 0.0))
    return -1.0 + 2.0 * a + 2.0 * r - 4.0 * a * math.log(0.5 + r)


def hall_density(s: float) -> float:
    """-(d/ds) hall_cdf(s)."""
    a = hall_a(s)
    if a >= 1:
        return 0.0
    if a >= 0.25:
        return -2.0 * PI2_3 * a * a * math.log(a)
    return -4.0 * PI2_3 * a * a * math.log(0.5 + math.sqrt(0.25 - a))


def lambda_breakpoints(s: float) -> list:
    """Kinks of lambda -> p0_triangle(s, lambda) inside [0, 1]."""
    a = hall_a(s)
    pts = [0.0, 1.0]
    if a < 1:
        pts.append(a * a)
        if a <= 0.25:
            r = math.sqrt(0.25 - a)
            pts += [(0.5 - r) ** 2, (0.5 + r) ** 2]
    return sorted(p for p in set(pts) if 0.0 <= p <= 1.0)


def p0_quadrature(s: float, tol: float = 1e-9) -> float:
    """Integral over lambda in (0, 1] of p0_triangle(s, lambda)."""
    if hall_a(s) >= 1:
        return 1.0

    def f(lam: float) -> float:
        return 1.0 if lam == 0.0 else p0_triangle(s, lam)

    return integrate_panels(f, lambda_breakpoints(s), tol)


def hall_density_mass(tol: float = 1e-10) -> float:
    """Total mass of hall_density, integrated in the variable a = 3/(pi^2 s).

    With ds = -3/(pi^2 a^2) da the integrand becomes -2 log a on [1/4, 1]
    and -4 log(1/2 + sqrt(1/4 - a)) on (0, 1/4].
    """
    def g(a: float) -> float:
        if a == 0.0:
            return 0.0  # -4 log(1) in the limit s -> infinity
        return hall_density(1.0 / (PI2_3 * a)) / (PI2_3 * a * a)

    return adaptive_simpson(g, 0.0, 0.25, tol / 2) + adaptive_simpson(g, 0.25, 1.0, tol / 2)


def poisson_reference(volume: float, k: int) -> float:
    """Poisson mass vol^k e^-vol / k!, the independent-points comparison curve."""
    return volume ** k * math.exp(-volume) / math.factorial(k)
