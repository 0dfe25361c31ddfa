"""Test sets (boxes and balls) and the exact membership predicate.

Every counting path in the package funnels through
:meth:`TestSet.contains_diff`, which decides whether an exact rational
offset ``num / den`` lies in ``delta * A``.  The scaled bounds are doubles,
computed once per call; box comparisons are exact (a correctly rounded
quotient compared against a double can only be wrong on equality, and
equality is re-checked with :class:`fractions.Fraction`).  Balls are decided
in floating point and report how many offsets fell within a relative
``BALL_SLACK`` of the sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

BALL_SLACK = 1e-12
KINDS = ("box", "boxoc", "ball")


@dataclass(frozen=True)
class TestSet:
    """A box or origin-centred ball in R^n.

    ``box`` is half-open ``[lo, hi)`` per axis, ``boxoc`` is open-low /
    closed-high ``(lo, hi]``, ``ball`` is the open ball of ``radius``.
    """

    kind: str
    n: int
    lo: tuple = ()
    hi: tuple = ()
    radius: float = 0.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test set kind {self.kind!r}")
        if self.kind == "ball":
            if not self.radius > 0:
                raise ValueError("test set must have positive volume")
        else:
            if len(self.lo) != self.n or len(self.hi) != self.n:
                raise ValueError("box bounds do not match dimension")
            if any(not h > l for l, h in zip(self.lo, self.hi)):
                raise ValueError("test set must have positive volume")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float], closed_high: bool = False) -> "TestSet":
        lo = tuple(float(x) for x in lo)
        hi = tuple(float(x) for x in hi)
        return cls("boxoc" if closed_high else "box", len(lo), lo, hi)

    @classmethod
    def interval(cls, a: float, b: float, closed_high: bool = True) -> "TestSet":
        """1-D interval; by default the (a, b] flavour used for gap work."""
        return cls.box((a,), (b,), closed_high=closed_high)

    @classmethod
    def ball(cls, radius: float, n: int) -> "TestSet":
        return cls("ball", n, radius=float(radius))

    @classmethod
    def ball_of_volume(cls, volume: float, n: int) -> "TestSet":
        r = (volume * math.gamma(n / 2 + 1) / math.pi ** (n / 2)) ** (1.0 / n)
        return cls.ball(r, n)

    @classmethod
    def torus(cls, n: int) -> "TestSet":
        return cls.box((0.0,) * n, (1.0,) * n)

    @property
    def volume(self) -> float:
        if self.kind == "ball":
            return math.pi ** (self.n / 2) * self.radius ** self.n / math.gamma(self.n / 2 + 1)
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    @property
    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        return math.sqrt(math.fsum((h - l) ** 2 for l, h in zip(self.lo, self.hi)))

    @property
    def closed_high(self) -> bool:
        return self.kind == "boxoc"

    def contains_origin(self) -> bool:
        return bool(self.contains(np.zeros((1, self.n)))[0])

    def scaled(self, s: float) -> "TestSet":
        if self.kind == "ball":
            return TestSet.ball(self.radius * s, self.n)
        return TestSet(self.kind, self.n, tuple(x * s for x in self.lo),
                       tuple(x * s for x in self.hi))

    def bounds(self, delta: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned bounding box of ``delta * A`` as doubles."""
        if self.kind == "ball":
            r = delta * self.radius
            return np.full(self.n, -r), np.full(self.n, r)
        return (np.array([delta * x for x in self.lo]),
                np.array([delta * x for x in self.hi]))

    def contains(self, z) -> np.ndarray:
        """Plain floating-point membership for points ``z`` of shape (K, n)."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if self.kind == "ball":
            ss = np.zeros(len(z))
            for i in range(self.n):
                ss = ss + z[:, i] * z[:, i]
            return ss < self.radius * self.radius
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        if self.kind == "box":
            return np.all((z >= lo) & (z < hi), axis=1)
        return np.all((z > lo) & (z <= hi), axis=1)

    def contains_diff(self, num, den, delta: float) -> tuple[np.ndarray, int]:
        """Exact test of ``num / den in delta * A``.

        ``num`` has shape (K, n) and ``den`` shape (K,), both integer
        (int64 with magnitudes below 2**53, or object arrays of Python ints).
        Returns the boolean mask and, for balls, the count of offsets within
        the floating-point slack of the sphere (always 0 for boxes).
        """
        num = np.asarray(num)
        den = np.asarray(den)
        k = len(den)
        if k == 0:
            return np.zeros(0, dtype=bool), 0
        if self.kind == "ball":
            r = delta * self.radius
            r2 = r * r
            ss = np.zeros(k)
            for i in range(self.n):
                d = _quotient(num[:, i], den)
                ss = ss + d * d
            near = int(np.count_nonzero(np.abs(ss - r2) <= BALL_SLACK * r2))
            return ss < r2, near
        ok = np.ones(k, dtype=bool)
        for i in range(self.n):
            d = _quotient(num[:, i], den)
            lo = delta * self.lo[i]
            hi = delta * self.hi[i]
            if self.kind == "box":
                ok &= _exact_cmp(d, lo, num[:, i], den, ">=")
                ok &= _exact_cmp(d, hi, num[:, i], den, "<")
            else:
                ok &= _exact_cmp(d, lo, num[:, i], den, ">")
                ok &= _exact_cmp(d, hi, num[:, i], den, "<=")
        return ok, 0

    def torus_contains(self, num, den) -> np.ndarray:
        """Membership of the torus points ``num / den`` (in [0,1)^n) in this set as a domain."""
        self.validate_domain()
        num = np.asarray(num)
        den = np.asarray(den)
        if self.kind != "ball":
            return self.contains_diff(num, den, 1.0)[0]
        hit = np.zeros(len(den), dtype=bool)
        for m in np.ndindex(*([3] * self.n)):
            shift = np.asarray(m, dtype=np.int64) - 1
            hit |= self.contains_diff(num + shift * den[:, None], den, 1.0)[0]
        return hit

    def validate_domain(self) -> None:
        if self.kind == "ball":
            if self.radius > 0.5:
                raise ValueError("domain ball must have radius <= 1/2 to embed in the torus")
        elif min(self.lo) < 0 or max(self.hi) > 1:
            raise ValueError("domain box must lie inside [0, 1]^n")

    def describe(self) -> str:
        if self.kind == "ball":
            return f"ball:{self.radius!r}"
        return f"{self.kind}:" + ";".join(f"{l!r},{h!r}" for l, h in zip(self.lo, self.hi))


def _quotient(num, den) -> np.ndarray:
    if num.dtype == object or den.dtype == object:
        return np.array([int(a) / int(b) for a, b in zip(num, den)], dtype=float)
    return num.astype(np.float64) / den.astype(np.float64)


def _exact_cmp(d: np.ndarray, bound: float, num, den, op: str) -> np.ndarray:
    # d is the correctly rounded value of num/den, so strict float inequality
    # against a double already decides the exact one; only ties need rationals
    if op in (">=", ">"):
        res = d > bound
    else:
        res = d < bound
    ties = np.flatnonzero(d == bound)
    if len(ties) and bound == 0.0:
        # den > 0 and no underflow at these magnitudes, so the sign of num decides
        sgn = np.sign(np.asarray(num[ties], dtype=object).astype(float))
        res[ties] = {">=": sgn >= 0, ">": sgn > 0, "<": sgn < 0, "<=": sgn <= 0}[op]
    elif len(ties):
        b = Fraction(bound)
        for t in ties.tolist():
            x = Fraction(int(num[t]), int(den[t]))
            res[t] = {">=": x >= b, ">": x > b, "<": x < b, "<=": x <= b}[op]
    return res


def parse_set(text: str, n: int) -> TestSet:
    """Parse ``box:lo1,hi1;lo2,hi2``, ``boxoc:...`` or ``ball:r``."""
    try:
        kind, _, body = text.strip().partition(":")
        kind = kind.strip().lower()
        if kind == "ball":
            return TestSet.ball(float(body), n)
        if kind in ("box", "boxoc"):
            axes = [a for a in body.split(";") if a.strip()]
            lo, hi = zip(*((float(x) for x in a.split(",")) for a in axes))
            if len(lo) != n:
                raise ValueError(f"box has {len(lo)} axes but dimension is {n}")
            return TestSet.box(lo, hi, closed_high=(kind == "boxoc"))
    except ValueError:
        raise
    except Exception as exc:  # malformed numbers / missing separators
        raise ValueError(f"cannot parse test set {text!r}: {exc}") from exc
    raise ValueError(f"unknown test set kind in {text!r}")
