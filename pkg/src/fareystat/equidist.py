"""Farey points on closed horocycles (n = 1) and horosphere averages.

The Farey average of f is

    (1/|F_Q|) sum_{q <= Q} sum_{p in (Z/qZ)^x} f(p/q, pbar/q, Q^2/q^2)

with f written as a function of (x, u, v), z = u + iv.  At q = 1 the inner
sum is the single residue p = pbar = 0.  Its limit is the integral of f
against dx du dv / v^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import count_lattice_in_cone
from .numtheory import build_table, kloosterman, unit_inverses
from .quadrature import adaptive_simpson
from .sets import TestSet
from .statistics import dyadic_bits, sample_points

KINDS = ("v-indicator", "v-power", "v-profile", "harmonic", "callable")


@dataclass(frozen=True)
class TestFunctionSpec:
    """A test function f(x, u, v) on T x Gamma\\H.

    ``v-indicator`` is 1 on [v1, v2]; ``v-power`` is v^power there;
    ``v-profile`` is an arbitrary ``profile(v)`` supported there;
    ``harmonic`` multiplies the v^power window by e(m1 x + m2 u);
    ``callable`` is any vectorized ``func(x, u, v)`` with a known ``rhs``.
    """

    kind: str
    v1: float = 1.0
    v2: float = math.inf
    power: float = 0.0
    m1: int = 0
    m2: int = 0
    profile: Optional[Callable] = None
    func: Optional[Callable] = None
    rhs: Optional[float] = None
    label: str = ""

    __test__ = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.v2 <= self.v1:
            raise ValueError("need v1 < v2")
        if self.kind == "v-profile" and self.profile is None:
            raise ValueError("v-profile needs a profile callable")
        if self.kind == "callable" and self.func is None:
            raise ValueError("callable kind needs func")

    @property
    def x_independent(self) -> bool:
        return self.kind in ("v-indicator", "v-power", "v-profile") or (
            self.kind == "harmonic" and self.m1 == 0 and self.m2 == 0)

    def window(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        inside = (v >= self.v1) & (v <= self.v2)
        if self.kind == "v-profile":
            vals = np.array([self.profile(t) for t in v.ravel()], dtype=float).reshape(v.shape)
            return np.where(inside, vals, 0.0)
        if self.kind == "v-indicator":
            return inside.astype(float)
        return np.where(inside, np.abs(v) ** self.power, 0.0)

    def __call__(self, x, u, v):
        if self.kind == "callable":
            return self.func(x, u, v)
        w = self.window(v)
        if self.kind == "harmonic" and (self.m1 or self.m2):
            return w * np.exp(2j * math.pi * (self.m1 * np.asarray(x) + self.m2 * np.asarray(u)))
        return w

    def name(self) -> str:
        if self.label:
            return self.label
        win = f"[{self.v1:g},{self.v2:g}]"
        if self.kind == "harmonic":
            return f"e({self.m1}x+{self.m2}u) v^{self.power:g} 1{win}(v)"
        if self.kind == "v-power":
            return f"v^{self.power:g} 1{win}(v)"
        return f"{self.kind} 1{win}(v)"


def v_indicator(v1: float, v2: float = math.inf) -> TestFunctionSpec:
    return TestFunctionSpec("v-indicator", v1, v2)


def harmonic(m1: int, m2: int, v1: float, v2: float, power: float = 0.0) -> TestFunctionSpec:
    return TestFunctionSpec("harmonic", v1, v2, power=power, m1=m1, m2=m2)


def farey_average(f: TestFunctionSpec, Q: int):
    """Average of f over the Farey points of level Q lifted to the horocycle.

    Real for every built-in kind; a ``callable`` may return complex values.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    phi = build_table(Q).totient
    size = int(phi[1:].sum())
    qs = np.arange(1, Q + 1)
    v = (Q / qs.astype(float)) ** 2
    if f.kind == "callable":
        terms = []
        for q in range(1, Q + 1):
            p, pbar = unit_inverses(q)
            vals = f(p / q, pbar / q, np.full(len(p), v[q - 1]))
            terms.append(np.sum(vals))
        re = math.fsum(np.real(terms))
        im = math.fsum(np.imag(terms))
        return complex(re, im) / size if im != 0 else re / size
    w = f.window(v)
    if f.x_independent:
        return math.fsum(phi[1:] * w) / size
    # inner sum over units of e(m1 p/q + m2 pbar/q) is the Kloosterman sum
    support = np.flatnonzero(w)
    terms = [kloosterman(f.m1, f.m2, int(qs[i])) * w[i] for i in support]
    return math.fsum(terms) / size


def rhs_integral(f: TestFunctionSpec) -> float:
    """Integral of f(x, u + iv) dx du dv / v^2 over [0,1]^2 x (0, inf)."""
    if f.kind == "harmonic" and (f.m1 or f.m2):
        return 0.0
    if f.kind == "callable":
        if f.rhs is None:
            raise ValueError("callable test function needs an explicit rhs")
        return f.rhs
    if f.v1 <= 0:
        raise ValueError("not integrable: window reaches v = 0 with non-zero mean")
    if f.kind == "v-indicator":
        return 1.0 / f.v1 - (0.0 if math.isinf(f.v2) else 1.0 / f.v2)
    if f.kind in ("v-power", "harmonic"):
        e = f.power - 1.0
        if math.isinf(f.v2):
            if e >= 0:
                raise ValueError("not integrable: v^power/v^2 diverges at infinity")
            return -f.v1 ** e / e
        if e == 0:
            return math.log(f.v2 / f.v1)
        return (f.v2 ** e - f.v1 ** e) / e
    # v-profile: substitute t = 1/v, dv / v^2 = -dt
    t_lo = 0.0 if math.isinf(f.v2) else 1.0 / f.v2

    def g(t: float) -> float:
        if t == 0.0:
            return float(f.profile(math.inf))
        return float(f.profile(1.0 / t))

    return adaptive_simpson(g, t_lo, 1.0 / f.v1, 1e-9)


def horosphere_samples(Q: int, n: int, samples: int, seed: int = 0) -> list:
    """The torus points used by :func:`horosphere_average` (and the void statistic)."""
    bits = dyadic_bits(Q)
    num = sample_points(TestSet.torus(n), samples, bits, seed)
    return [[Fraction(int(k), 2 ** bits) for k in row] for row in num]


def horosphere_average(g: Callable[[int], float], Q: int, A: TestSet,
                       samples: int = 1000, seed: int = 0) -> float:
    """Average over x of g(|hat Z^{n+1} h(x) a(Q) cap C(A)|).

    The sample points match :func:`fareystat.statistics.void_statistic` for
    the same (Q, samples, seed), so the two agree exactly.
    """
    xs = horosphere_samples(Q, A.n, samples, seed)
    return math.fsum(g(count_lattice_in_cone(x, Q, A)) for x in xs) / len(xs)


ACCEPTANCE_FUNCTIONS = (
    TestFunctionSpec("v-indicator", 1.0, 2.0, label="1[1,2](v)"),
    TestFunctionSpec("v-indicator", 1.0, 4.0, label="1[1,4](v)"),
    TestFunctionSpec("harmonic", 1.0, 2.0, m1=1, label="e(x) 1[1,2](v)"),
)


def equidistribution_table(levels: Sequence[int],
                           functions: Sequence[TestFunctionSpec] = ACCEPTANCE_FUNCTIONS,
                           slack: float = 1.5) -> list:
    """LHS per level, RHS and gaps for each test function, with a decay flag."""
    rows = []
    for f in functions:
        rhs = rhs_integral(f)
        lhs = [farey_average(f, Q) for Q in levels]
        gaps = [abs(v - rhs) for v in lhs]
        decreasing = all(b <= slack * a for a, b in zip(gaps[:-1], gaps[1:]))
        rows.append({"function": f.name(), "levels": list(levels), "lhs": lhs,
                     "rhs": rhs, "gaps": gaps, "decreasing": decreasing})
    return rows
