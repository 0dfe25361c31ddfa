"""Shear/dilation matrices, the cone over a test set, and lattice-point counting in it.

Row-vector convention throughout: a lattice vector (p, q) maps to
``(p, q) @ h(x) @ a(y) = ((p - q x) y^(1/n), q / y)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .farey import EXACT_FLOAT_INT, Rational, scale, to_rational_base
from .numtheory import zeta_real
from .sets import TestSet


@dataclass(frozen=True)
class ShearMatrix:
    x: tuple

    @property
    def matrix(self) -> np.ndarray:
        return h_matrix(self.x)


@dataclass(frozen=True)
class DilationMatrix:
    y: float
    n: int

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("dilation parameter must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return a_matrix(self.y, self.n)


def h_matrix(x: Sequence[float]) -> np.ndarray:
    n = len(x)
    h = np.eye(n + 1)
    h[n, :n] = -np.asarray(x, dtype=float)
    return h


def a_matrix(y: float, n: int) -> np.ndarray:
    return np.diag([y ** (1.0 / n)] * n + [1.0 / y])


def apply_h_a(v: Sequence[int], x: Sequence[float], Qy: float) -> np.ndarray:
    """(p, q) h(x) a(Qy), evaluated directly rather than by matrix product."""
    n = len(x)
    p = np.asarray(v[:n], dtype=float)
    q = float(v[n])
    return np.concatenate([(p - q * np.asarray(x, dtype=float)) * Qy ** (1.0 / n), [q / Qy]])


@dataclass(frozen=True)
class ConeSpec:
    """{(x, y) : 0 < y <= 1, x in sigma_1^(-1/n) y A}."""

    A: TestSet

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def sigma1(self) -> float:
        return 1.0 / ((self.n + 1) * zeta_real(self.n + 1))

    def contains(self, w: Sequence[float]) -> bool:
        return cone_contains(self, w)


def cone_contains(c: ConeSpec, w: Sequence[float]) -> bool:
    w = np.asarray(w, dtype=float)
    n = c.n
    y = w[n]
    if not 0 < y <= 1:
        return False
    z = w[:n] / (c.sigma1 ** (-1.0 / n) * y)
    return bool(c.A.contains(z[None, :])[0])


def cone_lambda_contains(c: ConeSpec, lam: float, w: Sequence[float]) -> bool:
    """Membership in C_lambda(A) = C(A) a(lambda^(1/(n+1)))."""
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    inv = a_matrix(lam ** (-1.0 / (c.n + 1)), c.n)
    return cone_contains(c, np.asarray(w, dtype=float) @ inv)


@dataclass(frozen=True)
class TriangleSpec:
    s: float
    lam: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("s must be positive")
        if not 0 < self.lam <= 1:
            raise ValueError("lambda must lie in (0, 1]")


def triangle_contains(t: TriangleSpec, x1: float, x2: float) -> bool:
    return (0 < x1 <= (math.pi ** 2 / 3) * x2 * t.lam * t.s) and (0 < x2 <= t.lam ** -0.5)


def _check_level(A: TestSet, delta: float) -> None:
    if not delta * A.diameter < 1:
        raise ValueError(f"level too small for test set: scaled diameter {delta * A.diameter} >= 1")


def _cone_candidates(X: np.ndarray, lo: np.ndarray, hi: np.ndarray, Q: int) -> np.ndarray:
    """Integer (p_1..p_n, q) covering {p/q in X + [lo, hi]}, 0 < q <= Q, with slack."""
    n = len(X)
    qs = np.arange(1, Q + 1, dtype=np.int64)
    cols = [qs]
    for i in range(n):
        qcur = cols[0]
        pmin = np.floor((X[i] + lo[i]) * qcur).astype(np.int64) - 1
        pmax = np.ceil((X[i] + hi[i]) * qcur).astype(np.int64) + 1
        cnt = pmax - pmin + 1
        rep = np.repeat(np.arange(len(qcur)), cnt)
        off = np.arange(int(cnt.sum())) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        cols = [c[rep] for c in cols] + [pmin[rep] + off]
    q = cols[0]
    return np.column_stack(cols[1:] + [q])


def count_lattice_in_cone(x: Sequence[Rational], Q: int, A: TestSet) -> int:
    """Primitive (p, q), 0 < q <= Q, with (p, q) h(x) a(Q) in C(A).

    Decided through the equivalent condition p/q in x + sigma_Q^(-1/n) A with
    the same exact predicate used for Farey counting, so both sides of the
    counting identity agree bit for bit.
    """
    n = A.n
    if len(x) != n:
        raise ValueError("x has wrong dimension")
    delta = scale(n, Q)
    _check_level(A, delta)
    lo, hi = A.bounds(delta)
    xn, xd = to_rational_base(x)
    X = np.array([a / xd for a in xn])
    cand = _cone_candidates(X, lo, hi, Q)
    p, q = cand[:, :n], cand[:, n]
    bound = (2 * Q + 2) * xd + xd * Q
    if bound < EXACT_FLOAT_INT:
        num = p * xd - np.asarray(xn, dtype=np.int64) * q[:, None]
        den = q * xd
    else:
        po, qo = p.astype(object), q.astype(object)
        num = po * xd - np.array(xn, dtype=object) * qo[:, None]
        den = qo * xd
    inside, _ = A.contains_diff(num, den, delta)
    g = q[inside]
    for i in range(n):
        g = np.gcd(g, p[inside, i])
    return int(np.count_nonzero(g == 1))


def count_lattice_in_cone_matrix(x: Sequence[float], Q: int, A: TestSet) -> int:
    """Slow floating-point reference: apply h(x) a(Q) and test cone membership."""
    n = A.n
    delta = scale(n, Q)
    _check_level(A, delta)
    cone = ConeSpec(A)
    lo, hi = A.bounds(delta)
    xf = np.asarray(x, dtype=float)
    cand = _cone_candidates(xf, lo, hi, Q)
    M = h_matrix(xf) @ a_matrix(float(Q), n)
    total = 0
    for v in cand:
        if math.gcd(*(int(c) for c in v)) != 1:
            continue
        if cone_contains(cone, v.astype(float) @ M):
            total += 1
    return total
