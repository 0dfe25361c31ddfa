"""Verification harness behind ``fareystat verify``.

Each check returns a :class:`VerificationReport` (or a list of them).  A check
passes only if its numerical comparison holds *and* it finished within its
runtime limit, when one is set.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import equidist, limits1d, numtheory, statistics
from .farey import count_in_translate, enumerate_farey, scale, sigma
from .geometry import count_lattice_in_cone
from .report import VerificationReport
from .sets import TestSet


@dataclass(frozen=True)
class Profile:
    name: str
    card_small_Q: int = 50
    card_large_Q: int = 10_000
    equiv_instances: int = 200
    hall_Q: int = 2000
    quad_points: int = 100
    oracle_grid: int = 50
    zeta_Q: int = 100_000
    equidist_Q: int = 5000
    expect_Q: int = 10_000
    expect_samples: int = 100_000
    dindep_Q: int = 2000
    conv_levels: tuple = (50, 100, 150)
    slope_Q: int = 2000
    slope_samples: int = 100_000
    seed: int = 20100


PROFILES = {
    "default": Profile("default"),
    "quick": Profile("quick", card_small_Q=20, card_large_Q=2000, equiv_instances=40,
                     hall_Q=1000, quad_points=20, oracle_grid=12, zeta_Q=100_000,
                     equidist_Q=2000, expect_Q=2000, expect_samples=40_000, dindep_Q=1000,
                     conv_levels=(30, 60, 90), slope_Q=1000, slope_samples=40_000),
}

S_GRID = [round(0.1 * j, 10) for j in range(1, 41)]


def _timed(fn: Callable[[], VerificationReport], limit: float = math.inf) -> VerificationReport:
    t0 = time.perf_counter()
    rep = fn()
    rep.runtime = time.perf_counter() - t0
    if math.isfinite(limit):
        rep.details["runtime_limit"] = limit
        if rep.runtime >= limit:
            rep.passed = False
    return rep


def check_cardinality(pr: Profile) -> VerificationReport:
    def run():
        mismatches = []
        for n in (1, 2, 3):
            F = enumerate_farey(n, pr.card_small_Q)
            per_level = np.bincount(F.q.astype(np.int64), minlength=pr.card_small_Q + 1)
            got = np.cumsum(per_level)[1:]
            want = np.cumsum(numtheory.build_table(pr.card_small_Q, n).jordan[1:].astype(np.int64))
            mismatches += [(n, Q + 1) for Q in np.flatnonzero(got != want)]
        Q = pr.card_large_Q
        F = enumerate_farey(1, Q)
        exact = int(numtheory.build_table(Q).totient[1:].sum())
        ratio = len(F) / sigma(1, Q)
        rep = VerificationReport.compare(
            "1 exact cardinality", ratio, 1.0, 1e-3, norm="ratio",
            mismatches=len(mismatches), size=len(F), exact=exact)
        rep.passed = rep.passed and not mismatches and len(F) == exact
        return rep
    return _timed(run, 5.0)


def random_instances(n: int, count: int, seed: int, qrange=None):
    """Random (x, Q, A) satisfying the scale condition delta * diam(A) < 1."""
    rng = np.random.default_rng(seed)
    lo_q, hi_q = qrange or ((4, 400) if n == 1 else (3, 45))
    out = []
    while len(out) < count:
        Q = int(rng.integers(lo_q, hi_q))
        kind = rng.integers(3)
        if kind == 2:
            A = TestSet.ball_of_volume(float(rng.uniform(0.2, 3.0)), n)
        else:
            a = rng.uniform(-1.5, 0.5, n)
            A = TestSet.box(a, a + rng.uniform(0.2, 2.0, n), closed_high=bool(kind))
        if scale(n, Q) * A.diameter >= 1:
            continue
        out.append((rng.random(n).tolist(), Q, A))
    return out


def check_equivalence(pr: Profile) -> VerificationReport:
    def run():
        mism, total = 0, 0
        for n in (1, 2):
            cache = {}
            for x, Q, A in random_instances(n, pr.equiv_instances, pr.seed + n):
                F = cache.get(Q) or cache.setdefault(Q, enumerate_farey(n, Q))
                total += 1
                if count_in_translate(F, x, A, scale(n, Q)) != count_lattice_in_cone(x, Q, A):
                    mism += 1
        return VerificationReport.compare("2 counting equivalence", mism, 0, 0,
                                          norm="mismatches", instances=total)
    return _timed(run, 30.0)


def check_hall_gaps(pr: Profile) -> VerificationReport:
    def run():
        F = enumerate_farey(1, pr.hall_Q)
        emp = statistics.gap_survival(F, S_GRID)
        ref = [limits1d.hall_cdf(s) for s in S_GRID]
        return VerificationReport.compare("3 Hall law from gaps", emp, ref, 0.02, norm="sup",
                                          Q=pr.hall_Q, s=S_GRID)
    return _timed(run, 10.0)


def check_quadrature(pr: Profile) -> VerificationReport:
    def run():
        s = [5.0 * (j + 1) / pr.quad_points for j in range(pr.quad_points)]
        quad = [limits1d.p0_quadrature(x) for x in s]
        closed = [limits1d.hall_cdf(x) for x in s]
        return VerificationReport.compare("4 lambda quadrature = Hall", quad, closed, 1e-8, norm="sup")
    return _timed(run, 5.0)


def check_triangle_oracle(pr: Profile) -> VerificationReport:
    def run():
        g = pr.oracle_grid
        s_vals = [3.0 * (i + 1) / g for i in range(g)]
        l_vals = [(j + 1) / g for j in range(g)]
        a, b = [], []
        for s in s_vals:
            for lam in l_vals:
                a.append(limits1d.p0_triangle(s, lam))
                b.append(limits1d.triangle_oracle(s, lam))
        return VerificationReport.compare("5 triangle closed form = oracle", a, b, 1e-10,
                                          norm="sup", grid=g)
    return _timed(run, 60.0)


def check_branches(pr: Profile) -> VerificationReport:
    def run():
        pi2 = math.pi ** 2
        # a = 1 <-> s = 3/pi^2, a = 1/4 <-> s = 12/pi^2
        jumps = [abs(limits1d._hall_middle(1.0) - 1.0),
                 abs(limits1d._hall_middle(0.25) - limits1d._hall_low(0.25)),
                 abs(limits1d.hall_cdf(3 / pi2) - 1.0),
                 abs(limits1d.hall_cdf(12 / pi2) - limits1d._hall_low(0.25))]
        h = 1e-5
        fd = []
        for s in (0.5, 1.0, 2.0):
            numeric = -(limits1d.hall_cdf(s + h) - limits1d.hall_cdf(s - h)) / (2 * h)
            fd.append(abs(numeric - limits1d.hall_density(s)))
        rep = VerificationReport.compare("6 branch continuity", max(jumps), 0.0, 1e-12,
                                         density_fd_error=max(fd))
        rep.passed = rep.passed and max(fd) <= 1e-6
        return rep
    return _timed(run)


def check_zeta(pr: Profile) -> VerificationReport:
    def run():
        rep = numtheory.totient_zeta_identity_check(1.5, pr.zeta_Q, tolerance=1e-4)
        rep.name = "7 totient zeta identity"
        return rep
    return _timed(run, 2.0)


def check_zeta_s2(pr: Profile) -> VerificationReport:
    def run():
        rep = numtheory.totient_zeta_identity_check(2.0, 10_000, tolerance=1e-6)
        rep.name = "zeta identity at s=2"
        return rep
    return _timed(run)


def check_equidist(pr: Profile) -> VerificationReport:
    def run():
        fs = equidist.ACCEPTANCE_FUNCTIONS
        lhs = [equidist.farey_average(f, pr.equidist_Q) for f in fs]
        rhs = [equidist.rhs_integral(f) for f in fs]
        tols = [0.01, 0.01, 0.02]
        devs = [abs(a - b) for a, b in zip(lhs, rhs)]
        rep = VerificationReport.compare("8 Farey equidistribution", lhs, rhs, max(tols),
                                         functions=[f.name() for f in fs], tolerances=tols)
        rep.passed = all(d <= t for d, t in zip(devs, tols))
        return rep
    return _timed(run, 10.0)


def check_expectation(pr: Profile) -> VerificationReport:
    def run():
        F = enumerate_farey(1, pr.expect_Q)
        dist = statistics.void_statistic(F, TestSet.interval(0.0, 1.0),
                                         samples=pr.expect_samples, seed=pr.seed)
        return VerificationReport.compare("9 expectation = vol(A)", dist.expectation, 1.0, 0.02,
                                          samples=dist.samples, seed=pr.seed)
    return _timed(run)


def check_domain_independence(pr: Profile) -> VerificationReport:
    def run():
        F = enumerate_farey(1, pr.dindep_Q)
        A = TestSet.interval(0.0, 1.0)
        c1 = statistics.point_curve(F, A, S_GRID, D=TestSet.box([0.0], [0.5]))
        c2 = statistics.point_curve(F, A, S_GRID, D=TestSet.box([0.5], [1.0]))
        return VerificationReport.compare("10 independence of D", c1, c2, 0.03, norm="sup")
    return _timed(run)


def check_higher_dim(pr: Profile) -> VerificationReport:
    def run():
        A = TestSet.ball_of_volume(1.0, 2)
        dists = [statistics.point_statistic(enumerate_farey(2, Q), A) for Q in pr.conv_levels]
        rep = statistics.convergence_report([d.mass for d in dists], "11 n=2 convergence",
                                            levels=pr.conv_levels)
        exact = all(sum(d.fractions()) == 1 for d in dists)
        near = sum(d.metadata["ball_near_boundary"] for d in dists)
        rep.details.update(sums_exact=exact, ball_near_boundary=near)
        rep.passed = rep.passed and exact and near == 0
        return rep
    return _timed(run, 120.0)


def check_nearest_element(pr: Profile) -> VerificationReport:
    def run():
        F = enumerate_farey(1, pr.slope_Q)
        A = TestSet.interval(0.0, 1.0)
        s = [round(0.1 * j, 10) for j in range(1, 42)]
        void = statistics.void_curve(F, A, s, samples=pr.slope_samples, seed=pr.seed)
        slope = np.diff(void) / 0.1
        mids = [round(0.5 * (a + b), 10) for a, b in zip(s[:-1], s[1:])]
        p0 = statistics.point_curve(F, A, mids)
        return VerificationReport.compare("12 nearest-element relation", slope, -p0, 0.05,
                                          norm="sup", s=mids)
    return _timed(run)


CHECKS: Dict[str, List[Callable[[Profile], VerificationReport]]] = {
    "zeta": [check_zeta, check_zeta_s2],
    "equivalence": [check_equivalence],
    "equidist": [check_equidist],
    "hall": [check_hall_gaps, check_quadrature, check_triangle_oracle, check_branches],
}
ALL_CHECKS = [check_cardinality, check_equivalence, check_hall_gaps, check_quadrature,
              check_triangle_oracle, check_branches, check_zeta, check_equidist,
              check_expectation, check_domain_independence, check_higher_dim,
              check_nearest_element]


def run_checks(which: str, profile: str = "default") -> List[VerificationReport]:
    pr = PROFILES[profile]
    fns = ALL_CHECKS if which == "all" else CHECKS[which]
    return [fn(pr) for fn in fns]
