import math

import numpy as np
import pytest

from fareystat import limits1d, statistics as st
from fareystat.farey import sigma
from fareystat.sets import TestSet

from conftest import farey

UNIT = TestSet.interval(0.0, 1.0)


def test_void_distribution_sums_to_one():
    d = st.void_statistic(farey(1, 500), TestSet.interval(0, 2), samples=3000, seed=1)
    assert sum(d.fractions()) == 1
    assert (d.mass >= 0).all() and d.samples == 3000
    assert d.metadata["seed"] == 1 and d.metadata["mode"] == "mc"


def test_point_distribution_sums_to_one():
    d = st.point_statistic(farey(2, 30), TestSet.ball_of_volume(2.0, 2))
    assert sum(d.fractions()) == 1
    assert d.samples == len(farey(2, 30))


def test_seeds_agree_within_three_standard_errors():
    F = farey(1, 1000)
    A = TestSet.interval(0, 3)
    N = 20_000
    a = st.void_statistic(F, A, samples=N, seed=11).mass
    b = st.void_statistic(F, A, samples=N, seed=12).mass
    pbar = (a + b) / 2
    se = np.sqrt(2 * pbar * (1 - pbar) / N)
    assert (np.abs(a - b) <= 3 * se + 1e-12).all()


def test_expectation_close_to_volume():
    d = st.void_statistic(farey(1, 1000), UNIT, samples=50_000, seed=3)
    assert d.expectation == pytest.approx(1.0, abs=0.02)


def test_grid_mode_is_deterministic():
    F = farey(1, 300)
    a = st.void_statistic(F, UNIT, samples=4096, mode="grid")
    b = st.void_statistic(F, UNIT, samples=4096, mode="grid", seed=99)
    assert np.array_equal(a.counts, b.counts)
    with pytest.raises(ValueError):
        st.void_statistic(F, UNIT, D=TestSet.ball(0.3, 1), samples=10, mode="grid")


def test_ball_domain_sampling():
    F = farey(2, 20)
    D = TestSet.ball(0.3, 2)
    d = st.void_statistic(F, TestSet.ball_of_volume(1.0, 2), D=D, samples=2000, seed=4)
    assert d.samples == 2000 and sum(d.fractions()) == 1


def test_threads_do_not_change_results():
    F = farey(1, 800)
    A = TestSet.interval(0, 2)
    a = st.void_statistic(F, A, samples=20_000, seed=5, workers=1)
    b = st.void_statistic(F, A, samples=20_000, seed=5, workers=4)
    assert np.array_equal(a.counts, b.counts)
    c = st.point_statistic(F, A, workers=3)
    assert np.array_equal(c.counts, st.point_statistic(F, A).counts)


def test_overflow_bucket():
    d = st.void_statistic(farey(1, 400), TestSet.interval(0, 5), samples=1000, kmax=2)
    assert d.overflow and d.metadata["overflow"]
    assert d.counts.sum() == 1000
    assert d.expectation == pytest.approx(5.0, abs=0.5)


def test_reference_point_counts_itself_only_if_zero_in_A():
    F = farey(1, 200)
    closed_at_zero = st.point_statistic(F, TestSet.interval(0, 1, closed_high=False))
    open_at_zero = st.point_statistic(F, UNIT)
    assert closed_at_zero.p(0) == 0.0
    assert open_at_zero.p(0) > 0.0
    # [0,1) gains every self-hit and loses offsets equal to the scale itself;
    # the scale is a dyadic double with a huge denominator, so there are none
    assert closed_at_zero.total == open_at_zero.total + len(F)


def test_no_reference_points():
    with pytest.raises(ValueError, match="no reference points"):
        st.point_statistic(farey(1, 2), UNIT, D=TestSet.box([0.6], [0.65]))


def test_gap_examples():
    F = farey(1, 5)
    gaps = st.gap_distribution_1d(F)
    assert len(gaps) == len(F)
    assert math.fsum(gaps) == pytest.approx(sigma(1, 5), rel=1e-14)
    # the gap from 0 to 1/5 is the longest one; the shortest is 1/5 -> 1/4
    assert gaps[-1] == pytest.approx(sigma(1, 5) / 5, rel=1e-14)
    assert gaps[0] == pytest.approx(sigma(1, 5) / 20, rel=1e-14)
    big = st.gap_distribution_1d(farey(1, 300))
    assert math.fsum(big) == pytest.approx(sigma(1, 300), rel=1e-12)
    with pytest.raises(ValueError):
        st.gap_distribution_1d(farey(2, 3))


def test_gap_survival_equals_point_statistic():
    F = farey(1, 700)
    s = [0.1 + 0.2 * j for j in range(20)]
    assert np.array_equal(st.gap_survival(F, s), st.point_curve(F, UNIT, s))
    for x in s[:5]:
        assert st.point_statistic(F, UNIT.scaled(x)).p(0) == st.gap_survival(F, [x])[0]


def test_gap_survival_matches_empirical_gap_cdf():
    F = farey(1, 400)
    gaps = st.gap_distribution_1d(F)
    for s in (0.3, 0.9, 1.7):
        # away from ties, survival = fraction of gaps longer than s
        assert st.gap_survival(F, [s])[0] == pytest.approx(np.mean(gaps > s), abs=1e-12)


def test_void_curve_non_increasing():
    v = st.void_curve(farey(1, 1000), UNIT, [0.1 * j for j in range(1, 31)], samples=5000, seed=2)
    assert (np.diff(v) <= 0).all()


def test_domain_independence_asymmetric_split():
    F = farey(1, 2000)
    s = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0]
    a = st.point_curve(F, UNIT, s, D=TestSet.box([0.0], [0.3]))
    b = st.point_curve(F, UNIT, s, D=TestSet.box([0.3], [1.0]))
    assert np.max(np.abs(a - b)) <= 0.03


def test_convergence_report_basics():
    const = [[0.2, 0.8]] * 4
    r = st.convergence_report(const, "const")
    assert r.passed and r.computed == [0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        st.convergence_report(const[:2])
    bad = st.convergence_report([[0.0], [0.1], [0.5]], slack=1.5)
    assert not bad.passed and bad.deviation == pytest.approx(4.0)


def test_convergence_to_hall():
    s = [0.1 * j for j in range(1, 41)]
    fam = [st.gap_survival(farey(1, Q), s) for Q in (100, 400, 1600)]
    r = st.convergence_report(fam, "hall", limit=[limits1d.hall_cdf(x) for x in s],
                              levels=[100, 400, 1600])
    assert r.passed, r.details


def test_dyadic_bits_keep_offsets_exact():
    for Q in (1, 10, 1000, 10 ** 6):
        b = st.dyadic_bits(Q)
        assert 3 * Q * 2 ** b < 2 ** 53
