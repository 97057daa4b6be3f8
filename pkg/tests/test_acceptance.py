"""One test per acceptance criterion, each timed against its runtime budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from releq.cli import SweepConfig, sweep_rows
from releq.criteria import (
    A_TOPOLOGY,
    alpha_sign_condition,
    classify_homogeneous,
    classify_quasihomogeneous,
    critical_mass_ratio,
    g_function,
    mass_function_f,
    routh_bound,
    solve_critical_radius,
    z_star,
)
from releq.dynamics import growth_rate, max_deviation_ratio
from releq.equilibria import lagrange_triangle
from releq.linearization import (
    Classification,
    match_multisets,
    remaining_factor_closed_form,
    remaining_factor_from_traces,
    triangle_reduced_matrix,
)
from releq.oracle import agreement_harness, full_spectrum
from releq.potentials import Homogeneous, Quasihomogeneous
from releq.sampling import random_samples

STABLE, UNSTABLE = Classification.SPECTRALLY_STABLE, Classification.UNSTABLE


@pytest.fixture
def criterion(record_property):
    def tag(name, detail=""):
        record_property("criterion", name)
        record_property("detail", detail)
    return tag


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f} s, budget {self.seconds} s"


def test_criterion_1_routh_bound_values(criterion):
    criterion("1 Routh bound values")
    with Budget(1.0):
        assert abs(routh_bound(1) - 1 / 27) <= 1e-14
        assert abs(routh_bound(14 - 8 * math.sqrt(3)) - 0.25) <= 1e-12
        assert A_TOPOLOGY == pytest.approx(0.14359354, abs=1e-8)


def test_criterion_2_critical_mass_ratio(criterion):
    criterion("2 restricted-limit critical mass ratio")
    with Budget(1.0):
        mu = critical_mass_ratio(1.0, m3=1e-12)
        expected = (1 - math.sqrt(23 / 27)) / 2
        assert abs(mu - expected) <= 1e-6
        assert expected == pytest.approx(0.03852, abs=1e-5)


def test_criterion_3_reduced_matrix_spectrum(criterion):
    criterion("3 triangle reduced-matrix spectrum")
    rng = np.random.default_rng(3)
    with Budget(5.0):
        for _ in range(100):
            m = rng.uniform(0.01, 10, 3)
            a = rng.uniform(0.01, 3.0)
            re = lagrange_triangle(m, Homogeneous(a))
            ev = triangle_reduced_matrix(re).eigenvalues()
            for target in (0.0, 0.0, -1.0, a + 1):
                i = int(np.argmin(np.abs(ev - target)))
                assert abs(ev[i] - target) <= 1e-9
                ev = np.delete(ev, i)
            traced = remaining_factor_from_traces(re)
            f = (m[0] * m[1] + m[0] * m[2] + m[1] * m[2]) / m.sum() ** 2
            assert traced.alpha == pytest.approx(2 - a, rel=1e-10, abs=1e-10)
            assert traced.beta == pytest.approx(0.75 * (a + 2) ** 2 * f, rel=1e-10)


def test_criterion_4_quasihomogeneous_beta(criterion):
    criterion("4 quasihomogeneous beta cross-check")
    rng = np.random.default_rng(4)
    with Budget(5.0):
        for _ in range(100):
            m = rng.uniform(0.01, 10, 3)
            b = rng.uniform(0.05, 3.0)
            a = b + rng.uniform(0.05, 3.0)
            r0 = rng.uniform(0.1, 10.0)
            re = lagrange_triangle(m, Quasihomogeneous(a, b), r0)
            closed = remaining_factor_closed_form(re)
            traced = remaining_factor_from_traces(re)
            assert traced.beta == pytest.approx(closed.beta, rel=1e-9)


def test_criterion_5_closed_form_vs_oracle(criterion):
    with Budget(30.0) as budget:
        table = agreement_harness(random_samples(1000, seed=42))
    criterion("5 closed form vs oracle", f"{len(table)} samples, {table.mismatches} mismatches, "
                                        f"{budget.elapsed:.1f} s")
    assert len(table) == 1000
    assert table.mismatches == 0


def test_criterion_6_g_limits_and_monotonicity(criterion):
    criterion("6 g limits and monotonicity")
    rng = np.random.default_rng(6)
    with Budget(5.0):
        for _ in range(20):
            # the limits are approached like r0**(+-(a-b)); a gap of 1 puts
            # r0 = 1e-6 and 1e6 inside the 1e-4 window for every b
            b = rng.uniform(0.05, 3.0)
            a = b + rng.uniform(1.0, 3.0)
            assert abs(g_function(a, b, 1e-6) - ((a - 2) / (a + 2)) ** 2 / 3) <= 1e-4
            assert abs(g_function(a, b, 1e6) - ((b - 2) / (b + 2)) ** 2 / 3) <= 1e-4
        grid = np.logspace(-3, 3, 1000)
        # 0 < b < a < 2: strictly increasing
        for a, b in [(1.0, 0.5), (1.9, 0.2), (0.1, 0.05)]:
            assert np.all(np.diff([g_function(a, b, r) for r in grid]) > 0)
        # b < 2 < a: decreasing up to z*, increasing after it, zero at z*
        for a, b in [(3.0, 1.0), (2.5, 0.5), (4.0, 1.9)]:
            zs = z_star(a, b)
            left = [g_function(a, b, r) for r in grid[grid < zs]]
            right = [g_function(a, b, r) for r in grid[grid > zs]]
            assert np.all(np.diff(left) < 0) and np.all(np.diff(right) > 0)
            assert abs(g_function(a, b, zs)) <= 1e-10
        # 2 < b < a: the alpha condition never changes sign, g is monotone
        for a, b in [(3.0, 2.5), (5.0, 2.1)]:
            g = np.diff([g_function(a, b, r) for r in grid])
            assert np.all(g > 0) or np.all(g < 0)


def _flip(masses, a, b):
    """Classes just below and just above the critical side."""
    r = solve_critical_radius(mass_function_f(masses), a, b)
    lo = classify_quasihomogeneous(masses, a, b, r - 1e-6).classification
    hi = classify_quasihomogeneous(masses, a, b, r + 1e-6).classification
    return r, lo, hi


def test_criterion_7_regime_table(criterion):
    criterion("7 regime table witnesses")
    with Budget(1.0):
        # 0 < b < a < 2
        a, b = 1.0, 0.5
        assert classify_quasihomogeneous([1, 1, 1], a, b, 1.0).classification is UNSTABLE
        assert classify_quasihomogeneous([1, 0.3, 0.3], a, b, 100.0).classification is UNSTABLE
        for r0 in (1e-3, 1.0, 1e3):
            assert classify_quasihomogeneous([1, 1e-3, 1e-3], a, b, r0).classification is STABLE
        m = [1, 0.03, 0.03]
        assert routh_bound(a) < mass_function_f(m) < routh_bound(b)
        r, lo, hi = _flip(m, a, b)
        assert (lo, hi) == (UNSTABLE, STABLE)
        # b < 2 < a
        a, b = 3.0, 1.0
        assert classify_quasihomogeneous([1, 1e-3, 1e-3], a, b, 1.0).classification is UNSTABLE
        assert alpha_sign_condition(a, b, 1.0) > 0
        assert classify_quasihomogeneous([1, 0.2, 0.2], a, b, 100.0).classification is UNSTABLE
        m = [1, 1e-3, 1e-3]
        r, lo, hi = _flip(m, a, b)
        assert r > z_star(a, b)
        assert (lo, hi) == (UNSTABLE, STABLE)
        # 2 < b < a
        for r0 in (1e-2, 1.0, 1e2):
            assert classify_quasihomogeneous([1, 1e-6, 1e-6], 3.0, 2.5, r0).classification is UNSTABLE
        # homogeneous theorem and Routh cases
        assert classify_homogeneous([1, 1e-6, 1e-6], 2.5).classification is UNSTABLE
        assert classify_homogeneous([1, 1e-3, 1e-3], 1.0).classification is STABLE


def test_criterion_8_dynamics(criterion):
    with Budget(60.0):
        newton = lagrange_triangle([1, 1, 1], Homogeneous(1))
        spectral = full_spectrum(newton).eigenvalues.real.max()
        measured = growth_rate(newton, 1e-8)
        stable = lagrange_triangle([1, 1e-3, 1e-3], Homogeneous(1))
        assert full_spectrum(stable).classification is STABLE
        ratio = max_deviation_ratio(stable, 1e-8, periods=10)
    criterion("8 dynamics validation",
              f"rate {measured:.6f} vs {spectral:.6f}, stable growth x{ratio:.3f}")
    assert abs(measured - spectral) <= 0.05 * spectral
    assert ratio <= 100


def test_criterion_9_small_exponent_region_topology(criterion):
    a, b = 0.1, 0.05
    assert 0 < b < a < A_TOPOLOGY
    with Budget(30.0):
        header, rows = sweep_rows(SweepConfig(100, Quasihomogeneous(a, b)))
    labels = {r[header.index("class")] for r in rows}
    criterion("9 small-exponent region topology", f"labels {sorted(labels)}")
    assert labels == {"unstable", "size_dependent", "stable"}
    corners = [(98, 1, 1), (1, 98, 1), (1, 1, 98)]
    table = {tuple(round(v * 100) for v in r[:3]): r[header.index("class")] for r in rows}
    for c in corners:
        assert table[c] == "stable"
