"""Acceptance gate: one test (one pass/fail line under ``pytest -v``) per
release criterion, at the stated tolerances and runtime budgets.

The heavy desk-scale experiments (criteria 7 and 8) dominate the runtime
of this module; everything else completes in seconds.
"""

import math
import time

import numpy as np
import pytest

from barrier_occupation.bridge_laws import (BridgeSpec, first_hit_density,
                                            q_closed, q_integral)
from barrier_occupation.cli import main
from barrier_occupation.limit_laws import (g_cdf, g_tail_point, gamma_cdf,
                                           intlem_check)
from barrier_occupation.numerics import integrate
from barrier_occupation.validation import (check_prop_gGamma, check_theorem1,
                                           theorem3_statistic)


def _announce(k, stat, tol, runtime):
    print(f"criterion {k}: statistic {stat:.3g} (tolerance {tol:.3g}), "
          f"runtime {runtime:.1f}s")


def test_criterion_01_closed_form_matches_quadrature():
    t0 = time.perf_counter()
    worst = 0.0
    for y in (-2.0, -0.5, 0.5, 2.0):
        for t in (0.5, 1.0, 2.0, 8.0):
            for frac in (0.1, 0.5, 0.9):
                u = frac * t
                worst = max(worst, abs(q_integral(y, t, u) - q_closed(y, t, u)))
    runtime = time.perf_counter() - t0
    _announce(1, worst, 1e-6, runtime)
    assert worst <= 1e-6
    assert runtime < 30.0


def test_criterion_02_zero_start_is_exactly_uniform():
    rng = np.random.default_rng(123)
    for _ in range(100):
        t = float(rng.uniform(0.05, 20.0))
        u = float(rng.uniform(0.0, t * 0.9999))
        assert q_integral(0.0, t, u) == u / t
        assert q_closed(0.0, t, u) == u / t
    _announce(2, 0.0, 0.0, 0.0)


def test_criterion_03_first_hit_normalization():
    def mass(y, z):
        spec = BridgeSpec(y=y, t=2.0, z=z)
        return integrate(lambda s: first_hit_density(spec, s), 0.0, 2.0)

    worst = 0.0
    for y, z in [(1.0, 0.0), (-1.0, 0.0), (2.0, -1.0)]:
        worst = max(worst, abs(mass(y, z) - 1.0))
    assert worst <= 1e-8
    for y, z in [(1.0, 1.0), (-2.0, -3.0)]:
        assert mass(y, z) < 1.0 - 1e-3
    _announce(3, worst, 1e-8, 0.0)


def test_criterion_04_tail_integral_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for y in (-2.0, -0.5, 0.5, 2.0):
        for u in (0.25, 1.0, 4.0):
            lhs, rhs = intlem_check(y, u)
            worst = max(worst, abs(lhs - rhs))
    runtime = time.perf_counter() - t0
    _announce(4, worst, 1e-6, runtime)
    assert worst <= 1e-6
    assert runtime < 120.0


def test_criterion_05_tail_point_reaches_the_tail():
    worst = 0.0
    for y in (-2.0, -0.5, 0.5, 2.0):
        x = g_tail_point(y)
        worst = max(worst, 1.0 - g_cdf(y, x))
    _announce(5, worst, 1e-4, 0.0)
    assert worst <= 1e-4


def test_criterion_06_halving_identity_negative_starts():
    worst = 0.0
    for y in (-2.0, -0.5):
        for u in np.linspace(0.005, 1.0, 200):
            worst = max(worst,
                        abs(2.0 * g_cdf(y, u) - gamma_cdf(y, u)))
    _announce(6, worst, 1e-6, 0.0)
    assert worst <= 1e-6


@pytest.mark.parametrize("y", [-1.0, 0.0, 1.0])
def test_criterion_07_g_gamma_identity_from_samples(y):
    t0 = time.perf_counter()
    report = check_prop_gGamma(y, n=10 ** 5, seed=0, tolerance=0.02)
    runtime = time.perf_counter() - t0
    _announce(7, report.statistic, report.tolerance, runtime)
    assert report.passed
    assert runtime < 600.0


def test_criterion_08_desk_scale_convergence():
    t0 = time.perf_counter()
    stats = {}
    details = {}
    for y in (-1.0, 0.0, 1.0):
        report, det = check_theorem1(y, T=50.0, n=10 ** 4, step=2.0 ** -10,
                                     seed=0, tolerance=0.05,
                                     return_details=True)
        stats[y] = report.statistic
        details[y] = det
        assert report.passed, (y, report.statistic, det["ks"])
    # never-return fraction among accepted paths at y = 1 approximates the
    # atom of the limiting last-zero law
    atom_hat = float((details[1.0]["g"] == 0.0).mean())
    assert abs(atom_hat - 0.5562) <= 0.03, atom_hat
    # acceptance rate at y = 0 approximates (2/pi) T^(-1/2)
    attempts = details[0.0]["attempts"]
    rate_hat = 10 ** 4 / attempts
    rate = (2.0 / math.pi) * 50.0 ** -0.5
    se = math.sqrt(rate * (1.0 - rate) / attempts)
    assert abs(rate_hat - rate) <= 3.0 * se, (rate_hat, rate, se)
    runtime = time.perf_counter() - t0
    _announce(8, max(stats.values()), 0.05, runtime)
    assert runtime < 1800.0


def test_criterion_09_large_start_limits():
    t0 = time.perf_counter()
    s_neg = theorem3_statistic("neg", -15.0)
    s_pos = theorem3_statistic("pos", 30.0)
    assert s_neg <= 0.02 and s_pos <= 0.02, (s_neg, s_pos)
    pos_devs = [theorem3_statistic("pos", y) for y in (5.0, 10.0, 20.0, 40.0)]
    neg_devs = [theorem3_statistic("neg", -y) for y in (5.0, 10.0, 20.0, 40.0)]
    assert all(a > b for a, b in zip(pos_devs, pos_devs[1:])), pos_devs
    assert all(a > b for a, b in zip(neg_devs, neg_devs[1:])), neg_devs
    runtime = time.perf_counter() - t0
    _announce(9, max(s_neg, s_pos), 0.02, runtime)
    assert runtime < 120.0


def test_criterion_10_validation_output_is_byte_identical(tmp_path):
    out1 = tmp_path / "v1.json"
    out2 = tmp_path / "v2.json"
    assert main(["validate", "--seed", "7", "--profile", "quick",
                 "--out", str(out1)]) == 0
    assert main(["validate", "--seed", "7", "--profile", "quick",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    _announce(10, 0.0, 0.0, 0.0)
