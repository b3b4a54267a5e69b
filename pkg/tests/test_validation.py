"""Empirical-distribution utilities and the validation experiments."""

import json
import math

import numpy as np
import pytest

from barrier_occupation.errors import DomainError, EmptyBatch
from barrier_occupation.numerics import CdfTable
from barrier_occupation.samplers import SampleBatch
from barrier_occupation.validation import (ExperimentReport, check_prop_gGamma,
                                           check_theorem3, ecdf, ks_distance,
                                           load_calibration, reports_to_json,
                                           run_suite, theorem3_statistic,
                                           two_sample_ks)


def test_report_consistency_enforced():
    ExperimentReport("a", 0.01, 0.05, True, 10, 0.1, 0)
    with pytest.raises(DomainError):
        ExperimentReport("a", 0.1, 0.05, True, 10, 0.1, 0)


def test_calibration_loads():
    cal = load_calibration()
    assert "profiles" in cal and {"full", "quick"} <= set(cal["profiles"])
    assert cal["calibration_seed"] == 7


def test_ecdf_atom_and_steps():
    t = ecdf(SampleBatch("x", np.array([0.0, 0.0, 1.0, 2.0]), 0))
    assert abs(t.atom_at_zero - 0.5) < 1e-15
    assert abs(t.evaluate(0.5) - 0.5) < 1e-15
    assert abs(t.evaluate(1.0) - 0.75) < 1e-15
    assert abs(t.evaluate(3.0) - 1.0) < 1e-15
    with pytest.raises(EmptyBatch):
        ecdf(SampleBatch("x", np.array([]), 0))
    with pytest.raises(DomainError):
        ecdf(SampleBatch("x", np.array([-1.0]), 0))


def test_ks_distance_sample_vs_table():
    # 3 of 4 draws at or below 0.5 vs a table saying the CDF there is 0.25
    table = CdfTable(0.0, np.array([0.5, 2.0]), np.array([0.25, 1.0]),
                     step_function=True)
    batch = SampleBatch("x", np.array([0.1, 0.2, 0.5, 3.0]), 0)
    assert abs(ks_distance(batch, table) - 0.5) < 1e-12


def test_ks_distance_table_vs_table():
    a = CdfTable(0.0, np.array([1.0, 2.0]), np.array([0.4, 1.0]))
    b = CdfTable(0.0, np.array([1.0, 2.0]), np.array([0.6, 1.0]))
    assert abs(ks_distance(a, b) - 0.2) < 1e-12
    with pytest.raises(DomainError):
        ks_distance(3.0, b)


def test_ks_uniform_null_distribution():
    # one-sample KS for true uniform draws: ~1.63/sqrt(n) is the 1% point
    grid = np.linspace(1e-3, 1.0, 400)
    table = CdfTable(0.0, grid, grid)
    n = 500
    exceed = 0
    for seed in range(40):
        draws = np.random.default_rng(seed).random(n)
        d = ks_distance(SampleBatch("u", draws, seed), table)
        exceed += d > 1.63 / math.sqrt(n)
    assert exceed <= 2


def test_two_sample_ks():
    x = np.array([0.1, 0.2, 0.3])
    y = np.array([0.1, 0.2, 0.3])
    assert two_sample_ks(x, y) == 0.0
    assert two_sample_ks(np.array([0.0]), np.array([1.0])) == 1.0
    with pytest.raises(EmptyBatch):
        two_sample_ks(np.array([]), y)


def test_theorem3_statistic_domains():
    with pytest.raises(DomainError):
        theorem3_statistic("pos", 2.0)
    with pytest.raises(DomainError):
        theorem3_statistic("neg", -2.0)
    with pytest.raises(DomainError):
        theorem3_statistic("sideways", 10.0)


def test_check_theorem3_reports():
    r = check_theorem3("pos", 30.0, seed=0, tolerance=0.02)
    assert r.passed and r.statistic < 0.02
    r = check_theorem3("neg", -15.0, seed=0, tolerance=0.02)
    assert r.passed and r.statistic < 0.02


def test_check_prop_ggamma_small():
    r = check_prop_gGamma(0.0, n=4000, seed=3, tolerance=0.06)
    assert r.passed
    assert r.name == "prop_ggamma_y0"
    with pytest.raises(DomainError):
        check_prop_gGamma(0.0, n=10)


def test_reports_json_deterministic():
    r = ExperimentReport("a", 0.01, 0.05, True, 10, 0.123, 0)
    text = reports_to_json([r], deterministic=True)
    payload = json.loads(text)
    assert payload[0]["runtime_seconds"] == 0.0
    assert payload[0]["name"] == "a"
    # non-deterministic keeps the measured runtime
    kept = json.loads(reports_to_json([r]))
    assert kept[0]["runtime_seconds"] == 0.123


def test_run_suite_quick_reproducible():
    a = run_suite(7, profile="quick")
    b = run_suite(7, profile="quick")
    assert reports_to_json(a, deterministic=True) == reports_to_json(
        b, deterministic=True)
    assert all(r.passed for r in a)
    with pytest.raises(DomainError):
        run_suite(0, profile="nope")
