"""First-hit density and bridge occupation law."""

import json
import math
import os

import numpy as np
import pytest

from barrier_occupation.bridge_laws import (BridgeSpec, first_hit_density, q,
                                            q_closed, q_integral)
from barrier_occupation.errors import DomainError
from barrier_occupation.numerics import integrate

_MC_PATH = os.path.join(os.path.dirname(__file__), "mc_oracle.json")


def _normalization(y, z):
    spec = BridgeSpec(y=y, t=2.0, z=z)
    return integrate(lambda s: first_hit_density(spec, s), 0.0, 2.0)


@pytest.mark.parametrize("y,z", [(1.0, 0.0), (-1.0, 0.0), (2.0, -1.0)])
def test_first_hit_proper_when_bridge_must_cross(y, z):
    assert abs(_normalization(y, z) - 1.0) < 1e-8


@pytest.mark.parametrize("y,z", [(1.0, 1.0), (-2.0, -3.0)])
def test_first_hit_defective_when_crossing_avoidable(y, z):
    assert _normalization(y, z) < 1.0 - 1e-3


def test_first_hit_sign_symmetry():
    s = np.linspace(0.1, 1.9, 17)
    a = first_hit_density(BridgeSpec(1.3, 2.0, -0.4), s)
    b = first_hit_density(BridgeSpec(-1.3, 2.0, 0.4), s)
    assert np.max(np.abs(a - b)) < 1e-14


def test_first_hit_domain_checks():
    with pytest.raises(DomainError):
        BridgeSpec(1.0, 0.0)
    with pytest.raises(DomainError):
        first_hit_density(BridgeSpec(0.0, 1.0), 0.5)
    with pytest.raises(DomainError):
        first_hit_density(BridgeSpec(1.0, 1.0), 1.0)


def test_q_levy_for_zero_start():
    rng = np.random.default_rng(11)
    for _ in range(100):
        t = float(rng.uniform(0.1, 10.0))
        u = float(rng.uniform(0.0, t * 0.999))
        assert q_integral(0.0, t, u) == u / t
        assert q_closed(0.0, t, u) == u / t


def test_q_formulas_agree_on_grid():
    for y in (-2.0, -0.5, 0.5, 2.0):
        for t in (0.5, 1.0, 2.0, 8.0):
            for frac in (0.1, 0.5, 0.9):
                u = frac * t
                assert abs(q_integral(y, t, u) - q_closed(y, t, u)) < 1e-9


def test_q_limits_and_monotonicity():
    for y in (-1.5, -0.3, 0.0, 0.7, 3.0):
        assert q_closed(y, 2.0, 0.0) == 0.0
        vals = q_closed(y, 2.0, np.linspace(0.0, 1.999, 60))
        assert np.all(np.diff(vals) >= -1e-12)
        # nearly all of the bridge's length below zero is almost sure
        assert q_closed(y, 2.0, 2.0 - 1e-9) > 1.0 - 1e-3


def test_q_monotone_in_start_point():
    # higher start point -> more probability of a small occupation
    u, t = 0.7, 2.0
    ys = np.linspace(-3.0, 3.0, 25)
    vals = [q_closed(yy, t, u) for yy in ys]
    assert np.all(np.diff(vals) > 0)


def test_q_saturation_wrapper():
    assert q(1.0, 2.0, 2.0) == 1.0
    assert q(1.0, 2.0, 5.0) == 1.0
    assert q(0.0, 2.0, 1.0) == 0.5
    assert abs(q(-1.0, 2.0, 1.0) - q_closed(-1.0, 2.0, 1.0)) == 0.0
    arr = q(1.0, np.array([1.0, 1.0]), np.array([0.5, 2.0]))
    assert arr[1] == 1.0 and 0.0 < arr[0] < 1.0


def test_q_domain_checks():
    with pytest.raises(DomainError):
        q_closed(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        q_closed(1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        q_integral(1.0, 1.0, -0.1)
    with pytest.raises(DomainError):
        q(1.0, -1.0, 0.5)


def test_q_extreme_start_points_stable():
    # far above: occupation below zero is almost surely tiny
    assert q_closed(8.0, 1.0, 0.5) > 1.0 - 1e-10
    # far below: the bridge spends almost everything below zero
    assert q_closed(-8.0, 1.0, 0.5) < 1e-10
    assert np.isfinite(q_closed(-40.0, 1.0, 0.5))
    assert np.isfinite(q_closed(40.0, 1.0, 0.999))


@pytest.mark.skipif(not os.path.exists(_MC_PATH),
                    reason="frozen Monte-Carlo reference not present")
def test_q_within_monte_carlo_bands():
    """Closed form inside 99.9% binomial bands of a frozen path-simulation
    reference (5e4 bridges per point, 8192 grid steps)."""
    with open(_MC_PATH) as fh:
        ref = json.load(fh)
    single = ref["single"]
    val = q_closed(single["y"], single["t"], single["u"])
    assert abs(val - single["p"]) < 3.3 * single["se"] + 2e-4
    for row in ref["grid"]:
        val = q_closed(row["y"], row["t"], row["u"])
        # 3.3 SE band plus an allowance for the grid discretization bias
        # of the simulated occupation times (step t/8192)
        bias = 2.0 * math.sqrt(row["t"] / 8192.0) * 0.05
        assert abs(val - row["p"]) < 3.3 * row["se"] + bias, row
