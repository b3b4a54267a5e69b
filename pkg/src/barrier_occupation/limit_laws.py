"""Distribution functions of the last zero g and the occupation time
below zero of the limiting process, plus their large-|y| limit laws.

Start point y is in space units; the occupation budget is one time unit
(``reduce_to_unit_budget`` maps any other budget onto this case by
Brownian scaling).

Numerical backbone: the weight integral

    W(v) = int_0^v t^(-1/2) exp(-y^2/(2t)) dt
         = 2 sqrt(v) exp(-y^2/(2v)) - 2|y| sqrt(2 pi) Phi(-|y|/sqrt(v))

admits the scaled form exp(y^2/2) W(v) = exp(E(v)) M(v) with
E(v) = (y^2/2)(1 - 1/v) and M(v) = 2 sqrt(v) - |y| sqrt(2 pi)
erfcx(|y|/sqrt(2 v)).  All ratios of such integrals are evaluated through
M and E so that nothing underflows even for |y| of order 40.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, ndtr

from .bridge_laws import q_closed
from .errors import DomainError, OutOfRange
from .numerics import (CdfTable, DEFAULT_QUADRATURE, QuadratureSpec, integrate,
                       invert_cdf, std_normal_cdf)

__all__ = [
    "StartSpec",
    "LimitLawReport",
    "reduce_to_unit_budget",
    "g_atom",
    "g_cdf",
    "gamma_cdf",
    "gamma_conditional_cdf",
    "intlem_check",
    "gprime_cdf",
    "inv_chisq_cdf",
    "inv_chisq_pdf",
    "exp_half_cdf",
    "g_quantile",
    "gamma_quantile",
    "g_tail_point",
    "g_cdf_table",
    "gamma_cdf_table",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_GRID_POINTS = 400


@dataclass(frozen=True)
class StartSpec:
    """Starting point y and occupation budget c (time units)."""

    y: float
    c: float = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("occupation budget c must be positive")


@dataclass(frozen=True)
class LimitLawReport:
    """A named law together with its tabulated distribution function."""

    law_name: str
    table: CdfTable

    _ALLOWED = ("g", "gamma", "g_conditional", "gprime", "exp_half", "inv_chisq")

    def __post_init__(self):
        if self.law_name not in self._ALLOWED:
            raise DomainError(f"unknown law {self.law_name!r}")


def reduce_to_unit_budget(spec: StartSpec) -> tuple[float, float]:
    """Map a (y, c) problem to unit budget: returns (y/sqrt(c), c).

    Laws scale as  g^{y,c} =d= c * g^{y/sqrt(c),1}  and likewise for the
    occupation time, so every other operation may assume c = 1.
    """
    return spec.y / math.sqrt(spec.c), spec.c


def g_atom(y: float) -> float:
    """Mass of the last zero (and of the occupation time) at 0."""
    if y <= 0:
        return 0.0
    return _SQRT_2PI * y / (_SQRT_2PI * y + 2.0)


# --- scaled weight integral ------------------------------------------------

def _weight_m(y: float, v):
    """M(v) = exp(y^2/2 - E(v)) * W(v); stable for all y."""
    v = np.asarray(v, dtype=float)
    ay = abs(y)
    return 2.0 * np.sqrt(v) - ay * _SQRT_2PI * erfcx(ay / np.sqrt(2.0 * v))


def _weight_e(y: float, v):
    """Exponent E(v) = (y^2/2)(1 - 1/v) of the scaled weight integral."""
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore"):
        return (y * y / 2.0) * (1.0 - 1.0 / v)


def _weight_cum(y: float, v):
    """W(v) itself (may underflow to 0 for large |y|; fine where used)."""
    v = np.asarray(v, dtype=float)
    ay = abs(y)
    with np.errstate(divide="ignore", under="ignore"):
        out = (2.0 * np.sqrt(v) * np.exp(-y * y / (2.0 * v))
               - 2.0 * ay * _SQRT_2PI * ndtr(-ay / np.sqrt(v)))
    out = np.where(v <= 0, 0.0, out)
    return out if out.ndim else float(out)


def _q1_weight_scaled_neg(y: float, t):
    """exp(y^2/2) * q(t,1) * t^(-1/2) * exp(-y^2/(2t)) for y < 0, t > 1.

    Rewrites the closed form of q so that the huge exponential factors
    cancel analytically (via erfcx); every term is O(1).
    """
    t = np.asarray(t, dtype=float)
    ay = abs(y)
    frac = (t - 1.0) / t
    a_part = -(frac * (1.0 - y * y / t) - 1.0) * erfcx(ay * np.sqrt(frac / 2.0))
    b_part = np.sqrt(2.0 * (t - 1.0)) * y / np.sqrt(math.pi * t ** 3)
    return (a_part + b_part) / np.sqrt(t)


def g_cdf(y: float, x: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Distribution function of the last zero of the limiting process."""
    if x < 0:
        raise DomainError("x must be non-negative")
    if x == 0.0:
        return g_atom(y)
    if y == 0.0:
        return math.sqrt(x) / 2.0 if x <= 1.0 else 1.0 - 0.5 / math.sqrt(x)

    if y < 0.0:
        m1 = float(_weight_m(y, 1.0))
        if x <= 1.0:
            num = math.exp(_weight_e(y, x)) * float(_weight_m(y, x))
        else:
            num = m1 + integrate(lambda t: _q1_weight_scaled_neg(y, t),
                                 1.0, x, spec)
        return min(1.0, num / (2.0 * m1))

    head = _SQRT_2PI * y  # twice the atom numerator, halved below
    num = 2.0 * head + float(_weight_cum(y, min(x, 1.0)))
    if x > 1.0:
        a = y * y / 2.0

        def tail(t):
            with np.errstate(under="ignore"):
                return (np.asarray(q_closed(y, t, np.ones_like(t)))
                        / np.sqrt(t) * np.exp(-a / t))

        num += integrate(tail, 1.0, x, spec)
    return min(1.0, num / (2.0 * head + 4.0))


def gamma_cdf(y: float, u: float) -> float:
    """Distribution function of the total time spent below zero."""
    if u < 0 or u > 1:
        raise DomainError("occupation time argument must lie in [0, 1]")
    if u == 0.0:
        return g_atom(y)
    if y >= 0.0:
        return (_SQRT_2PI * y + 2.0 * math.sqrt(u)) / (_SQRT_2PI * y + 2.0)
    val = (math.exp(_weight_e(y, u)) * float(_weight_m(y, u))
           / float(_weight_m(y, 1.0)))
    return min(1.0, val)


def gamma_conditional_cdf(y: float, u: float) -> float:
    """CDF of the occupation time given it is positive; sqrt(u) for y >= 0."""
    if y < 0:
        raise DomainError("conditional square-root law requires y >= 0")
    if u < 0 or u > 1:
        raise DomainError("occupation time argument must lie in [0, 1]")
    return math.sqrt(u)


def intlem_check(y: float, u: float,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[float, float]:
    """Both sides of the tail-integral identity behind the occupation law.

    y < 0:  lhs = int_u^inf q(t,u) w(t) dt,          rhs = int_0^u w(t) dt
    y > 0:  lhs = int_0^u w(t) dt + same tail,       rhs = 4 sqrt(u)
    with w(t) = t^(-1/2) exp(-y^2/(2t)).
    """
    if y == 0.0:
        raise DomainError("identity is stated for y != 0")
    if u <= 0:
        raise DomainError("u must be positive")
    a = y * y / 2.0

    def weighted_tail(t):
        with np.errstate(under="ignore"):
            return (np.asarray(q_closed(y, t, np.full_like(t, u)))
                    / np.sqrt(t) * np.exp(-a / t))

    tail = integrate(weighted_tail, u, math.inf, spec)

    def w(t):
        with np.errstate(divide="ignore", under="ignore"):
            return np.where(t > 0, np.exp(-a / t) / np.sqrt(t), 0.0)

    head = integrate(w, 0.0, u, spec, singular_at_a=True)
    if y < 0:
        return tail, head
    return head + tail, 4.0 * math.sqrt(u)


def gprime_cdf(u: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Limit law of the rescaled last zero for deeply negative starts."""
    if u >= 0:
        return 1.0 - 0.5 * math.exp(-u / 2.0)

    def integrand(z):
        return 2.0 * z / np.sqrt(2.0 * math.pi * (2.0 * z - u)) * np.exp(-z)

    return integrate(integrand, 0.0, math.inf, spec)


def inv_chisq_pdf(s) -> np.ndarray:
    """Density of 1/N^2 for a standard normal N."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", under="ignore", invalid="ignore"):
        out = np.where(s > 0,
                       np.exp(-1.0 / (2.0 * np.maximum(s, 1e-300)))
                       / np.sqrt(2.0 * math.pi * np.maximum(s, 1e-300) ** 3),
                       0.0)
    return out if out.ndim else float(out)


def inv_chisq_cdf(s: float) -> float:
    """CDF of 1/N^2: equals 2 Phi(-1/sqrt(s)) for s > 0."""
    if s <= 0:
        return 0.0
    return 2.0 * std_normal_cdf(-1.0 / math.sqrt(s))


def exp_half_cdf(u: float) -> float:
    """Exponential distribution with rate 1/2."""
    return 1.0 - math.exp(-u / 2.0) if u >= 0 else 0.0


def g_quantile(y: float, p: float) -> float:
    """Smallest x with P(g <= x) >= p; levels inside the atom map to 0."""
    if not 0.0 <= p < 1.0:
        raise OutOfRange("p must lie in [0, 1)")
    if p <= g_atom(y):
        return 0.0
    hi = 1.0
    for _ in range(200):
        if g_cdf(y, hi) >= p:
            break
        hi *= 2.0
    else:
        raise OutOfRange(f"quantile level {p} not reached")
    return invert_cdf(lambda x: g_cdf(y, x), p, 0.0, hi)


def gamma_quantile(y: float, p: float) -> float:
    """Smallest u with P(occupation <= u) >= p."""
    if not 0.0 <= p < 1.0:
        raise OutOfRange("p must lie in [0, 1)")
    if p <= g_atom(y):
        return 0.0
    return invert_cdf(lambda u: gamma_cdf(y, u), p, 0.0, 1.0)


def g_tail_point(y: float, eps: float = 1e-4) -> float:
    """Doubling rule: first power-of-two x with 1 - P(g <= x) <= eps."""
    x = 1.0
    for _ in range(200):
        if 1.0 - g_cdf(y, x) <= eps:
            return x
        x *= 2.0
    raise OutOfRange("tail point not found within doubling budget")


def _log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def g_cdf_table(y: float, x_max: float | None = None,
                n: int = DEFAULT_GRID_POINTS) -> CdfTable:
    """Tabulated last-zero CDF on a log-spaced grid (dense near 0)."""
    if x_max is None:
        x_max = g_tail_point(y)
    grid = _log_grid(1e-3 * min(1.0, x_max), x_max, n)
    values = np.array([g_cdf(y, x) for x in grid])
    values = np.maximum.accumulate(values)
    return CdfTable(atom_at_zero=g_atom(y), grid=grid, values=values)


def gamma_cdf_table(y: float, n: int = DEFAULT_GRID_POINTS) -> CdfTable:
    """Tabulated occupation-time CDF on (0, 1]."""
    grid = _log_grid(1e-6, 1.0, n)
    values = np.array([gamma_cdf(y, u) for u in grid])
    values = np.maximum.accumulate(values)
    return CdfTable(atom_at_zero=g_atom(y), grid=grid, values=values)
