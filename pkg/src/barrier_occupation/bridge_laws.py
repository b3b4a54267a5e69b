"""Laws of a Brownian bridge started at y: first hit of zero and
occupation time below zero.

``q(y, t, u)`` is the probability that a bridge of length t from y to 0
spends at most u time units below zero.  Two routes are provided: a
quadrature form (``q_integral``, kept as a cross-check oracle) and a
closed form in terms of the normal CDF (``q_closed``, the production
path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DomainError
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, integrate

__all__ = ["BridgeSpec", "first_hit_density", "q_integral", "q_closed", "q"]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BridgeSpec:
    """Bridge of length t started at y and pinned to z at time t."""

    y: float
    t: float
    z: float = 0.0

    def __post_init__(self):
        if self.t <= 0:
            raise DomainError("bridge length t must be positive")


def first_hit_density(spec: BridgeSpec, s) -> float:
    """Density of the first zero of the bridge, evaluated at s in (0, t).

    Integrates to 1 over (0, t) exactly when z*y <= 0; otherwise the bridge
    may avoid zero and the density is defective.
    """
    y, t, z = spec.y, spec.t, spec.z
    if y == 0.0:
        raise DomainError("first_hit_density requires y != 0")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr <= 0) or np.any(s_arr >= t):
        raise DomainError("evaluation point must lie strictly inside (0, t)")
    expo = (y - z) ** 2 / (2.0 * t) - z * z / (2.0 * (t - s_arr)) - y * y / (2.0 * s_arr)
    dens = (abs(y) * math.sqrt(t)
            / np.sqrt(2.0 * math.pi * s_arr ** 3 * (t - s_arr)) * np.exp(expo))
    return dens if dens.ndim else float(dens)


def _check_tu(t: float, u: float):
    if t <= 0:
        raise DomainError("t must be positive")
    if u < 0 or u >= t:
        raise DomainError("occupation bound u must satisfy 0 <= u < t")


def q_integral(y: float, t: float, u: float,
               spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Occupation-time CDF of the bridge via its quadrature representation."""
    _check_tu(t, u)
    if y == 0.0:
        return u / t
    if u == 0.0:
        return 0.0
    a = y * y / 2.0

    if y < 0.0:
        def integrand(x):
            with np.errstate(divide="ignore", over="ignore"):
                val = (math.sqrt(t) * (u - x) * abs(y)
                       / np.sqrt(2.0 * math.pi * x ** 3 * (t - x) ** 3)
                       * np.exp(a / t - a / x))
            return np.where(x > 0, val, 0.0)

        return min(1.0, integrate(integrand, 0.0, u, spec))

    def body(x):
        with np.errstate(divide="ignore", over="ignore"):
            val = (math.sqrt(t) * u * y
                   / np.sqrt(2.0 * math.pi * x ** 3 * (t - x) ** 3)
                   * np.exp(a / t - a / x))
        return np.where(x > 0, val, 0.0)

    part1 = integrate(body, 0.0, t - u, spec) if t > u else 0.0

    # second piece has a (t - x)^(-1/2) singularity at x = t; flip it to the
    # left endpoint with x = t - v
    def tail(v):
        x = t - v
        return (math.sqrt(t) * y
                / np.sqrt(2.0 * math.pi * x ** 3 * v)
                * np.exp(a / t - a / x))

    part2 = integrate(tail, 0.0, u, spec, singular_at_a=True)
    return min(1.0, part1 + part2)


def q_closed(y: float, t, u):
    """Occupation-time CDF of the bridge in closed form (normal CDF based).

    Vectorized over t and u; requires 0 <= u < t.
    """
    t_arr = np.asarray(t, dtype=float)
    u_arr = np.asarray(u, dtype=float)
    if np.any(t_arr <= 0) or np.any(u_arr < 0) or np.any(u_arr >= t_arr):
        raise DomainError("need t > 0 and 0 <= u < t")
    if y == 0.0:
        out = u_arr / t_arr
        return out if out.ndim else float(out)

    a = y * y / 2.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if y < 0.0:
            arg = y * np.sqrt(t_arr - u_arr) / np.sqrt(t_arr * u_arr)
            lead = -2.0 * ((t_arr - u_arr) / t_arr * (1.0 - y * y / t_arr) - 1.0)
            expo = np.exp(a / t_arr - a / u_arr)
            val = (lead * ndtr(arg)
                   + np.sqrt(2.0 * u_arr * (t_arr - u_arr)) * y
                   / np.sqrt(math.pi * t_arr ** 3) * expo)
        else:
            arg = -y * np.sqrt(u_arr) / np.sqrt(t_arr * (t_arr - u_arr))
            lead = 2.0 * (u_arr / t_arr * (1.0 - y * y / t_arr) - 1.0)
            expo = np.exp(a / t_arr - a / (t_arr - u_arr))
            val = (1.0 + lead * ndtr(arg)
                   + np.sqrt(2.0 * u_arr * (t_arr - u_arr)) * y
                   / np.sqrt(math.pi * t_arr ** 3) * expo)
    val = np.where(u_arr == 0.0, 0.0, val)
    val = np.clip(val, 0.0, 1.0)
    return val if val.ndim else float(val)


def q(y: float, t, u):
    """Occupation-time CDF with the u >= t saturation built in.

    Returns 1 whenever u >= t (the bridge cannot spend more than its own
    length below zero), the exact u/t law for y = 0, and the closed form
    otherwise.  Clamped to [0, 1].
    """
    t_arr = np.asarray(t, dtype=float)
    u_arr = np.asarray(u, dtype=float)
    if np.any(t_arr < 0) or np.any(u_arr < 0):
        raise DomainError("t and u must be non-negative")
    saturated = u_arr >= t_arr
    # evaluate the interior formula on safe arguments only
    t_safe = np.where(saturated, 1.0, t_arr)
    u_safe = np.where(saturated, 0.0, u_arr)
    if y == 0.0:
        inner = u_safe / t_safe
    else:
        inner = np.asarray(q_closed(y, t_safe, u_safe))
    out = np.where(saturated, 1.0, inner)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)
