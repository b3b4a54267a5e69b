"""Grid samplers: Brownian paths, bridges, Bessel(3) paths, path
statistics, rejection samplers for the occupation-conditioned pre-limit
process, and an exact-marginal sampler for the limiting process X.

Sampling X works conditionally on its last zero g (drawn by inversion of
the tabulated law).  Given g = x, the first zero r of the y-to-0 bridge
is drawn exactly through the change of variables w = y^2 (1/r - 1/x):
without the occupation constraint w is chi-squared with one degree of
freedom, and the constraint multiplies the density by an explicit
piecewise-rational weight whose cumulative integral is available in
closed form (normal CDF pieces), so r can be drawn by bisection with no
rejection loop.  The occupation time below zero given (g, r) is an
explicit uniform variable.  Path segments are then filled in with
Gaussian bridge conditioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .bridge_laws import q_closed
from .errors import DomainError, RejectionBudgetExceeded
from .limit_laws import _q1_weight_scaled_neg, _weight_m, g_atom, g_cdf
from .numerics import integrate, DEFAULT_QUADRATURE

__all__ = [
    "GridPath",
    "RngStream",
    "SampleBatch",
    "sample_bm",
    "sample_bridge",
    "sample_bessel3",
    "occupation_below_zero",
    "last_zero",
    "sample_conditioned_bm",
    "conditioned_bm_summaries",
    "sample_conditioned_bridge",
    "sample_X",
    "sample_x_summaries",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_MAX_ATTEMPTS = 10 ** 6
# middle-segment rejection is exact up to this duration/budget ratio; longer
# segments (a ~1% tail event) fall back to a strictly-positive bridge
_SEG_RATIO_CAP = 64.0


@dataclass
class GridPath:
    """A path sampled on a uniform grid: values[k] at origin_time + k*step."""

    step: float
    values: np.ndarray
    origin_time: float = 0.0
    n_rejected: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.step <= 0:
            raise DomainError("step must be positive")
        if self.values.ndim != 1 or self.values.size < 1:
            raise DomainError("values must be a non-empty 1-d sequence")
        if self.origin_time < 0:
            raise DomainError("origin_time must be non-negative")

    @property
    def times(self) -> np.ndarray:
        return self.origin_time + self.step * np.arange(self.values.size)

    @property
    def duration(self) -> float:
        return self.step * (self.values.size - 1)


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: (seed, stream_id) fixes every draw."""

    seed: int
    stream_id: int = 0

    def make_generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(seq)

    def child(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id + offset)


@dataclass
class SampleBatch:
    """Labelled scalar draws plus rejection bookkeeping."""

    label: str
    draws: np.ndarray
    seed: int
    n_rejected: int = 0

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        if self.n_rejected < 0:
            raise DomainError("n_rejected must be non-negative")
        if self.draws.size and not np.all(np.isfinite(self.draws)):
            raise DomainError("draws must be finite")


# --- basic Gaussian samplers ------------------------------------------------

def _n_steps(duration: float, step: float) -> int:
    return int(math.ceil(duration / step - 1e-12))


def _bm_at(gen: np.random.Generator, times: np.ndarray, start: float) -> np.ndarray:
    """Brownian motion from `start` evaluated at sorted positive times."""
    if times.size == 0:
        return np.empty(0)
    dt = np.diff(times, prepend=0.0)
    return start + np.cumsum(gen.standard_normal(times.size) * np.sqrt(dt))

def _bridge_at(gen: np.random.Generator, times: np.ndarray, length: float,
               a: float, b: float) -> np.ndarray:
    """Brownian bridge a -> b over [0, length] at sorted interior times."""
    if times.size == 0:
        return np.empty(0)
    full = np.append(times, length)
    w = _bm_at(gen, full, 0.0)
    return a + w[:-1] - (times / length) * (w[-1] - (b - a))


def _bessel3_bridge_at(gen: np.random.Generator, times: np.ndarray,
                       length: float, a: float) -> np.ndarray:
    """Bessel(3) bridge a -> 0 over [0, length]: norm of a 3-d Gaussian
    bridge from (a, 0, 0) to the origin."""
    c1 = _bridge_at(gen, times, length, a, 0.0)
    c2 = _bridge_at(gen, times, length, 0.0, 0.0)
    c3 = _bridge_at(gen, times, length, 0.0, 0.0)
    return np.sqrt(c1 * c1 + c2 * c2 + c3 * c3)


def _bessel3_at(gen: np.random.Generator, times: np.ndarray, a: float) -> np.ndarray:
    """Bessel(3) process from a: norm of 3-d Brownian motion from (a,0,0)."""
    c1 = _bm_at(gen, times, a)
    c2 = _bm_at(gen, times, 0.0)
    c3 = _bm_at(gen, times, 0.0)
    return np.sqrt(c1 * c1 + c2 * c2 + c3 * c3)


def sample_bm(y: float, T: float, step: float, rng: RngStream) -> GridPath:
    """Brownian motion from y on [0, T] sampled every `step` time units."""
    if T <= 0:
        raise DomainError("T must be positive")
    if step <= 0 or step > T:
        raise DomainError("need 0 < step <= T")
    gen = rng.make_generator()
    m = _n_steps(T, step)
    incs = gen.standard_normal(m) * math.sqrt(step)
    values = np.concatenate(([y], y + np.cumsum(incs)))
    return GridPath(step=step, values=values)


def sample_bridge(y: float, z: float, t: float, step: float,
                  rng: RngStream) -> GridPath:
    """Brownian bridge from y to z over [0, t].

    The step is shrunk to t/m so that the final grid point lands exactly
    on t (endpoints are exact by construction).
    """
    if t <= 0:
        raise DomainError("bridge length t must be positive")
    if step <= 0:
        raise DomainError("step must be positive")
    gen = rng.make_generator()
    m = max(1, _n_steps(t, step))
    h = t / m
    times = h * np.arange(1, m + 1)
    inner = _bridge_at(gen, times[:-1], t, y, z)
    values = np.concatenate(([y], inner, [z]))
    return GridPath(step=h, values=values)


def sample_bessel3(y: float, T: float, step: float, rng: RngStream) -> GridPath:
    """Bessel(3) process from y >= 0 on [0, T]."""
    if y < 0:
        raise DomainError("Bessel(3) start must be non-negative")
    if T <= 0 or step <= 0 or step > T:
        raise DomainError("need 0 < step <= T")
    gen = rng.make_generator()
    m = _n_steps(T, step)
    times = step * np.arange(1, m + 1)
    values = np.concatenate(([y], _bessel3_at(gen, times, y)))
    return GridPath(step=step, values=values)


# --- path statistics --------------------------------------------------------

def _interval_occupation(v0: np.ndarray, v1: np.ndarray,
                         dt: np.ndarray) -> np.ndarray:
    """Time below zero on intervals with endpoint values v0, v1 and width dt,
    splitting sign-change intervals at the linear-interpolated crossing."""
    diff = v0 - v1
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(diff != 0.0, v0 / diff, 0.0)
    frac = np.where((v0 < 0) & (v1 < 0), 1.0,
                    np.where((v0 < 0) & (v1 >= 0), theta,
                             np.where((v0 >= 0) & (v1 < 0), 1.0 - theta, 0.0)))
    return dt * frac


def _occupation_nonuniform(times: np.ndarray, values: np.ndarray) -> float:
    dt = np.diff(times)
    return float(np.sum(_interval_occupation(values[:-1], values[1:], dt)))


def _truncate(path: GridPath, horizon: float):
    """Grid times/values of `path` up to `horizon` (relative to origin),
    with a linear-interpolated value appended at the horizon itself."""
    if horizon < 0 or horizon > path.duration + 1e-9 * max(1.0, path.duration):
        raise DomainError("horizon must lie within the path duration")
    k = int(math.floor(horizon / path.step + 1e-12))
    k = min(k, path.values.size - 1)
    times = path.step * np.arange(k + 1)
    values = path.values[:k + 1]
    t_last = times[-1]
    if horizon > t_last + 1e-15 and k + 1 < path.values.size:
        frac = (horizon - t_last) / path.step
        v_h = path.values[k] + frac * (path.values[k + 1] - path.values[k])
        times = np.append(times, horizon)
        values = np.append(values, v_h)
    return times, values


def occupation_below_zero(path: GridPath, horizon: float) -> float:
    """Time the path spends strictly below 0 up to `horizon`."""
    times, values = _truncate(path, horizon)
    return _occupation_nonuniform(times, values)


def last_zero(path: GridPath, horizon: float) -> float:
    """Last zero (interpolated crossing or exact grid zero) before
    `horizon`; 0 when the path never touches zero."""
    times, values = _truncate(path, horizon)
    v0, v1 = values[:-1], values[1:]
    dt = np.diff(times)
    cross = np.sign(v0) * np.sign(v1) < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(cross, v0 / np.where(v0 - v1 != 0, v0 - v1, 1.0), 0.0)
    candidates = np.where(cross, times[:-1] + theta * dt, -1.0)
    exact = np.where(values == 0.0, times, -1.0)
    best = max(float(candidates.max(initial=-1.0)),
               float(exact.max(initial=-1.0)))
    return max(best, 0.0)


def _occupation_rows(values: np.ndarray, step: float) -> np.ndarray:
    """Occupation below zero for each row of a (n, K+1) value array.

    Fast path: count intervals that lie entirely below zero, then correct
    the (sparse) sign-change intervals with their crossing fractions.
    """
    neg = values < 0.0
    b0, b1 = neg[:, :-1], neg[:, 1:]
    occ = (b0 & b1).sum(axis=1).astype(float) * step
    rows, cols = np.nonzero(b0 ^ b1)
    if rows.size:
        v0 = values[rows, cols]
        v1 = values[rows, cols + 1]
        theta = v0 / (v0 - v1)
        part = np.where(v0 < 0.0, theta, 1.0 - theta) * step
        occ += np.bincount(rows, weights=part, minlength=values.shape[0])
    return occ


def _last_zero_rows(values: np.ndarray, step: float) -> np.ndarray:
    """Last zero for each row of a (n, K+1) value array on a uniform grid."""
    v0, v1 = values[:, :-1], values[:, 1:]
    cross = np.sign(v0) * np.sign(v1) < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(cross, v0 / np.where(v0 - v1 != 0, v0 - v1, 1.0), 0.0)
    k = np.arange(values.shape[1] - 1)
    cand = np.where(cross, (k + theta) * step, -1.0)
    exact = np.where(values == 0.0, np.arange(values.shape[1]) * step, -1.0)
    best = np.maximum(cand.max(axis=1, initial=-1.0),
                      exact.max(axis=1, initial=-1.0))
    return np.maximum(best, 0.0)


# --- rejection samplers for the pre-limit process ---------------------------

def sample_conditioned_bm(y: float, T: float, step: float, budget: float,
                          rng: RngStream,
                          max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> GridPath:
    """Brownian motion from y conditioned to spend at most `budget` time
    units below zero up to T, drawn by whole-path rejection."""
    if not T > budget > 0:
        raise DomainError("need T > budget > 0")
    if step <= 0 or step > T:
        raise DomainError("need 0 < step <= T")
    gen = rng.make_generator()
    m = _n_steps(T, step)
    sqrt_h = math.sqrt(step)
    for attempt in range(max_attempts):
        incs = gen.standard_normal(m) * sqrt_h
        values = np.concatenate(([y], y + np.cumsum(incs)))
        occ = _occupation_rows(values[None, :], step)[0]
        if occ <= budget:
            return GridPath(step=step, values=values, n_rejected=attempt)
    raise RejectionBudgetExceeded(max_attempts)


def conditioned_bm_summaries(y: float, T: float, step: float, budget: float,
                             n: int, rng: RngStream, marginal_time: float = 2.0,
                             chunk: int = 64,
                             max_attempts: int = 10 ** 8):
    """Vectorized batch version of :func:`sample_conditioned_bm` keeping
    only per-path statistics.

    Returns (last_zeros, occupations, marginal_values, n_attempts) for n
    accepted paths; `marginal_values` holds the path value at
    `marginal_time`.
    """
    if not T > budget > 0:
        raise DomainError("need T > budget > 0")
    gen = rng.make_generator()
    m = _n_steps(T, step)
    idx = int(round(marginal_time / step))
    if not 0 <= idx <= m:
        raise DomainError("marginal_time outside the grid")
    g_out, occ_out, marg_out = [], [], []
    accepted = 0
    attempts = 0
    sqrt_h = math.sqrt(step)
    while accepted < n:
        if attempts > max_attempts:
            raise RejectionBudgetExceeded(attempts)
        incs = gen.standard_normal((chunk, m)) * sqrt_h
        incs[:, 0] += y
        values = np.empty((chunk, m + 1))
        values[:, 0] = y
        np.cumsum(incs, axis=1, out=values[:, 1:])
        occ = _occupation_rows(values, step)
        keep = occ <= budget
        attempts += chunk
        if np.any(keep):
            kept = values[keep]
            g_out.append(_last_zero_rows(kept, step))
            occ_out.append(occ[keep])
            marg_out.append(kept[:, idx])
            accepted += int(keep.sum())
    g_arr = np.concatenate(g_out)[:n]
    occ_arr = np.concatenate(occ_out)[:n]
    marg_arr = np.concatenate(marg_out)[:n]
    return g_arr, occ_arr, marg_arr, attempts


def sample_conditioned_bridge(y: float, x: float, step: float, rng: RngStream,
                              max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> GridPath:
    """Bridge from y to 0 over [0, x] conditioned to spend at most one time
    unit below zero, by whole-bridge rejection (acceptance ~ q(y, x, 1))."""
    if x <= 0:
        raise DomainError("bridge length x must be positive")
    if step <= 0:
        raise DomainError("step must be positive")
    gen = rng.make_generator()
    m = max(1, _n_steps(x, step))
    h = x / m
    times = h * np.arange(1, m)
    for attempt in range(max_attempts):
        inner = _bridge_at(gen, times, x, y, 0.0)
        values = np.concatenate(([y], inner, [0.0]))
        if _occupation_rows(values[None, :], h)[0] <= 1.0:
            return GridPath(step=h, values=values, n_rejected=attempt)
    raise RejectionBudgetExceeded(max_attempts)


# --- exact conditional draws for the limiting process -----------------------

def _p1(a, b):
    """int_a^b w^(-1/2) exp(-w/2) / sqrt(2 pi) dw (b may be +inf)."""
    lo = 2.0 * ndtr(-np.sqrt(a))
    hi = np.where(np.isinf(b), 0.0, 2.0 * ndtr(-np.sqrt(np.minimum(b, 1e300))))
    return lo - hi


def _p3(a, b):
    """int_a^b w^(-3/2) exp(-w/2) / sqrt(2 pi) dw (b may be +inf, a > 0)."""
    with np.errstate(under="ignore"):
        term_a = 2.0 / np.sqrt(a) * np.exp(-a / 2.0)
        term_b = np.where(np.isinf(b), 0.0,
                          2.0 / np.sqrt(np.maximum(b, 1e-300))
                          * np.exp(-np.minimum(b, 1e300) / 2.0))
    return (term_a - term_b) / _SQRT_2PI - _p1(a, b)


def _bisect_monotone(func, target: np.ndarray, lo: np.ndarray,
                     hi: np.ndarray, iters: int = 90) -> np.ndarray:
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = func(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _first_zero_given_g(y: float, x: np.ndarray,
                        gen: np.random.Generator) -> np.ndarray:
    """First zero r of the y-to-0 bridge of length x, conditioned on the
    bridge spending at most one time unit below zero (vectorized).

    Uses w = y^2 (1/r - 1/x): unconditioned, w is the square of a standard
    normal; the occupation condition tilts its density by the explicit
    weight described in the module docstring.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if y == 0.0:
        return np.zeros(n)
    kappa = y * y / x
    w = np.empty(n)

    free = x <= 1.0
    if np.any(free):
        w[free] = gen.standard_normal(int(free.sum())) ** 2

    hard = ~free
    if np.any(hard):
        xh = x[hard]
        kh = kappa[hard]
        u = np.clip(gen.random(xh.size), 1e-15, 1.0 - 1e-12)
        wh = np.empty(xh.size)
        if y > 0.0:
            # weight: 1 below w* = kappa/(x-1), then (w + kappa)/(x w)
            w_star = kh / (xh - 1.0)
            m1 = _p1(np.zeros_like(w_star), w_star)
            inf = np.full_like(w_star, np.inf)
            m2 = (_p1(w_star, inf) + kh * _p3(w_star, inf)) / xh
            v = u * (m1 + m2)
            low = v <= m1
            if np.any(low):
                # closed-form inverse of P1(0, w) = v
                wh[low] = ndtri((1.0 + v[low]) / 2.0) ** 2
            high = ~low
            if np.any(high):
                t = v[high] - m1[high]
                ws = w_star[high]
                kk = kh[high]
                xx = xh[high]

                def cum(wv):
                    return (_p1(ws, wv) + kk * _p3(ws, wv)) / xx

                t = np.minimum(t, cum(ws + 400.0) * (1.0 - 1e-14))
                wh[high] = _bisect_monotone(cum, t, ws, ws + 400.0)
        else:
            # weight: (w - w1)+ / (x w) with w1 = y^2 (1 - 1/x)
            w1 = y * y * (1.0 - 1.0 / xh)

            def cum_neg(wv):
                return (_p1(w1, wv) - w1 * _p3(w1, wv)) / xh

            total = cum_neg(w1 + 400.0)
            t = np.minimum(u * total, total * (1.0 - 1e-14))
            wh = _bisect_monotone(cum_neg, t, w1, w1 + 400.0)
        w[hard] = wh
    return y * y / (w + kappa)


def conditioned_first_zero_mass(y: float, x: float) -> float:
    """Normalizing constant of the tilted first-zero density given g = x;
    equals the bridge occupation probability q(y, x, 1) (cross-check)."""
    if y == 0.0 or x <= 1.0:
        return 1.0
    kappa = y * y / x
    if y > 0.0:
        w_star = np.asarray(kappa / (x - 1.0))
        inf = np.asarray(np.inf)
        m1 = float(_p1(np.asarray(0.0), w_star))
        m2 = float(_p1(w_star, inf) + kappa * _p3(w_star, inf)) / x
        return m1 + m2
    w1 = np.asarray(y * y * (1.0 - 1.0 / x))
    inf = np.asarray(np.inf)
    return float(_p1(w1, inf) - w1 * _p3(w1, inf)) / x


def _occupation_given(y: float, x: np.ndarray, r: np.ndarray,
                      gen: np.random.Generator) -> np.ndarray:
    """Occupation below zero of the conditioned bridge given (g, r): a
    uniform variable on the interval dictated by the sign of y."""
    if y > 0.0:
        return gen.random(x.size) * np.minimum(x - r, 1.0)
    return r + gen.random(x.size) * (np.minimum(x, 1.0) - r)


# --- drawing the last zero g ------------------------------------------------

_G_TABLE_CACHE: dict = {}


def _g_dense_table(y: float):
    """Dense (grid, cdf) arrays of the last-zero law for fast inversion."""
    key = round(y, 12)
    if key in _G_TABLE_CACHE:
        return _G_TABLE_CACHE[key]
    head = np.geomspace(1e-8, 1.0, 800)
    head_vals = np.array([g_cdf(y, x) for x in head])
    # estimate the 1e-7 tail point from the C/sqrt(x) tail of the law
    c_est = (1.0 - g_cdf(y, 100.0)) * 10.0
    x_hi = float(np.clip((max(c_est, 1e-12) / 1e-7) ** 2, 1e4, 1e18))
    tail_grid = np.geomspace(1.0, x_hi, 3200)[1:]
    # cumulative quadrature of the density over consecutive segments
    segs = np.empty(tail_grid.size)
    prev = 1.0
    for i, xg in enumerate(tail_grid):
        segs[i] = _g_density_segment(y, prev, xg)
        prev = xg
    tail_vals = head_vals[-1] + np.cumsum(segs)
    grid = np.concatenate((head, tail_grid))
    vals = np.minimum(np.maximum.accumulate(np.concatenate((head_vals, tail_vals))),
                      1.0)
    table = (grid, vals)
    _G_TABLE_CACHE[key] = table
    return table


def _g_density_segment(y: float, a: float, b: float) -> float:
    """Integral of the last-zero density over [a, b] with 1 <= a < b."""
    if y < 0.0:
        m1 = 2.0 * float(_weight_m(y, 1.0))
        return integrate(lambda t: _q1_weight_scaled_neg(y, t), a, b,
                         DEFAULT_QUADRATURE) / m1
    aa = y * y / 2.0
    denom = 2.0 * _SQRT_2PI * y + 4.0

    def dens(t):
        with np.errstate(under="ignore"):
            return (np.asarray(q_closed(y, t, np.ones_like(t)))
                    / np.sqrt(t) * np.exp(-aa / t))

    return integrate(dens, a, b, DEFAULT_QUADRATURE) / denom


def _sample_g(y: float, n: int, gen: np.random.Generator) -> np.ndarray:
    """n draws of the last zero g by inversion (atom at 0 for y > 0)."""
    u = gen.random(n)
    if y == 0.0:
        return np.where(u < 0.5, (2.0 * u) ** 2,
                        1.0 / (2.0 * (1.0 - np.minimum(u, 1 - 1e-16))) ** 2)
    atom = g_atom(y)
    grid, vals = _g_dense_table(y)
    # nudge flats so interpolation is well defined
    vv = np.maximum.accumulate(vals + np.arange(vals.size) * 1e-15)
    out = np.interp(u, vv, grid)
    out = np.where(u <= atom, 0.0, out)
    out = np.where(u >= vv[-1], grid[-1], out)
    return out


def sample_x_summaries(y: float, n: int, rng: RngStream):
    """(g, tau, gamma) for n independent draws of the limiting process,
    without simulating paths; all three marginals are exact.

    tau is +inf on the no-zero event (y > 0, g = 0) where the process
    never enters the closed negative half-line.
    """
    gen = rng.make_generator()
    g = _sample_g(y, n, gen)
    tau = np.zeros(n)
    gamma = np.zeros(n)
    pos = g > 0.0
    if np.any(pos):
        r = _first_zero_given_g(y, g[pos], gen)
        gamma[pos] = _occupation_given(y, g[pos], r, gen)
        if y > 0.0:
            tau[pos] = r
    if y > 0.0:
        tau[~pos] = np.inf
    return g, tau, gamma


# --- the limiting process X -------------------------------------------------

def _conditioned_zero_bridge_at(gen: np.random.Generator, eval_times: np.ndarray,
                                length: float, budget: float, step: float,
                                max_attempts: int) -> np.ndarray:
    """Values at `eval_times` of a 0-to-0 bridge over [0, length]
    conditioned to spend at most `budget` time units below zero.

    Exact (by rejection on a step-resolution grid) up to a
    duration/budget ratio of _SEG_RATIO_CAP; beyond that the segment is
    replaced by a strictly positive Bessel(3) bridge, which the true
    conditional law approaches as the ratio grows.
    """
    if length <= budget:
        return _bridge_at(gen, eval_times, length, 0.0, 0.0)
    if length > _SEG_RATIO_CAP * budget:
        return _bessel3_bridge_at(gen, eval_times, length, 0.0)
    m = max(2, _n_steps(length, step))
    fine = (length / m) * np.arange(1, m)
    times = np.union1d(fine, eval_times)
    full_t = np.concatenate(([0.0], times, [length]))
    pick = np.searchsorted(times, eval_times)
    for attempt in range(max_attempts):
        inner = _bridge_at(gen, times, length, 0.0, 0.0)
        full_v = np.concatenate(([0.0], inner, [0.0]))
        if _occupation_nonuniform(full_t, full_v) <= budget:
            return inner[pick]
    raise RejectionBudgetExceeded(max_attempts)


def sample_X(y: float, horizon: float, step: float, rng: RngStream,
             max_attempts: int = DEFAULT_MAX_ATTEMPTS):
    """One path of the limiting process plus its (g, tau, gamma).

    Returns (GridPath, g, tau, gamma).  g, tau and gamma are exact draws
    (tau = +inf on the no-zero event); the path is assembled from a
    signed Bessel(3) bridge up to the first zero, an occupation-
    conditioned 0-to-0 bridge up to g, and a Bessel(3) process afterwards.
    """
    if horizon <= 0 or step <= 0 or step > horizon:
        raise DomainError("need 0 < step <= horizon")
    gen = rng.make_generator()
    g = float(_sample_g(y, 1, gen)[0])
    k_max = _n_steps(horizon, step)
    times = step * np.arange(1, k_max + 1)

    if g == 0.0:
        values = np.concatenate(([y], _bessel3_at(gen, times, y)))
        return GridPath(step=step, values=values), 0.0, math.inf, 0.0

    r = float(_first_zero_given_g(y, np.array([g]), gen)[0])
    gamma = float(_occupation_given(y, np.array([g]), np.array([r]), gen)[0])
    tau = r if y > 0.0 else 0.0

    values = np.empty(k_max + 1)
    values[0] = y
    filled = np.zeros(k_max, dtype=bool)

    in_a = times < min(r, horizon)
    if np.any(in_a):
        vals_a = _bessel3_bridge_at(gen, times[in_a], r, abs(y))
        values[1:][in_a] = math.copysign(1.0, y) * vals_a if y != 0.0 else vals_a
        filled |= in_a

    in_b = (~filled) & (times < min(g, horizon) + 1e-15) & (times >= r)
    if np.any(in_b) or g < horizon:
        length = g - r
        budget = 1.0 - r if y < 0.0 else 1.0
        if length > 0 and np.any(in_b):
            offsets = times[in_b] - r
            offsets = np.clip(offsets, 1e-12, length - 1e-12)
            values[1:][in_b] = _conditioned_zero_bridge_at(
                gen, offsets, length, max(budget, 1e-12), step, max_attempts)
            filled |= in_b

    in_c = ~filled
    if np.any(in_c):
        offsets = np.maximum(times[in_c] - g, 1e-12)
        values[1:][in_c] = _bessel3_at(gen, offsets, 0.0)

    return GridPath(step=step, values=values), g, tau, gamma
