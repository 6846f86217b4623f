"""Closed-form and numerically solved large-n limit objects.

* ``giant_fraction(t)``: the limiting largest-component fraction of the
  mean-field (complete graph, rate 1/m) process, i.e. the unique root of
  1 - x = exp(-t*x) on (0, 1) for t > 1, and 0 for t <= 1.
* ``merge_time_cdf``: the law of the random time at which the two halves of
  a coupled pair of complete graphs join into one giant, for the single
  heavy bridge edge variant and for the vertex-transitive all-cross-edges
  variant.
* ``coupled_reach_time_law(s, mode)``: the limit law of the first time the
  largest-component fraction of the coupled graph reaches s.  The limiting
  fraction process sits at giant_fraction(t)/2 before the join time and at
  giant_fraction(t) after, which resolves the reach time case-wise; mean
  and variance come from adaptive quadrature over the join-time law.

These are the oracles the counterexample acceptance tests compare
simulations against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "giant_fraction",
    "giant_fraction_inverse",
    "merge_time_cdf",
    "merge_time_quantile",
    "sample_merge_time",
    "ReachTimeLaw",
    "coupled_reach_time_law",
]

FIXED_POINT_TOL = 1e-12
QUANTILE_TOL = 1e-10
_THETA_ITERS = 60  # bisection on [0,1]: final bracket 2**-60 << tolerance

_MODES = ("bridge", "transitive")


def _check_mode(mode: str) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")


def giant_fraction(t):
    """Limiting giant-component fraction at time t (scalar or array).

    Zero for t <= 1; otherwise the unique root of 1 - x = exp(-t*x) in
    (0, 1), located by bisection to within 1e-12.  The objective
    f(x) = 1 - x - exp(-t*x) is concave with f(0) = 0, f'(0) = t - 1 > 0
    and f(1) < 0, so it is positive left of the root and negative right of
    it, which makes plain bisection on [0, 1] valid.
    """
    arr = np.asarray(t, dtype=np.float64)
    scalar = arr.ndim == 0
    tv = np.atleast_1d(arr)
    out = np.zeros_like(tv)
    mask = tv > 1.0
    if mask.any():
        tm = tv[mask]
        lo = np.zeros_like(tm)
        hi = np.ones_like(tm)
        for _ in range(_THETA_ITERS):
            mid = 0.5 * (lo + hi)
            positive = 1.0 - mid - np.exp(-tm * mid) > 0.0
            lo = np.where(positive, mid, lo)
            hi = np.where(positive, hi, mid)
        out[mask] = 0.5 * (lo + hi)
    if scalar:
        return float(out[0])
    return out.reshape(arr.shape)


def giant_fraction_inverse(s: float) -> float:
    """Time at which the giant fraction equals s, in closed form.

    Solving 1 - s = exp(-t*s) for t gives t = -log(1-s)/s, which exceeds 1
    for every s in (0, 1).
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    return float(-np.log1p(-s) / s)


def merge_time_cdf(t, mode: str):
    """CDF of the time the two coupled halves join (scalar or array).

    bridge: both half-giants must contain a bridge endpoint, giving
    giant_fraction(t)**2.  transitive: the cross connection arrives at unit
    rate times the product of half-giant fractions, giving
    1 - exp(-t * giant_fraction(t)**2).
    """
    _check_mode(mode)
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("time must be non-negative")
    th2 = np.square(giant_fraction(arr))
    if mode == "bridge":
        return th2
    return -np.expm1(-arr * th2)


def merge_time_quantile(u, mode: str):
    """Inverse of :func:`merge_time_cdf` by bisection, to 1e-10 in t."""
    _check_mode(mode)
    arr = np.asarray(u, dtype=np.float64)
    scalar = arr.ndim == 0
    uv = np.atleast_1d(arr).astype(np.float64)
    if np.any((uv <= 0.0) | (uv >= 1.0)):
        raise ValueError("quantile levels must lie strictly in (0, 1)")
    hi = 2.0
    while merge_time_cdf(hi, mode) < uv.max():
        hi *= 2.0
        if hi > 2.0**40:
            raise RuntimeError("quantile bracket expansion failed")
    lo_v = np.ones_like(uv)
    hi_v = np.full_like(uv, hi)
    iters = int(np.ceil(np.log2((hi - 1.0) / QUANTILE_TOL))) + 1
    for _ in range(iters):
        mid = 0.5 * (lo_v + hi_v)
        below = merge_time_cdf(mid, mode) < uv
        lo_v = np.where(below, mid, lo_v)
        hi_v = np.where(below, hi_v, mid)
    out = 0.5 * (lo_v + hi_v)
    if scalar:
        return float(out[0])
    return out.reshape(arr.shape)


def sample_merge_time(rng: np.random.Generator, mode: str, size: int) -> np.ndarray:
    """Inverse-CDF sample of the join time."""
    u = rng.random(size)
    np.clip(u, 2.0**-64, 1.0 - 2.0**-53, out=u)
    return merge_time_quantile(u, mode)


@dataclass(frozen=True)
class ReachTimeLaw:
    """Limit law of the first time the coupled graph's largest-component
    fraction reaches s.

    With a = time for the full giant to reach fraction s and, when 2s < 1,
    b = time for a half giant to reach fraction s of the whole, the reach
    time equals b when the join time Z exceeds b, and max(Z, a) otherwise
    (for 2s >= 1 the half giant alone can never reach s, leaving max(Z, a)).
    """

    s: float
    mode: str
    mean: float
    variance: float
    full_time: float          # a: giant_fraction_inverse(s)
    half_time: float | None   # b: giant_fraction_inverse(2s) when 2s < 1

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        z = sample_merge_time(rng, self.mode, size)
        if self.half_time is not None:
            return np.where(
                z > self.half_time, self.half_time, np.maximum(z, self.full_time)
            )
        return np.maximum(z, self.full_time)

    def cdf(self, t) -> np.ndarray:
        """P(reach time <= t): 0 below a, the join-time CDF between a and b,
        and 1 from b on (b = +inf when 2s >= 1)."""
        arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        f = merge_time_cdf(arr, self.mode)
        out = np.where(arr < self.full_time, 0.0, f)
        if self.half_time is not None:
            out = np.where(arr >= self.half_time, 1.0, out)
        if np.asarray(t).ndim == 0:
            return float(out[0])
        return out


def coupled_reach_time_law(s: float, mode: str) -> ReachTimeLaw:
    """Mean, variance, and sampler of the limiting reach time (see
    :class:`ReachTimeLaw`).

    Moments integrate the join-time CDF F:  for 2s >= 1 the law is
    max(Z, a), so E X = a + int_a^inf (1-F) and
    E X^2 = a^2 + int_a^inf 2t(1-F); for 2s < 1 truncation at b turns the
    same integration by parts into E X = b - int_a^b F and
    E X^2 = b^2 - int_a^b 2tF.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    _check_mode(mode)
    a = giant_fraction_inverse(s)
    quad_opts = dict(epsabs=1e-12, epsrel=1e-8, limit=200)
    if 2.0 * s < 1.0:
        b = giant_fraction_inverse(2.0 * s)
        i0, _ = quad(lambda t: merge_time_cdf(t, mode), a, b, **quad_opts)
        i1, _ = quad(lambda t: 2.0 * t * merge_time_cdf(t, mode), a, b, **quad_opts)
        mean = b - i0
        second_moment = b * b - i1
        half_time = b
    else:
        i0, _ = quad(lambda t: 1.0 - merge_time_cdf(t, mode), a, np.inf, **quad_opts)
        i1, _ = quad(
            lambda t: 2.0 * t * (1.0 - merge_time_cdf(t, mode)), a, np.inf, **quad_opts
        )
        mean = a + i0
        second_moment = a * a + i1
        half_time = None
    variance = second_moment - mean * mean
    return ReachTimeLaw(
        s=s,
        mode=mode,
        mean=float(mean),
        variance=float(variance),
        full_time=float(a),
        half_time=half_time,
    )
