"""Exact evolution of cooperative-motion distributions.

One step of the dynamics sends a PMF p to

    p'_k = p_k - q*p_k^{m+1} + r*q*p_{k-R}^{m+1} + (1-r)*q*p_{k+R}^{m+1},

i.e. a site moves only when m independent copies coincide with it, and the
move is +R with probability r*q, -R with probability (1-r)*q, and 0
otherwise.  Atoms at +/-inf are fixed points.  The equivalent update of the
cumulative function is the monotone map

    S(a, b, c) = b + (q/2) * ((c-b)^{m+1} - (b-a)^{m+1})

in the symmetric case r = 1/2, R = 1.  A depth-first tree sampler provides
an independent Monte Carlo oracle for integer m.

Powers of non-integer order are taken of nonnegative quantities only
(PMF weights and CDF increments), with 0^{m+1} = 0.  Mass is never
renormalized during evolution: drift is asserted, not corrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BudgetExceeded, DomainError, WindowOverflow
from .measure import ExtendedCdf, ModelParams, Pmf, cdf, pmf_from_weights

DEFAULT_WINDOW_CAP = 10_000_000
DEFAULT_NODE_CAP = 1_000_000

__all__ = [
    "SchemeStencil",
    "step_pmf",
    "step_cdf",
    "evolve",
    "sample_tree",
    "monotone_map",
    "decrease_margin",
    "DEFAULT_WINDOW_CAP",
    "DEFAULT_NODE_CAP",
]


def _signed_power(d: float, e: float) -> float:
    return math.copysign(abs(d) ** e, d)


@dataclass(frozen=True)
class SchemeStencil:
    """Captured dynamics parameters with the precomputed update exponent m+1."""

    params: ModelParams

    @property
    def exponent(self) -> float:
        return self.params.m + 1.0

    def apply(self, a: float, b: float, c: float) -> float:
        return monotone_map(a, b, c, self.params)


def monotone_map(a: float, b: float, c: float, params: ModelParams) -> float:
    """The one-step map S(a,b,c) = b + (q/2)((c-b)^{m+1} - (b-a)^{m+1}).

    Differences are raised with the odd extension |d|^m * d, which agrees
    with the plain power on nondecreasing triples (the only ones produced
    by the dynamics) and keeps the map defined for probing arguments.
    """
    e = params.m + 1.0
    return b + 0.5 * params.q * (_signed_power(c - b, e) - _signed_power(b - a, e))


def _stepped(w: np.ndarray, params: ModelParams) -> np.ndarray:
    """One update of a weight window already padded by R zeros on each side.

    The outgoing mass is computed as (q*w)*w^m so that w - out stays
    nonnegative in floating point.  The incoming mass at each site is formed
    as the single sum r*out[k-R] + (1-r)*out[k+R], which keeps symmetric
    inputs bit-exactly symmetric when r = 1/2.
    """
    q, r, R = params.q, params.r, params.step
    out = (q * w) * np.power(w, params.m)
    from_left = r * out
    from_right = (1.0 - r) * out
    inc = np.zeros_like(w)
    inc[R:-R] = from_left[: -2 * R] + from_right[2 * R :]
    inc[:R] = from_right[R : 2 * R]
    inc[-R:] = from_left[-2 * R : -R]
    return (w - out) + inc


def step_pmf(p: Pmf, params: ModelParams) -> Pmf:
    """Apply one step of the cooperative-motion recurrence to a PMF."""
    if p.weights.size == 0:
        return p
    R = params.step
    w = np.concatenate([np.zeros(R), p.weights, np.zeros(R)])
    new = _stepped(w, params)
    return pmf_from_weights(p.offset - R, new, p.mass_neg_inf, p.mass_pos_inf)


def step_cdf(F: ExtendedCdf, params: ModelParams) -> ExtendedCdf:
    """Apply one step to an extended CDF; commutes with `step_pmf` through `cdf`.

    For R = 1 this is F'_k = F_k - r q (F_k - F_{k-1})^{m+1}
    + (1-r) q (F_{k+1} - F_k)^{m+1}; for larger step sizes the incoming and
    outgoing terms are windowed sums of increment powers over R sites.
    """
    if F.values.size == 0:
        return F
    q, r, R = params.q, params.r, params.step
    e = params.m + 1.0
    v = np.concatenate([np.full(R, F.floor), F.values, np.full(R, F.ceiling)])
    inc = np.diff(np.concatenate(([F.floor], v)))
    pw = np.power(inc, e)
    if R == 1:
        loss = pw
        gain = np.append(pw[1:], 0.0)
    else:
        csum = np.concatenate(([0.0], np.cumsum(pw)))
        n = v.size
        idx = np.arange(n)
        loss = csum[idx + 1] - csum[np.maximum(idx + 1 - R, 0)]
        gain = csum[np.minimum(idx + 1 + R, n)] - csum[idx + 1]
    new = v - (r * q) * loss + ((1.0 - r) * q) * gain
    return ExtendedCdf(F.offset - R, new, F.floor, F.ceiling)


def evolve(
    p: Pmf,
    params: ModelParams,
    n: int,
    window_cap: int = DEFAULT_WINDOW_CAP,
) -> Pmf:
    """n-fold composition of `step_pmf`.

    Raises WindowOverflow if the support window would exceed ``window_cap``
    sites.  The returned Pmf is trimmed and validated once at the end; the
    inner loop works on a single preallocated buffer.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0 or p.weights.size == 0:
        return p
    R = params.step
    grow = R * n
    final = p.weights.size + 2 * grow
    if final > window_cap:
        raise WindowOverflow(
            f"support would reach {final} sites (cap {window_cap})"
        )
    buf = np.zeros(final)
    lo, hi = grow, grow + p.weights.size
    buf[lo:hi] = p.weights
    for _ in range(n):
        lo -= R
        hi += R
        buf[lo:hi] = _stepped(buf[lo:hi], params)
    return pmf_from_weights(p.offset - grow, buf[lo:hi], p.mass_neg_inf, p.mass_pos_inf)


def sample_tree(
    params: ModelParams,
    n: int,
    mu_sampler: Callable[[], float],
    rng: np.random.Generator,
    node_cap: int = DEFAULT_NODE_CAP,
) -> float:
    """Draw one output value of the depth-n tree construction.

    Leaves hold independent draws from ``mu_sampler`` (integers, or +/-inf);
    an internal node copies its first child, plus a random +/-R step when all
    m+1 children agree.  The distribution of the root equals
    ``evolve(mu, n)``, which makes this the brute-force oracle for the
    recurrence.  Requires integer m >= 1 and (m+1)^n <= node_cap; recursion
    keeps O(n) live state and skips siblings that can no longer change the
    all-equal indicator.
    """
    m = params.m
    if m < 1 or m != int(m):
        raise DomainError(f"tree sampler needs integer m >= 1, got {m}")
    width = int(m) + 1
    if width**n > node_cap:
        raise BudgetExceeded(f"(m+1)^n = {width**n} exceeds node cap {node_cap}")
    rq = params.r * params.q
    q = params.q
    R = params.step
    random = rng.random

    def node(depth: int) -> float:
        if depth == n:
            return mu_sampler()
        first = node(depth + 1)
        for _ in range(width - 1):
            if node(depth + 1) != first:
                return first
        if first == math.inf or first == -math.inf:
            return first
        u = random()
        if u < rq:
            return first + R
        if u < q:
            return first - R
        return first

    return node(0)


def decrease_margin(p: Pmf, params: ModelParams) -> float:
    """Smallest one-step decrease below the local maximum where that maximum exceeds p*.

    Over all sites k with max(p_{k-R}, p_k, p_{k+R}) > p* = (m+1)^{-1/m},
    returns min of (local max - p'_k); +inf when no site qualifies.  The
    dynamics provably make this positive for q = 1; the constant itself is
    empirical.
    """
    p_star = (params.m + 1.0) ** (-1.0 / params.m)
    R = params.step
    w = np.concatenate([np.zeros(2 * R), p.weights, np.zeros(2 * R)])
    new = _stepped(w.copy(), params)
    left = np.concatenate([np.zeros(R), w[:-R]])
    right = np.concatenate([w[R:], np.zeros(R)])
    local_max = np.maximum(np.maximum(left, w), right)
    mask = local_max > p_star
    if not mask.any():
        return math.inf
    return float((local_max[mask] - new[mask]).min())
