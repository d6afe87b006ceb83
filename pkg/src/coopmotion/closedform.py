"""Closed-form self-similar solutions, their scaled-Beta limits, and special functions.

The source-type solution of u_t = (1/2)(u^{m+1})_xx with total mass theta is

    U(x, t; theta) = t^{-1/(m+2)} * [ (sqrt(2) theta / (D sqrt(m+1)))^{2m/(m+2)}
                                      - 2 rho x^2 / ((m+1) t^{2/(m+2)}) ]_+^{1/m}

with rho = m/(2(m+2)) and D = rho^{-1/2} B(1/2, (m+1)/m).  Up to an affine
change of variables its spatial profile is a Beta((m+1)/m, (m+1)/m) density,
which gives the limiting law of the rescaled dynamics in closed form.

Special functions (log-Gamma via Lanczos, regularized incomplete Beta via a
Lentz continued fraction with symmetry reduction) are implemented in-module
so the core needs no numeric dependencies beyond numpy; tests compare them
against independent references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidPi

__all__ = [
    "ZkbSpec",
    "LimitSpec",
    "rho",
    "big_d",
    "p_star",
    "scale_constant",
    "zkb_density",
    "zkb_support",
    "zkb_cdf",
    "limit_cdf",
    "lattice_limit_cdf",
    "heat_solution",
    "log_gamma",
    "beta_fn",
    "reg_inc_beta",
]

# --------------------------------------------------------------------------
# special functions
# --------------------------------------------------------------------------

# Lanczos approximation, g = 7, 9 coefficients (double precision).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    if x < 0.5:
        # Gamma(x) = Gamma(x+1)/x keeps the Lanczos sum in its sweet spot.
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    s = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        s += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(s)


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function B(a, b), a, b > 0."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta_fn needs a, b > 0, got ({a}, {b})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete Beta function (modified Lentz)."""
    MAXIT = 500
    EPS = 1e-16
    FPMIN = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for it in range(1, MAXIT + 1):
        m2 = 2 * it
        aa = it * (b - it) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + it) * (qab + it) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise DomainError(f"incomplete beta continued fraction failed for ({a}, {b}, {x})")


def reg_inc_beta(z: float, a: float, b: float) -> float:
    """Regularized incomplete Beta I_z(a, b) for z in [0, 1], a, b > 0."""
    if not (a > 0 and b > 0):
        raise DomainError(f"reg_inc_beta needs a, b > 0, got ({a}, {b})")
    if not (0.0 <= z <= 1.0):
        raise DomainError(f"reg_inc_beta needs z in [0, 1], got {z}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    ln_front = (
        a * math.log(z)
        + b * math.log1p(-z)
        - (log_gamma(a) + log_gamma(b) - log_gamma(a + b))
    )
    front = math.exp(ln_front)
    if z < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, z) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - z) / b


# --------------------------------------------------------------------------
# constants of the limit law
# --------------------------------------------------------------------------


def rho(m: float) -> float:
    """rho = m / (2(m+2))."""
    if not m > 0:
        raise DomainError(f"m must be > 0, got {m}")
    return m / (2.0 * (m + 2.0))


def big_d(m: float) -> float:
    """D = rho^{-1/2} B(1/2, (m+1)/m)."""
    return rho(m) ** -0.5 * beta_fn(0.5, (m + 1.0) / m)


def p_star(m: float) -> float:
    """The single-site mass threshold p* = (m+1)^{-1/m}."""
    if not m > 0:
        raise DomainError(f"m must be > 0, got {m}")
    return (m + 1.0) ** (-1.0 / m)


def scale_constant(m: float, q: float = 1.0) -> float:
    """Width of the limit law: 2^{(m+1)/(m+2)} (m+1)^{1/(m+2)} q^{1/(m+2)} / (D^{m/(m+2)} rho^{1/2}).

    The limit of the rescaled walk is scale * (B - 1/2) with B a symmetric
    Beta((m+1)/m, (m+1)/m) variable, so the support is [-scale/2, scale/2].
    """
    if not (0 < q <= 1):
        raise DomainError(f"q must lie in (0, 1], got {q}")
    r = rho(m)
    return (
        2.0 ** ((m + 1.0) / (m + 2.0))
        * (m + 1.0) ** (1.0 / (m + 2.0))
        * q ** (1.0 / (m + 2.0))
        / (big_d(m) ** (m / (m + 2.0)) * r**0.5)
    )


# --------------------------------------------------------------------------
# source-type (ZKB) solution
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ZkbSpec:
    """Self-similar solution parameters: total mass theta, time shift eps, order m."""

    theta: float
    eps: float = 0.0
    m: float = 1.0

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise DomainError(f"theta must be > 0, got {self.theta}")
        if self.eps < 0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if not self.m > 0:
            raise DomainError(f"m must be > 0, got {self.m}")


def _shifted_time(t: float, spec: ZkbSpec) -> float:
    s = t + spec.eps
    if not s > 0:
        raise DomainError(
            f"t + eps must be > 0 (the profile degenerates to a point mass), got {s}"
        )
    return s


def zkb_support(t: float, spec: ZkbSpec) -> float:
    """Support half-width of the profile at shifted time t + eps."""
    m = spec.m
    s = _shifted_time(t, spec)
    return (
        spec.theta ** (m / (m + 2.0))
        * (m + 1.0) ** (1.0 / (m + 2.0))
        * s ** (1.0 / (m + 2.0))
        / (2.0 ** (1.0 / (m + 2.0)) * rho(m) ** 0.5 * big_d(m) ** (m / (m + 2.0)))
    )


def zkb_density(x, t: float, spec: ZkbSpec):
    """The source-type profile U(x, t + eps; theta); zero outside its support.

    Accepts a scalar or ndarray x.
    """
    m = spec.m
    s = _shifted_time(t, spec)
    amp = (math.sqrt(2.0) * spec.theta / (big_d(m) * math.sqrt(m + 1.0))) ** (
        2.0 * m / (m + 2.0)
    )
    x = np.asarray(x, dtype=float)
    bracket = amp - 2.0 * rho(m) * x**2 / ((m + 1.0) * s ** (2.0 / (m + 2.0)))
    vals = s ** (-1.0 / (m + 2.0)) * np.maximum(bracket, 0.0) ** (1.0 / m)
    return float(vals) if vals.ndim == 0 else vals


def zkb_cdf(x, t: float, spec: ZkbSpec):
    """Integral of the profile from -inf to x, via the regularized incomplete Beta.

    The affine substitution y = Pi*(2s - 1) turns the integral into
    theta * I_s((m+1)/m, (m+1)/m) with s = (x/Pi + 1)/2, Pi the support
    half-width.  Equals theta for x past the right edge.
    """
    a = (spec.m + 1.0) / spec.m
    half_width = zkb_support(t, spec)
    xs = np.asarray(x, dtype=float)
    z = np.clip((xs / half_width + 1.0) / 2.0, 0.0, 1.0)
    out = np.array([spec.theta * reg_inc_beta(float(zi), a, a) for zi in np.atleast_1d(z)])
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


# --------------------------------------------------------------------------
# limit laws of the rescaled dynamics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitSpec:
    """Parameters (m, q) of the limiting scaled-Beta law."""

    m: float
    q: float = 1.0

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise DomainError(f"m must be > 0, got {self.m}")
        if not (0 < self.q <= 1):
            raise DomainError(f"q must lie in (0, 1], got {self.q}")


def limit_cdf(x, spec: LimitSpec):
    """CDF of scale * (B - 1/2) with B ~ Beta((m+1)/m, (m+1)/m).

    For q = 1 this equals zkb_cdf(x, 1; theta=1, eps=0); the lazy dynamics
    only rescale the width by q^{1/(m+2)}.
    """
    a = (spec.m + 1.0) / spec.m
    c = scale_constant(spec.m, spec.q)
    xs = np.asarray(x, dtype=float)
    z = np.clip(xs / c + 0.5, 0.0, 1.0)
    out = np.array([reg_inc_beta(float(zi), a, a) for zi in np.atleast_1d(z)])
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


def lattice_limit_cdf(x, spec: LimitSpec, R: int, pi: Sequence[float]):
    """Limit law when steps have length R and mass splits over residue classes.

    The classes mod R evolve autonomously; conditioned on class k (weight
    pi_k) the walk is R times a lazy dynamics whose effective q is
    q * pi_k^m, so that component is scaled by R * pi_k^{m/(m+2)}.  The
    result is the mixture CDF sum_k pi_k * limit_cdf(x / (R * pi_k^{m/(m+2)})).
    Classes with pi_k = 0 contribute nothing.
    """
    if R != int(R) or R < 1:
        raise DomainError(f"R must be a positive integer, got {R}")
    p = np.asarray(pi, dtype=float)
    if p.size != R:
        raise InvalidPi(f"pi must have length R = {R}, got {p.size}")
    if p.min(initial=0.0) < 0:
        raise InvalidPi("pi entries must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidPi(f"pi must sum to 1, got {p.sum()!r}")
    expo = spec.m / (spec.m + 2.0)
    xs = np.asarray(x, dtype=float)
    acc = np.zeros_like(np.atleast_1d(xs))
    for weight in p:
        if weight == 0.0:
            continue
        factor = R * weight**expo
        acc = acc + weight * np.atleast_1d(limit_cdf(xs / factor, spec))
    return float(acc[0]) if xs.ndim == 0 else acc.reshape(xs.shape)


def heat_solution(x, t: float, eps: float):
    """Gaussian CDF with variance eps + t, the exact solution of the smoothed heat flow."""
    var = eps + t
    if not var > 0:
        raise DomainError(f"eps + t must be > 0, got {var}")
    xs = np.asarray(x, dtype=float)
    out = 0.5 * (1.0 + np.vectorize(math.erf)(xs / math.sqrt(2.0 * var)))
    return float(out) if xs.ndim == 0 else out
