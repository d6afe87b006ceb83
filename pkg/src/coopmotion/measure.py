"""Lattice probability measures and extended distribution functions.

A Pmf is a finitely supported probability vector on the integer lattice,
stored densely over a contiguous window with an integer offset, plus
optional atoms at -inf and +inf.  An ExtendedCdf is the matching
nondecreasing step function with limits ``floor`` at -inf and ``ceiling``
at +inf.  Both are immutable value types; all operations are pure.

Tolerance policy: construction accepts a total-mass error of 1e-9
(CONSTRUCTION_TOL); invariant checks after evolution use 1e-12
(INVARIANT_TOL).  Mass is never renormalized -- drift is a correctness
signal, not noise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptyGrid, NegativeMass, NotNormalized

CONSTRUCTION_TOL = 1e-9
INVARIANT_TOL = 1e-12

__all__ = [
    "CONSTRUCTION_TOL",
    "INVARIANT_TOL",
    "ModelParams",
    "Pmf",
    "ExtendedCdf",
    "pmf_from_weights",
    "delta_pmf",
    "uniform_pmf",
    "cdf",
    "kolmogorov_distance",
    "rescaled_cdf",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModelParams:
    """Dynamics parameters: cooperation order m, laziness q, right bias r, step size R.

    m > 0 (number of helper copies; non-integer values evolve the recurrence
    only), 0 < q <= 1 (probability that a coordinated site moves at all),
    1/2 <= r <= 1 (probability a move goes right), step >= 1 (move length R).
    """

    m: float
    q: float = 1.0
    r: float = 0.5
    step: int = 1

    def __post_init__(self) -> None:
        if not (self.m > 0):
            raise DomainError(f"m must be > 0, got {self.m}")
        if not (0 < self.q <= 1):
            raise DomainError(f"q must lie in (0, 1], got {self.q}")
        if not (0.5 <= self.r <= 1):
            raise DomainError(f"r must lie in [1/2, 1], got {self.r}")
        if self.step != int(self.step) or self.step < 1:
            raise DomainError(f"step must be a positive integer, got {self.step}")
        object.__setattr__(self, "step", int(self.step))


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function on Z with optional atoms at +/-inf.

    ``weights[i]`` is the mass at lattice site ``offset + i``.  Canonical
    form keeps the first and last weights nonzero; interior zeros are
    preserved.
    """

    offset: int
    weights: np.ndarray
    mass_neg_inf: float = 0.0
    mass_pos_inf: float = 0.0

    def __post_init__(self) -> None:
        w = _readonly(np.atleast_1d(np.asarray(self.weights, dtype=float))
                      if np.size(self.weights) else np.empty(0))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "offset", int(self.offset))
        if self.mass_neg_inf < 0 or self.mass_pos_inf < 0:
            raise NegativeMass("atoms at +/-inf must be nonnegative")
        if w.size and w.min() < 0:
            k = self.offset + int(np.argmin(w))
            raise NegativeMass(f"negative weight at site {k}")
        if abs(self.total_mass - 1.0) > CONSTRUCTION_TOL:
            raise NotNormalized(f"total mass {self.total_mass!r} is not 1")
        if w.size and (w[0] == 0.0 or w[-1] == 0.0):
            raise DomainError("weights are not trimmed (zero at window edge)")

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum()) + self.mass_neg_inf + self.mass_pos_inf

    @property
    def k_min(self) -> int:
        return self.offset

    @property
    def k_max(self) -> int:
        return self.offset + self.weights.size - 1

    @property
    def support_size(self) -> int:
        return self.weights.size

    @property
    def max_weight(self) -> float:
        return float(self.weights.max()) if self.weights.size else 0.0

    def prob(self, k: int) -> float:
        i = k - self.offset
        if 0 <= i < self.weights.size:
            return float(self.weights[i])
        return 0.0

    def to_csv(self, path) -> None:
        """Write rows ``k,p_k``; atoms appear as k = "-inf" / "+inf"."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "p_k"])
            if self.mass_neg_inf:
                writer.writerow(["-inf", f"{self.mass_neg_inf:.17g}"])
            for i, p in enumerate(self.weights):
                writer.writerow([self.offset + i, f"{p:.17g}"])
            if self.mass_pos_inf:
                writer.writerow(["+inf", f"{self.mass_pos_inf:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "Pmf":
        mni = mpi = 0.0
        sites: dict[int, float] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:2]] != ["k", "p_k"]:
                raise DomainError(f"{path}: expected header 'k,p_k'")
            for row in reader:
                if not row:
                    continue
                key, val = row[0].strip(), float(row[1])
                if key == "-inf":
                    mni += val
                elif key == "+inf":
                    mpi += val
                else:
                    sites[int(key)] = sites.get(int(key), 0.0) + val
        if not sites:
            return pmf_from_weights(0, [], mni, mpi)
        lo, hi = min(sites), max(sites)
        w = np.zeros(hi - lo + 1)
        for k, v in sites.items():
            w[k - lo] = v
        return pmf_from_weights(lo, w, mni, mpi)


def pmf_from_weights(
    offset: int,
    weights: Sequence[float] | np.ndarray,
    mass_neg_inf: float = 0.0,
    mass_pos_inf: float = 0.0,
) -> Pmf:
    """Build a canonical (trimmed, validated) Pmf from raw weights.

    Raises NegativeMass on any negative entry and NotNormalized if the total
    mass differs from 1 by more than CONSTRUCTION_TOL.  Only exact leading
    and trailing zeros are trimmed.
    """
    w = np.asarray(weights, dtype=float).ravel()
    if w.size and w.min() < 0:
        raise NegativeMass("negative weight")
    nz = np.flatnonzero(w)
    if nz.size == 0:
        return Pmf(int(offset), np.empty(0), mass_neg_inf, mass_pos_inf)
    lo, hi = int(nz[0]), int(nz[-1])
    return Pmf(int(offset) + lo, w[lo : hi + 1], mass_neg_inf, mass_pos_inf)


def delta_pmf(k: int) -> Pmf:
    """Point mass at lattice site k."""
    return Pmf(k, np.array([1.0]))


def uniform_pmf(a: int, b: int) -> Pmf:
    """Uniform distribution on the integer range [a, b]."""
    if b < a:
        raise DomainError(f"empty range [{a}, {b}]")
    n = b - a + 1
    return Pmf(a, np.full(n, 1.0 / n))


@dataclass(frozen=True, eq=False)
class ExtendedCdf:
    """Nondecreasing step function with limits ``floor`` at -inf and ``ceiling`` at +inf.

    ``values[i]`` is F at lattice site ``offset + i``; F is constant between
    consecutive sites and right-continuous.
    """

    offset: int
    values: np.ndarray
    floor: float = 0.0
    ceiling: float = 1.0

    def __post_init__(self) -> None:
        v = _readonly(np.atleast_1d(np.asarray(self.values, dtype=float))
                      if np.size(self.values) else np.empty(0))
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "offset", int(self.offset))
        tol = INVARIANT_TOL
        if not (-tol <= self.floor and self.ceiling <= 1 + tol and self.floor <= self.ceiling + tol):
            raise DomainError("floor/ceiling must satisfy 0 <= floor <= ceiling <= 1")
        if v.size:
            if np.diff(v).min(initial=0.0) < -tol:
                raise DomainError("values must be nondecreasing")
            if self.floor > v[0] + tol or v[-1] > self.ceiling + tol:
                raise DomainError("values must lie between floor and ceiling")

    def value_at(self, k: int) -> float:
        """F evaluated at integer site k (floor left of the window, ceiling right of it)."""
        i = k - self.offset
        if i < 0:
            return self.floor
        if i >= self.values.size:
            return self.ceiling
        return float(self.values[i])

    def jump_sites(self) -> np.ndarray:
        """Lattice sites carrying the window of this CDF."""
        return self.offset + np.arange(self.values.size)

    def to_pmf(self) -> Pmf:
        """Difference the step function back into a Pmf (inverse of `cdf`).

        Rounding dust above -INVARIANT_TOL is clipped to zero; anything more
        negative is a genuine error and raises NegativeMass.
        """
        if self.values.size == 0:
            return pmf_from_weights(self.offset, [], self.floor, 1.0 - self.ceiling)
        w = np.diff(np.concatenate(([self.floor], self.values)))
        if w.min(initial=0.0) < -INVARIANT_TOL:
            raise NegativeMass("differencing produced a negative weight")
        np.clip(w, 0.0, None, out=w)
        return pmf_from_weights(self.offset, w, self.floor, 1.0 - self.ceiling)


def cdf(p: Pmf) -> ExtendedCdf:
    """Cumulative sums of a Pmf: F_k = mass at -inf plus all weights up to k."""
    values = p.mass_neg_inf + np.cumsum(p.weights) if p.weights.size else np.empty(0)
    return ExtendedCdf(p.offset, values, p.mass_neg_inf, 1.0 - p.mass_pos_inf)


def kolmogorov_distance(
    f: Callable[[float], float],
    g: Callable[[float], float],
    grid: Iterable[float],
) -> float:
    """sup |f - g| over the grid, probing both sides of every grid point.

    Step functions attain their sup distance at jumps, so each grid point x
    is also evaluated at the adjacent floats below and above x.
    """
    xs = np.asarray(list(grid), dtype=float)
    if xs.size == 0:
        raise EmptyGrid("kolmogorov_distance needs a nonempty grid")
    probes = np.unique(
        np.concatenate([xs, np.nextafter(xs, -np.inf), np.nextafter(xs, np.inf)])
    )
    best = 0.0
    for x in probes:
        d = abs(f(x) - g(x))
        if d > best:
            best = d
    return best


def rescaled_cdf(p: Pmf, n: int, m: float) -> Callable[[float], float]:
    """CDF of the time-n distribution rescaled by n**(1/(m+2)).

    Returns x -> F_{floor(n^{1/(m+2)} x)} where F is the CDF of p.
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if m <= 0:
        raise DomainError(f"m must be > 0, got {m}")
    scale = float(n) ** (1.0 / (m + 2.0))
    F = cdf(p)

    def evaluate(x: float) -> float:
        if math.isinf(x):
            return F.ceiling if x > 0 else F.floor
        return F.value_at(math.floor(scale * x))

    return evaluate
