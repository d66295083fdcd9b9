"""Change of variables from a physical medium to the potential form.

``travel_time_map`` turns depth into travel time, ``x = int_0^z dxi / c``.
``impedance_to_potential`` evaluates the Liouville potential
``q = -1/2 (ln sigma)'' + 1/4 ((ln sigma)')^2`` on a solver grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainTooShort, NonPositiveImpedance, NonPositiveSpeed, ValidationError
from .grid import CoefficientVector, Grid


def _strictly_increasing(a, what):
    if a.ndim != 1 or a.size < 3:
        raise ValidationError(f"{what}: need at least 3 samples")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what}: non-finite sample")
    if np.any(np.diff(a) <= 0):
        raise ValidationError(f"{what}: samples must be strictly increasing")


@dataclass(frozen=True)
class MediumProfile:
    z: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        z, c, rho = (np.asarray(a, dtype=np.float64) for a in (self.z, self.c, self.rho))
        _strictly_increasing(z, "depth")
        if not (z.shape == c.shape == rho.shape):
            raise ValidationError("z, c and rho must have the same length")
        if not np.all(c > 0):
            raise NonPositiveSpeed(f"sound speed must be positive (min {c.min()!r})")
        if not np.all(rho > 0):
            raise ValidationError(f"density must be positive (min {rho.min()!r})")
        for name, arr in (("z", z), ("c", c), ("rho", rho)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class ImpedanceProfile:
    x: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)

    def __post_init__(self):
        x, s = (np.asarray(a, dtype=np.float64) for a in (self.x, self.sigma))
        _strictly_increasing(x, "travel time")
        if x.shape != s.shape:
            raise ValidationError("x and sigma must have the same length")
        if not np.all(s > 0):
            raise NonPositiveImpedance(f"impedance must be positive (min {s.min()!r})")
        for name, arr in (("x", x), ("sigma", s)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def travel_time_map(m: MediumProfile) -> np.ndarray:
    """Travel time ``x_k`` for each depth sample (trapezoidal rule on ``1/c``, ``x_0 = 0``)."""
    x = cumulative_trapezoid(1.0 / m.c, m.z, initial=0.0)
    return x - x[0]


def impedance_profile(m: MediumProfile) -> ImpedanceProfile:
    """``sigma = rho * c`` expressed on the travel-time axis."""
    return ImpedanceProfile(travel_time_map(m), m.rho * m.c)


def _d1(f, h):
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def _d2(f, h):
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h ** 2
    if f.size >= 4:
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h ** 2
        d[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h ** 2
    else:
        d[0] = d[1]
        d[-1] = d[-2]
    return d


def impedance_to_potential(s: ImpedanceProfile, resample_to: Grid) -> CoefficientVector:
    g = resample_to
    tol = 1e-12 * max(1.0, g.L)
    if s.x[0] > tol or s.x[-1] < g.L - tol:
        raise DomainTooShort(f"impedance covers [{s.x[0]}, {s.x[-1]}], grid needs [0, {g.L}]")
    log_sigma = np.interp(g.x, s.x, np.log(s.sigma))
    d1 = _d1(log_sigma, g.h)
    d2 = _d2(log_sigma, g.h)
    return CoefficientVector(g, -0.5 * d2 + 0.25 * d1 ** 2)


def medium_to_potential(m: MediumProfile, grid: Grid) -> CoefficientVector:
    return impedance_to_potential(impedance_profile(m), grid)
