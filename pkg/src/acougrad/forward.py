"""Explicit three-layer solver for the direct problem and its linearization.

The scheme advances ``u_tt = u_xx - p u`` on ``[0, L] x [0, T]`` with
``u_x(0, t) = 0``, ``u(L, t) = 0`` and zero initial velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonFiniteBlowup, ShapeMismatch, ValidationError
from .grid import CoefficientVector, Field, Grid, ObservedTrace, check_same_grid

CHECK_EVERY = 64


@dataclass(frozen=True)
class Scheme:
    """Discretization choices shared by forward, perturbation and adjoint solvers.

    variant
        ``"explicit"`` applies the potential on layer ``j``; ``"hat"`` applies
        it on layer ``j+1`` (a pointwise division, still explicit).
    start
        ``"taylor"`` uses the second-order start
        ``y^1 = y^0 + tau^2/2 (D y^0 - p y^0)``; ``"first"`` sets ``y^1 = y^0``.
    neumann
        ``"mirror"`` folds the ghost value ``y_{-1} = y_1`` into the node-0
        update; ``"onesided"`` sets ``y_0 = y_1`` on every layer.
    """

    variant: str = "explicit"
    start: str = "taylor"
    neumann: str = "mirror"

    def __post_init__(self):
        if self.variant not in ("explicit", "hat"):
            raise ValidationError(f"unknown scheme variant {self.variant!r}")
        if self.start not in ("taylor", "first"):
            raise ValidationError(f"unknown start rule {self.start!r}")
        if self.neumann not in ("mirror", "onesided"):
            raise ValidationError(f"unknown Neumann treatment {self.neumann!r}")

    @property
    def hat(self):
        return self.variant == "hat"

    @property
    def taylor(self):
        return self.start == "taylor"

    @property
    def mirror(self):
        return self.neumann == "mirror"

    @property
    def first_active(self):
        """Lowest node carrying an independent unknown."""
        return 0 if self.mirror else 1


DEFAULT_SCHEME = Scheme()


@dataclass(frozen=True)
class InitialData:
    """Initial displacement. ``values=None`` means "use the coefficient itself"."""

    values: CoefficientVector | None = None

    @classmethod
    def coefficient(cls):
        return cls(None)

    @classmethod
    def explicit(cls, phi0: CoefficientVector):
        return cls(phi0)

    @property
    def uses_coefficient(self):
        return self.values is None


def _first_nonfinite(arr_tm, upto):
    bad = np.argwhere(~np.isfinite(arr_tm[: upto + 1]))
    j, i = bad[0]
    return int(i), int(j)


def march_forward(grid: Grid, p: np.ndarray, y0: np.ndarray, scheme=DEFAULT_SCHEME, backend=None):
    """Run the forward kernel; returns the time-major array ``y[j, i]``."""
    impl = kernels.BACKENDS[backend] if backend else kernels
    r2 = grid.cfl_ratio ** 2
    tau2 = grid.tau ** 2
    y, bad = impl.forward_march(
        np.ascontiguousarray(p, dtype=np.float64), np.ascontiguousarray(y0, dtype=np.float64),
        grid.M, r2, tau2, scheme.hat, scheme.taylor, scheme.mirror, CHECK_EVERY,
    )
    if bad >= 0:
        raise NonFiniteBlowup(*_first_nonfinite(y, bad), what="forward")
    return y


def solve_forward(grid: Grid, p: CoefficientVector, init: InitialData | None = None,
                  scheme: Scheme = DEFAULT_SCHEME, backend=None) -> Field:
    if p.values.shape != (grid.N + 1,):
        raise ShapeMismatch(f"coefficient has shape {p.values.shape}, expected {(grid.N + 1,)}")
    init = init or InitialData.coefficient()
    y0 = p.values if init.uses_coefficient else init.values.values
    if y0.shape != (grid.N + 1,):
        raise ShapeMismatch(f"initial data has shape {y0.shape}, expected {(grid.N + 1,)}")
    y = march_forward(grid, p.values, y0, scheme, backend)
    return Field(grid, y.T)


def trace_at_zero(y: Field) -> ObservedTrace:
    return ObservedTrace(y.grid, y.values[0, :])


def solve_perturbation(grid: Grid, p: CoefficientVector, y: Field, dp: CoefficientVector,
                       scheme: Scheme = DEFAULT_SCHEME) -> Field:
    """Exact linearization of the forward scheme in the direction ``dp``.

    ``y`` must be the forward solution for ``p`` (coefficient used as the
    initial displacement). Written independently of the compiled kernels;
    it serves as a test fixture for the adjoint.
    """
    check_same_grid(p, y, dp)
    N, M = grid.N, grid.M
    lo = scheme.first_active
    r2 = grid.cfl_ratio ** 2
    tau2 = grid.tau ** 2
    pa = p.values[lo:N]
    da = dp.values[lo:N]
    Y = y.values.T
    d = np.zeros((M + 1, N + 1))

    def lap(row):
        full = np.zeros(N + 2)
        full[1:] = row
        full[0] = row[1]  # mirror ghost; for one-sided node 0 already equals node 1
        return (full[2:] - 2.0 * full[1:-1] + full[:-2])[lo:N]

    def fix(row):
        if not scheme.mirror:
            row[0] = row[1]

    d[0, lo:N] = da
    fix(d[0])
    if not scheme.taylor:
        d[1, lo:N] = d[0, lo:N]
    elif scheme.hat:
        d[1, lo:N] = (d[0, lo:N] + 0.5 * r2 * lap(d[0]) - 0.5 * tau2 * da * Y[1, lo:N]) / (
            1.0 + 0.5 * tau2 * pa)
    else:
        d[1, lo:N] = d[0, lo:N] + 0.5 * (r2 * lap(d[0]) - tau2 * (pa * d[0, lo:N] + da * Y[0, lo:N]))
    fix(d[1])
    for j in range(1, M):
        rhs = 2.0 * d[j, lo:N] - d[j - 1, lo:N] + r2 * lap(d[j])
        if scheme.hat:
            d[j + 1, lo:N] = (rhs - tau2 * da * Y[j + 1, lo:N]) / (1.0 + tau2 * pa)
        else:
            d[j + 1, lo:N] = rhs - tau2 * (pa * d[j, lo:N] + da * Y[j, lo:N])
        fix(d[j + 1])
    if not np.all(np.isfinite(d)):
        raise NonFiniteBlowup(*_first_nonfinite(d, M), what="perturbation")
    return Field(grid, d.T)
