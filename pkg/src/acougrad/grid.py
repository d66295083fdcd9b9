"""Space-time lattice and the array containers shared by every solver.

All containers are frozen and hold read-only numpy arrays, so they can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CflViolation, NonPositiveExtent, ShapeMismatch, ValidationError

CFL_MAX = 0.95


def _frozen_array(values, shape, what):
    arr = np.array(values, dtype=np.float64)
    if arr.shape != shape:
        raise ShapeMismatch(f"{what}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"{what}: non-finite entry at index {tuple(int(b) for b in bad)}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Uniform lattice ``x_i = i*h`` (i = 0..N), ``t_j = j*tau`` (j = 0..M)."""

    L: float
    T: float
    N: int
    M: int
    cfl_max: float = CFL_MAX
    allow_unstable: bool = False

    def __post_init__(self):
        if not (self.L > 0 and self.T > 0):
            raise NonPositiveExtent(f"L and T must be positive, got L={self.L}, T={self.T}")
        if int(self.N) != self.N or int(self.M) != self.M or self.N < 2 or self.M < 2:
            raise NonPositiveExtent(f"N and M must be integers >= 2, got N={self.N}, M={self.M}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "T", float(self.T))
        if self.cfl_ratio > self.cfl_max and not self.allow_unstable:
            raise CflViolation(self.cfl_ratio, self.cfl_max)

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def tau(self) -> float:
        return self.T / self.M

    @property
    def cfl_ratio(self) -> float:
        return self.tau / self.h

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.tau

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.L, self.T, self.N * factor, self.M * factor,
                    cfl_max=self.cfl_max, allow_unstable=self.allow_unstable)

    def params(self) -> dict:
        return {"L": self.L, "T": self.T, "N": self.N, "M": self.M,
                "h": self.h, "tau": self.tau, "cfl_ratio": self.cfl_ratio}


def make_grid(L, T, N, M, allow_unstable=False, cfl_max=CFL_MAX) -> Grid:
    return Grid(L, T, N, M, cfl_max=cfl_max, allow_unstable=allow_unstable)


@dataclass(frozen=True)
class Field:
    """Space-time array; ``values[i, j]`` approximates the field at ``(x_i, t_j)``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (self.grid.N + 1, self.grid.M + 1)
        object.__setattr__(self, "values", _frozen_array(self.values, shape, "Field"))

    def layer(self, j) -> np.ndarray:
        return self.values[:, j]


@dataclass(frozen=True)
class CoefficientVector:
    """Samples ``p(x_i)``; also used for perturbations and gradients."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (self.grid.N + 1,)
        object.__setattr__(self, "values", _frozen_array(self.values, shape, "CoefficientVector"))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.N + 1))

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.x))


@dataclass(frozen=True)
class ObservedTrace:
    """Boundary record ``f(t_j)`` at ``x = 0``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = (self.grid.M + 1,)
        object.__setattr__(self, "values", _frozen_array(self.values, shape, "ObservedTrace"))


def check_same_grid(*items):
    grids = {(it.grid.L, it.grid.T, it.grid.N, it.grid.M) for it in items}
    if len(grids) != 1:
        raise ShapeMismatch(f"objects live on different grids: {sorted(grids)}")


def field_norm_l2(f: Field) -> float:
    g = f.grid
    return float(np.sqrt(g.h * g.tau * np.sum(f.values ** 2)))


def coeff_norm_l2(p: CoefficientVector) -> float:
    return float(np.sqrt(p.grid.h * np.sum(p.values ** 2)))
