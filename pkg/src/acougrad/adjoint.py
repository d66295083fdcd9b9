"""Backward-in-time dual problems.

Two adjoints are provided. ``solve_adjoint_discrete`` is the exact transpose
of the forward scheme (discretize-then-optimize): pairing it with the
perturbation solver satisfies the summation-by-parts identity to roundoff.
``solve_adjoint_continuous`` discretizes the continuous dual problem with the
plain cross stencil (optimize-then-discretize).

Conventions for the discrete adjoint ``phi``:

* layers ``M`` and ``M-1`` are zero;
* layer ``k`` carries the Neumann datum ``phi_x(0) = 2 r_{k+1}`` through the
  ghost node, so the field is shifted one step early with respect to the
  continuous adjoint ``psi`` (``phi^k ~ psi(t_{k+1})``);
* two extra layers ``phi^{-1}``, ``phi^{-2}`` are produced by continuing the
  march through the start-up equations; they feed the initial-layer term of
  the gradient and are kept in :attr:`AdjointField.lead`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._pykernels import _lap
from .errors import NonFiniteBlowup, ShapeMismatch, ValidationError
from .forward import CHECK_EVERY, DEFAULT_SCHEME, Scheme, _first_nonfinite
from .grid import CoefficientVector, Field, Grid, ObservedTrace, check_same_grid


@dataclass(frozen=True)
class Residual:
    """``r_j = y_0^j - f(t_j)``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = ObservedTrace(self.grid, self.values).values
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class AdjointField(Field):
    """Discrete adjoint plus the two start-up layers ``phi^{-2}, phi^{-1}`` (columns of ``lead``)."""

    lead: np.ndarray = field(default=None, repr=False)
    scheme: Scheme = DEFAULT_SCHEME

    def __post_init__(self):
        super().__post_init__()
        lead = np.array(self.lead, dtype=np.float64)
        if lead.shape != (self.grid.N + 1, 2):
            raise ShapeMismatch(f"lead layers: expected {(self.grid.N + 1, 2)}, got {lead.shape}")
        lead.setflags(write=False)
        object.__setattr__(self, "lead", lead)


def residual(trace: ObservedTrace, f: ObservedTrace) -> Residual:
    if trace.values.shape != f.values.shape:
        raise ShapeMismatch(f"trace {trace.values.shape} vs data {f.values.shape}")
    check_same_grid(trace, f)
    return Residual(trace.grid, trace.values - f.values)


def _source_scale(grid, scheme):
    # ghost value phi_{-1} = phi_1 - 2h g (mirror) or phi_0 = phi_1 - h g (one-sided),
    # with g = 2 r, folded into the tau^2/h^2 Laplacian
    c_b = 4.0 if scheme.mirror else 2.0
    return -c_b * grid.tau ** 2 / grid.h


def _check_inputs(grid, p, r):
    if p.values.shape != (grid.N + 1,):
        raise ShapeMismatch(f"coefficient has shape {p.values.shape}, expected {(grid.N + 1,)}")
    if r.values.shape != (grid.M + 1,):
        raise ShapeMismatch(f"residual has shape {r.values.shape}, expected {(grid.M + 1,)}")


def _march(grid, p, src, nrows, scheme, initial_rule, backend):
    impl = kernels.BACKENDS[backend] if backend else kernels
    out, bad = impl.backward_march(
        np.ascontiguousarray(p.values), np.ascontiguousarray(src), nrows,
        grid.cfl_ratio ** 2, grid.tau ** 2, scheme.hat, scheme.taylor, scheme.mirror,
        initial_rule, CHECK_EVERY,
    )
    if bad >= 0:
        # report in forward time order: the first layer that went bad is the highest row
        rows = np.argwhere(~np.isfinite(out))
        j, i = rows[np.argmax(rows[:, 0])]
        raise NonFiniteBlowup(int(i), int(j), what="adjoint")
    return out


def solve_adjoint_discrete(grid: Grid, p: CoefficientVector, r: Residual,
                           scheme: Scheme = DEFAULT_SCHEME, backend=None) -> AdjointField:
    _check_inputs(grid, p, r)
    M = grid.M
    src = np.zeros(M + 3)
    src[1:M + 1] = _source_scale(grid, scheme) * r.values[1:]
    buf = _march(grid, p, src, M + 3, scheme, True, backend)
    if not scheme.mirror:
        # display the boundary value implied by the one-sided datum
        buf[1:M + 1, 0] = buf[1:M + 1, 1] - 2.0 * grid.h * r.values[:M]
    return AdjointField(grid, buf[2:].T, lead=buf[:2].T, scheme=scheme)


def solve_adjoint_continuous(grid: Grid, p: CoefficientVector, r: Residual,
                             scheme: Scheme = DEFAULT_SCHEME, backend=None) -> Field:
    """Cross-stencil discretization of the continuous dual problem.

    ``psi(x, T) = psi_t(x, T) = 0`` (layers M, M-1 zero), ``psi(L, t) = 0`` and
    ``psi_x(0, t_k) = 2 r_k``. The potential always acts on the current layer.
    """
    _check_inputs(grid, p, r)
    M = grid.M
    plain = Scheme("explicit", scheme.start, scheme.neumann)
    src = np.zeros(M + 1)
    src[:M - 1] = _source_scale(grid, plain) * r.values[1:M]
    buf = _march(grid, p, src, M + 1, plain, False, backend)
    if not plain.mirror:
        buf[:M - 1, 0] = buf[:M - 1, 1] - 2.0 * grid.h * r.values[:M - 1]
    return Field(grid, buf.T)


def reverse_march_plain(grid: Grid, p: CoefficientVector, top: np.ndarray, below: np.ndarray,
                        backend=None) -> Field:
    """Homogeneous backward march from injected layers ``M`` (``top``) and ``M-1`` (``below``).

    Test hook for time-reversal checks: no boundary source, explicit stencil,
    mirror Neumann.
    """
    if top.shape != (grid.N + 1,) or below.shape != (grid.N + 1,):
        raise ShapeMismatch("injected layers must have length N+1")
    N, M = grid.N, grid.M
    r2, tau2 = grid.cfl_ratio ** 2, grid.tau ** 2
    pa = p.values[:N]
    out = np.zeros((M + 1, N + 1))
    out[M, :N] = top[:N]
    out[M - 1, :N] = below[:N]
    for m in range(M - 2, -1, -1):
        out[m, :N] = 2.0 * out[m + 1, :N] - out[m + 2, :N] + r2 * _lap(out[m + 1]) - tau2 * pa * out[m + 1, :N]
    if not np.all(np.isfinite(out)):
        raise ValidationError("reverse march produced non-finite values")
    return Field(grid, out.T)
