"""Gradient of the misfit functional, three ways.

Gradients are returned as L2(h) densities: the first variation of ``J`` is
``h * sum_i G_i dp_i``. The finite-difference oracle uses the same
normalization, so all three routes are directly comparable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .adjoint import AdjointField, residual, solve_adjoint_continuous, solve_adjoint_discrete
from .errors import ShapeMismatch, ValidationError
from .forward import DEFAULT_SCHEME, march_forward, solve_forward, trace_at_zero
from .grid import CoefficientVector, Field, Grid, ObservedTrace

BOUNDARY_POLICIES = ("exact", "replicate", "zero")


def _check_fields(y, phi, grid):
    shape = (grid.N + 1, grid.M + 1)
    if y.values.shape != shape or phi.values.shape != shape:
        raise ShapeMismatch(f"fields must have shape {shape}")


def _apply_boundary(G, boundary, scheme):
    if boundary not in BOUNDARY_POLICIES:
        raise ValidationError(f"unknown boundary policy {boundary!r}")
    G[-1] = 0.0
    if not scheme.mirror:
        G[0] = 0.0
    elif boundary == "replicate":
        G[0] = G[1]
    elif boundary == "zero":
        G[0] = 0.0
    return G


def gradient_discrete_terms(y: Field, phi: AdjointField, grid: Grid):
    """Split the discrete gradient into (correlation term, initial-layer term).

    correlation
        ``tau * sum_{j=1}^{M-1} phi^{j-1} y^j`` (``y^{j+1}`` for the hat
        variant), the discrete counterpart of ``int psi u dt``.
    initial-layer
        ``-phi^{-2}/tau + tau/2 phi^{-1} y^{0|1}``, which comes from the
        coefficient also being the initial displacement; its continuous
        limit is ``psi_t(x, 0)``.

    Node 0 carries the mirror weight 1/2 in the mirror treatment.
    """
    _check_fields(y, phi, grid)
    scheme = phi.scheme
    tau = grid.tau
    Y = y.values
    P = phi.values
    shift = 1 if scheme.hat else 0
    M = grid.M
    corr = tau * np.einsum("ij,ij->i", P[:, 0:M - 1], Y[:, 1 + shift:M + shift])
    init = -phi.lead[:, 0] / tau
    if scheme.taylor:
        init = init + 0.5 * tau * phi.lead[:, 1] * Y[:, shift]
    w = np.ones(grid.N + 1)
    if scheme.mirror:
        w[0] = 0.5
    else:
        w[0] = 0.0
    w[-1] = 0.0
    return w * corr, w * init


def gradient_discrete(y: Field, phi: AdjointField, grid: Grid, boundary="exact") -> CoefficientVector:
    corr, init = gradient_discrete_terms(y, phi, grid)
    G = _apply_boundary(corr + init, boundary, phi.scheme)
    return CoefficientVector(grid, G)


def gradient_continuous(y: Field, psi: Field, grid: Grid, include_initial_term=True) -> CoefficientVector:
    """Trapezoidal ``int_0^T psi u dt``, plus ``psi_t(x, 0)`` unless disabled.

    The ``psi_t(x, 0)`` contribution arises because the unknown is also the
    initial displacement; dropping it (``include_initial_term=False``) gives a
    vector that vanishes identically at ``p = 0``.
    """
    _check_fields(y, psi, grid)
    tau = grid.tau
    prod = psi.values * y.values
    G = tau * (prod.sum(axis=1) - 0.5 * (prod[:, 0] + prod[:, -1]))
    if include_initial_term:
        S = psi.values
        G = G + (-3.0 * S[:, 0] + 4.0 * S[:, 1] - S[:, 2]) / (2.0 * tau)
    G[-1] = 0.0
    return CoefficientVector(grid, G)


def objective_from_trace(grid: Grid, trace: np.ndarray, f: np.ndarray) -> float:
    d = trace[1:] - f[1:]
    return float(grid.tau * np.dot(d, d))


def adjoint_gradient(grid: Grid, p: CoefficientVector, f: ObservedTrace, scheme=DEFAULT_SCHEME,
                     boundary="exact", backend=None):
    """One forward + one adjoint solve; returns ``(J, G, y, phi)``."""
    y = solve_forward(grid, p, scheme=scheme, backend=backend)
    tr = trace_at_zero(y)
    r = residual(tr, f)
    phi = solve_adjoint_discrete(grid, p, r, scheme=scheme, backend=backend)
    J = objective_from_trace(grid, tr.values, f.values)
    return J, gradient_discrete(y, phi, grid, boundary=boundary), y, phi


def continuous_gradient(grid: Grid, p: CoefficientVector, f: ObservedTrace, scheme=DEFAULT_SCHEME,
                        include_initial_term=True, backend=None) -> CoefficientVector:
    y = solve_forward(grid, p, scheme=scheme, backend=backend)
    r = residual(trace_at_zero(y), f)
    psi = solve_adjoint_continuous(grid, p, r, scheme=scheme, backend=backend)
    return gradient_continuous(y, psi, grid, include_initial_term=include_initial_term)


def _objective_raw(grid, pvals, f, scheme, backend):
    y = march_forward(grid, pvals, pvals, scheme, backend)
    return objective_from_trace(grid, y[:, 0], f)


def gradient_fd_oracle(grid: Grid, p: CoefficientVector, f: ObservedTrace, eps: float,
                       scheme=DEFAULT_SCHEME, jobs: int = 1, backend=None) -> CoefficientVector:
    """Central differences ``[J(p + eps e_i) - J(p - eps e_i)] / (2 eps h)``, one pair per node.

    Independent of the adjoint machinery: only forward solves are used.
    """
    if not eps > 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    base = np.array(p.values, dtype=np.float64)
    fv = f.values

    def component(i):
        up = base.copy()
        up[i] += eps
        dn = base.copy()
        dn[i] -= eps
        jp = _objective_raw(grid, up, fv, scheme, backend)
        jm = _objective_raw(grid, dn, fv, scheme, backend)
        return (jp - jm) / (2.0 * eps * grid.h)

    idx = range(grid.N + 1)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            G = list(pool.map(component, idx))
    else:
        G = [component(i) for i in idx]
    return CoefficientVector(grid, np.array(G))
