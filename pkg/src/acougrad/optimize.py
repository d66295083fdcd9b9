"""Misfit functional and descent iterations for recovering the potential."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NonFiniteBlowup, ValidationError
from .forward import DEFAULT_SCHEME, march_forward
from .gradient import adjoint_gradient, objective_from_trace
from .grid import CoefficientVector, Grid, ObservedTrace, coeff_norm_l2

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class StopReason(str, enum.Enum):
    MAX_ITER = "MaxIter"
    J_TOLERANCE = "JTolerance"
    GRAD_TOLERANCE = "GradTolerance"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


class LineSearch(str, enum.Enum):
    BACKTRACKING = "backtracking"
    GOLDEN_SECTION = "golden"
    QUADRATIC_FIT = "quadratic"


@dataclass(frozen=True)
class DescentConfig:
    max_iter: int = 500
    j_tol: float | None = None  # None: 1e-12 * J(p0)
    grad_tol: float = 1e-8
    line_search: LineSearch = LineSearch.BACKTRACKING
    alpha_init: float = 1.0
    armijo_c: float = 1e-4
    shrink: float = 0.5
    max_shrinks: int = 60
    landweber_alpha: float = 1.0
    boundary: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "line_search", LineSearch(self.line_search))
        if not self.alpha_init > 0:
            raise ValidationError("alpha_init must be positive")
        if not 0 < self.shrink < 1:
            raise ValidationError("shrink must lie in (0, 1)")
        if not 0 < self.armijo_c < 1:
            raise ValidationError("armijo_c must lie in (0, 1)")
        if self.max_iter < 0:
            raise ValidationError("max_iter must be non-negative")
        if self.landweber_alpha < 0:
            raise ValidationError("landweber_alpha must be non-negative")


@dataclass
class InversionState:
    iterate: CoefficientVector
    n: int = 0
    J_history: list = field(default_factory=list)
    alpha_history: list = field(default_factory=list)
    grad_norm_history: list = field(default_factory=list)
    stop_reason: StopReason | None = None
    j_tol: float | None = None

    @property
    def J(self):
        return self.J_history[-1]

    def rate_estimate(self):
        """Slope of ``log J`` against the iteration number (least squares); ``nan`` if undefined."""
        J = np.asarray(self.J_history)
        J = J[J > 0]
        if J.size < 2:
            return float("nan")
        k = np.arange(J.size)
        return float(np.polyfit(k, np.log(J), 1)[0])

    def to_dict(self):
        return {
            "n": self.n,
            "stop_reason": self.stop_reason.value if self.stop_reason else None,
            "J_history": list(self.J_history),
            "alpha_history": list(self.alpha_history),
            "grad_norm_history": list(self.grad_norm_history),
            "iterate": self.iterate.values.tolist(),
        }


def objective(grid: Grid, p: CoefficientVector, f: ObservedTrace, scheme=DEFAULT_SCHEME, backend=None) -> float:
    """``J = tau * sum_{j=1}^M (y_0^j - f_j)^2`` with ``y`` the forward solution for ``p``."""
    y = march_forward(grid, p.values, p.values, scheme, backend)
    return objective_from_trace(grid, y[:, 0], f.values)


class _Line:
    """``J(p - alpha G)`` with memoization."""

    def __init__(self, grid, p, G, f, scheme):
        self.grid, self.p, self.G, self.f, self.scheme = grid, p, G, f, scheme
        self.cache = {}

    def __call__(self, alpha):
        if alpha not in self.cache:
            trial = self.p - alpha * self.G
            try:
                y = march_forward(self.grid, trial, trial, self.scheme)
            except NonFiniteBlowup:
                self.cache[alpha] = math.inf
            else:
                self.cache[alpha] = objective_from_trace(self.grid, y[:, 0], self.f)
        return self.cache[alpha]


def _backtracking(line, J0, slope, cfg, alpha=None):
    alpha = cfg.alpha_init if alpha is None else alpha
    for _ in range(cfg.max_shrinks):
        if line(alpha) <= J0 + cfg.armijo_c * alpha * slope:
            return alpha
        alpha *= cfg.shrink
    return None


def _golden(line, J0, slope, cfg):
    # bracket a minimum by expansion from alpha_init, then golden-section search
    a, b = 0.0, cfg.alpha_init
    fa = J0
    if line(b) >= fa:
        hi = _backtracking(line, J0, slope, cfg)
        if hi is None:
            return None
        b = hi / cfg.shrink
    else:
        while True:
            c = b / GOLDEN ** 2
            if line(c) >= line(b) or c > 1e12:
                b = c
                break
            a, b = b, c
    tol = 1e-4 * (b - a)
    lo, hi = a, b
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    while hi - lo > tol:
        if line(x1) < line(x2):
            hi, x2 = x2, x1
            x1 = hi - GOLDEN * (hi - lo)
        else:
            lo, x1 = x1, x2
            x2 = lo + GOLDEN * (hi - lo)
    best = min((x for x in line.cache if x > 0), key=line)
    return best if line(best) < J0 else None


def _quadratic(line, J0, slope, cfg):
    # parabola through J(0), J'(0) and the Armijo point; keep the best sampled step
    base = _backtracking(line, J0, slope, cfg)
    if base is None:
        return None
    Jb = line(base)
    curv = (Jb - J0 - slope * base) / base ** 2
    if curv > 0:
        line(min(-slope / (2.0 * curv), 4.0 * base))
    line(2.0 * base)
    best = min((x for x in line.cache if x > 0), key=line)
    return best


def descent_step(state: InversionState, grid: Grid, f: ObservedTrace, cfg: DescentConfig,
                 scheme=DEFAULT_SCHEME, fixed_alpha: float | None = None) -> InversionState:
    """One update ``p <- p - alpha * grad J``; returns a new state.

    With ``fixed_alpha`` the line search is skipped and the step is always
    taken (Landweber). Otherwise a non-decreasing step is never accepted.
    """
    p = state.iterate
    J0, G, _, _ = adjoint_gradient(grid, p, f, scheme=scheme, boundary=cfg.boundary)
    gnorm = coeff_norm_l2(G)
    new = replace(state, J_history=list(state.J_history) or [J0],
                  alpha_history=list(state.alpha_history),
                  grad_norm_history=list(state.grad_norm_history))
    if gnorm <= cfg.grad_tol:
        new.stop_reason = StopReason.GRAD_TOLERANCE
        return new

    line = _Line(grid, p.values, G.values, f.values, scheme)
    if fixed_alpha is not None:
        alpha = fixed_alpha
    else:
        slope = -grid.h * float(np.dot(G.values, G.values))
        search = {
            LineSearch.BACKTRACKING: _backtracking,
            LineSearch.GOLDEN_SECTION: _golden,
            LineSearch.QUADRATIC_FIT: _quadratic,
        }[cfg.line_search]
        alpha = search(line, J0, slope, cfg)
        if alpha is None or not line(alpha) < J0:
            new.stop_reason = StopReason.LINE_SEARCH_FAILURE
            return new

    new.iterate = CoefficientVector(grid, p.values - alpha * G.values)
    new.n = state.n + 1
    new.J_history.append(line(alpha))
    new.alpha_history.append(float(alpha))
    new.grad_norm_history.append(gnorm)
    return new


def _run(grid, p0, f, cfg, scheme, fixed_alpha, callback):
    state = InversionState(iterate=p0)
    J0 = objective(grid, p0, f, scheme)
    state.J_history.append(J0)
    state.j_tol = cfg.j_tol if cfg.j_tol is not None else 1e-12 * J0
    while True:
        if state.J <= state.j_tol:
            state.stop_reason = StopReason.J_TOLERANCE
            break
        if state.n >= cfg.max_iter:
            state.stop_reason = StopReason.MAX_ITER
            break
        state = descent_step(state, grid, f, cfg, scheme, fixed_alpha)
        if callback is not None:
            callback(state)
        if state.stop_reason is not None:
            break
    return state


def run_inversion(grid: Grid, p0: CoefficientVector, f: ObservedTrace, cfg: DescentConfig = DescentConfig(),
                  scheme=DEFAULT_SCHEME, callback=None) -> InversionState:
    """Steepest descent with line search until one of the stopping rules fires."""
    return _run(grid, p0, f, cfg, scheme, None, callback)


def landweber_run(grid: Grid, p0: CoefficientVector, f: ObservedTrace, cfg: DescentConfig = DescentConfig(),
                  scheme=DEFAULT_SCHEME, callback=None) -> InversionState:
    """Fixed-step iteration ``p <- p - landweber_alpha * grad J``; increases of J are recorded, not rejected."""
    return _run(grid, p0, f, cfg, scheme, cfg.landweber_alpha, callback)
