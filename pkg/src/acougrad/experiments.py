"""Reproducible studies built on the solvers: data synthesis, gradient checks,
grid-refinement comparison of gradient formulas, recovery and stability runs.

Reports hold only deterministic quantities (no wall-clock timings), so a
fixed configuration and seed always serialize to the same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adjoint import residual, solve_adjoint_continuous, solve_adjoint_discrete
from .errors import NonFiniteBlowup, ValidationError
from .forward import DEFAULT_SCHEME, InitialData, solve_forward, trace_at_zero
from .gradient import gradient_continuous, gradient_discrete, gradient_discrete_terms, gradient_fd_oracle
from .grid import CoefficientVector, Grid, ObservedTrace, coeff_norm_l2, make_grid
from .optimize import DescentConfig, objective, run_inversion


def gaussian_potential(x, center=0.4, width=50.0):
    return np.exp(-width * (np.asarray(x) - center) ** 2)


def canonical_grid(N=50, M=200):
    return make_grid(1.0, 2.0, N, M)


@dataclass
class ExperimentReport:
    name: str
    params: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        self.check()

    def check(self):
        for k, v in self.metrics.items():
            if not math.isfinite(v):
                raise ValidationError(f"metric {k!r} is not finite ({v!r})")

    def add_metric(self, key, value):
        value = float(value)
        if not math.isfinite(value):
            raise ValidationError(f"metric {key!r} is not finite ({value!r})")
        self.metrics[key] = value

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "metrics": {k: float(v) for k, v in self.metrics.items()},
            "series": {k: [float(x) for x in v] for k, v in self.series.items()},
            "seed": self.seed,
        }


def as_coefficient(grid: Grid, source) -> CoefficientVector:
    """Callable, CoefficientVector (interpolated if on another grid) or array -> grid samples."""
    if isinstance(source, CoefficientVector):
        if source.grid.N == grid.N and source.grid.L == grid.L:
            return CoefficientVector(grid, source.values)
        return CoefficientVector(grid, np.interp(grid.x, source.grid.x, source.values))
    if callable(source):
        return CoefficientVector(grid, source(grid.x))
    return CoefficientVector(grid, source)


def interior_norm(grid, v):
    return float(np.sqrt(grid.h * np.sum(np.asarray(v)[1:-1] ** 2)))


def synthesize_data(grid: Grid, q_true, noise_level=0.0, seed=0, refine=1,
                    scheme=DEFAULT_SCHEME, return_exact=False):
    """Trace of the forward solution for ``q_true`` plus seeded Gaussian noise.

    The noise standard deviation is ``noise_level * max_j |trace_j|``. With
    ``refine > 1`` the trace is computed on a grid ``refine`` times finer and
    restricted back, so that inversions do not reuse the data discretization.
    """
    if noise_level < 0:
        raise ValidationError("noise_level must be non-negative")
    if int(refine) != refine or refine < 1:
        raise ValidationError("refine must be a positive integer")
    refine = int(refine)
    fine = grid if refine == 1 else grid.refined(refine)
    q = as_coefficient(fine, q_true)
    exact = trace_at_zero(solve_forward(fine, q, scheme=scheme)).values[::refine]
    noise = np.zeros_like(exact)
    if noise_level > 0:
        rng = np.random.default_rng(seed)
        noise = rng.normal(0.0, noise_level * np.max(np.abs(exact)), size=exact.shape)
    f = ObservedTrace(grid, exact + noise)
    if return_exact:
        return f, ObservedTrace(grid, exact)
    return f


def gradcheck_report(grid: Grid, p, f: ObservedTrace, eps_list=(1e-2, 1e-3, 1e-4, 1e-5),
                     scheme=DEFAULT_SCHEME, jobs=1, boundary="exact") -> ExperimentReport:
    """Adjoint gradient against central differences for each ``eps``."""
    p = as_coefficient(grid, p)
    y = solve_forward(grid, p, scheme=scheme)
    phi = solve_adjoint_discrete(grid, p, residual(trace_at_zero(y), f), scheme=scheme)
    G = gradient_discrete(y, phi, grid, boundary=boundary).values
    errs = []
    for eps in eps_list:
        Gfd = gradient_fd_oracle(grid, p, f, eps, scheme=scheme, jobs=jobs).values
        errs.append(float(np.max(np.abs(G - Gfd)) / (np.max(np.abs(Gfd)) + 1e-30)))
    rep = ExperimentReport("gradcheck", params={"grid": grid.params(), "scheme": vars_scheme(scheme),
                                                 "eps": [float(e) for e in eps_list], "boundary": boundary})
    rep.add_metric("max_rel_error_min", min(errs))
    rep.add_metric("max_rel_error_last", errs[-1])
    rep.add_metric("grad_norm", coeff_norm_l2(CoefficientVector(grid, G)))
    order = _fit_order(eps_list, errs)
    if order is not None:
        rep.add_metric("eps_order", order)
    rep.series = {"eps": list(eps_list), "max_rel_error": errs, "gradient": G.tolist()}
    return rep


def _fit_order(steps, errs):
    steps = np.asarray(steps, dtype=float)
    errs = np.asarray(errs, dtype=float)
    ok = errs > 0
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(steps[ok]), np.log(errs[ok]), 1)[0])


def vars_scheme(scheme):
    return {"variant": scheme.variant, "start": scheme.start, "neumann": scheme.neumann}


def gradient_comparison_study(base_grid: Grid, refinements: int, p, q_true,
                              scheme=DEFAULT_SCHEME) -> ExperimentReport:
    """Discrete vs discretized-continuous gradient on ``refinements + 1`` nested grids.

    Norms run over interior nodes 1..N-1, where both formulas are defined
    (at node 0 the discrete gradient carries the half-cell weight of the
    mirror boundary).
    """
    hs, disc, literal, init_mag = [], [], [], []
    grid = base_grid
    for level in range(refinements + 1):
        if level:
            grid = grid.refined(2)
        pg = as_coefficient(grid, p)
        f = synthesize_data(grid, q_true, scheme=scheme)
        y = solve_forward(grid, pg, scheme=scheme)
        r = residual(trace_at_zero(y), f)
        phi = solve_adjoint_discrete(grid, pg, r, scheme=scheme)
        psi = solve_adjoint_continuous(grid, pg, r, scheme=scheme)
        corr, init = gradient_discrete_terms(y, phi, grid)
        Gd = gradient_discrete(y, phi, grid).values
        Gc = gradient_continuous(y, psi, grid).values
        Gl = gradient_continuous(y, psi, grid, include_initial_term=False).values
        nd = interior_norm(grid, Gd)
        hs.append(grid.h)
        if nd == 0.0:
            disc.append(0.0)
            literal.append(0.0)
            init_mag.append(0.0)
            continue
        disc.append(interior_norm(grid, Gd - Gc) / nd)
        literal.append(interior_norm(grid, Gd - Gl) / nd)
        init_mag.append(interior_norm(grid, init) / nd)

    rep = ExperimentReport("compare-gradients", params={
        "base_grid": base_grid.params(), "refinements": refinements, "scheme": vars_scheme(scheme)})
    order = _fit_order(hs, disc)
    rep.add_metric("fitted_order", order if order is not None else 0.0)
    rep.add_metric("final_discrepancy", disc[-1])
    rep.add_metric("monotone", float(all(b <= a for a, b in zip(disc, disc[1:]))))
    rep.add_metric("initial_term_fraction_coarse", init_mag[0])
    rep.series = {"h": hs, "discrepancy": disc, "discrepancy_without_initial_term": literal,
                  "initial_term_fraction": init_mag}
    return rep


def recovery_study(grid: Grid, q_true, p0=None, noise_level=0.0, cfg=DescentConfig(), seed=0,
                   refine=1, scheme=DEFAULT_SCHEME) -> ExperimentReport:
    q = as_coefficient(grid, q_true)
    p0 = CoefficientVector.zeros(grid) if p0 is None else as_coefficient(grid, p0)
    f, exact = synthesize_data(grid, q_true, noise_level, seed, refine, scheme, return_exact=True)
    state = run_inversion(grid, p0, f, cfg, scheme=scheme)
    err = coeff_norm_l2(CoefficientVector(grid, state.iterate.values - q.values)) / coeff_norm_l2(q)

    rep = ExperimentReport("invert", seed=seed, params={
        "grid": grid.params(), "scheme": vars_scheme(scheme), "noise_level": noise_level,
        "refine": refine, "line_search": cfg.line_search.value, "max_iter": cfg.max_iter,
        "stop_reason": state.stop_reason.value})
    J = state.J_history
    rep.add_metric("iterations", state.n)
    rep.add_metric("J_initial", J[0])
    rep.add_metric("J_final", J[-1])
    rep.add_metric("J_ratio", J[-1] / J[0] if J[0] > 0 else 0.0)
    rep.add_metric("rel_l2_error", err)
    rate = state.rate_estimate()
    if math.isfinite(rate):
        rep.add_metric("log_J_rate", rate)
    if noise_level > 0:
        eta = f.values[1:] - exact.values[1:]
        floor = grid.tau * float(np.dot(eta, eta))
        rep.add_metric("noise_floor", floor)
        plateau = next((k for k, v in enumerate(J) if v <= 1.1 * floor), -1)
        rep.add_metric("plateau_iteration", plateau)
    rep.series = {"J": J, "alpha": state.alpha_history, "grad_norm": state.grad_norm_history,
                  "iterate": state.iterate.values.tolist(), "q_true": q.values.tolist()}
    rep.state = state
    return rep


def stability_study(grid_stable: Grid, grid_unstable: Grid, q_true=gaussian_potential,
                    scheme=DEFAULT_SCHEME) -> ExperimentReport:
    """Bounded run below the CFL limit, blow-up above it."""
    rep = ExperimentReport("stability", params={
        "stable": grid_stable.params(), "unstable": grid_unstable.params(), "scheme": vars_scheme(scheme)})
    q = as_coefficient(grid_stable, q_true)
    y = solve_forward(grid_stable, q, scheme=scheme)
    amp = np.max(np.abs(y.values)) / np.max(np.abs(q.values))
    rep.add_metric("stable_ratio", grid_stable.cfl_ratio)
    rep.add_metric("stable_amplification", amp)
    rep.add_metric("unstable_ratio", grid_unstable.cfl_ratio)
    qu = as_coefficient(grid_unstable, q_true)
    try:
        solve_forward(grid_unstable, qu, scheme=scheme)
    except NonFiniteBlowup as exc:
        rep.add_metric("blowup_layer", exc.j)
        rep.add_metric("blowup_node", exc.i)
        rep.add_metric("blowup_time", exc.j * grid_unstable.tau)
    else:
        rep.add_metric("blowup_layer", -1)
    rep.series = {"stable_trace": y.values[0].tolist()}
    return rep


def dalembert_error(grid: Grid, pulse=lambda x: np.exp(-50.0 * (x - 0.5) ** 2), scheme=DEFAULT_SCHEME):
    """Max deviation from ``(pulse(x+t) + pulse(x-t))/2`` where boundaries cannot yet be felt (q = 0)."""
    zero = CoefficientVector.zeros(grid)
    y = solve_forward(grid, zero, InitialData.explicit(CoefficientVector(grid, pulse(grid.x))), scheme=scheme)
    X, Tm = np.meshgrid(grid.x, grid.t, indexing="ij")
    exact = 0.5 * (pulse(X + Tm) + pulse(X - Tm))
    region = Tm < np.minimum(X, grid.L - X)
    return float(np.max(np.abs(y.values - exact)[region]))
