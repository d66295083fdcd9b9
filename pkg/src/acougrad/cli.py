"""Command-line front end.

Every numeric option can come from (lowest to highest precedence) the
built-in defaults, ``--preset``, a ``--config`` file of ``key = value``
lines, or the command line. Exit status: 0 success, 1 invalid input,
2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .adjoint import residual, solve_adjoint_continuous, solve_adjoint_discrete
from .errors import NumericalError, ValidationError
from .experiments import (
    ExperimentReport,
    as_coefficient,
    gaussian_potential,
    gradcheck_report,
    gradient_comparison_study,
    stability_study,
    synthesize_data,
    vars_scheme,
)
from .forward import Scheme, solve_forward, trace_at_zero
from .gradient import adjoint_gradient, continuous_gradient, gradient_fd_oracle
from .grid import CoefficientVector, coeff_norm_l2, make_grid
from .optimize import DescentConfig, landweber_run, run_inversion
from .transforms import impedance_profile, impedance_to_potential


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _floats(v):
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(x) for x in str(v).split(",") if x.strip()]


# name -> (converter, default, help, choices)
OPTIONS = {
    "L": (float, 1.0, "domain length", None),
    "T": (float, 2.0, "final time", None),
    "N": (int, 50, "space intervals", None),
    "M": (int, 200, "time intervals", None),
    "allow_unstable": (_bool, False, "skip the CFL check", None),
    "cfl_max": (float, 0.95, "largest accepted tau/h", None),
    "variant": (str, "explicit", "potential on layer j (explicit) or j+1 (hat)", ("explicit", "hat")),
    "start": (str, "taylor", "first time layer rule", ("taylor", "first")),
    "neumann": (str, "mirror", "discrete Neumann condition at x=0", ("mirror", "onesided")),
    "seed": (int, None, "random seed (default: $ACOUGRAD_SEED or 0)", None),
    "jobs": (int, 1, "worker threads for independent solves", None),
    "center": (float, 0.4, "centre of the Gaussian test potential", None),
    "width": (float, 50.0, "width parameter of the Gaussian test potential", None),
    "q_file": (str, None, "true potential / forward coefficient (coefficient CSV)", None),
    "p_file": (str, None, "current coefficient (coefficient CSV); default zero", None),
    "data_file": (str, None, "observed trace (trace CSV); default synthesized", None),
    "medium_file": (str, None, "medium profile (z,c,rho CSV)", None),
    "noise": (float, 0.0, "relative Gaussian noise level", None),
    "refine": (int, 1, "fine-grid factor for synthetic data", None),
    "kind": (str, "discrete", "adjoint flavour", ("discrete", "continuous")),
    "method": (str, "discrete", "gradient route", ("discrete", "continuous", "fd")),
    "eps": (float, 1e-5, "finite-difference step", None),
    "eps_list": (_floats, [1e-2, 1e-3, 1e-4, 1e-5], "comma-separated FD steps", None),
    "boundary": (str, "exact", "gradient value at node 0", ("exact", "replicate", "zero")),
    "refinements": (int, 3, "number of grid halvings", None),
    "p_scale": (float, 0.0, "comparison coefficient = p_scale * true potential", None),
    "max_iter": (int, 200, "iteration limit", None),
    "j_tol": (float, None, "stop when J <= j_tol (default 1e-12 J(p0))", None),
    "grad_tol": (float, 1e-8, "stop when |grad J| <= grad_tol", None),
    "line_search": (str, "backtracking", "step rule", ("backtracking", "golden", "quadratic")),
    "alpha_init": (float, 1.0, "first trial step", None),
    "armijo_c": (float, 1e-4, "sufficient-decrease constant", None),
    "shrink": (float, 0.5, "backtracking factor", None),
    "alpha": (float, 0.1, "fixed Landweber step", None),
    "steps": (int, 10000, "time steps for the stability runs", None),
    "ratio_stable": (float, 0.95, "tau/h of the bounded run", None),
    "ratio_unstable": (float, 1.05, "tau/h of the blow-up run", None),
}

GRID = ["L", "T", "N", "M", "allow_unstable", "cfl_max"]
SCHEME = ["variant", "start", "neumann"]
FIXTURE = ["center", "width", "q_file"]
DESCENT = ["max_iter", "j_tol", "grad_tol", "line_search", "alpha_init", "armijo_c", "shrink", "boundary"]

COMMANDS = {
    "forward": ("solve the direct problem", GRID + SCHEME + FIXTURE),
    "adjoint": ("solve a dual problem", GRID + SCHEME + FIXTURE + ["p_file", "data_file", "kind"]),
    "gradient": ("gradient of the misfit", GRID + SCHEME + FIXTURE + ["p_file", "data_file", "method", "eps",
                                                                      "boundary", "jobs"]),
    "gradcheck": ("adjoint vs finite-difference report", GRID + SCHEME + FIXTURE + ["p_file", "data_file",
                                                                                   "eps_list", "boundary", "jobs"]),
    "compare-gradients": ("discrete vs continuous gradient under refinement",
                          GRID + SCHEME + ["center", "width", "refinements", "p_scale"]),
    "invert": ("steepest descent with line search", GRID + SCHEME + FIXTURE + DESCENT
               + ["p_file", "data_file", "noise", "refine"]),
    "landweber": ("fixed-step iteration", GRID + SCHEME + FIXTURE + ["max_iter", "j_tol", "grad_tol", "alpha",
                                                                     "boundary", "p_file", "data_file", "noise",
                                                                     "refine"]),
    "synthesize": ("synthetic boundary data", GRID + SCHEME + FIXTURE + ["noise", "refine"]),
    "transform": ("medium profile -> potential", ["L", "N", "medium_file"]),
    "stability": ("bounded vs blow-up demonstration", ["L", "N", "steps", "ratio_stable", "ratio_unstable"]
                  + SCHEME + ["center", "width"]),
}

PRESETS = {
    "recovery": {"L": 1.0, "T": 2.0, "N": 50, "M": 200},
    "small": {"L": 1.0, "T": 2.0, "N": 20, "M": 80},
    "tiny": {"L": 1.0, "T": 1.0, "N": 2, "M": 4},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser():
    parser = _Parser(prog="acougrad",
                     description="Adjoint gradients and coefficient inversion for the 1D wave equation.",
                     epilog="exit status: 0 success, 1 invalid input, 2 numerical failure")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, (help_, opts) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--preset", choices=sorted(PRESETS), default=argparse.SUPPRESS)
        sp.add_argument("--config", metavar="FILE", default=argparse.SUPPRESS,
                        help="key = value file; flags override it")
        sp.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=OPTIONS["seed"][2])
        for opt in opts:
            conv, default, help_o, choices = OPTIONS[opt]
            flag = "--" + opt.replace("_", "-")
            if conv is _bool:
                sp.add_argument(flag, action="store_true", default=argparse.SUPPRESS, help=help_o)
            else:
                sp.add_argument(flag, dest=opt, type=str, choices=choices, default=argparse.SUPPRESS,
                                help=f"{help_o} (default: {default})")
    return parser


def resolve(args) -> dict:
    allowed = set(COMMANDS[args.command][1]) | {"seed"}
    merged = {k: OPTIONS[k][1] for k in allowed}
    env_seed = os.environ.get("ACOUGRAD_SEED")
    if env_seed is not None:
        merged["seed"] = env_seed
    ns = vars(args)
    layers = []
    if "preset" in ns:
        layers.append(("preset " + ns["preset"], {k: v for k, v in PRESETS[ns["preset"]].items() if k in allowed}))
    if "config" in ns:
        layers.append((ns["config"], io.read_config(ns["config"])))
    layers.append(("command line", {k: v for k, v in ns.items() if k in OPTIONS}))
    for source, layer in layers:
        for k, v in layer.items():
            if k not in allowed:
                raise ValidationError(f"{source}: unknown key {k!r} for '{args.command}'")
            merged[k] = v
    cfg = {}
    for k, v in merged.items():
        conv, _, _, choices = OPTIONS[k]
        if v is None:
            cfg[k] = None
            continue
        try:
            cfg[k] = conv(v)
        except (TypeError, ValueError):
            raise ValidationError(f"invalid value for {k}: {v!r}") from None
        if choices and cfg[k] not in choices:
            raise ValidationError(f"{k} must be one of {', '.join(choices)}")
    if cfg.get("seed") is None:
        cfg["seed"] = 0
    cfg["out"] = Path(args.out)
    return cfg


def _grid(cfg):
    return make_grid(cfg["L"], cfg["T"], cfg["N"], cfg["M"], allow_unstable=cfg["allow_unstable"],
                     cfl_max=cfg["cfl_max"])


def _scheme(cfg):
    return Scheme(cfg["variant"], cfg["start"], cfg["neumann"])


def _q_true(cfg, grid):
    if cfg.get("q_file"):
        return io.read_coeff_csv(cfg["q_file"], grid)
    c, w = cfg["center"], cfg["width"]
    return CoefficientVector(grid, gaussian_potential(grid.x, c, w))


def _p(cfg, grid):
    if cfg.get("p_file"):
        return io.read_coeff_csv(cfg["p_file"], grid)
    return CoefficientVector.zeros(grid)


def _data(cfg, grid, scheme):
    if cfg.get("data_file"):
        return io.read_trace_csv(cfg["data_file"], grid)
    return synthesize_data(grid, _q_true(cfg, grid), cfg.get("noise", 0.0), cfg["seed"],
                           cfg.get("refine", 1), scheme)


def _descent(cfg, **extra):
    keys = ("max_iter", "j_tol", "grad_tol", "line_search", "alpha_init", "armijo_c", "shrink", "boundary")
    return DescentConfig(**{k: cfg[k] for k in keys if k in cfg}, **extra)


def _say(msg):
    print(msg)


def cmd_forward(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    y = solve_forward(grid, _q_true(cfg, grid), scheme=scheme)
    io.write_field_csv(cfg["out"] / "forward_field.csv", y)
    io.write_trace_csv(cfg["out"] / "trace.csv", trace_at_zero(y))
    _say(f"wrote {cfg['out'] / 'forward_field.csv'} and {cfg['out'] / 'trace.csv'}")


def cmd_adjoint(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    p, f = _p(cfg, grid), _data(cfg, grid, scheme)
    r = residual(trace_at_zero(solve_forward(grid, p, scheme=scheme)), f)
    solver = solve_adjoint_discrete if cfg["kind"] == "discrete" else solve_adjoint_continuous
    phi = solver(grid, p, r, scheme=scheme)
    path = cfg["out"] / f"adjoint_{cfg['kind']}.csv"
    io.write_field_csv(path, phi)
    _say(f"wrote {path}")


def cmd_gradient(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    p, f = _p(cfg, grid), _data(cfg, grid, scheme)
    if cfg["method"] == "discrete":
        G = adjoint_gradient(grid, p, f, scheme=scheme, boundary=cfg["boundary"])[1]
    elif cfg["method"] == "continuous":
        G = continuous_gradient(grid, p, f, scheme=scheme)
    else:
        G = gradient_fd_oracle(grid, p, f, cfg["eps"], scheme=scheme, jobs=cfg["jobs"])
    path = cfg["out"] / f"gradient_{cfg['method']}.csv"
    io.write_coeff_csv(path, G)
    _say(f"wrote {path} (norm {coeff_norm_l2(G):.6g})")


def _emit_report(cfg, rep: ExperimentReport, stem):
    io.write_report_json(cfg["out"] / f"{stem}.json", rep)
    io.write_series_csv(cfg["out"] / f"{stem}_series.csv", rep)
    summary = ", ".join(f"{k}={v:.6g}" for k, v in rep.metrics.items())
    _say(f"wrote {cfg['out'] / (stem + '.json')}: {summary}")


def cmd_gradcheck(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    p, f = _p(cfg, grid), _data(cfg, grid, scheme)
    rep = gradcheck_report(grid, p, f, cfg["eps_list"], scheme=scheme, jobs=cfg["jobs"], boundary=cfg["boundary"])
    rep.seed = cfg["seed"]
    _emit_report(cfg, rep, "gradcheck")


def cmd_compare_gradients(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    c, w, s = cfg["center"], cfg["width"], cfg["p_scale"]
    rep = gradient_comparison_study(grid, cfg["refinements"], lambda x: s * gaussian_potential(x, c, w),
                                    lambda x: gaussian_potential(x, c, w), scheme=scheme)
    rep.seed = cfg["seed"]
    _emit_report(cfg, rep, "compare_gradients")


def _inversion_report(name, cfg, grid, scheme, state, q):
    rep = ExperimentReport(name, seed=cfg["seed"], params={
        "grid": grid.params(), "scheme": vars_scheme(scheme), "noise_level": cfg["noise"],
        "refine": cfg["refine"], "max_iter": cfg["max_iter"], "stop_reason": state.stop_reason.value})
    J = state.J_history
    rep.add_metric("iterations", state.n)
    rep.add_metric("J_initial", J[0])
    rep.add_metric("J_final", J[-1])
    rep.add_metric("J_ratio", J[-1] / J[0] if J[0] > 0 else 0.0)
    if q is not None and coeff_norm_l2(q) > 0:
        err = coeff_norm_l2(CoefficientVector(grid, state.iterate.values - q.values)) / coeff_norm_l2(q)
        rep.add_metric("rel_l2_error", err)
    rate = state.rate_estimate()
    if np.isfinite(rate):
        rep.add_metric("log_J_rate", rate)
    rep.series = {"J": J, "alpha": state.alpha_history, "grad_norm": state.grad_norm_history,
                  "iterate": state.iterate.values.tolist()}
    return rep


def _invert(cfg, name, runner, descent):
    grid, scheme = _grid(cfg), _scheme(cfg)
    p0, f = _p(cfg, grid), _data(cfg, grid, scheme)
    q = None if cfg.get("data_file") else _q_true(cfg, grid)
    state = runner(grid, p0, f, descent, scheme=scheme)
    io.write_coeff_csv(cfg["out"] / f"{name}_iterate.csv", state.iterate)
    _emit_report(cfg, _inversion_report(name, cfg, grid, scheme, state, q), name)


def cmd_invert(cfg):
    _invert(cfg, "invert", run_inversion, _descent(cfg))


def cmd_landweber(cfg):
    _invert(cfg, "landweber", landweber_run, _descent(cfg, landweber_alpha=cfg["alpha"]))


def cmd_synthesize(cfg):
    grid, scheme = _grid(cfg), _scheme(cfg)
    f = synthesize_data(grid, _q_true(cfg, grid), cfg["noise"], cfg["seed"], cfg["refine"], scheme)
    io.write_trace_csv(cfg["out"] / "data.csv", f)
    _say(f"wrote {cfg['out'] / 'data.csv'}")


def cmd_transform(cfg):
    if not cfg.get("medium_file"):
        raise ValidationError("transform needs --medium-file")
    medium = io.read_medium_csv(cfg["medium_file"])
    imp = impedance_profile(medium)
    # only x matters here; T is chosen so the grid passes the CFL check
    grid = make_grid(cfg["L"], cfg["L"], cfg["N"], 2 * cfg["N"])
    q = impedance_to_potential(imp, grid)
    io.write_coeff_csv(cfg["out"] / "potential.csv", q)
    rep = ExperimentReport("transform", seed=None, params={"L": cfg["L"], "N": cfg["N"],
                                                            "medium_file": str(cfg["medium_file"])})
    rep.add_metric("total_travel_time", imp.x[-1])
    rep.series = {"z": medium.z.tolist(), "travel_time": imp.x.tolist(), "impedance": imp.sigma.tolist()}
    _emit_report(cfg, rep, "transform")


def cmd_stability(cfg):
    L, N, steps = cfg["L"], cfg["N"], cfg["steps"]
    h = L / N
    stable = make_grid(L, cfg["ratio_stable"] * h * steps, N, steps, allow_unstable=True)
    unstable = make_grid(L, cfg["ratio_unstable"] * h * steps, N, steps, allow_unstable=True)
    c, w = cfg["center"], cfg["width"]
    rep = stability_study(stable, unstable, lambda x: gaussian_potential(x, c, w), scheme=_scheme(cfg))
    rep.seed = cfg["seed"]
    _emit_report(cfg, rep, "stability")


HANDLERS = {
    "forward": cmd_forward,
    "adjoint": cmd_adjoint,
    "gradient": cmd_gradient,
    "gradcheck": cmd_gradcheck,
    "compare-gradients": cmd_compare_gradients,
    "invert": cmd_invert,
    "landweber": cmd_landweber,
    "synthesize": cmd_synthesize,
    "transform": cmd_transform,
    "stability": cmd_stability,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve(args)
        HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"acougrad: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"acougrad: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(cli_main())
