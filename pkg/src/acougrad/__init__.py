"""Coefficient inverse problem for the 1D wave equation with a potential.

Forward and dual solvers on a uniform grid, exact discrete-adjoint
gradients, a finite-difference oracle, and steepest-descent inversion.
"""

from .adjoint import AdjointField, Residual, residual, solve_adjoint_continuous, solve_adjoint_discrete
from .errors import (AcougradError, CflViolation, DomainTooShort, NonFiniteBlowup, NonPositiveExtent,
                     NonPositiveImpedance, NonPositiveSpeed, NumericalError, ShapeMismatch, ValidationError)
from .forward import DEFAULT_SCHEME, InitialData, Scheme, solve_forward, solve_perturbation, trace_at_zero
from .gradient import (adjoint_gradient, continuous_gradient, gradient_continuous, gradient_discrete,
                       gradient_fd_oracle)
from .grid import CoefficientVector, Field, Grid, ObservedTrace, make_grid
from .kernels import BACKEND
from .optimize import DescentConfig, InversionState, LineSearch, StopReason, descent_step, landweber_run, \
    objective, run_inversion
from .transforms import ImpedanceProfile, MediumProfile, impedance_to_potential, medium_to_potential, \
    travel_time_map

__version__ = "0.1.0"
