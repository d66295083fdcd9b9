import numpy as np
import pytest

from acougrad.experiments import canonical_grid, gaussian_potential
from acougrad.forward import solve_forward, trace_at_zero
from acougrad.grid import CoefficientVector, make_grid

ACCEPTANCE = []


def record_acceptance(label, passed, detail):
    ACCEPTANCE.append((label, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")


@pytest.fixture(scope="session")
def recovery():
    """Canonical fixture: L=1, T=2, N=50, M=200, Gaussian potential, exact data."""
    g = canonical_grid()
    q = CoefficientVector(g, gaussian_potential(g.x))
    f = trace_at_zero(solve_forward(g, q))
    return g, q, f


@pytest.fixture(scope="session")
def small():
    g = make_grid(1.0, 2.0, 20, 80)
    q = CoefficientVector(g, gaussian_potential(g.x))
    f = trace_at_zero(solve_forward(g, q))
    return g, q, f


def smooth_random(grid, rng, modes=4, amp=1.0):
    """Band-limited random profile with sup-norm at most ``amp``."""
    x = grid.x / grid.L
    v = np.zeros_like(x)
    for k in range(1, modes + 1):
        v += rng.normal() * np.cos(k * np.pi * x) / k + rng.normal() * np.sin(k * np.pi * x) / k
    return amp * v / np.max(np.abs(v))
