from fractions import Fraction

import numpy as np
import pytest

from acougrad.adjoint import AdjointField, Residual, solve_adjoint_discrete
from acougrad.errors import ShapeMismatch, ValidationError
from acougrad.experiments import gaussian_potential
from acougrad.forward import Scheme, solve_forward, trace_at_zero
from acougrad.gradient import (adjoint_gradient, gradient_continuous, gradient_discrete,
                               gradient_discrete_terms, gradient_fd_oracle)
from acougrad.grid import CoefficientVector, Field, ObservedTrace, make_grid
from acougrad.optimize import objective

from conftest import smooth_random
from reference import exact_partials, forward as ref_forward, misfit
from test_kernels import SCHEMES


def _rel_inf(a, b):
    return np.max(np.abs(a - b)) / (np.max(np.abs(b)) + 1e-30)


def _eps(p):
    return 1e-5 * max(1.0, float(np.max(np.abs(p.values))))


def test_zero_adjoint_gives_zero_gradient(small):
    g, q, f = small
    y = solve_forward(g, q)
    phi = solve_adjoint_discrete(g, q, Residual(g, np.zeros(g.M + 1)))
    assert not np.any(gradient_discrete(y, phi, g).values)
    assert not np.any(gradient_continuous(y, Field(g, np.zeros((g.N + 1, g.M + 1))), g).values)


def test_zero_start_matches_fd(small):
    g, q, f = small
    p = CoefficientVector.zeros(g)
    _, G, _, _ = adjoint_gradient(g, p, f)
    assert _rel_inf(G.values, gradient_fd_oracle(g, p, f, 1e-5).values) <= 1e-4


@pytest.mark.parametrize("scheme", SCHEMES, ids=str)
def test_smooth_random_matches_fd(scheme):
    g = make_grid(1, 2, 20, 80)
    rng = np.random.default_rng(11)
    p = CoefficientVector(g, smooth_random(g, rng, amp=2))
    f = trace_at_zero(solve_forward(g, CoefficientVector(g, gaussian_potential(g.x)), scheme=scheme))
    _, G, _, _ = adjoint_gradient(g, p, f, scheme=scheme)
    Gfd = gradient_fd_oracle(g, p, f, _eps(p), scheme=scheme, jobs=4)
    assert _rel_inf(G.values, Gfd.values) <= 1e-4


def test_directional_derivatives(small):
    g, q, f = small
    rng = np.random.default_rng(12)
    p = CoefficientVector(g, smooth_random(g, rng, amp=2))
    _, G, _, _ = adjoint_gradient(g, p, f)
    s = 1e-5
    for _ in range(10):
        d = smooth_random(g, rng)
        fd = (objective(g, CoefficientVector(g, p.values + s * d), f)
              - objective(g, CoefficientVector(g, p.values - s * d), f)) / (2 * s)
        adj = g.h * np.dot(G.values, d)
        assert abs(adj - fd) <= 1e-3 * abs(fd)


@pytest.mark.parametrize("N,M", [(2, 4), (3, 6)])
def test_matches_exact_rational_partials(N, M):
    # L = T = 1 gives r2 = 1/4 on both grids; the exact partials pin the normalization
    g = make_grid(1, 1, N, M)
    tau = Fraction(1, M)
    p = [Fraction(k + 1, 3) * (-1) ** k for k in range(N + 1)]
    f = [Fraction(j, 7) - Fraction(1, 2) for j in range(M + 1)]
    exact = exact_partials(p, f, M, Fraction(1, 4), tau * tau, tau)
    _, G, _, _ = adjoint_gradient(g, CoefficientVector(g, [float(v) for v in p]),
                                  ObservedTrace(g, [float(v) for v in f]))
    np.testing.assert_allclose(g.h * G.values, [float(e) for e in exact], rtol=1e-13, atol=1e-15)


def test_scaling_residual_doubles_gradient(small):
    g, q, f = small
    p = CoefficientVector(g, 0.5 * q.values)
    y = solve_forward(g, p)
    r = trace_at_zero(y).values - f.values
    G1 = gradient_discrete(y, solve_adjoint_discrete(g, p, Residual(g, r)), g).values
    G2 = gradient_discrete(y, solve_adjoint_discrete(g, p, Residual(g, 2 * r)), g).values
    np.testing.assert_array_equal(G2, 2 * G1)


def test_constant_quadrature_normalization():
    g = make_grid(1, 1, 10, 20)
    ones = Field(g, np.ones((g.N + 1, g.M + 1)))
    G = gradient_continuous(ones, ones, g).values
    np.testing.assert_allclose(G[:-1], 1.0, rtol=1e-14)
    assert G[-1] == 0.0


def test_initial_term_switch(small):
    g, q, f = small
    y = solve_forward(g, CoefficientVector.zeros(g))
    psi = Field(g, np.outer(np.ones(g.N + 1), g.t ** 2))
    with_term = gradient_continuous(y, psi, g).values
    without = gradient_continuous(y, psi, g, include_initial_term=False).values
    assert not np.any(without)
    # psi_t(x, 0) of t^2 is zero, captured exactly by the one-sided stencil
    np.testing.assert_allclose(with_term, 0.0, atol=1e-12)


def test_boundary_policies(small):
    g, q, f = small
    p = CoefficientVector.zeros(g)
    _, Ge, y, phi = adjoint_gradient(g, p, f)
    Gr = gradient_discrete(y, phi, g, boundary="replicate").values
    Gz = gradient_discrete(y, phi, g, boundary="zero").values
    assert Gr[0] == Gr[1] and Gz[0] == 0.0
    np.testing.assert_array_equal(Ge.values[1:], Gr[1:])
    assert Ge.values[-1] == Gr[-1] == Gz[-1] == 0.0
    with pytest.raises(ValidationError):
        gradient_discrete(y, phi, g, boundary="mirror")


def test_onesided_scheme_has_inactive_node_zero(small):
    g, q, f = small
    sch = Scheme(neumann="onesided")
    _, G, _, _ = adjoint_gradient(g, CoefficientVector.zeros(g), f, scheme=sch)
    assert G.values[0] == 0.0


def test_terms_sum_to_gradient(small):
    g, q, f = small
    _, G, y, phi = adjoint_gradient(g, CoefficientVector(g, 0.3 * q.values), f)
    corr, init = gradient_discrete_terms(y, phi, g)
    np.testing.assert_array_equal(G.values, corr + init)


def test_shape_mismatch(small):
    g, q, f = small
    y = solve_forward(g, q)
    g2 = make_grid(1, 2, 10, 40)
    bad = AdjointField(g2, np.zeros((11, 41)), lead=np.zeros((11, 2)))
    with pytest.raises(ShapeMismatch):
        gradient_discrete(y, bad, g)
    with pytest.raises(ShapeMismatch):
        gradient_continuous(y, Field(g2, np.zeros((11, 41))), g)


def test_fd_at_minimum_is_small(small):
    g, q, f = small
    eps = 1e-4
    G = gradient_fd_oracle(g, q, f, eps).values
    # J(q +- eps e_i) = O(eps^2) and the quotient divides by 2 eps h
    assert np.max(np.abs(G)) <= 10 * eps


def test_fd_richardson_order(small):
    g, q, f = small
    p = CoefficientVector(g, 0.5 * q.values)
    G = [gradient_fd_oracle(g, p, f, e).values for e in (4e-2, 2e-2, 1e-2)]
    d1 = np.max(np.abs(G[0] - G[1]))
    d2 = np.max(np.abs(G[1] - G[2]))
    assert 3.5 < d1 / d2 < 4.5


def test_fd_zero_data_fixture_exact():
    # f = 0, p = 0 on N=2, M=4: every coordinate perturbation moves the initial layer
    g = make_grid(1, 1, 2, 4)
    eps = Fraction(1, 1024)
    tau = Fraction(1, 4)
    f = [Fraction(0)] * 5
    expected = []
    for i in range(3):
        up = [Fraction(0)] * 3
        dn = [Fraction(0)] * 3
        up[i], dn[i] = eps, -eps
        Jp = misfit(ref_forward(up, 4, Fraction(1, 4), tau * tau), f, tau)
        Jm = misfit(ref_forward(dn, 4, Fraction(1, 4), tau * tau), f, tau)
        expected.append((Jp - Jm) / (2 * eps * Fraction(1, 2)))
    got = gradient_fd_oracle(g, CoefficientVector.zeros(g), ObservedTrace(g, np.zeros(5)), float(eps)).values
    np.testing.assert_allclose(got, [float(e) for e in expected], atol=1e-14)


def test_fd_jobs_do_not_change_result(small):
    g, q, f = small
    p = CoefficientVector(g, 0.2 * q.values)
    a = gradient_fd_oracle(g, p, f, 1e-5).values
    b = gradient_fd_oracle(g, p, f, 1e-5, jobs=3).values
    np.testing.assert_array_equal(a, b)


def test_fd_rejects_bad_eps(small):
    g, q, f = small
    with pytest.raises(ValidationError):
        gradient_fd_oracle(g, q, f, 0.0)
