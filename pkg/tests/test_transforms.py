import numpy as np
import pytest

from acougrad.errors import DomainTooShort, NonPositiveImpedance, NonPositiveSpeed, ValidationError
from acougrad.grid import make_grid
from acougrad.transforms import (ImpedanceProfile, MediumProfile, impedance_profile, impedance_to_potential,
                                 medium_to_potential, travel_time_map)


def _medium(z, c, rho=None):
    return MediumProfile(z, c, np.ones_like(z) if rho is None else rho)


def test_unit_speed_is_identity():
    z = np.linspace(0, 2, 41)
    np.testing.assert_allclose(travel_time_map(_medium(z, np.ones_like(z))), z, rtol=0, atol=1e-15)


def test_constant_speed_scales():
    z = np.linspace(0, 2, 41)
    np.testing.assert_allclose(travel_time_map(_medium(z, 2 * np.ones_like(z))), z / 2, atol=1e-15)


def test_linear_speed_log_antiderivative():
    z = np.linspace(0, 1, 101)
    x = travel_time_map(_medium(z, 1 + z))
    assert abs(x[-1] - np.log(2)) <= 1e-4
    assert x[0] == 0.0 and np.all(np.diff(x) > 0)


def test_invalid_media():
    z = np.linspace(0, 1, 5)
    with pytest.raises(NonPositiveSpeed):
        _medium(z, np.array([1, 1, 0, 1, 1.0]))
    with pytest.raises(ValidationError):
        _medium(z, np.ones(5), -np.ones(5))
    with pytest.raises(ValidationError):
        _medium(z[::-1], np.ones(5))
    with pytest.raises(ValidationError):
        _medium(z[:2], np.ones(2))
    with pytest.raises(NonPositiveImpedance):
        ImpedanceProfile(z, np.array([1, 2, -1, 1, 1.0]))


def test_constant_impedance_gives_zero_potential():
    g = make_grid(1, 2, 40, 160)
    x = np.linspace(0, 1, 11)
    q = impedance_to_potential(ImpedanceProfile(x, 3.0 * np.ones_like(x)), g)
    np.testing.assert_allclose(q.values, 0.0, atol=1e-12)


def test_exponential_impedance_constant_potential():
    g = make_grid(1, 2, 50, 200)
    q = impedance_to_potential(ImpedanceProfile(g.x, np.exp(2 * 0.5 * g.x)), g)
    np.testing.assert_allclose(q.values, 0.25, atol=1e-6)


def test_scale_invariance():
    g = make_grid(1, 2, 50, 200)
    x = np.linspace(0, 1.2, 300)
    s = np.exp(np.sin(3 * x)) * (1 + x ** 2)
    a = impedance_to_potential(ImpedanceProfile(x, s), g).values
    b = impedance_to_potential(ImpedanceProfile(x, 7.5 * s), g).values
    np.testing.assert_allclose(b, a, rtol=0, atol=100 * np.finfo(float).eps * np.max(np.abs(np.log(7.5 * s))) / g.h ** 2)


def test_sin_exponent_second_order():
    errs = []
    for n in (25, 50, 100, 200):
        g = make_grid(1, 2, n, 4 * n)
        q = impedance_to_potential(ImpedanceProfile(g.x, np.exp(np.sin(g.x))), g).values
        exact = 0.5 * np.sin(g.x) + 0.25 * np.cos(g.x) ** 2
        errs.append(np.max(np.abs(q - exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.8)


def test_domain_too_short():
    g = make_grid(1, 2, 20, 80)
    x = np.linspace(0, 0.8, 20)
    with pytest.raises(DomainTooShort):
        impedance_to_potential(ImpedanceProfile(x, np.ones_like(x)), g)
    x = np.linspace(0.1, 1.0, 20)
    with pytest.raises(DomainTooShort):
        impedance_to_potential(ImpedanceProfile(x, np.ones_like(x)), g)


def test_medium_pipeline_uniform_layers():
    # rho c = e^{x} in travel time with c = 1: q = 1/4 everywhere
    z = np.linspace(0, 1.5, 301)
    m = MediumProfile(z, np.ones_like(z), np.exp(z))
    assert impedance_profile(m).sigma[-1] == pytest.approx(np.exp(1.5))
    q = medium_to_potential(m, make_grid(1, 2, 50, 200))
    np.testing.assert_allclose(q.values, 0.25, atol=1e-6)
