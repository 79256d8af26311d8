import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad as scipy_quad

from angmax import (
    DomainError, decomp_residual, decomp_residuals, lp_norm, make_simple, p1, p2,
    p2_threshold_radius, phi, phi_mass, phi_right_limit, poisson, poisson_kernel,
    reflected_geometry, split_check, split_convolutions, split_geometry, zero_function,
)

from conftest import simple_functions


def rational_kernel(t, y):
    t, y = Fraction(t), Fraction(y)
    return float(y / (y * y + t * t)) / math.pi


def test_poisson_kernel_values():
    assert poisson_kernel(0, 1) == rational_kernel(0, 1)
    assert poisson_kernel(1, 1) == rational_kernel(1, 1)
    assert poisson_kernel(0, 1) == pytest.approx(0.318310, abs=1e-6)
    with pytest.raises(DomainError):
        poisson_kernel(0, 0)


def test_poisson_kernel_normalization():
    total = scipy_quad(lambda t: poisson_kernel(t, 0.3), -np.inf, np.inf, epsabs=1e-12)[0]
    assert abs(total - 1) <= 1e-8


def test_split_values():
    assert p2(1.0, 2.0, 1.0) == 0
    assert p2(0, 1, 1) == pytest.approx(1 / (2 * math.pi), abs=1e-16)
    assert p1(0, 1, 1) == pytest.approx(1 / (2 * math.pi), abs=1e-16)
    with pytest.raises(DomainError):
        p1(0, 1, 0)


def test_exact_split_random():
    rng = np.random.default_rng(0)
    t = rng.normal(0, 10, 10_000)
    y = np.exp(rng.uniform(-5, 5, 10_000))
    d = np.exp(rng.uniform(-5, 5, 10_000))
    total = poisson_kernel(t, y)
    assert np.max(np.abs(p1(t, y, d) + p2(t, y, d) - total) / total) <= 1e-15


def test_phi_values_and_finite_difference():
    assert phi(1, 1, 0.5) == pytest.approx(1 / math.pi, abs=1e-16)
    for a, y, d in [(1.0, 1.0, 0.5), (3.0, 0.2, 1.0), (0.02, 0.5, 0.01)]:
        h = 1e-6 * a
        deriv = (p1(a + h, y, d) - p1(a - h, y, d)) / (2 * h)
        assert phi(a, y, d) == pytest.approx(-2 * a * deriv, rel=1e-6)
    with pytest.raises(DomainError):
        phi(0.5, 1, 0.5)


def test_phi_right_limit():
    y, d = 0.7, 0.3
    assert phi_right_limit(y, d) == pytest.approx(4 / math.pi * d * d * y / (y * y + d * d) ** 2, rel=1e-15)
    assert phi(d * (1 + 1e-9), y, d) == pytest.approx(phi_right_limit(y, d), rel=1e-8)


def test_phi_mass_values():
    m = phi_mass(1, 1)
    assert abs(m.mass - (1 / math.pi + 0.5)) <= 1e-10
    assert m.quadrature == pytest.approx(m.mass, abs=1e-12)
    small = phi_mass(1, 1e-6)
    assert 0 < small.deficit < 1e-15 and small.mass <= 1
    big = phi_mass(1e3, 1e-3)
    u = 1e-6
    assert big.mass == pytest.approx(2 * u / math.pi + 1 - 2 * u / math.pi, abs=1e-15)
    assert big.deficit > 0
    # deficit matches the closed form where double precision can resolve it
    for y, d in [(1, 0.5), (2, 3), (1e-2, 1e2)]:
        m = phi_mass(y, d)
        assert m.deficit == pytest.approx(1 - m.mass, abs=1e-15)


def test_phi_mass_small_ratio_series():
    # the deficit is (4/3 pi) u^3 to leading order
    u = 1e-4
    assert phi_mass(1, u).deficit == pytest.approx(4 / (3 * math.pi) * u ** 3, rel=1e-7)


def test_decomp_residual_examples():
    assert decomp_residual(0, 1, 1) <= 1e-8
    assert decomp_residual(5, 2, 1) <= 1e-8
    assert decomp_residual(-5, 2, 1) == decomp_residual(5, 2, 1)


def test_decomp_residuals_vectorized():
    t = np.array([0.0, 0.5, -3.0])
    r = decomp_residuals(t, 1.0, 0.2)
    assert r.shape == (3,) and np.all(r <= 1e-8)


def test_geometry_values():
    g = split_geometry(2.0, math.pi / 3)
    assert g.x_star == pytest.approx(1.0) and g.y_star == pytest.approx(math.sqrt(3))
    assert g.delta == pytest.approx(1.0)
    with pytest.raises(DomainError):
        split_geometry(1.0, 0.0)
    with pytest.raises(DomainError):
        split_geometry(-1.0, 1.0)


def test_reflected_geometry():
    g = reflected_geometry(1.0, 2 * math.pi / 3)
    assert g.reflected and g.x_eval == pytest.approx(-0.5)
    assert g.theta_star == pytest.approx(math.pi / 3)


@given(st.floats(1e-3, 1e3), st.floats(1e-6, math.pi / 2))
def test_geometry_identity(R, theta):
    g = split_geometry(R, theta)
    assert abs(g.y_star ** 2 + g.delta ** 2 - 2 * R * g.delta) <= 1e-12 * 2 * R * g.delta
    assert 0 < g.delta <= R and 0 < g.y_star <= R and g.x_star >= 0
    if g.x_star > 0:
        assert (g.delta / g.y_star) ** 2 < 1


def test_split_convolutions_examples(chi01):
    assert split_convolutions(zero_function(), split_geometry(1, 1)) == (0.0, 0.0)
    g = split_geometry(1.0, math.pi / 3)
    g1, g2 = split_convolutions(chi01, g)
    exact = poisson(chi01, 0.5, math.sqrt(3) / 2)
    assert abs(g1 + g2 - exact) <= 1e-10 * exact
    with pytest.raises(DomainError):
        split_convolutions(make_simple([0, 1], [-1]), g)


def test_split_convolutions_multi_piece():
    f = make_simple([0.3, 0.8, 1.1, 2.0, 2.4], [0.5, 2.0, 0.0, 1.3])
    for R, th in [(1.0, 0.2), (1.5, 1.0), (2.2, 2.5), (0.4, 1.5)]:
        g = reflected_geometry(R, th)
        g1, _ = split_convolutions(f, g)
        # independent value of g1: scipy quadrature of min(P, P(delta)) against f
        cap = poisson_kernel(g.delta, g.y_star)
        oracle = sum(v * scipy_quad(lambda t: min(poisson_kernel(g.x_eval - t, g.y_star), cap),
                                    a, b, points=[g.x_eval - g.delta, g.x_eval + g.delta],
                                    epsabs=1e-14, epsrel=1e-12, limit=200)[0]
                     for a, b, v in zip(f.breakpoints[:-1], f.breakpoints[1:], f.values.real))
        assert g1 == pytest.approx(oracle, rel=1e-9, abs=1e-14)
        assert split_check(f, g) <= 1e-10


@given(simple_functions(nonnegative=True), st.floats(1e-2, 1e2), st.floats(1e-3, math.pi - 1e-3))
def test_g2_bound_and_split_sum(f, R, theta):
    g = reflected_geometry(R, theta)
    g1, g2 = split_convolutions(f, g)
    assert g2 <= p2(0.0, g.y_star, g.delta) * lp_norm(f, 1) * (1 + 1e-12) + 1e-300
    exact = poisson(f, g.x_eval, g.y_star)
    assert abs(g1 + g2 - exact) <= 1e-10 * max(exact, 1e-300) + 1e-300


def test_threshold_radius():
    assert p2_threshold_radius(1, 1 / (2 * math.pi)) == pytest.approx(1.0, rel=1e-15)
    assert p2_threshold_radius(2, 1) == pytest.approx(1 / math.pi, rel=1e-15)
    assert p2_threshold_radius(1, 1e300) < 1e-299
    with pytest.raises(DomainError):
        p2_threshold_radius(0, 1)


def test_p2_resolves_tiny_split_scale():
    # P(0) - P(delta) = delta^2 / (pi y (y^2 + delta^2)) with no cancellation
    y, d = 8.5e-9, 1.3e-16
    expect = float(Fraction(d) ** 2 / (Fraction(y) * (Fraction(y) ** 2 + Fraction(d) ** 2))) / math.pi
    assert p2(0.0, y, d) == pytest.approx(expect, rel=1e-14)
    f = make_simple([0, 1], [1])
    g = split_geometry(0.27, 3e-8)
    g1, g2 = split_convolutions(f, g)
    assert 0 <= g2 <= p2(0.0, g.y_star, g.delta) * 1.0
