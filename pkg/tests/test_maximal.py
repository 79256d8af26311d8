import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from angmax import (
    AngleSearchConfig, DomainError, ExpFunction, RadialGrid, Sector, TransformKind,
    angle_samples, angular_max, angular_max_nodes, dilate, distribution, evaluate_polar,
    format_float, hl_maximal, interval_average, level_set_measure, lp_norm_profile, make_simple,
    max_profile, stieltjes, zero_function,
)

from conftest import simple_functions


def test_angle_samples_open_and_nested():
    s = Sector(0, math.pi)
    cfg = AngleSearchConfig()
    a = angle_samples(s, cfg)
    assert a.min() > 0 and a.max() < math.pi
    assert a.min() == pytest.approx(math.pi * 1e-8, rel=1e-12)
    b = angle_samples(s, cfg.doubled())
    assert np.all(np.isin(a, b))


def test_config_validation():
    with pytest.raises(DomainError):
        AngleSearchConfig(coarse_count=4)
    with pytest.raises(DomainError):
        AngleSearchConfig(min_offset=0)


def test_poisson_boundary_limit(chi01):
    v, theta = angular_max(TransformKind.POISSON, chi01, 0.5)
    assert abs(v - 1) <= 1e-3
    assert 0 < theta < math.pi


def test_laplace_zero_function():
    assert angular_max(TransformKind.LAPLACE_RAY, zero_function(), 3.0)[0] == 0


def test_stieltjes_against_brute_force(chi01):
    v, _ = angular_max(TransformKind.STIELTJES, chi01, 2.0)
    theta = np.linspace(0, 2 * math.pi, 100_001)[1:-1]
    brute = np.max(np.abs(stieltjes(chi01, 2 * np.exp(1j * theta))))
    assert abs(v - brute) <= 1e-6 * brute


def test_refinement_is_monotone():
    f = make_simple([0.3, 1, 2], [1, -0.5])
    for kind in (TransformKind.POISSON, TransformKind.STIELTJES, TransformKind.LAPLACE_RAY):
        coarse = AngleSearchConfig(coarse_count=16, boundary_layers=4, refine_iters=0)
        fine = coarse.doubled()
        for rho in (0.1, 1.0, 7.0):
            assert angular_max(kind, f, rho, cfg=fine)[0] >= angular_max(kind, f, rho, cfg=coarse)[0]


def test_sector_must_fit(chi01):
    with pytest.raises(DomainError):
        angular_max(TransformKind.LAPLACE_RAY, chi01, 1.0, sector=Sector(0, 2))
    v, t = angular_max(TransformKind.POISSON, chi01, 1.0, sector=Sector(1.0, 2.0))
    assert 1.0 < t < 2.0


def test_laplace_exp_profile():
    prof = max_profile(TransformKind.LAPLACE_RAY, ExpFunction())
    expect = (1 + prof.rho ** 2) ** -0.5
    assert np.max(np.abs(prof.values - expect)) <= 1e-4
    assert np.all(np.abs(prof.arg_theta) < math.pi / 2)


def test_poisson_profile_contraction(chi01):
    prof = max_profile(TransformKind.POISSON, chi01)
    assert np.all(prof.values <= 1 + 1e-12)


def test_stieltjes_profile_decreasing(chi01):
    grid = RadialGrid().restrict(2, 10)
    prof = max_profile(TransformKind.STIELTJES, chi01, grid)
    assert np.all(np.diff(prof.values) <= 1e-9)


def test_profile_jobs_do_not_change_output(chi01):
    grid = RadialGrid(1e-2, 1e2, 4000)
    a = max_profile(TransformKind.POISSON, chi01, grid, jobs=1)
    b = max_profile(TransformKind.POISSON, chi01, grid, jobs=3)
    np.testing.assert_array_equal(a.values, b.values)


def test_profile_csv(chi01):
    prof = max_profile(TransformKind.POISSON, chi01, RadialGrid(1, 2, 3))
    lines = prof.to_csv().splitlines()
    assert lines[0] == "rho,value,theta_argmax" and len(lines) == 4


def test_distribution_examples():
    rho = np.linspace(1, 3, 50)
    vals = np.full(50, 2.0)
    d = distribution((rho, vals), [1.0, 3.0])
    np.testing.assert_allclose(d.measures, [0.0, 2.0], atol=1e-14)
    assert d.lambdas[0] == 3.0
    with pytest.raises(DomainError):
        distribution((rho, vals), [])
    with pytest.raises(DomainError):
        distribution((rho, vals), [0.0])


def test_level_set_interpolation():
    # linear ramp 0..1 on [0,1]: {v > lam} has measure 1 - lam
    rho = np.linspace(0, 1, 7)
    lam = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(level_set_measure(rho, rho, lam), 1 - lam, atol=1e-14)


def test_weak_norm_bounded_for_indicator(chi01):
    prof = max_profile(TransformKind.POISSON, chi01)
    top = prof.values.max()
    d = distribution(prof, np.geomspace(1e-3 * top, top, 64))
    assert np.all(np.diff(d.measures) >= 0)
    assert np.all(d.weak_norm >= d.lambdas * d.measures)
    assert d.weak_norm <= 8 * 1.0


def test_lp_norm_profile_examples():
    zero = max_profile(TransformKind.POISSON, zero_function())
    assert lp_norm_profile(zero, 2) == 0
    prof = max_profile(TransformKind.LAPLACE_RAY, ExpFunction())
    assert lp_norm_profile(prof, 2) == pytest.approx(math.sqrt(math.pi / 2), abs=1e-2)
    res = lp_norm_profile(prof, 2, tail_policy="report")
    # mass missing below 1e-3 and above 1e3 is arctan(1e-3) + (pi/2 - arctan(1e3))
    window = math.atan(1e3) - math.atan(1e-3)
    assert res.tail == pytest.approx(math.sqrt((math.pi / 2) / window) - 1, rel=0.05)
    assert lp_norm_profile(prof, math.inf) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        lp_norm_profile(prof, 0.5)


def test_poisson_profile_dilation():
    # M(f_s)(rho) = M f(s rho), so the profile norm scales by s**(-1/p)
    f = make_simple([0.5, 1, 2], [1, 2])
    grid = RadialGrid(1e-4, 1e4, 4096)
    for p in (2.0, 3.0):
        a = lp_norm_profile(max_profile(TransformKind.POISSON, f, grid), p)
        b = lp_norm_profile(max_profile(TransformKind.POISSON, dilate(f, 2), grid), p)
        assert b == pytest.approx(2 ** (-1 / p) * a, rel=1e-3)


def test_laplace_profile_dilation():
    # M(f_s)(rho) = s**-1 M f(rho / s)
    f = make_simple([0.5, 1, 2], [1, -2])
    rho = np.geomspace(0.1, 10, 7)
    a = angular_max_nodes(TransformKind.LAPLACE_RAY, dilate(f, 2), rho)[0]
    b = angular_max_nodes(TransformKind.LAPLACE_RAY, f, rho / 2)[0] / 2
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_hl_maximal_examples(chi01):
    assert hl_maximal(chi01, 0.5) == 1
    assert hl_maximal(chi01, 2) == pytest.approx(0.5, abs=1e-15)
    assert hl_maximal(chi01, -1) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        hl_maximal(make_simple([0, 1], [-1]), 0.5)


@given(simple_functions(nonnegative=True, max_pieces=4), st.floats(-2, 10))
def test_hl_maximal_dominates_random_intervals(f, x):
    rng = np.random.default_rng(1)
    a = x - np.exp(rng.uniform(-6, 3, 20_000))
    b = x + np.exp(rng.uniform(-6, 3, 20_000))
    brute = np.max(interval_average(f, a, b))
    m = hl_maximal(f, x)
    assert m >= brute - 1e-12
    assert m <= np.max(f.values.real) + 1e-12


def test_hl_maximal_brute_force_value():
    f = make_simple([0, 1, 2, 3], [2, 0, 1])
    rng = np.random.default_rng(2)
    x = 1.5
    a = x - rng.uniform(0, 3, 1_000_000)
    b = x + rng.uniform(0, 3, 1_000_000)
    brute = np.max(interval_average(f, a, b))
    # random intervals approach the optimum [0, 1.5] from below only
    assert brute <= hl_maximal(f, x) + 1e-12
    assert hl_maximal(f, x) - brute <= 5e-3
    assert hl_maximal(f, x) == pytest.approx(4 / 3, abs=1e-15)


def test_format_float():
    assert format_float(0.25) == "0.25"
    assert format_float(1e-5) == "1.0000000000000001e-05"
    assert format_float(0.0) == "0"
    assert format_float(math.inf) == "inf"
    for v in (math.pi, 1e-300, 123456789.123, -2.5e-7):
        assert float(format_float(v)) == v


def test_evaluate_polar_matches_kinds(chi01):
    z = 2 * np.exp(1j * 0.3)
    assert evaluate_polar(TransformKind.STIELTJES, chi01, 2, 0.3) == stieltjes(chi01, z)
