import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad as scipy_quad

from angmax import (
    BreakpointOrderError, DomainError, ExpFunction, NegativeSupportError, NonFiniteError,
    RadialGrid, Sector, ShapeMismatchError, SimpleFunction, combine, dilate, indicator,
    lp_norm, make_simple, scale, zero_function,
)

from conftest import simple_functions


def test_make_simple_indicator(chi01):
    assert chi01.n_pieces == 1
    assert chi01.support == (0.0, 1.0)
    assert chi01(0.5) == 1 and chi01(1.5) == 0


def test_make_simple_two_piece_echo():
    f = make_simple([0, 1, 2], [1, -1])
    np.testing.assert_array_equal(f.breakpoints, [0, 1, 2])
    np.testing.assert_array_equal(f.values, [1, -1])


@pytest.mark.parametrize("bps, vals, err", [
    ([1, 0], [1], BreakpointOrderError),
    ([0, 1, 1], [1, 2], BreakpointOrderError),
    ([-1, 1], [1], NegativeSupportError),
    ([0, math.nan], [1], NonFiniteError),
    ([0, 1], [math.inf], NonFiniteError),
    ([0, 1, 2], [1], ShapeMismatchError),
])
def test_make_simple_rejects(bps, vals, err):
    with pytest.raises(err):
        make_simple(bps, vals)


def test_validation_errors_are_distinct():
    kinds = {BreakpointOrderError, NegativeSupportError, NonFiniteError}
    assert len(kinds) == 3
    assert all(issubclass(k, DomainError) for k in kinds)


def test_simple_function_is_immutable(chi01):
    with pytest.raises(ValueError):
        chi01.values[0] = 3


def test_evaluation_left_closed():
    f = make_simple([0, 1, 2], [1, 3])
    np.testing.assert_array_equal(f([0, 0.999, 1, 1.5, 2, -1]), [1, 1, 3, 3, 0, 0])


def test_lp_norm_unit_indicator(chi01):
    assert lp_norm(chi01, 2) == 1
    assert lp_norm(chi01, math.inf) == 1


def test_lp_norm_against_quadrature():
    f = make_simple([0, 3], [2])
    oracle = scipy_quad(lambda t: 2.0 ** 3, 0, 3)[0] ** (1 / 3)
    assert lp_norm(f, 3) == pytest.approx(oracle, rel=1e-14)
    assert lp_norm(f, 3) == pytest.approx(24 ** (1 / 3), rel=1e-15)


def test_lp_norm_rejects_small_p(chi01):
    with pytest.raises(DomainError):
        lp_norm(chi01, 0.5)


def test_lp_norm_exp_function():
    g = ExpFunction(3.0, 2.0)
    for p in (1.0, 1.5, 2.0):
        oracle = scipy_quad(lambda t: (3 * math.exp(-2 * t)) ** p, 0, math.inf)[0] ** (1 / p)
        assert lp_norm(g, p) == pytest.approx(oracle, rel=1e-10)
    assert lp_norm(g, math.inf) == 3


def test_dilate_examples(chi01):
    assert dilate(chi01, 2) == make_simple([0, 0.5], [1])
    assert dilate(chi01, 1) == chi01
    assert lp_norm(dilate(chi01, 4), 2) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        dilate(chi01, 0)


def test_combine_examples(chi01):
    g = make_simple([1, 2], [1])
    h = combine(1, chi01, 1, g)
    assert h(0.5) == 1 and h(1.5) == 1 and h(2.5) == 0
    z = combine(1, chi01, -1, chi01)
    assert z.is_zero
    k = combine(2, chi01, 3, make_simple([0.5, 1.5], [1]))
    np.testing.assert_array_equal(k([0.25, 0.75, 1.25]), [2, 5, 3])


def test_helpers(chi01):
    assert indicator(0, 1) == chi01
    assert zero_function().is_zero
    assert scale(2, chi01)(0.5) == 2


def test_json_round_trip():
    f = make_simple([0, 0.5, 2], [1 + 2j, -3])
    text = f.to_json()
    assert json.loads(text)["values"] == [[1.0, 2.0], [-3.0, 0.0]]
    assert SimpleFunction.from_json(text) == f


def test_sector_and_grid():
    s = Sector(0, math.pi)
    assert s.contains(1.0) and not s.contains(0.0)
    with pytest.raises(DomainError):
        Sector(1, 0)
    g = RadialGrid()
    assert g.nodes[0] == 1e-3 and g.nodes[-1] == 1e3 and len(g.nodes) == 2048
    assert np.all(np.diff(g.nodes) > 0)
    with pytest.raises(DomainError):
        RadialGrid(2, 1)


# magnitudes below ~1e-200 underflow in |c|**p; the law itself is not at stake there
scalars = st.one_of(st.just(0.0), st.floats(1e-6, 5), st.floats(-5, -1e-6))


@given(simple_functions(complex_values=True), scalars, st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_lp_norm_homogeneity(f, c, p):
    assert lp_norm(scale(c, f), p) == pytest.approx(abs(c) * lp_norm(f, p), rel=1e-14, abs=1e-300)


@given(simple_functions(), simple_functions(), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_lp_norm_triangle(f, g, p):
    assert lp_norm(combine(1, f, 1, g), p) <= lp_norm(f, p) + lp_norm(g, p) + 1e-12


@given(simple_functions(), st.floats(0.1, 10), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_dilation_law(f, s, p):
    expect = s ** (-1 / p) * lp_norm(f, p)
    assert abs(lp_norm(dilate(f, s), p) - expect) <= 1e-12 * lp_norm(f, p)


@given(simple_functions(complex_values=True), simple_functions(complex_values=True),
       st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_combine_pointwise(f, g, a, b):
    h = combine(a, f, b, g)
    t = np.random.default_rng(0).uniform(-1, 12, 1000)
    t = t[~np.isin(t, h.breakpoints)]
    np.testing.assert_allclose(h(t), a * f(t) + b * g(t), rtol=0, atol=1e-14 * (1 + abs(a) + abs(b)) * 4)
