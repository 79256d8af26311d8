import math

import numpy as np
import pytest

from angmax import QuadratureError, quad, quad_batch, quad_semi_infinite


def test_sine():
    v, e = quad(np.sin, 0, math.pi, abs_tol=1e-13)
    assert v == pytest.approx(2.0, abs=1e-13)
    assert e <= 1e-13


def test_log_endpoint_singularity():
    v, _ = quad(np.log, 0, 1, abs_tol=1e-10)
    assert v == pytest.approx(-1.0, abs=1e-9)


def test_semi_infinite():
    v, _ = quad_semi_infinite(lambda t: 1 / (1 + t * t), 0.0, points=(1.0,), abs_tol=1e-12)
    assert v == pytest.approx(math.pi / 2, abs=1e-11)


def test_batch_owners_and_complex():
    # problem 0: int_0^1 t^2 split in two pieces; problem 1: int_0^pi e^{it}
    lo = np.array([0.0, 0.5, 0.0])
    hi = np.array([0.5, 1.0, math.pi])
    owner = np.array([0, 0, 1])

    def f(t, idx):
        return np.where(idx[:, None] == 0, t * t + 0j, np.exp(1j * t))

    vals, errs = quad_batch(f, lo, hi, owner, abs_tol=1e-13)
    assert vals[0] == pytest.approx(1 / 3, abs=1e-13)
    assert vals[1] == pytest.approx(2j, abs=1e-13)
    assert np.all(errs <= 1e-13)


def test_failure_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        quad(lambda t: np.sign(t - 1 / 3), 0, 1, abs_tol=1e-300, max_sweeps=3)
    assert info.value.estimate is not None
    assert np.all(np.isfinite(info.value.error))
