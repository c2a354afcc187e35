import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussphase import metrology as met
from gaussphase import optimizer as opt
from gaussphase.errors import NonFinite, ParameterError


def split_cfi_grid(n, points=10**6):
    a = np.linspace(0.0, n, points)
    m = n - a
    return a, 2 * a / (1 + m - np.sqrt(m * (1 + m)))


def test_parabola():
    res = opt.maximize_scalar(lambda x: -((x - 0.3) ** 2), 0.0, 1.0, 1e-8)
    assert res.argmax == pytest.approx(0.3, abs=1e-8)
    lo, hi = res.bracket
    assert lo <= res.argmax <= hi


@given(st.floats(-5, 5), st.floats(0.01, 3))
@settings(max_examples=40)
def test_parabola_anywhere(c, w):
    lo, hi = c - w, c + 2 * w
    res = opt.maximize_scalar(lambda x: -((x - c) ** 2), lo, hi, 1e-8)
    assert abs(res.argmax - c) <= 1e-8 + 1e-12 * abs(c)


def test_linear_objective_hits_upper_edge():
    res = opt.maximize_scalar(lambda T: 2 * T * 10, 0.0, 1.0)
    assert res.argmax == 1.0
    assert res.max_value == 20.0


def test_transmissivity_argmax():
    res = opt.argmax_transmissivity(10.0)
    assert res.argmax == pytest.approx(1.0, abs=1e-8)
    assert res.max_value == pytest.approx(20.0, rel=1e-12)


def test_deterministic():
    f = lambda x: math.sin(3 * x) * math.exp(-x)
    assert opt.maximize_scalar(f, 0, 2) == opt.maximize_scalar(f, 0, 2)


def test_non_finite_objective():
    with pytest.raises(NonFinite):
        opt.maximize_scalar(lambda x: float("nan"), 0, 1)


@pytest.mark.parametrize("lo, hi, tol", [(1, 0, 1e-8), (0, float("inf"), 1e-8), (0, 1, 0.0)])
def test_invalid_intervals(lo, hi, tol):
    with pytest.raises(ParameterError):
        opt.maximize_scalar(lambda x: x, lo, hi, tol)


def test_bracket_value_invariant():
    f = lambda a: met.split_cfi_squeezed(a, 10.0)
    res = opt.argmax_split(10.0)
    lo, hi = res.bracket
    assert res.max_value >= f(lo) and res.max_value >= f(hi)


def test_split_at_ten():
    res = opt.argmax_split(10.0)
    assert res.argmax == pytest.approx(met.optimal_alpha2(10.0), abs=1e-6)
    assert res.max_value == pytest.approx(met.max_cfi(10.0), rel=1e-6)
    assert res.max_value == pytest.approx(30.7, abs=0.05)


def test_split_at_hundred():
    assert opt.argmax_split(100.0).max_value / 400 == pytest.approx(0.909, abs=1e-3)


def test_split_tiny_total():
    n = 1e-6
    res = opt.argmax_split(n, tol=1e-14)
    assert res.argmax == pytest.approx(met.optimal_alpha2(n), abs=1e-12)


def test_split_invalid():
    with pytest.raises(ParameterError):
        opt.argmax_split(0.0)


@pytest.mark.parametrize("n", [0.1, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0])
def test_split_against_exhaustive_grid(n):
    a, f = split_cfi_grid(n)
    assert opt.local_maxima(f[:: 1000]) == 1
    spacing = a[1] - a[0]
    res = opt.argmax_split(n)
    assert abs(res.argmax - a[np.argmax(f)]) <= spacing + 1e-8
    assert res.max_value >= f.max() * (1 - 1e-12)


def test_local_maxima_counts():
    assert opt.local_maxima([0, 1, 0, 1, 0]) == 2
    assert opt.local_maxima([3, 2, 1]) == 1
    assert opt.local_maxima([1, 2, 3]) == 1


def test_golden_section_converges():
    x, fx = opt.golden_section_max(lambda x: -abs(x - 0.123), 0.0, 1.0, 1e-10)
    assert x == pytest.approx(0.123, abs=1e-9)
