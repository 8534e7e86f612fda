import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vrmtunnel.errors import DomainError, PreconditionError
from vrmtunnel.potentials import (
    BellShaped,
    Eckart,
    ExponentialStep,
    LinearStep,
    Parabolic,
    Sampled,
    ScatteringSetup,
    evaluate,
    golden_section_max,
    make_profile,
    peak,
    wavenumbers,
)


def test_evaluate_examples():
    assert evaluate(LinearStep(0.5, 3.0), 2.0) == pytest.approx(0.5)
    assert evaluate(ExponentialStep(0.5, 1.0), 1.0) == pytest.approx(0.5)
    assert evaluate(BellShaped(2.0, 5.0), 5.0) == pytest.approx(2.0)
    assert evaluate(Parabolic(0.5, 1.0, 2.0), 2.0) == pytest.approx(0.5)
    assert evaluate(Parabolic(0.5, 1.0, 2.0), 3.0) == pytest.approx(0.0, abs=1e-15)


def test_evaluate_array_shape():
    x = np.linspace(1, 3, 7)
    v = evaluate(LinearStep(0.5, 3.0), x)
    assert v.shape == x.shape
    np.testing.assert_allclose(v, 0.5 * (3 - x))


@pytest.mark.parametrize(
    "profile",
    [LinearStep(0.5, 3.0), ExponentialStep(0.5, 1.0), Parabolic(0.5, 1.0, 2.0), BellShaped(2.0, 5.0), Eckart(1.0, 8.0, 8.0)],
)
def test_finite_far_from_window(profile):
    x = np.array([-50.0, 0.0, 50.0, 1e4])
    assert np.all(np.isfinite(evaluate(profile, x)))


def test_exponential_overflow_is_reported():
    with pytest.raises(DomainError):
        evaluate(ExponentialStep(0.5, 1.0), -1e4)


def test_bell_matches_cosh_form():
    bell = BellShaped(2.0, 5.0)
    x = np.linspace(-3, 13, 101)
    np.testing.assert_allclose(evaluate(bell, x), 2.0 / np.cosh(x - 5.0) ** 2, rtol=1e-13)


def test_eckart_asymptotes():
    ek = Eckart(1.0, 8.0, 8.0)
    assert evaluate(ek, -200.0) == pytest.approx(0.0, abs=1e-30)
    assert evaluate(ek, 200.0) == pytest.approx(0.5)


def test_sampled_interpolates_and_rejects_outside():
    s = Sampled(((0.0, 0.0), (1.0, 2.0), (3.0, 0.0)))
    assert evaluate(s, 0.5) == pytest.approx(1.0)
    assert evaluate(s, 2.0) == pytest.approx(1.0)
    assert s.breakpoints == (1.0,)
    with pytest.raises(DomainError):
        evaluate(s, 3.5)


@pytest.mark.parametrize("knots", [((0.0, 1.0),), ((0.0, 1.0), (0.0, 2.0)), ((1.0, 0.0), (0.0, 1.0))])
def test_sampled_rejects_bad_knots(knots):
    with pytest.raises(DomainError):
        Sampled(knots)


def test_closed_form_validity_flags():
    assert BellShaped(2.0, 5.0).closed_form_valid
    assert not BellShaped(0.1, 5.0).closed_form_valid
    assert Eckart(1.0, 8.0, 8.0).closed_form_valid
    assert not Eckart(1.0, 0.2, 8.0).closed_form_valid


def test_make_profile():
    assert make_profile("bell", v0=2.0, x0=5.0) == BellShaped(2.0, 5.0)
    with pytest.raises(DomainError):
        make_profile("square", v0=1.0)


def test_peak_closed_forms():
    assert peak(Parabolic(0.5, 1.0, 2.0)) == (2.0, pytest.approx(0.5))
    assert peak(BellShaped(2.0, 5.0)) == (5.0, pytest.approx(2.0))
    x, v = peak(LinearStep(0.5, 4.0), 1.0, 4.0)
    assert (x, v) == (1.0, pytest.approx(1.5))


def test_eckart_peak_numeric():
    # maximise 0.5*(A s + B s(1-s)): ds-stationary point s* = (A + B) / (2B)
    A, B, x0 = 1.0, 8.0, 8.0
    s_star = (A + B) / (2 * B)
    x_expected = x0 + math.log(s_star / (1 - s_star))
    v_expected = 0.5 * (A * s_star + B * s_star * (1 - s_star))
    x, v = peak(Eckart(A, B, x0))
    assert x == pytest.approx(x_expected, abs=1e-8)
    assert v == pytest.approx(v_expected, rel=1e-12)
    assert v == pytest.approx(1.265625, rel=1e-12)


@pytest.mark.parametrize(
    "profile, a, b",
    [
        (ExponentialStep(0.5, 1.0), 1.0, 8.0),
        (Eckart(1.0, 8.0, 8.0), 2.0, 13.0),
        (Sampled(((0.0, 0.1), (0.7, 0.9), (2.0, 0.3), (3.0, 0.95))), 0.0, 3.0),
        (Parabolic(0.5, 1.0, 2.0), 1.0, 3.0),
    ],
)
def test_peak_dominates_fine_grid(profile, a, b):
    _, vmax = peak(profile, a, b)
    grid = np.linspace(a, b, 20001)
    assert vmax >= np.max(evaluate(profile, grid)) - 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 3))
def test_golden_section_on_quadratics(c, w):
    x, fx = golden_section_max(lambda t: -((t - c) ** 2), c - w, c + 2 * w)
    assert x == pytest.approx(c, abs=1e-6)


def test_wavenumbers_examples():
    assert wavenumbers(ScatteringSetup(0, 1, 0, 0, 0.5)) == pytest.approx((1.0, 1.0))
    assert wavenumbers(ScatteringSetup(0, 1, 0, 0, 2.0)) == pytest.approx((2.0, 2.0))
    ek = Eckart(1.0, 8.0, 8.0)
    k1, k3 = wavenumbers(ScatteringSetup(2.0, 13.0, evaluate(ek, 2.0), evaluate(ek, 13.0), 2.5))
    assert k1 > k3 > 0


def test_wavenumbers_closed_channel():
    with pytest.raises(PreconditionError):
        wavenumbers(ScatteringSetup(0, 1, 0.5, 0.0, 0.5))
    with pytest.raises(PreconditionError):
        wavenumbers(ScatteringSetup(0, 1, 0.0, 0.7, 0.5))


def test_setup_rejects_reversed_window():
    with pytest.raises(PreconditionError):
        ScatteringSetup(2.0, 1.0, 0.0, 0.0, 1.0)
