"""Exponential-sum profile algebra and its quadrature cross-checks."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import complex_amp, random_profile, standard_mode
from stokesbc import ProfileError, adaptive_integrate
from stokesbc.profiles import (
    ExpTerm,
    ScalarModeProfile,
    VectorModeProfile,
    apply_reflected_exp,
    convolve_abs_exp,
    gradient,
    helmholtz_solve_mode,
    pair_integral,
)

Y = np.linspace(0.0, 12.0, 49)


def quad_halfline(f, decay, rel_tol=1e-12):
    """Oracle: integrate f over [0, inf) by truncating at 40 decay lengths."""
    upper = 40.0 / decay
    value, _, _ = adaptive_integrate(f, 0.0, upper, rel_tol=rel_tol)
    return value


def test_growing_terms_rejected():
    with pytest.raises(ProfileError):
        ScalarModeProfile((1.0,), [(1.0, -0.5, 0)])
    with pytest.raises(ProfileError):
        # a constant term needs xi = 0
        ScalarModeProfile((1.0,), [(1.0, 0.0, 0)])
    # ...and is legal on the mean mode
    p = ScalarModeProfile((0.0,), [(2.0, 0.0, 0)])
    assert p(3.0) == pytest.approx(2.0)


def test_negative_power_rejected():
    with pytest.raises(ProfileError):
        ScalarModeProfile((1.0,), [(1.0, 1.0, -1)])


def test_evaluation_matches_hand_formula():
    p = ScalarModeProfile((1.0,), [(2.0 + 1.0j, 0.7, 0), (0.5, 1.3, 2)])
    expected = (2.0 + 1.0j) * np.exp(-0.7 * Y) + 0.5 * Y**2 * np.exp(-1.3 * Y)
    assert np.allclose(p(Y), expected, rtol=1e-14, atol=0.0)


@given(st.integers(0, 2**32 - 1))
def test_linear_algebra_pointwise(seed):
    rng = np.random.default_rng(seed)
    mode = standard_mode()
    p = random_profile(mode, rng)
    q = random_profile(mode, rng)
    c = complex_amp(rng)
    assert np.allclose((p + q)(Y), p(Y) + q(Y), rtol=1e-13, atol=1e-15)
    assert np.allclose((p - q)(Y), p(Y) - q(Y), rtol=1e-13, atol=1e-15)
    assert np.allclose((c * p)(Y), c * p(Y), rtol=1e-13, atol=1e-15)
    assert np.allclose((-p)(Y), -p(Y), rtol=1e-14, atol=0.0)


def test_derivative_closed_form():
    p = ScalarModeProfile((1.0,), [(1.0, 2.0, 1)])
    # d/dy [y e^{-2y}] = (1 - 2y) e^{-2y}
    assert np.allclose(p.derivative()(Y), (1.0 - 2.0 * Y) * np.exp(-2.0 * Y))


@given(st.integers(0, 2**32 - 1))
def test_derivative_matches_difference_quotient(seed):
    rng = np.random.default_rng(seed)
    p = random_profile(standard_mode(), rng, max_power=2)
    h = 1e-6
    y = np.linspace(0.1, 8.0, 17)
    fd = (p(y + h) - p(y - h)) / (2.0 * h)
    assert np.allclose(p.derivative()(y), fd, rtol=1e-7, atol=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_laplace_transform_against_quadrature(seed):
    rng = np.random.default_rng(seed)
    p = random_profile(standard_mode(), rng, max_power=2)
    s = complex(rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0))
    oracle = quad_halfline(lambda y: p(y) * np.exp(-s * y), decay=0.3)
    assert p.laplace(s) == pytest.approx(oracle, rel=1e-9)
    assert p.integral() == pytest.approx(p.laplace(0.0))


@given(st.integers(0, 2**32 - 1))
def test_pair_integral_against_quadrature(seed):
    rng = np.random.default_rng(seed)
    mode = standard_mode()
    p = random_profile(mode, rng)
    q = random_profile(mode, rng)
    oracle = quad_halfline(lambda y: p(y) * q(y), decay=0.6)
    assert pair_integral(p, q) == pytest.approx(oracle, rel=1e-9)


def conv_oracle(m, p, y):
    out = np.empty(len(y), dtype=complex)
    upper = 40.0 / 0.3
    for i, yi in enumerate(y):
        value, _, _ = adaptive_integrate(
            lambda eta: np.exp(-m * np.abs(yi - eta)) * p(eta),
            0.0,
            upper,
            rel_tol=1e-12,
            breakpoints=(yi,),  # split at the kernel kink
        )
        out[i] = value
    return out


@given(
    st.floats(0.3, 4.0),
    st.floats(0.3, 4.0),
    st.integers(0, 3),
    st.integers(0, 2**32 - 1),
)
def test_convolution_against_quadrature(m_rate, rate, power, seed):
    rng = np.random.default_rng(seed)
    m = complex(m_rate, rng.uniform(-0.5, 0.5))
    p = ScalarModeProfile((1.0,), [(complex_amp(rng), rate, power)])
    closed = convolve_abs_exp(m, p)
    y = np.linspace(0.0, 10.0, 11)
    oracle = conv_oracle(m, p, y)
    scale = np.max(np.abs(oracle)) + 1e-30
    assert np.max(np.abs(closed(y) - oracle)) < 1e-8 * scale


def test_convolution_power_term_regression():
    # the reflected -P(0) e^{-m y} piece of the generic branch is a pure
    # exponential; before the fix it wrongly inherited the source power
    m = 3.0
    p = ScalarModeProfile((1.0,), [(1.0, 1.0, 1)])
    closed = convolve_abs_exp(m, p)
    y = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
    oracle = conv_oracle(complex(m), p, y)
    assert np.max(np.abs(closed(y) - oracle)) < 1e-10 * np.max(np.abs(oracle))


def test_convolution_exact_resonance():
    # m == rate goes through the exact resonant branch
    p = ScalarModeProfile((1.0,), [(1.0, 2.0, 0)])
    closed = convolve_abs_exp(2.0, p)
    y = np.array([0.0, 0.7, 1.9, 5.0])
    oracle = conv_oracle(complex(2.0), p, y)
    assert np.max(np.abs(closed(y) - oracle)) < 1e-10 * np.max(np.abs(oracle))


def test_convolution_near_resonance():
    # |m - rate| tiny: the series branch must bridge the cancellation
    p = ScalarModeProfile((1.0,), [(1.0, 2.0 + 1e-9, 2)])
    closed = convolve_abs_exp(2.0, p)
    y = np.array([0.0, 0.7, 1.9, 5.0])
    oracle = conv_oracle(complex(2.0), p, y)
    assert np.max(np.abs(closed(y) - oracle)) < 1e-8 * np.max(np.abs(oracle))


@given(st.integers(0, 2**32 - 1))
def test_reflected_kernel_is_laplace_times_decay(seed):
    rng = np.random.default_rng(seed)
    p = random_profile(standard_mode(), rng, max_power=2)
    m = complex(rng.uniform(0.5, 3.0), rng.uniform(-0.5, 0.5))
    out = apply_reflected_exp(m, p)
    expected = p.laplace(m) * np.exp(-m * Y)
    assert np.allclose(out(Y), expected, rtol=1e-12, atol=1e-15)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["dirichlet", "neumann"]))
def test_helmholtz_solve_mode(seed, kind):
    rng = np.random.default_rng(seed)
    mode = standard_mode()
    rhs = random_profile(mode, rng, max_power=1)
    a, b = 2.5, 1.5
    bc_value = complex_amp(rng)
    q = helmholtz_solve_mode(a, b, rhs, kind, bc_value)
    resid = a * q - b * q.derivative().derivative() - rhs
    scale = np.max(np.abs(rhs(Y))) + 1e-30
    assert np.max(np.abs(resid(Y))) < 1e-11 * scale
    if kind == "dirichlet":
        assert q(0.0) == pytest.approx(bc_value, abs=1e-12)
    else:
        assert q.derivative()(0.0) == pytest.approx(bc_value, abs=1e-11)


def test_gradient_components():
    mode = standard_mode(abs_xi=1.7)
    q = ScalarModeProfile(mode.xi, [(1.0 + 0.3j, 0.9, 1)])
    g = gradient(q)
    assert isinstance(g, VectorModeProfile)
    assert np.allclose(g.tangential[0](Y), 1j * 1.7 * q(Y))
    assert np.allclose(g.normal(Y), q.derivative()(Y))
    # div grad q = -|xi|^2 q + q''
    lhs = g.divergence()
    rhs = q.derivative().derivative() - 1.7**2 * q
    assert np.allclose(lhs(Y), rhs(Y), rtol=1e-13, atol=1e-16)


def test_vector_profile_evaluate_shape():
    mode = standard_mode()
    v = ScalarModeProfile(mode.xi, [(1.0, 1.0, 0)])
    w = ScalarModeProfile(mode.xi, [(2.0, 2.0, 0)])
    field = VectorModeProfile(mode.xi, (v,), w)
    vals = field.evaluate(Y)
    assert vals.shape == (2, len(Y))
    assert np.allclose(vals[0], v(Y))
    assert np.allclose(vals[1], w(Y))
