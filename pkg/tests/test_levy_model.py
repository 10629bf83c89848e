"""Triplet model: presets, parameter validation, characteristic exponents."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from levygen import (
    InvalidMeasureError,
    LevyMeasure,
    LevyTriplet,
    ParameterError,
    char_exponent,
    make_preset,
    preset,
    preset_parameters,
    ProcessPreset,
    stable_sigma_eff,
    validate_triplet,
)

# Frozen oracle values, computed once by independent quadrature of
# -2 * int_0^inf (cos(y) - 1) y^(-1-alpha) dy and pinned.
LAMBDA_AT_1_ALPHA_15 = 3.3421710328413337
LAMBDA_AT_1_ALPHA_07 = 3.8804111420731973


# ----------------------------------------------------------------------------
# Preset construction and parameter validation
# ----------------------------------------------------------------------------


def test_brownian_preset_triplet():
    t = preset("brownian", A=1.0)
    assert t.A == 1.0 and t.gamma == 0.0
    assert t.measure.is_empty


def test_cp_gaussian_preset_structure():
    t = preset("compound_poisson_gaussian", rate=1.0)
    m = t.measure
    assert t.A == 0.0 and t.gamma == 0.0
    assert m.near_zero_order == 0.0
    # density is rate * standard normal
    x = np.array([-1.0, 0.25, 2.0])
    assert m.density_at(x) == pytest.approx(np.exp(-x * x / 2) / np.sqrt(2 * np.pi))


def test_stable_second_moment_near_zero_closed_form():
    t = preset("symmetric_alpha_stable", alpha=1.5, c=1.0)
    for delta in (1.0, 0.25, 1e-3):
        assert t.measure.second_moment_near_zero(delta) == pytest.approx(
            4.0 * math.sqrt(delta), rel=1e-12
        )


def test_unknown_preset_name_rejected():
    with pytest.raises(ParameterError, match="unknown preset"):
        preset("browniann")


def test_unknown_parameter_rejected():
    with pytest.raises(ParameterError, match="no parameter"):
        preset("brownian", alpha=1.0)


def test_missing_required_parameter_rejected():
    with pytest.raises(ParameterError, match="requires parameter"):
        preset("symmetric_alpha_stable")


def test_out_of_range_parameter_message_shows_interval():
    with pytest.raises(ParameterError, match=r"\(0, 2\)"):
        preset("symmetric_alpha_stable", alpha=2.0)
    with pytest.raises(ParameterError):
        preset("compound_poisson_gaussian", rate=0.0)


def test_preset_parameters_fills_defaults():
    vals = preset_parameters(ProcessPreset("symmetric_alpha_stable", {"alpha": 0.7}))
    assert vals == {"alpha": 0.7, "c": 1.0}


def test_negative_diffusion_rejected():
    with pytest.raises(ParameterError):
        preset("brownian", A=-1.0)


def test_measure_near_zero_order_bounds():
    with pytest.raises(InvalidMeasureError, match="rho"):
        LevyMeasure(
            density=lambda x: np.abs(x) ** -3.0,
            near_zero_order=2.0,
            second_moment_near_zero=lambda d: d,
        )
    with pytest.raises(InvalidMeasureError):
        LevyMeasure(
            density=lambda x: np.ones_like(x),
            near_zero_order=-0.5,
            second_moment_near_zero=lambda d: d,
        )


def test_atom_validation():
    with pytest.raises(InvalidMeasureError, match="atom at 0"):
        LevyMeasure(density=None, atoms=((0.0, 1.0),))
    with pytest.raises(InvalidMeasureError, match="positive"):
        LevyMeasure(density=None, atoms=((1.0, -2.0),))


def test_negative_density_detected_with_location():
    m = LevyMeasure(
        density=lambda x: np.where(np.abs(x) > 0.5, -1.0, 1.0),
        near_zero_order=0.0,
        second_moment_near_zero=lambda d: d**3 / 3.0,
    )
    with pytest.raises(InvalidMeasureError, match="negative at x="):
        m.density_at(np.array([2.0]))


# ----------------------------------------------------------------------------
# Triplet validation
# ----------------------------------------------------------------------------


def test_validate_brownian_trivial():
    rep = validate_triplet(preset("brownian", A=1.0))
    assert rep.passed
    assert rep.moment_integral == 0.0


def test_validate_stable_moment_integral_finite():
    rep = validate_triplet(preset("symmetric_alpha_stable", alpha=1.5, c=1.0))
    assert rep.passed
    assert math.isfinite(rep.moment_integral) and rep.moment_integral > 0


def test_validate_all_presets_pass():
    cases = [
        preset("brownian", A=1.0, gamma=2.0),
        preset("drift", gamma=1.0),
        preset("compound_poisson_gaussian", rate=1.0),
        preset("compound_poisson_bilateral_exponential", rate=2.0, scale=1.0),
        preset("symmetric_alpha_stable", alpha=0.7),
        preset("symmetric_alpha_stable", alpha=1.5),
        preset("tempered_stable", alpha=0.8, theta=1.5),
        preset("tempered_stable", alpha=1.5, theta=2.0),
    ]
    for t in cases:
        assert validate_triplet(t).passed, t.preset


# ----------------------------------------------------------------------------
# Characteristic exponent
# ----------------------------------------------------------------------------


def test_exponent_brownian_closed():
    t = preset("brownian", A=1.0)
    assert char_exponent(t, 2.0) == pytest.approx(2.0, abs=1e-15)


def test_exponent_drift_closed():
    t = preset("drift", gamma=3.0)
    lam = char_exponent(t, 1.0)
    assert lam == pytest.approx(-3.0j, abs=1e-15)


def test_exponent_stable_frozen_oracles():
    t15 = preset("symmetric_alpha_stable", alpha=1.5, c=1.0)
    t07 = preset("symmetric_alpha_stable", alpha=0.7, c=1.0)
    lam15 = char_exponent(t15, 1.0)
    lam07 = char_exponent(t07, 1.0)
    assert lam15.imag == 0.0 and lam15.real > 0
    assert lam15.real == pytest.approx(LAMBDA_AT_1_ALPHA_15, rel=1e-12)
    assert lam07.real == pytest.approx(LAMBDA_AT_1_ALPHA_07, rel=1e-12)
    # scaling law lambda(z) = sigma_eff |z|^alpha
    assert char_exponent(t15, 2.0).real == pytest.approx(
        LAMBDA_AT_1_ALPHA_15 * 2.0**1.5, rel=1e-12
    )


def test_exponent_stable_matches_sigma_eff():
    for alpha in (0.7, 1.0, 1.5):
        t = preset("symmetric_alpha_stable", alpha=alpha, c=1.0)
        assert char_exponent(t, 1.0).real == pytest.approx(
            stable_sigma_eff(alpha, 1.0), rel=1e-12
        )
    assert stable_sigma_eff(1.0, 2.0) == pytest.approx(2.0 * math.pi, rel=1e-15)


def test_exponent_closed_vs_generic_quadrature():
    """Closed jump exponents agree with the quadrature route.

    The quadrature path targets absolute accuracy 1e-13 * (1 + z^2) (the
    oscillatory tail integrals lose relative precision as z grows), so the
    comparison is normalized the same way.
    """
    import dataclasses

    cases = [
        preset("compound_poisson_gaussian", rate=1.0),
        preset("compound_poisson_bilateral_exponential", rate=2.0, scale=1.0),
        preset("symmetric_alpha_stable", alpha=0.7),
        preset("symmetric_alpha_stable", alpha=1.5),
        preset("tempered_stable", alpha=0.8, theta=1.5),
        preset("tempered_stable", alpha=1.5, theta=2.0),
    ]
    z = np.array([-4.0, -1.0, -0.3, 0.0, 0.3, 1.0, 4.0])
    for t in cases:
        closed = t.measure.closed
        assert closed is not None and closed.jump_exponent is not None
        generic_measure = dataclasses.replace(
            t.measure, closed=dataclasses.replace(closed, jump_exponent=None)
        )
        t_gen = LevyTriplet(A=t.A, gamma=t.gamma, measure=generic_measure)
        lam = np.asarray(char_exponent(t, z))
        lam_gen = np.asarray(char_exponent(t_gen, z))
        scale = 1.0 + z * z
        assert np.max(np.abs(lam - lam_gen) / scale) <= 2e-12, t.preset


def test_exponent_atoms_exact():
    # atoms at +/-1 (compensated, boundary closed) and at 2 (not compensated)
    m = LevyMeasure(density=None, atoms=((-1.0, 0.5), (1.0, 1.5), (2.0, 0.25)))
    t = LevyTriplet(A=0.0, gamma=0.0, measure=m)
    z = 0.7

    def term(y, mass, compensate):
        val = np.exp(1j * z * y) - 1.0
        if compensate:
            val -= 1j * z * y
        return -mass * val

    expected = term(-1.0, 0.5, True) + term(1.0, 1.5, True) + term(2.0, 0.25, False)
    assert char_exponent(t, z) == pytest.approx(expected, abs=1e-15)


@given(st.floats(min_value=0.05, max_value=8.0))
def test_exponent_conjugate_symmetry(z):
    t = preset("tempered_stable", alpha=1.5, theta=2.0)
    lam_pos = char_exponent(t, z)
    lam_neg = char_exponent(t, -z)
    assert lam_neg == pytest.approx(np.conj(lam_pos), rel=1e-14, abs=1e-14)


def test_exponent_stable_against_independent_quadrature():
    """lambda(1) for alpha=1.5 equals a directly assembled quadrature value."""
    alpha, z = 1.5, 1.0
    # -2 int_0^inf (cos(zy)-1) y^(-1-alpha) dy, split at 1 with a Taylor
    # correction on (0, delta) -- assembled here independently of the library.
    delta = 1e-4
    head = z**2 * delta ** (2.0 - alpha) / (2.0 - alpha)  # int y^2/2 * 2 y^{-1-a}
    mid, _ = integrate.quad(
        lambda y: (1.0 - np.cos(z * y)) * y ** (-1.0 - alpha), delta, 1.0,
        epsabs=1e-12, epsrel=1e-11, limit=200,
    )
    tail_mass = 1.0 / alpha  # int_1^inf y^(-1-alpha) dy
    tail_osc, _ = integrate.quad(
        lambda y: y ** (-1.0 - alpha), 1.0, np.inf,
        weight="cos", wvar=z, epsabs=1e-12, limlst=100,
    )
    oracle = head + 2.0 * (mid + tail_mass - tail_osc)
    t = preset("symmetric_alpha_stable", alpha=alpha, c=1.0)
    assert char_exponent(t, z).real == pytest.approx(oracle, rel=1e-7)


def test_bilateral_exponential_closed_form():
    # jump exponent r b^2 z^2 / (1 + b^2 z^2)
    r, b = 2.0, 0.5
    t = preset("compound_poisson_bilateral_exponential", rate=r, scale=b)
    for z in (0.3, 1.0, 5.0):
        expected = r * b * b * z * z / (1.0 + b * b * z * z)
        assert char_exponent(t, z).real == pytest.approx(expected, rel=1e-14)


def test_gaussian_cp_closed_form():
    # jump exponent r (1 - exp(-sigma^2 z^2 / 2))
    r, sig = 1.0, 1.0
    t = preset("compound_poisson_gaussian", rate=r, sigma=sig)
    for z in (0.3, 1.0, 5.0):
        expected = r * (1.0 - np.exp(-(sig * z) ** 2 / 2.0))
        assert char_exponent(t, z).real == pytest.approx(expected, rel=1e-14)


def test_tempered_stable_exponent_closed_form():
    # -c Gamma(-alpha) ((theta - iz)^alpha + (theta + iz)^alpha - 2 theta^alpha)
    alpha, c, theta = 1.5, 1.0, 2.0
    t = preset("tempered_stable", alpha=alpha, c=c, theta=theta)
    for z in (0.4, 1.3):
        expected = (
            -c
            * special.gamma(-alpha)
            * (
                (theta - 1j * z) ** alpha
                + (theta + 1j * z) ** alpha
                - 2.0 * theta**alpha
            )
        )
        assert char_exponent(t, z) == pytest.approx(expected, rel=1e-12)


def test_exponent_array_input_shape():
    t = preset("symmetric_alpha_stable", alpha=1.5)
    z = np.linspace(-3, 3, 7)
    lam = char_exponent(t, z)
    assert lam.shape == z.shape
    assert np.allclose(lam[:3], np.conj(lam[-1:-4:-1]))
