"""Tunneling rates, parity amplitudes and the diabatic source matrix."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import cumulative_trapezoid

from ionwake import (
    IonChannel,
    Subchannel,
    TwoLevelIonSystem,
    default_grid,
    ionization_amplitude,
    make_pulse,
    n2_calibrated,
    n2_preset,
    source_matrix_diabatic,
    static_rate,
    survival_probability,
    total_rate,
)
from ionwake.pulse import derive_pulse_parameters, field_at
from ionwake.tunneling import (
    FIELD_CLAMP_AU,
    GERADE,
    N2_CHANNEL2_CALIBRATION,
    UNGERADE,
    source_entries,
)

# Frozen from a standalone evaluation of
#   W(F) = g^2 (k/2) (4 k^2/F)^(2/k-1) exp(-2 k^3/(3F)),  k = sqrt(2 Ip)
W_RATIO_0755_0534 = 65.76444123580741
W_CH1_AT_0755 = 0.0003700168846985415
W_CH2_AT_0755 = 7.051094078033079e-06


@pytest.fixture(scope="module")
def ch1():
    return n2_preset().channel_1


@pytest.fixture(scope="module")
def ch2():
    return n2_preset().channel_2


def test_rate_matches_closed_form(ch1, ch2):
    assert static_rate(ch1, 0, 0.0755) == pytest.approx(W_CH1_AT_0755, rel=1e-12)
    assert static_rate(ch2, 0, 0.0755) == pytest.approx(W_CH2_AT_0755, rel=1e-12)


def test_rate_ratio_between_intensities(ch1):
    # peak fields of 2e14 and 1e14 W/cm^2 rounded to the quoted precision
    ratio = static_rate(ch1, 0, 0.0755) / static_rate(ch1, 0, 0.0534)
    assert ratio == pytest.approx(W_RATIO_0755_0534, rel=1e-12)


def test_rate_zero_cases(ch1):
    assert static_rate(ch1, 0, 0.0) == 0.0
    assert static_rate(ch1, 0, FIELD_CLAMP_AU / 2.0) == 0.0
    # unknown m has no subchannel -> coefficient 0
    assert static_rate(ch1, 5, 0.08) == 0.0


def test_rate_no_nan_at_tiny_fields(ch1):
    F = np.array([0.0, 1e-12, 1e-8, 2e-6, 1e-4, 0.01])
    W = static_rate(ch1, 0, F)
    assert np.all(np.isfinite(W))
    assert np.all(W >= 0.0)


def test_rate_strictly_increasing_below_barrier(ch1):
    kappa = ch1.kappa
    # start above the deep-underflow region where W is identically 0
    F = np.linspace(2e-3, kappa**3 / 2.0, 400)
    W = static_rate(ch1, 0, F)
    assert np.all(np.diff(W) > 0.0)


@settings(max_examples=60)
@given(
    st.floats(min_value=2e-3, max_value=0.3),
    st.floats(min_value=1.01, max_value=2.0),
)
def test_rate_monotone_pairs(f, factor):
    ch = n2_preset().channel_1
    hi = min(f * factor, ch.kappa**3 / 2.0)
    if hi > f:
        assert static_rate(ch, 0, hi) > static_rate(ch, 0, f)


def test_deeper_channel_is_much_slower(ch1, ch2):
    for F in (0.03, 0.05, 0.0755):
        assert static_rate(ch1, 0, F) > 10.0 * static_rate(ch2, 0, F)


def test_structure_coefficient_scales_rate_quadratically(ch1):
    boosted = IonChannel(ch1.label, ch1.binding_energy_eV, ch1.parity, (Subchannel(0, 3.0),))
    assert static_rate(boosted, 0, 0.05) == pytest.approx(
        9.0 * static_rate(ch1, 0, 0.05), rel=1e-12
    )


def test_gerade_amplitude_is_even(ch1):
    assert ionization_amplitude(ch1, 0, 0.06) == ionization_amplitude(ch1, 0, -0.06)
    assert ionization_amplitude(ch1, 0, 0.06) > 0.0


def test_ungerade_amplitude_is_odd(ch2):
    plus = ionization_amplitude(ch2, 0, 0.06)
    minus = ionization_amplitude(ch2, 0, -0.06)
    assert plus == -minus
    assert plus != 0.0


def test_amplitude_zero_field(ch1, ch2):
    assert ionization_amplitude(ch1, 0, 0.0) == 0.0
    assert ionization_amplitude(ch2, 0, 0.0) == 0.0


def test_amplitude_squares_to_rate(ch1, ch2):
    for ch in (ch1, ch2):
        for F in (-0.08, -0.03, 0.04, 0.09):
            amp = ionization_amplitude(ch, 0, F)
            assert amp * amp == pytest.approx(static_rate(ch, 0, abs(F)), rel=1e-12)


def test_cross_term_feeds_upper_adiabatic_state():
    """gamma_1 gamma_2 F < 0: TIC transfers population upward, not out."""
    s = n2_preset()
    for F in (0.05, -0.05):
        a1 = ionization_amplitude(s.channel_1, 0, F)
        a2 = ionization_amplitude(s.channel_2, 0, F)
        assert a1 * a2 * F < 0.0


def test_source_matrix_shape_and_symmetry():
    s = n2_preset()
    m = source_matrix_diabatic(s, 0.9, 0.07)
    e = m.entries
    assert e.shape == (2, 2)
    assert np.allclose(e, e.conj().T)
    assert np.all(np.imag(np.diag(e)) == 0.0)
    assert np.imag(e[1, 0]) == 0.0  # real amplitudes -> real cross term


@settings(max_examples=60)
@given(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=-0.12, max_value=0.12),
)
def test_source_matrix_is_psd(rho0, F):
    m = source_matrix_diabatic(n2_calibrated(), rho0, F).entries.real
    det = m[0, 0] * m[1, 1] - m[1, 0] ** 2
    assert m[0, 0] >= 0.0
    assert m[1, 1] >= 0.0
    assert det >= -1e-14


def test_source_matrix_rank_one_per_m():
    # single m value on both channels: the matrix is exactly rank one
    m = source_matrix_diabatic(n2_preset(), 1.0, 0.08).entries.real
    det = m[0, 0] * m[1, 1] - m[1, 0] ** 2
    assert abs(det) < 1e-16 * max(m[0, 0], m[1, 1]) ** 2


def test_source_matrix_rho0_bounds():
    s = n2_preset()
    with pytest.raises(ValueError):
        source_matrix_diabatic(s, -0.1, 0.05)
    with pytest.raises(ValueError):
        source_matrix_diabatic(s, 1.1, 0.05)


def test_source_matrix_depleted_neutral_is_zero():
    e = source_matrix_diabatic(n2_preset(), 0.0, 0.08).entries
    assert np.all(e == 0.0)


def test_single_channel_limit():
    s = n2_preset(g2=0.0)
    e = source_matrix_diabatic(s, 0.8, 0.07).entries.real
    assert e[0, 0] > 0.0
    assert e[1, 1] == 0.0
    assert e[1, 0] == 0.0


def test_cross_term_alternates_between_half_cycles():
    s = n2_calibrated()
    p = make_pulse(1644.0, 2e14, 30.0)
    params = derive_pulse_parameters(p)
    # sample the field at consecutive carrier extrema near the envelope peak
    half_period = params.period / 2.0
    times = np.arange(-3, 4) * half_period
    signs = []
    for t in times:
        F = field_at(params, float(t))
        e = source_matrix_diabatic(s, 1.0, F).entries.real
        signs.append(math.copysign(1.0, e[1, 0]))
    assert all(a * b < 0 for a, b in zip(signs[:-1], signs[1:]))


def test_total_rate_sums_channels():
    s = n2_calibrated()
    F = 0.07
    expected = static_rate(s.channel_1, 0, F) + static_rate(s.channel_2, 0, F)
    assert total_rate(s, F) == pytest.approx(expected, rel=1e-12)


def test_survival_probability_no_field():
    s = n2_preset()
    p = make_pulse(1030.0, 0.0, 30.0)
    g = default_grid(s, p)
    rho0 = survival_probability(s, p, g)
    assert np.all(rho0 == 1.0)


def test_survival_probability_monotone_and_positive(n2cal, sc1030):
    g = default_grid(n2cal, sc1030)
    rho0 = survival_probability(n2cal, sc1030, g)
    assert np.all(np.diff(rho0) <= 0.0)
    assert rho0[-1] > 0.0  # neutral not fully depleted at 2e14
    assert rho0[-1] < 1.0


def test_survival_matches_quadrature_oracle(n2cal, sc1030):
    g = default_grid(n2cal, sc1030)
    rate = total_rate(n2cal, field_at(derive_pulse_parameters(sc1030), g.times()))
    expected = np.exp(-cumulative_trapezoid(rate, dx=g.dt, initial=0.0))
    assert survival_probability(n2cal, sc1030, g) == pytest.approx(expected, rel=1e-12)


def test_survival_scaling_with_structure_coefficients(sc1030):
    """Scaling every g by c scales the rate by c^2, so rho0 -> rho0^(c^2).

    In particular doubling the rates (c = sqrt(2)) squares the survival,
    and doubling the coefficients themselves (c = 2) raises it to the 4th.
    """
    base = n2_preset()
    g = default_grid(base, sc1030)
    r1 = survival_probability(base, sc1030, g)
    r_sqrt2 = survival_probability(
        n2_preset(g1=math.sqrt(2.0), g2=math.sqrt(2.0)), sc1030, g
    )
    r_2 = survival_probability(n2_preset(g1=2.0, g2=2.0), sc1030, g)
    assert r_sqrt2[-1] == pytest.approx(r1[-1] ** 2, rel=1e-9)
    assert r_2[-1] == pytest.approx(r1[-1] ** 4, rel=1e-9)


def test_channel_validation():
    with pytest.raises(ValueError):
        IonChannel("bad", -1.0, GERADE)
    with pytest.raises(ValueError):
        IonChannel("bad", 15.6, "x")
    with pytest.raises(ValueError):
        IonChannel("bad", 15.6, UNGERADE, (Subchannel(0), Subchannel(0)))
    with pytest.raises(ValueError):
        Subchannel(0, -0.5)


def test_system_requires_positive_splitting():
    a = IonChannel("a", 15.6, GERADE)
    b = IonChannel("b", 18.8, UNGERADE)
    with pytest.raises(ValueError):
        TwoLevelIonSystem(b, a, 0.75)


def test_calibration_constant_documented():
    s = n2_calibrated()
    assert s.channel_2.coefficient(0) == N2_CHANNEL2_CALIBRATION
    assert n2_preset().channel_2.coefficient(0) == 1.0
