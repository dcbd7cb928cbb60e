import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles as O
from entropometer import thermo
from entropometer.errors import DomainError
from entropometer.spectra import EnergySpectrum, harmonic, random_spectrum, two_level


@st.composite
def spectra(draw, ground_zero=True):
    seed = draw(st.integers(0, 2**32))
    n = draw(st.integers(2, 24))
    s = random_spectrum(seed, n, 0.0, 10.0, max_degeneracy=3)
    if ground_zero:
        s = s.shifted(-s.ground_energy)
    return s


log_betas = st.floats(-3, 3).map(lambda x: 10.0**x)


def test_two_level_reference_values(tl):
    p = thermo.thermo_point(tl, 1.0)
    assert p.lnZ == pytest.approx(O.TL_LNZ_BETA1, rel=1e-14)
    assert p.E == pytest.approx(O.TL_E_BETA1, rel=1e-14)
    assert p.S == pytest.approx(O.TL_S_BETA1, rel=1e-14)
    assert p.C == pytest.approx(O.TL_C_BETA1, rel=1e-13)
    assert thermo.entropy_se(tl, 0.5) == pytest.approx(O.TL_S_BETA_HALF, rel=1e-14)
    # the closed forms quoted to six places
    assert abs(p.lnZ - 0.313262) < 1e-6 and abs(p.E - 0.268941) < 1e-6
    assert abs(p.S - 0.582203) < 1e-6 and abs(p.C - 0.196612) < 1e-6


def test_oscillator_partition_function(osc):
    assert thermo.ln_partition(osc, 1.0) == pytest.approx(O.OSC64_LNZ_BETA1, abs=1e-12)
    assert abs(thermo.ln_partition(osc, 1.0) - math.log(1 / (1 - math.exp(-1)))) < 1e-12


@given(spectra(ground_zero=False), log_betas)
def test_against_direct_summation(s, beta):
    lnZ, E, S, C = (float(x) for x in O.mp_stats(s.levels, beta))
    p = thermo.thermo_point(s, beta)
    assert p.lnZ == pytest.approx(lnZ, rel=1e-12, abs=1e-12)
    assert p.E == pytest.approx(E, rel=1e-12, abs=1e-12)
    assert p.S == pytest.approx(S, rel=1e-10, abs=1e-12)
    assert p.C == pytest.approx(C, rel=1e-9, abs=1e-14)


def test_shifted_partition_function(tl):
    for beta in (0.3, 1.0, 4.0):
        assert thermo.ln_partition(tl.shifted(2.5), beta) == pytest.approx(thermo.ln_partition(tl, beta) - beta * 2.5)


def test_energy_limits(tl):
    sym = EnergySpectrum.from_levels([(-1, 1), (1, 1)])
    assert abs(thermo.mean_energy(sym, 1e-12)) < 1e-11
    assert thermo.mean_energy(tl, 50.0) == pytest.approx(math.exp(-50), rel=1e-12)
    assert thermo.entropy_se(tl, 1e-9) == pytest.approx(math.log(2), abs=1e-8)


def test_two_weight_heat_capacity():
    # 3-fold ground and 5-fold excited level behave as a two-level system with ratio 5/3
    s = EnergySpectrum.from_levels([(0, 3), (0.7, 5)])
    beta = 1.3
    x = 5 / 3 * math.exp(-beta * 0.7)
    assert thermo.heat_capacity(s, beta) == pytest.approx((beta * 0.7) ** 2 * x / (1 + x) ** 2, rel=1e-13)


@given(spectra(), st.floats(-1.5, 1.5).map(lambda x: 10.0**x))
def test_heat_capacity_matches_energy_derivative(s, beta):
    # ground at zero so the differenced energies keep the excitation at full precision
    h = 1e-4 * beta
    dE = (
        -thermo.mean_energy(s, beta + 2 * h)
        + 8 * thermo.mean_energy(s, beta + h)
        - 8 * thermo.mean_energy(s, beta - h)
        + thermo.mean_energy(s, beta - 2 * h)
    ) / (12 * h)
    C = thermo.heat_capacity(s, beta)
    assume(C > 1e-200)
    assert C == pytest.approx(-beta**2 * dE, rel=1e-6)


@given(spectra(ground_zero=False), log_betas)
def test_heat_capacity_positive(s, beta):
    assume(thermo.excitation_energy(s, beta) > 1e-290)
    assert thermo.heat_capacity(s, beta) > 0


def test_vectorized_shapes(tl):
    betas = np.array([[0.5, 1.0], [2.0, 3.0]])
    assert thermo.mean_energy(tl, betas).shape == (2, 2)
    assert isinstance(thermo.mean_energy(tl, 1.0), float)
    np.testing.assert_allclose(thermo.beta_from_energy(tl, thermo.mean_energy(tl, betas)), betas, rtol=1e-12)


def test_beta_inversion_examples(tl):
    assert thermo.beta_from_energy(tl, 0.268941) == pytest.approx(1.0, abs=1e-5)
    assert thermo.beta_from_energy(tl, O.TL_E_BETA1) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DomainError) as upper:
        thermo.beta_from_energy(tl, 0.5)
    assert upper.value.bound == "upper"
    with pytest.raises(DomainError) as lower:
        thermo.beta_from_energy(tl, -0.1)
    assert lower.value.bound == "lower"
    with pytest.raises(DomainError):
        thermo.beta_from_energy(tl, 0.0)
    with pytest.raises(DomainError):
        thermo.beta_from_energy(tl, float("nan"))


@pytest.mark.parametrize("beta", [-1.0, 0.0, float("inf"), float("nan")])
def test_invalid_beta(tl, beta):
    with pytest.raises(DomainError):
        thermo.mean_energy(tl, beta)


@given(spectra(), st.floats(-3, 3).map(lambda x: 10.0**x))
def test_round_trip_energy(s, beta):
    # ground at zero: E itself carries the excitation energy at full precision
    E = thermo.mean_energy(s, beta)
    assume(E > 1e-290)
    assert thermo.beta_from_energy(s, E) == pytest.approx(beta, rel=1e-9)


@given(spectra(ground_zero=False), st.floats(-3, 3).map(lambda x: 10.0**x))
def test_round_trip_excitation(s, beta):
    u = thermo.excitation_energy(s, beta)
    assume(u > 1e-290)
    assert thermo.beta_from_excitation(s, u) == pytest.approx(beta, rel=1e-9)


def test_round_trip_limit_of_float_resolution(tl):
    # exp(-1000) underflows: the state is indistinguishable from the ground level
    assert thermo.mean_energy(tl, 1000.0) == 0.0
    with pytest.raises(DomainError, match="lower bound"):
        thermo.beta_from_energy(tl, thermo.mean_energy(tl, 1000.0))
    assert thermo.beta_from_energy(tl, thermo.mean_energy(tl, 600.0)) == pytest.approx(600.0, rel=1e-12)


@given(spectra(ground_zero=False), st.floats(0.05, 0.95))
def test_entropy_slope_is_beta(s, frac):
    e_min, e_top = thermo.admissible_interval(s)
    E = e_min + frac * (e_top - e_min)
    h = 1e-5 * (e_top - e_min) * min(frac, 1 - frac)
    dS = (thermo.entropy_from_energy(s, E + h) - thermo.entropy_from_energy(s, E - h)) / (2 * h)
    assert dS == pytest.approx(thermo.beta_from_energy(s, E), rel=1e-6)


@given(spectra(ground_zero=False), st.floats(-10, 10), log_betas)
def test_shift_covariance(s, c, beta):
    t = s.shifted(c)
    assume(t.n_levels == s.n_levels)
    assert thermo.mean_energy(t, beta) == pytest.approx(thermo.mean_energy(s, beta) + c, rel=1e-12, abs=1e-12)
    assert thermo.entropy_se(t, beta) == pytest.approx(thermo.entropy_se(s, beta), rel=1e-12, abs=1e-300)
    assert thermo.heat_capacity(t, beta) == pytest.approx(thermo.heat_capacity(s, beta), rel=1e-9, abs=1e-300)


def test_entropy_increment(tl):
    E1, E2 = thermo.mean_energy(tl, 1.0), thermo.mean_energy(tl, 0.5)
    assert thermo.h1(tl, E2, E1) == pytest.approx(O.TL_DELTA_S, abs=1e-14)
    assert abs(thermo.h1(tl, E2, E1) - 0.080645) < 1e-6
    assert thermo.h1(tl, E1, E1) == 0.0
    grid = np.linspace(1e-3, 0.499, 100)
    assert np.all(np.diff(thermo.h1(tl, grid, E1)) > 0)


def test_entropy_inversion(osc):
    for beta in (0.01, 0.3, 1.0, 7.0):
        S = thermo.entropy_se(osc, beta)
        assert thermo.beta_from_entropy(osc, S) == pytest.approx(beta, rel=1e-10)
    lo, hi = thermo.entropy_bounds(osc)
    assert (lo, hi) == (0.0, pytest.approx(math.log(64)))
    for bad in (lo, hi, -1.0):
        with pytest.raises(DomainError):
            thermo.beta_from_entropy(osc, bad)


def test_entropy_from_energy_oracle(osc):
    E = 3.1
    assert thermo.entropy_from_energy(osc, E) == pytest.approx(float(O.mp_entropy_of_energy(osc.levels, E)), rel=1e-12)


def test_canonical_probabilities_expand_degeneracies():
    s = EnergySpectrum.from_levels([(0, 2), (1, 1)])
    p = thermo.canonical_probabilities(s, 1.0)
    z = 2 + math.exp(-1)
    np.testing.assert_allclose(p, [1 / z, 1 / z, math.exp(-1) / z], rtol=1e-15)
    assert O.shannon(p) == pytest.approx(thermo.entropy_se(s, 1.0), rel=1e-14)


def test_canonical_state(tl):
    st_ = thermo.CanonicalState(tl, 1.0)
    assert st_.energy == pytest.approx(O.TL_E_BETA1, rel=1e-14)
    assert st_.entropy == pytest.approx(O.TL_S_BETA1, rel=1e-14)
    assert st_.probabilities.sum() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        thermo.CanonicalState(tl, -1.0)


def test_large_spectrum_is_fast():
    s = harmonic(0.01, 10_000)
    betas = np.geomspace(1e-3, 1e3, 200)
    E = thermo.mean_energy(s, betas)
    np.testing.assert_allclose(thermo.beta_from_energy(s, E[E > 0]), betas[E > 0], rtol=1e-9)
