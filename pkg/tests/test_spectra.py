import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ramanoam import spectra
from ramanoam.bloch import LambdaSystem
from ramanoam.errors import InvalidParameterError
from ramanoam.spectra import MediumSpec, SpectrumScan, analyze_peak, scan_spectrum


def test_bare_absorption_is_unit_lorentzian():
    ds = np.linspace(-4, 4, 801)
    a, d = spectra.absorption_dispersion(0.0, 0.0, 0.0, ds)
    assert np.abs(a - oracles.bare_lorentzian(ds)).max() < 1e-12
    # Dispersive part (gamma/2) Re r with r = i / (i delta_s - gamma/2).
    assert np.abs(d - ds * 0.5 / (0.25 + ds ** 2)).max() < 1e-12


def test_bare_resonance_transmission():
    t = spectra.transmission(LambdaSystem(), MediumSpec(3.0))
    assert t == pytest.approx(math.exp(-3), abs=1e-12)


def test_zero_density_transmits_fully(gain_system):
    assert spectra.transmission(gain_system, MediumSpec(0.0)) == 1.0


def test_medium_rejects_negative_density():
    with pytest.raises(InvalidParameterError):
        MediumSpec(-1.0)


@pytest.mark.parametrize("dc", [0.0, 5.5 / 5.2, -5.5 / 5.2])
def test_eit_transmission_bounded_by_one(dc):
    scan = scan_spectrum(LambdaSystem(omega_c=0.1, delta_c=dc), MediumSpec(3.0), n_points=801)
    mid = scan.transmission[400]
    assert scan.delta_values[400] == 0.0
    assert abs(mid - 1) < 1e-9
    assert scan.transmission.max() <= 1 + 1e-9


def test_gain_spectrum_values(gain_system):
    rep = analyze_peak(scan_spectrum(gain_system, MediumSpec(3.0), (-0.2, 0.2), 4001))
    assert rep.is_gain
    # Peak on two-photon resonance: exp(b0 * (gamma/2) * Im r) with r = 110i/333.
    assert rep.peak_transmission == pytest.approx(math.exp(3 * 0.5 * 110 / 333), rel=1e-9)
    assert rep.peak_delta == pytest.approx(0.0, abs=1e-12)
    assert 0 < rep.fwhm < 1.0
    assert not rep.fwhm_truncated


def test_scan_matches_pointwise_transmission(gain_system):
    scan = scan_spectrum(gain_system.replace(delta_c=0.7), MediumSpec(2.0), (-1, 1), 41)
    for d, t in zip(scan.delta_values, scan.transmission):
        s = LambdaSystem.from_two_photon(0.7, d, gamma_p=0.05, omega_c=0.1)
        assert t == pytest.approx(spectra.transmission(s, MediumSpec(2.0)), rel=1e-13)


def test_absorption_matches_linear_response_oracle():
    rng = np.random.default_rng(2)
    for _ in range(20):
        gp, oc, dc, ds = rng.uniform(1e-3, 1), rng.uniform(0, 1), *rng.uniform(-3, 3, 2)
        r = oracles.linear_response(gp, oc, dc, ds)
        a, d = spectra.absorption_dispersion(oc, gp, dc, ds)
        # Normalisation by the bare on-resonance response |r| = 2/gamma.
        assert float(a) == pytest.approx(-0.5 * r.imag, abs=1e-11)
        assert float(d) == pytest.approx(0.5 * r.real, abs=1e-11)


def test_parallel_scan_identical_to_serial(gain_system):
    a = scan_spectrum(gain_system, MediumSpec(3.0), workers=1)
    b = scan_spectrum(gain_system, MediumSpec(3.0), workers=4)
    assert a.to_csv() == b.to_csv()


def test_degenerate_scan():
    scan = scan_spectrum(LambdaSystem(omega_c=0.1), MediumSpec(3.0), (0.0, 0.0), 2)
    assert scan.delta_values.tolist() == [0.0, 0.0]
    assert scan.transmission[0] == scan.transmission[1]


def test_scan_rejects_bad_grid(gain_system):
    with pytest.raises(InvalidParameterError):
        scan_spectrum(gain_system, MediumSpec(), n_points=1)
    with pytest.raises(InvalidParameterError):
        scan_spectrum(gain_system, MediumSpec(), (1.0, -1.0))
    with pytest.raises(InvalidParameterError):
        SpectrumScan(np.array([0.0, 1.0, 0.5]), np.ones(3), gain_system, MediumSpec())


def test_csv_round_trip(gain_system):
    scan = scan_spectrum(gain_system, MediumSpec(3.0), n_points=51)
    text = scan.to_csv()
    assert text.splitlines()[0] == spectra.CSV_HEADER
    d, t = spectra.read_spectrum_csv(text)
    assert np.array_equal(d, scan.delta_values)
    assert np.array_equal(t, scan.transmission)


def test_fwhm_of_synthetic_lorentzian():
    x = np.linspace(-2, 2, 4001)
    t = 1 + 0.5 * 0.01 / (0.01 + x ** 2)  # HWHM 0.1
    rep = analyze_peak(SpectrumScan(x, t, LambdaSystem(), MediumSpec()))
    assert rep.fwhm == pytest.approx(0.2, rel=1e-4)
    assert rep.peak_gain == pytest.approx(0.5)
    assert rep.fwhm_mhz == pytest.approx(0.2 * 5.2, rel=1e-4)


def test_no_gain_reported(eit_system):
    rep = analyze_peak(scan_spectrum(LambdaSystem(), MediumSpec(3.0)))
    assert not rep.is_gain
    assert rep.fwhm is None


def test_truncated_width_flagged():
    x = np.linspace(-0.05, 0.05, 11)
    rep = analyze_peak(SpectrumScan(x, 1 + 0.1 * np.exp(-x ** 2), LambdaSystem(), MediumSpec()))
    assert rep.fwhm_truncated


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_spectrum_symmetric_under_detuning_reversal(gp, oc, dc, d):
    a1 = spectra.absorption_dispersion(oc, gp, dc, dc - d)
    a2 = spectra.absorption_dispersion(oc, gp, -dc, -dc + d)
    assert float(a1[0]) == pytest.approx(float(a2[0]), abs=1e-12)
    assert float(a1[1]) == pytest.approx(-float(a2[1]), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(-3, 3), st.floats(-3, 3))
def test_unpumped_medium_never_amplifies(oc, dc, ds):
    a, _ = spectra.absorption_dispersion(oc, 0.0, dc, ds)
    assert float(a) >= -1e-15
