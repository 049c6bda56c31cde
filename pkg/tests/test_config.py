import pytest
from hypothesis import given, settings, strategies as st

from ramanoam.config import SCHEMA, parse_config
from ramanoam.errors import ConfigError


def test_gamma_units():
    cfg = parse_config("atomic.omega_c = 0.1 Gamma\natomic.gamma_p = 0.05 Gamma\n")
    assert cfg["atomic.omega_c"] == 0.1
    assert cfg["atomic.gamma_p"] == 0.05


def test_mhz_conversion():
    cfg = parse_config("atomic.delta_c = -5.5 MHz")
    assert cfg["atomic.delta_c"] == -5.5 / 5.2


def test_length_and_angle_units():
    cfg = parse_config("beam.waist = 300 um\ndiagnostic.tilt = 0.1 rad\n")
    assert cfg["beam.waist"] == pytest.approx(0.3)
    assert cfg["diagnostic.tilt"] == pytest.approx(5.729577951308232)


def test_non_integer_charge_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("beam.ell = 2.5")
    assert info.value.key == "beam.ell"
    assert info.value.line == 1


def test_unknown_key_rejected_with_line():
    with pytest.raises(ConfigError) as info:
        parse_config("# header\natomic.omega_c = 0.1 Gamma\natomic.omgea_c = 0.1 Gamma\n")
    assert info.value.line == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text", [
    "atomic.omega_c = 0.1",          # unit tag missing
    "atomic.omega_c = 0.1 mm",       # wrong unit kind
    "medium.optical_density = 3 Gamma",
    "beam.waist = abc mm",
    "atomic.omega_c = 0.1 Gamma\natomic.omega_c = 0.2 Gamma",
    "no equals sign here",
    "atomic.gamma_p = -1 Gamma",
    "grid.n = 500",
    "diagnostic.tilt = 60 deg",
    "spectrum.delta_min = 1 Gamma\nspectrum.delta_max = 0 Gamma",
    "beam.ell = 7",
    "steady.rho0 = d",
    "atomic.delta = nan Gamma",
])
def test_invalid_entries(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_defaults_are_listed():
    cfg = parse_config("beam.ell = 3\n")
    assert "beam.ell" not in cfg.defaulted
    assert set(cfg.defaulted) == set(SCHEMA) - {"beam.ell"}


def test_overrides_replace_file_values():
    cfg = parse_config("beam.ell = 3\n", overrides=["beam.ell=-2", "atomic.delta = 1 MHz"])
    assert cfg["beam.ell"] == -2
    assert cfg["atomic.delta"] == 1 / 5.2
    with pytest.raises(ConfigError):
        parse_config("", overrides=["bogus.key=1"])


def test_auto_values():
    cfg = parse_config("diagnostic.focal = auto\ndiagnostic.observe_z = 120 mm")
    assert cfg["diagnostic.focal"] is None
    assert cfg["diagnostic.observe_z"] == 120.0


def test_unknown_mode():
    with pytest.raises(ConfigError):
        parse_config("", mode="plot")


def test_system_from_config():
    cfg = parse_config("atomic.delta_c = 0.5 Gamma\natomic.delta = 0.1 Gamma\n"
                       "atomic.omega_s_phase = 90 deg\n")
    s = cfg.system()
    assert s.delta_s == pytest.approx(0.4)
    assert s.omega_s == pytest.approx(0.02j)


def test_echo_round_trip_defaults():
    cfg = parse_config("atomic.delta_c = -5.5 MHz\nbeam.waist = 1100 um\n")
    again = parse_config(cfg.to_text())
    assert again.values == cfg.values


_finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(_finite, st.floats(0, 1), st.floats(0, 1), st.integers(-4, 4),
       st.floats(0.2, 1.4), st.floats(1, 44), st.sampled_from(["Gamma", "MHz"]))
def test_echo_round_trip(delta, gp, oc, ell, waist, tilt, unit):
    text = (f"atomic.delta = {delta!r} {unit}\natomic.gamma_p = {gp!r} Gamma\n"
            f"atomic.omega_c = {oc!r} Gamma\nbeam.ell = {ell}\nbeam.waist = {waist!r} mm\n"
            f"diagnostic.tilt = {tilt!r} deg\n")
    cfg = parse_config(text)
    again = parse_config(cfg.to_text())
    assert again.values == cfg.values
    assert again.echo() == cfg.echo()
