import dataclasses
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opa_photothermal.config import (
    DEFAULTS, CAVITY_KEYS, OpaParams, derive_rates, load_params, load_params_file,
    mode_volume, parse_setting, serialize,
)
from opa_photothermal.errors import InvariantViolation, MissingKey, UnitParseError

PARAMS = Path(__file__).resolve().parents[1] / "params" / "table1.cfg"
C = 299792458.0


def test_shipped_file_equals_builtin_defaults():
    p = load_params_file(PARAMS)
    assert p == DEFAULTS
    assert p.z == 7.5e-3
    assert p.xi == 749.0
    assert p.r0 == 36e-6


def test_shipped_file_is_complete_without_defaults():
    assert load_params(PARAMS.read_text(), defaults=False) == DEFAULTS


def test_empty_text_gives_defaults():
    assert load_params("") == DEFAULTS
    assert load_params("# only a comment\n\n") == DEFAULTS


def test_missing_key_without_defaults():
    text = "\n".join(line for line in PARAMS.read_text().splitlines() if not line.startswith("xi "))
    with pytest.raises(MissingKey) as exc:
        load_params(text, defaults=False)
    assert exc.value.name == "xi"


def test_reflectivity_bound():
    with pytest.raises(InvariantViolation):
        load_params("R_a_out = 1.2")


@pytest.mark.parametrize("line", [
    "z = 7.5 parsecs",      # unknown unit
    "z = seven mm",         # not a number
    "bogus_key = 1",        # unknown key
    "z 7.5 mm",             # no '='
    "lambda_a = 1064 %",    # unit from the wrong dimension
])
def test_unit_parse_errors(line):
    with pytest.raises(UnitParseError):
        load_params(line)


def test_unit_conversions():
    assert parse_setting("z = 7.5 mm") == ("z", 0.0075)
    assert parse_setting("R_a_in = 99.96 %") == ("R_a_in", 0.9996)
    assert parse_setting("sigma_b_abs = 4 %/cm") == ("sigma_b_abs", 4.0)
    assert parse_setting("rho = 4.648 g/cm3") == ("rho", 4648.0)
    assert parse_setting("P_seed = 10 mW") == ("P_seed", 0.01)
    key, w = parse_setting("omega_a_det = 1 kHz")
    assert w == pytest.approx(2 * np.pi * 1e3, rel=1e-15)
    key, phi = parse_setting("phi_b = 180 deg")
    assert phi == pytest.approx(np.pi, rel=1e-15)


def test_pump_controls_are_exclusive():
    with pytest.raises(InvariantViolation):
        OpaParams(pump_fraction=0.5, P_pump=0.1)
    with pytest.raises(InvariantViolation):
        OpaParams(pump_fraction=None, P_pump=None)
    q = DEFAULTS.replace(P_pump=0.2)
    assert q.pump_fraction is None and q.P_pump == 0.2
    assert load_params("P_pump = 200 mW").pump_fraction is None


@pytest.mark.parametrize("changes", [
    {"V_A1_in": 0.5, "V_A2_in": 1.5},    # V1 V2 < 1
    {"V_B2_in": -1.0},
    {"lambda_b": 533e-9},
    {"z": 0.0},
    {"pump_fraction": 1.0},
    {"sigma_a_abs": -0.1},
])
def test_invariants(changes):
    with pytest.raises(InvariantViolation):
        DEFAULTS.replace(**changes)


def test_rates_against_hand_computation():
    r = derive_rates(DEFAULTS)
    tau = 2 * 2.233 * 7.5e-3 / C
    assert r.tau_rt == pytest.approx(1.117e-10, rel=1e-3)
    assert r.tau_rt == pytest.approx(tau, rel=1e-14)
    assert r.gamma_a_out == pytest.approx((1 - 0.956) / (2 * tau), rel=1e-12)
    assert r.gamma_a_out == pytest.approx(1.97e8, rel=1e-3)
    # 4 %/cm over 7.5 mm, two passes per round trip
    per_round_trip = 0.04 * 100 * 0.0075 * 2
    assert r.gamma_b_abs == pytest.approx(per_round_trip / (2 * tau), rel=1e-12)
    assert r.gamma_b_abs == pytest.approx(2.69e8, rel=2e-3)


def test_perfect_mirror_zeroes_only_its_rate():
    base = derive_rates(DEFAULTS)
    r = derive_rates(DEFAULTS.replace(R_a_out=1.0))
    assert r.gamma_a_out == 0.0
    for f in ("gamma_a_in", "gamma_a_sc", "gamma_a_abs", "gamma_b_in", "gamma_b_out", "gamma_b_sc", "gamma_b_abs"):
        assert getattr(r, f) == getattr(base, f)


def test_mode_volume_is_cylinder():
    assert mode_volume(2.0, 3.0) == pytest.approx(np.pi * 12.0)
    assert DEFAULTS.mode_volume == pytest.approx(np.pi * 36e-6 ** 2 * 7.5e-3)


reflectivity = st.floats(0.0, 1.0)
loss = st.floats(0.0, 50.0)
positive = st.floats(1e-3, 1e3)


@st.composite
def params(draw):
    lam = draw(st.floats(400e-9, 2000e-9))
    return DEFAULTS.replace(
        lambda_a=lam, lambda_b=lam / 2,
        R_a_in=draw(reflectivity), R_a_out=draw(reflectivity),
        R_b_in=draw(reflectivity), R_b_out=draw(reflectivity),
        sigma_a_abs=draw(loss), sigma_a_sc=draw(loss), sigma_b_abs=draw(loss), sigma_b_sc=draw(loss),
        z=draw(st.floats(1e-4, 0.05)), n=draw(st.floats(1.0, 3.0)),
        kappa0=draw(st.floats(0.0, 1e7)), dT_offset=draw(st.floats(-0.01, 0.01)),
        P_seed=draw(st.floats(0.0, 1.0)), pump_fraction=draw(st.floats(0.0, 0.99)),
        phi_b=draw(st.floats(-np.pi, np.pi)),
        V_B1_in=draw(st.floats(1.0, 100.0)),
    )


@given(params())
@settings(max_examples=200, deadline=None)
def test_serialize_round_trip(p):
    assert load_params(serialize(p)) == p


@given(params())
@settings(max_examples=200, deadline=None)
def test_total_rate_is_exact_sum(p):
    r = derive_rates(p)
    assert r.gamma_a_tot == r.gamma_a_in + r.gamma_a_out + r.gamma_a_sc + r.gamma_a_abs
    assert r.gamma_b_tot == r.gamma_b_in + r.gamma_b_out + r.gamma_b_sc + r.gamma_b_abs
    assert all(getattr(r, f.name) >= 0 for f in dataclasses.fields(r))
    assert r.tau_rt > 0


@given(params(), st.sampled_from([
    ("R_a_in", 1.0, "gamma_a_in"), ("R_b_out", 1.0, "gamma_b_out"),
    ("sigma_a_sc", 0.0, "gamma_a_sc"), ("sigma_b_abs", 0.0, "gamma_b_abs"),
]))
@settings(max_examples=100, deadline=None)
def test_lossless_channel_zeroes_exactly_one_rate(p, case):
    field_name, lossless, rate = case
    before = derive_rates(p)
    after = derive_rates(p.replace(**{field_name: lossless}))
    assert getattr(after, rate) == 0.0
    for f in dataclasses.fields(after):
        if f.init and f.name != rate:
            assert getattr(after, f.name) == getattr(before, f.name)


def test_required_key_list_covers_cavity_parameters():
    assert set(CAVITY_KEYS) <= {f.name for f in dataclasses.fields(OpaParams)}
