"""OPA parameter set, config-file parsing and cavity damping rates.

Config files are flat ``key = value [unit]`` text, one key per line, ``#``
starts a comment.  Values are converted to SI on load; a bare number is
taken to already be in SI (fractions for reflectivities, 1/m for loss
rates, rad/s for detunings).
"""
from __future__ import annotations

import dataclasses
import re
from decimal import Decimal
from dataclasses import dataclass, field
from typing import Optional

from scipy.constants import c as SPEED_OF_LIGHT, hbar, pi

from .errors import InvariantViolation, MissingKey, UnitParseError


# unit label -> SI factor, grouped by physical dimension
_UNITS = {
    "length": {"m": "1", "cm": "1e-2", "mm": "1e-3", "um": "1e-6", "nm": "1e-9"},
    "fraction": {"%": "1e-2", "1": "1"},
    "loss": {"1/m": "1", "/m": "1", "1/cm": "1e2", "/cm": "1e2", "%/cm": "1", "%/m": "1e-2"},
    "power": {"W": "1", "mW": "1e-3", "uW": "1e-6"},
    "temperature": {"K": "1", "mK": "1e-3"},
    "rate": {"rad/s": "1", "Hz": 2 * pi, "kHz": 2e3 * pi, "MHz": 2e6 * pi},
    "angle": {"rad": "1", "deg": pi / 180},
    "density": {"kg/m3": "1", "g/cm3": "1e3"},
    "heat": {"J/kg/K": "1"},
    "conductivity": {"W/K/m": "1", "W/m/K": "1"},
    "coupling": {"1/m/s": "1"},
    "mismatch": {"1/m/K": "1"},
    "per_kelvin": {"1/K": "1"},
    "plain": {"1": "1"},
}
# decimal-string factors convert exactly, so "99.96 %" gives the literal 0.9996

_DIMENSION = {
    "lambda_a": "length", "lambda_b": "length", "z": "length", "r0": "length",
    "R_a_in": "fraction", "R_a_out": "fraction", "R_b_in": "fraction", "R_b_out": "fraction",
    "sigma_a_abs": "loss", "sigma_a_sc": "loss", "sigma_b_abs": "loss", "sigma_b_sc": "loss",
    "kappa0": "coupling", "n": "plain", "n_a": "plain", "n_b": "plain",
    "C": "heat", "rho": "density", "kappa_th": "conductivity", "xi": "mismatch",
    "alpha_a": "per_kelvin", "alpha_b": "per_kelvin", "dn_a_dT": "per_kelvin", "dn_b_dT": "per_kelvin",
    "dT_offset": "temperature", "omega_a_det": "rate", "omega_b_det": "rate",
    "P_seed": "power", "P_pump": "power", "pump_fraction": "fraction",
    "phi_a": "angle", "phi_b": "angle",
    "V_A1_in": "plain", "V_A2_in": "plain", "V_B1_in": "plain", "V_B2_in": "plain",
}

# keys that must be present when loading without defaults
CAVITY_KEYS = (
    "lambda_a", "lambda_b", "R_a_in", "R_a_out", "R_b_in", "R_b_out",
    "sigma_a_abs", "sigma_a_sc", "sigma_b_abs", "sigma_b_sc", "z", "kappa0", "n",
    "C", "rho", "kappa_th", "r0", "xi", "alpha_a", "alpha_b", "dn_a_dT", "dn_b_dT",
    "dT_offset", "omega_a_det", "omega_b_det",
)


@dataclass(frozen=True)
class OpaParams:
    """Physical parameters of the OPA plus its drive fields, all SI."""

    lambda_a: float = 1064e-9
    lambda_b: float = 532e-9
    R_a_in: float = 0.9996
    R_a_out: float = 0.956
    R_b_in: float = 0.04
    R_b_out: float = 0.9996
    sigma_a_abs: float = 0.1          # 0.1 %/cm
    sigma_a_sc: float = 0.02
    sigma_b_abs: float = 4.0
    sigma_b_sc: float = 0.5
    z: float = 7.5e-3
    kappa0: float = 8e5
    n: float = 2.233
    C: float = 633.0
    rho: float = 4648.0
    kappa_th: float = 4.0
    r0: float = 36e-6
    xi: float = 749.0
    alpha_a: float = 5e-6
    alpha_b: float = 5e-6
    dn_a_dT: float = 3.3e-6
    dn_b_dT: float = 37.0e-6
    dT_offset: float = 0.001
    omega_a_det: float = 0.0
    omega_b_det: float = 0.0
    # drive settings
    P_seed: float = 1e-3
    phi_a: float = 0.0
    phi_b: float = 0.0
    pump_fraction: Optional[float] = 0.5
    P_pump: Optional[float] = None
    V_A1_in: float = 1.0
    V_A2_in: float = 1.0
    V_B1_in: float = 1.0
    V_B2_in: float = 1.0
    # refractive-index overrides, default to ``n``
    n_a: Optional[float] = None
    n_b: Optional[float] = None

    def __post_init__(self):
        validate(self)

    @property
    def index_a(self) -> float:
        return self.n if self.n_a is None else self.n_a

    @property
    def index_b(self) -> float:
        return self.n if self.n_b is None else self.n_b

    @property
    def omega_a(self) -> float:
        """Optical angular frequency of the fundamental."""
        return 2 * pi * SPEED_OF_LIGHT / self.lambda_a

    @property
    def omega_b(self) -> float:
        return 2 * pi * SPEED_OF_LIGHT / self.lambda_b

    @property
    def mode_volume(self) -> float:
        return mode_volume(self.r0, self.z)

    @property
    def input_variances(self):
        return (self.V_A1_in, self.V_A2_in, self.V_B1_in, self.V_B2_in)

    def replace(self, **changes) -> "OpaParams":
        """Copy with fields changed; setting one pump control clears the other."""
        if "P_pump" in changes and changes["P_pump"] is not None and "pump_fraction" not in changes:
            changes["pump_fraction"] = None
        if "pump_fraction" in changes and changes["pump_fraction"] is not None and "P_pump" not in changes:
            changes["P_pump"] = None
        return dataclasses.replace(self, **changes)


def mode_volume(r0, z):
    """Interaction volume, a cylinder of radius r0 over the crystal length."""
    return pi * r0 ** 2 * z


def validate(p: OpaParams) -> None:
    for name in ("R_a_in", "R_a_out", "R_b_in", "R_b_out"):
        v = getattr(p, name)
        if not 0.0 <= v <= 1.0:
            raise InvariantViolation(f"{name} = {v} outside [0, 1]")
    for name in ("sigma_a_abs", "sigma_a_sc", "sigma_b_abs", "sigma_b_sc", "kappa0", "P_seed"):
        v = getattr(p, name)
        if not v >= 0.0:
            raise InvariantViolation(f"{name} = {v} must be >= 0")
    for name in ("lambda_a", "lambda_b", "z", "r0", "n", "C", "rho", "kappa_th"):
        v = getattr(p, name)
        if not v > 0.0:
            raise InvariantViolation(f"{name} = {v} must be > 0")
    for name in ("n_a", "n_b"):
        v = getattr(p, name)
        if v is not None and not v > 0.0:
            raise InvariantViolation(f"{name} = {v} must be > 0")
    if abs(p.lambda_b - p.lambda_a / 2) > 1e-6 * p.lambda_b:
        raise InvariantViolation("lambda_b must equal lambda_a / 2 within 1 ppm")
    if (p.pump_fraction is None) == (p.P_pump is None):
        raise InvariantViolation("exactly one of pump_fraction / P_pump must be set")
    if p.pump_fraction is not None and not 0.0 <= p.pump_fraction < 1.0:
        raise InvariantViolation(f"pump_fraction = {p.pump_fraction} must lie in [0, 1)")
    if p.P_pump is not None and not p.P_pump >= 0.0:
        raise InvariantViolation(f"P_pump = {p.P_pump} must be >= 0")
    for v1, v2, port in ((p.V_A1_in, p.V_A2_in, "A_in"), (p.V_B1_in, p.V_B2_in, "B_in")):
        if v1 < 0 or v2 < 0:
            raise InvariantViolation(f"{port} input variances must be >= 0")
        if v1 * v2 < 1.0 - 1e-12:
            raise InvariantViolation(f"{port} input variances violate V1*V2 >= 1")


DEFAULTS = OpaParams()

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*(\S+)?\s*$")


def _parse_value(key, raw, unit):
    if key not in _DIMENSION:
        raise UnitParseError(key, "unknown key")
    if raw.lower() == "none":
        if key in ("pump_fraction", "P_pump", "n_a", "n_b"):
            return None
        raise UnitParseError(key, "'none' not allowed")
    try:
        value = float(raw)
    except ValueError:
        raise UnitParseError(key, f"not a number: {raw!r}") from None
    if unit is None:
        return value
    table = _UNITS[_DIMENSION[key]]
    if unit not in table:
        raise UnitParseError(key, f"unit {unit!r} not valid here (allowed: {', '.join(table)})")
    factor = table[unit]
    if isinstance(factor, str):
        return float(Decimal(raw) * Decimal(factor))
    return value * factor


def parse_setting(text: str):
    """Parse a single ``key = value [unit]`` setting into ``(key, SI value)``."""
    m = _LINE.match(text.strip())
    if m is None:
        key = text.split("=", 1)[0].strip() or "?"
        raise UnitParseError(key, f"malformed setting: {text!r}")
    key, raw, unit = m.groups()
    return key, _parse_value(key, raw, unit)


def load_params(config_text: str, defaults: bool = True) -> OpaParams:
    """Parse config text into an :class:`OpaParams`.

    With ``defaults=True`` unspecified keys take the reference crystal values and the
    default drive (1 mW seed, half threshold pump, shot-noise-limited inputs).
    With ``defaults=False`` every cavity and crystal key must be present.
    """
    values = {}
    for lineno, line in enumerate(config_text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            key = line.split("=", 1)[0].strip() or f"line {lineno}"
            raise UnitParseError(key, f"malformed line {lineno}: {line!r}")
        key, raw, unit = m.groups()
        values[key] = _parse_value(key, raw, unit)

    if not defaults:
        for key in CAVITY_KEYS:
            if key not in values:
                raise MissingKey(key)

    if "P_pump" in values and values["P_pump"] is not None and "pump_fraction" not in values:
        values["pump_fraction"] = None
    try:
        return OpaParams(**values)
    except TypeError as exc:  # pragma: no cover - guarded by _DIMENSION
        raise UnitParseError("?", str(exc)) from None


def load_params_file(path) -> OpaParams:
    with open(path) as fh:
        return load_params(fh.read())


def serialize(p: OpaParams) -> str:
    """SI text form of ``p``; ``load_params(serialize(p)) == p`` exactly."""
    lines = []
    for f in dataclasses.fields(p):
        v = getattr(p, f.name)
        lines.append(f"{f.name} = {'none' if v is None else repr(float(v))}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CavityRates:
    """Amplitude damping rates (1/s) of both carriers and the round-trip time."""

    tau_rt: float
    gamma_a_in: float
    gamma_a_out: float
    gamma_a_sc: float
    gamma_a_abs: float
    gamma_b_in: float
    gamma_b_out: float
    gamma_b_sc: float
    gamma_b_abs: float
    gamma_a_tot: float = field(init=False)
    gamma_b_tot: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma_a_tot",
                           self.gamma_a_in + self.gamma_a_out + self.gamma_a_sc + self.gamma_a_abs)
        object.__setattr__(self, "gamma_b_tot",
                           self.gamma_b_in + self.gamma_b_out + self.gamma_b_sc + self.gamma_b_abs)

    def replace(self, **changes) -> "CavityRates":
        kw = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}
        kw.update(changes)
        return CavityRates(**kw)


def round_trip_time(p: OpaParams) -> float:
    # monolithic standing-wave cavity: optical path 2 n z per round trip
    return 2 * p.n * p.z / SPEED_OF_LIGHT


def derive_rates(p: OpaParams) -> CavityRates:
    tau = round_trip_time(p)
    # crystal is traversed twice per round trip
    return CavityRates(
        tau_rt=tau,
        gamma_a_in=(1 - p.R_a_in) / (2 * tau),
        gamma_a_out=(1 - p.R_a_out) / (2 * tau),
        gamma_a_sc=2 * p.sigma_a_sc * p.z / (2 * tau),
        gamma_a_abs=2 * p.sigma_a_abs * p.z / (2 * tau),
        gamma_b_in=(1 - p.R_b_in) / (2 * tau),
        gamma_b_out=(1 - p.R_b_out) / (2 * tau),
        gamma_b_sc=2 * p.sigma_b_sc * p.z / (2 * tau),
        gamma_b_abs=2 * p.sigma_b_abs * p.z / (2 * tau),
    )


def photon_energy(wavelength: float) -> float:
    return hbar * 2 * pi * SPEED_OF_LIGHT / wavelength


__all__ = [
    "OpaParams", "CavityRates", "DEFAULTS", "CAVITY_KEYS", "load_params", "load_params_file",
    "serialize", "parse_setting", "derive_rates", "round_trip_time", "mode_volume", "validate", "photon_energy",
]
