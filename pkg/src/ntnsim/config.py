"""Scenario configuration: file format, defaults, validation.

Config files use a small TOML-style grammar::

    # comment
    [section]
    key = value            # int, float (1e9 ok), true/false, or string
    list_key = [a, b, c]   # comma-separated scalars in brackets

Unknown sections or keys are rejected by name; parse failures carry the
line number.  An empty file (or one naming only the experiment) yields
the reference setup: a 600 km satellite with 30/10 deg minimum elevations
transmitting 38 dBW at 20 GHz over 400 MHz to VSAT receivers, and the
70-UE / 128-subcarrier / 0.2 W / 1.4002 W airborne scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any

from .antenna import ArrayGeometry
from .channel import ImpairmentProfile
from .errors import ConfigurationError, DomainError
from .geometry import GeometryContext
from .noma import UavScenarioParams

LEO_BEAMFORMING = "leo_beamforming"
UAV_NOMA_EE = "uav_noma_ee"
EXPERIMENTS = (LEO_BEAMFORMING, UAV_NOMA_EE)

CLEAR_SKY = "clear_sky"
TGPP = "tgpp"
CHANNEL_MODES = (CLEAR_SKY, TGPP)

SCHEMES = ("FR3", "FR4", "MMSE", "LB_MMSE", "ZF")

DEFAULT_DATA_SIZES_BITS = (1e5, 2e5, 4e5, 7e5, 1e6)


@dataclass(frozen=True)
class LeoParams:
    """Single-satellite multi-user downlink experiment parameters."""

    schemes: tuple = ("MMSE", "LB_MMSE", "FR3", "FR4")
    power_dbw: float = 38.0
    carrier_hz: float = 20e9
    bandwidth_hz: float = 400e6
    n_users: int = 50
    channel_mode: str = TGPP
    n_beams: int = 19
    coverage_half_angle_deg: float | None = None  # derived from min elevation if unset
    delta_t_ms: float | None = None               # derived from geometry if unset
    location_error_m: float = 0.0
    estimation_noise_db: float | None = None
    rx_gain_dbi: float = 39.7
    g_over_t_db_k: float = 17.9

    @property
    def total_power_w(self) -> float:
        return 10.0 ** (self.power_dbw / 10.0)


@dataclass(frozen=True)
class UavParams:
    """Airborne experiment: scenario knobs plus the payload sweep."""

    scenario: UavScenarioParams = field(default_factory=UavScenarioParams)
    data_sizes_bits: tuple = DEFAULT_DATA_SIZES_BITS
    n_trials: int = 3


@dataclass(frozen=True)
class ScenarioConfig:
    experiment: str = LEO_BEAMFORMING
    master_seed: int = 1
    n_drops: int = 200
    output_path: str = "results.csv"
    geometry: GeometryContext = field(default_factory=lambda: GeometryContext(600.0))
    array: ArrayGeometry = field(default_factory=ArrayGeometry)
    impairments: ImpairmentProfile = field(default_factory=ImpairmentProfile)
    leo: LeoParams = field(default_factory=LeoParams)
    uav: UavParams = field(default_factory=UavParams)


def _parse_scalar(token: str, lineno: int):
    token = token.strip()
    if not token:
        raise ConfigurationError(f"line {lineno}: empty value")
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    low = token.lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _parse_value(raw: str, lineno: int):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigurationError(f"line {lineno}: unterminated list value {raw!r}")
        inner = raw[1:-1].strip()
        if not inner:
            return ()
        return tuple(_parse_scalar(tok, lineno) for tok in inner.split(","))
    return _parse_scalar(raw, lineno)


def parse_config_text(text: str) -> dict[str, dict[str, Any]]:
    """Parse the raw grammar into {section: {key: value}} without validation."""
    sections: dict[str, dict[str, Any]] = {}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigurationError(f"line {lineno}: malformed section header {raw_line.strip()!r}")
            current = line[1:-1].strip()
            if not current:
                raise ConfigurationError(f"line {lineno}: empty section name")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        if current is None:
            raise ConfigurationError(f"line {lineno}: key outside of any [section]")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigurationError(f"line {lineno}: missing key before '='")
        if key in sections[current]:
            raise ConfigurationError(f"line {lineno}: duplicate key {current}.{key}")
        sections[current][key] = _parse_value(raw_value, lineno)
    return sections


_SECTION_FIELDS = {
    "scenario": ("experiment", "master_seed", "n_drops", "output_path"),
    "geometry": ("altitude_km", "user_min_elevation_deg", "gateway_min_elevation_deg", "earth_radius_km"),
    "array": ("n_rows", "n_cols", "element_spacing_wavelengths", "max_element_gain_dbi", "rolloff_exponent"),
    "impairments": (
        "atmospheric_loss_db", "scintillation_sigma_db", "shadow_sigma_db",
        "atmospheric_enabled", "scintillation_enabled", "shadow_enabled",
        "scintillation_decorrelation_m", "shadow_decorrelation_m",
    ),
    "leo": tuple(f.name for f in fields(LeoParams)),
    "uav": tuple(f.name for f in fields(UavScenarioParams)) + ("data_sizes_bits", "n_trials"),
}


def _check_unknown(sections: dict[str, dict[str, Any]]) -> None:
    for section, entries in sections.items():
        if section not in _SECTION_FIELDS:
            raise ConfigurationError(
                f"unknown section [{section}]; expected one of {sorted(_SECTION_FIELDS)}"
            )
        for key in entries:
            if key not in _SECTION_FIELDS[section]:
                raise ConfigurationError(
                    f"unknown key {section}.{key!r}; expected one of {sorted(_SECTION_FIELDS[section])}"
                )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigurationError(message)


def _finite_number(value, name: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), f"{name} must be a number")
    v = float(value)
    _require(v == v and abs(v) != float("inf"), f"{name} must be finite, got {value!r}")
    return v


def build_config(sections: dict[str, dict[str, Any]]) -> ScenarioConfig:
    """Apply parsed sections over the defaults, validating every field."""
    _check_unknown(sections)

    def section(name: str) -> dict[str, Any]:
        return dict(sections.get(name, {}))

    sc = section("scenario")
    experiment = sc.pop("experiment", LEO_BEAMFORMING)
    _require(experiment in EXPERIMENTS, f"scenario.experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    master_seed = sc.pop("master_seed", 1)
    _require(isinstance(master_seed, int) and not isinstance(master_seed, bool) and master_seed >= 0,
             f"scenario.master_seed must be a non-negative integer, got {master_seed!r}")
    n_drops = sc.pop("n_drops", 200)
    _require(isinstance(n_drops, int) and n_drops >= 1, f"scenario.n_drops must be >= 1, got {n_drops!r}")
    output_path = sc.pop("output_path", "results.csv")
    _require(isinstance(output_path, str) and output_path, "scenario.output_path must be a non-empty string")

    try:
        geo_kwargs = {"altitude_km": 600.0}
        geo_kwargs.update(
            {k: _finite_number(v, f"geometry.{k}") for k, v in section("geometry").items()}
        )
        geometry = GeometryContext(**geo_kwargs)
    except DomainError as exc:
        raise ConfigurationError(f"geometry: {exc}") from exc

    try:
        ar = section("array")
        for k in ("n_rows", "n_cols"):
            if k in ar:
                _require(isinstance(ar[k], int) and ar[k] >= 1, f"array.{k} must be a positive integer")
        array = ArrayGeometry(**ar)
    except DomainError as exc:
        raise ConfigurationError(f"array: {exc}") from exc

    try:
        imp = {
            k: (v if isinstance(v, bool) else _finite_number(v, f"impairments.{k}"))
            for k, v in section("impairments").items()
        }
        impairments = ImpairmentProfile(**imp)
    except DomainError as exc:
        raise ConfigurationError(f"impairments: {exc}") from exc

    leo_raw = section("leo")
    schemes = leo_raw.pop("schemes", LeoParams.schemes)
    if isinstance(schemes, str):
        schemes = (schemes,)
    schemes = tuple(schemes)
    for s in schemes:
        _require(s in SCHEMES, f"leo.schemes entry {s!r} must be one of {SCHEMES}")
    _require(len(schemes) == len(set(schemes)), "leo.schemes must not repeat entries")
    leo_numeric = {}
    for k, v in leo_raw.items():
        if k == "channel_mode":
            _require(v in CHANNEL_MODES, f"leo.channel_mode must be one of {CHANNEL_MODES}, got {v!r}")
            leo_numeric[k] = v
        elif k in ("n_users", "n_beams"):
            _require(isinstance(v, int) and v >= 1, f"leo.{k} must be a positive integer, got {v!r}")
            leo_numeric[k] = v
        elif k in ("coverage_half_angle_deg", "delta_t_ms", "estimation_noise_db") and v is None:
            leo_numeric[k] = None
        else:
            leo_numeric[k] = _finite_number(v, f"leo.{k}")
    leo = LeoParams(schemes=schemes, **leo_numeric)
    _require(leo.bandwidth_hz > 0, "leo.bandwidth_hz must be > 0")
    _require(leo.carrier_hz > 0, "leo.carrier_hz must be > 0")
    _require(leo.location_error_m >= 0, "leo.location_error_m must be >= 0")
    if leo.delta_t_ms is not None:
        _require(leo.delta_t_ms >= 0, "leo.delta_t_ms must be >= 0")

    uav_raw = section("uav")
    data_sizes = uav_raw.pop("data_sizes_bits", DEFAULT_DATA_SIZES_BITS)
    if isinstance(data_sizes, (int, float)):
        data_sizes = (data_sizes,)
    data_sizes = tuple(_finite_number(v, "uav.data_sizes_bits entry") for v in data_sizes)
    _require(len(data_sizes) >= 1, "uav.data_sizes_bits must be non-empty")
    _require(all(v >= 0 for v in data_sizes), "uav.data_sizes_bits entries must be >= 0")
    n_trials = uav_raw.pop("n_trials", 3)
    _require(isinstance(n_trials, int) and n_trials >= 1, f"uav.n_trials must be >= 1, got {n_trials!r}")
    for k in ("n_ues", "n_subcarriers", "k_min", "k_max"):
        if k in uav_raw:
            _require(isinstance(uav_raw[k], int) and uav_raw[k] >= 1, f"uav.{k} must be a positive integer")
    uav_numeric = {
        k: (v if isinstance(v, (bool, int)) else _finite_number(v, f"uav.{k}"))
        for k, v in uav_raw.items()
    }
    try:
        uav_scenario = UavScenarioParams(**uav_numeric)
    except DomainError as exc:
        raise ConfigurationError(f"uav: {exc}") from exc
    uav = UavParams(scenario=uav_scenario, data_sizes_bits=data_sizes, n_trials=n_trials)

    return ScenarioConfig(
        experiment=experiment,
        master_seed=master_seed,
        n_drops=n_drops,
        output_path=output_path,
        geometry=geometry,
        array=array,
        impairments=impairments,
        leo=leo,
        uav=uav,
    )


def load_config(path) -> ScenarioConfig:
    """Read, parse and validate a scenario configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return build_config(parse_config_text(text))
