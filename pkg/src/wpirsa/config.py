"""Scenario configuration and its flat ``key = value`` text format.

Example file::

    # four users, eight-antenna beacons
    antennas = 8
    csi_mode = acsi
    pb_power_w = 2.0

Unlisted keys keep their defaults, which are the reference system
parameters (10.73 mW harvester saturation, 3 m beacon distance, 2 dB
Rician factor, and so on). Note that with ``charge_efficiency = 1`` those
parameters harvest far less than one packet of energy per frame.
"""

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .agent import LearningParams
from .channel import ChannelParams, exponential_correlation
from .errors import ConfigError, WpirsaError
from .harvest import CostModel, CsiMode, EhCurve, packet_quantum

__all__ = [
    "SCHEMES",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "save_config",
    "parse_value",
    "format_value",
]

SCHEMES = ("qlearning", "crdsa")


@dataclass(frozen=True)
class ScenarioConfig:
    users: int = 4
    antennas: int = 4
    csi_mode: CsiMode = CsiMode.FULL
    cost_model: CostModel = CostModel.FIXED
    scheme: str = "qlearning"
    # propagation
    carrier_frequency_hz: float = 2.5e9
    speed_of_light_m_s: float = 3e8
    pathloss_exponent: float = 2.7
    kappa_db: float = 2.0
    pb_user_distance_m: float = 3.0
    bs_user_distance_m: float = 70.0
    azimuth_rad: float = 0.0
    scattering_correlation: float = 0.0
    # harvesting and battery
    eh_saturation_mw: float = 10.73
    eh_c0: float = 0.2308
    eh_c1: float = 5.365
    charge_efficiency: float = 1.0
    pb_power_w: float = 1.0
    charging_slot_s: float = 1e-3
    data_slot_s: float = 1e-3
    tx_power_mw: float = 10.0
    packet_size: float = 21.0
    battery_capacity: int = 6
    initial_energy: float = 0.0
    # access protocol
    slots_per_frame: int = 5
    max_packets: int = 5
    # learning
    learning_rate: float = 0.1
    discount: float = 0.1
    epsilon0: float = 0.5
    epsilon_min: float = 0.01
    decay_rate: float | None = None
    horizon: int | None = None
    random_q_init: bool = False
    shared_reward: bool = False
    # experiment
    frames: int = 5000
    runs: int = 10
    seed: int = 0

    def __post_init__(self):
        for name, enum_type in (("csi_mode", CsiMode), ("cost_model", CostModel)):
            value = getattr(self, name)
            if not isinstance(value, enum_type):
                try:
                    object.__setattr__(self, name, enum_type.parse(value))
                except WpirsaError as exc:
                    raise ConfigError(str(exc), name) from None
        positive = ("carrier_frequency_hz", "speed_of_light_m_s", "pathloss_exponent",
                    "pb_user_distance_m", "bs_user_distance_m", "eh_saturation_mw", "eh_c0",
                    "charge_efficiency", "pb_power_w", "data_slot_s", "tx_power_mw",
                    "packet_size")
        for name in positive:
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"must be a positive finite number, got {v!r}", name)
        at_least_one = ("users", "antennas", "battery_capacity", "slots_per_frame",
                        "frames", "runs")
        for name in at_least_one:
            if getattr(self, name) < 1:
                raise ConfigError(f"must be >= 1, got {getattr(self, name)!r}", name)
        if self.max_packets < 0:
            raise ConfigError("must be >= 0", "max_packets")
        if not self.charging_slot_s >= 0:
            raise ConfigError("must be >= 0", "charging_slot_s")
        if not 0 <= self.initial_energy <= self.battery_capacity:
            raise ConfigError("must lie in [0, battery_capacity] (packets)", "initial_energy")
        if not 0 <= self.azimuth_rad <= 2 * math.pi:
            raise ConfigError("must lie in [0, 2 pi]", "azimuth_rad")
        if not 0 <= self.scattering_correlation < 1:
            raise ConfigError("must lie in [0, 1)", "scattering_correlation")
        if not math.isfinite(self.kappa_db):
            raise ConfigError("must be finite", "kappa_db")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"must be one of {', '.join(SCHEMES)}", "scheme")
        if self.seed < 0:
            raise ConfigError("must be non-negative", "seed")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError("must be >= 1", "horizon")
        # delegate the remaining range checks to the component types
        for build, key in ((self.learning_params, "learning"), (self.channel_params, "channel"),
                           (self.eh_curve, "eh")):
            try:
                build()
            except ConfigError:
                raise
            except WpirsaError as exc:
                raise ConfigError(str(exc), key) from None

    @property
    def kappa_linear(self):
        return 10 ** (self.kappa_db / 10)

    @property
    def quantum(self):
        """Energy of one replica in mJ."""
        return packet_quantum(self.tx_power_mw, self.data_slot_s, self.packet_size)

    @property
    def baseline(self):
        return self.scheme == "crdsa"

    def channel_params(self):
        R = None
        if self.scattering_correlation:
            R = exponential_correlation(self.antennas, self.scattering_correlation)
        return ChannelParams(
            carrier_frequency_hz=self.carrier_frequency_hz,
            speed_of_light_m_s=self.speed_of_light_m_s,
            pathloss_exponent=self.pathloss_exponent,
            rician_kappa_linear=self.kappa_linear,
            antennas=self.antennas,
            pb_user_distance_m=self.pb_user_distance_m,
            bs_user_distance_m=self.bs_user_distance_m,
            azimuth_rad=self.azimuth_rad,
            scattering_covariance=R,
        )

    def eh_curve(self):
        return EhCurve(self.eh_saturation_mw, self.eh_c0, self.eh_c1)

    def learning_params(self):
        return LearningParams(
            learning_rate=self.learning_rate,
            discount=self.discount,
            epsilon0=self.epsilon0,
            decay_rate=self.decay_rate,
            horizon=self.horizon if self.horizon is not None else self.frames,
            epsilon_min=self.epsilon_min,
        )

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in fields(ScenarioConfig)}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}
_NONE = {"none", "auto", ""}


def _kind(name):
    t = _FIELDS[name].type
    return t if isinstance(t, str) else getattr(t, "__name__", str(t))


def parse_value(name, text):
    """Convert the textual value of key ``name`` to its Python type."""
    if name not in _FIELDS:
        raise ConfigError("unknown key", name)
    kind = _kind(name)
    raw = text.strip()
    try:
        if kind.endswith("| None"):
            if raw.lower() in _NONE:
                return None
            kind = kind[: -len("| None")].strip()
        if kind == "int":
            v = float(raw)
            if not v.is_integer():
                raise ValueError
            return int(v)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError
        if kind == "CsiMode":
            return CsiMode.parse(raw)
        if kind == "CostModel":
            return CostModel.parse(raw)
        if kind == "str":
            return raw.lower()
    except (ValueError, WpirsaError):
        raise ConfigError(f"cannot read {raw!r} as {kind}", name) from None
    raise ConfigError(f"unsupported type {kind}", name)


def format_value(value):
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (CsiMode, CostModel)):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def iter_pairs(text, source="<string>"):
    """Yield ``(lineno, key, value)`` for each non-blank, non-comment line."""
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: missing key")
        yield lineno, key, value


def parse_config(text, base=None, source="<string>"):
    """Parse config text on top of ``base`` (defaults when omitted)."""
    values = {}
    for lineno, key, value in iter_pairs(text, source):
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key", key)
        values[key] = parse_value(key, value)
    base = base or ScenarioConfig()
    try:
        return dataclasses.replace(base, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def dump_config(config):
    """Render every field, so that ``parse_config(dump_config(c)) == c``."""
    lines = [f"{f.name} = {format_value(getattr(config, f.name))}" for f in fields(config)]
    return "\n".join(lines) + "\n"


def save_config(config, path):
    Path(path).write_text(dump_config(config), encoding="utf-8")
