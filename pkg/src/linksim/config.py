"""Simulation configuration: YAML documents validated into :class:`SimulationConfig`.

Recognised keys (anything else is rejected)::

    name             free-text label
    scheme           qpsk | qam16 | psk8, or a list           (required)
    channel          awgn | rayleigh                          (required)
    ebn0_db          number, list, or "start:stop:step"       (required)
    spreading_factor chips per data bit                        default 1
    num_users        int or list of ints                       default 1
    code_polynomial  "x^3+x+1" or "3,1,0"                      default x^3+x+1
    bit_rate         bits/s                                    default 384000
    doppler_hz       number or list (rayleigh only)            default 0
    speed_kmph       number or list (rayleigh only, excludes doppler_hz)
    carrier_hz       carrier for speed -> Doppler              default 2.0e9
    csi              perfect | block:<symbols>                 default perfect
    despread         soft | hard                               default soft
    min_errors       int, or null for a fixed bit budget       default 100
    max_bits         int                                       default 10000000
    frame_bits       data bits per user per frame              default 1200
    seed             master seed                               default 0
    theory           also emit closed-form rows                default false
    output           CSV path, relative to the config file
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .channel import DEFAULT_CARRIER_HZ, ChannelKind, doppler_from_speed
from .metrics import StoppingRule
from .modem import Scheme
from .pn_codes import GeneratorPolynomial, parse_polynomial, verify_maximal_period
from .receiver import CsiMode
from .spreading import DEFAULT_BIT_RATE

__all__ = [
    "ConfigError",
    "SimulationConfig",
    "parse_range",
    "parse_config",
    "load_config",
    "KNOWN_KEYS",
]

KNOWN_KEYS = (
    "name", "scheme", "channel", "ebn0_db", "spreading_factor", "num_users",
    "code_polynomial", "bit_rate", "doppler_hz", "speed_kmph", "carrier_hz", "csi",
    "despread", "min_errors", "max_bits", "frame_bits", "seed", "theory", "output",
)


DEFAULT_POLYNOMIAL = parse_polynomial("x^3+x+1")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SimulationConfig:
    schemes: tuple[Scheme, ...]
    channel: ChannelKind
    ebn0_db: tuple[float, ...]
    spreading_factor: int = 1
    num_users: tuple[int, ...] = (1,)
    code_polynomial: GeneratorPolynomial = DEFAULT_POLYNOMIAL
    bit_rate: float = DEFAULT_BIT_RATE
    doppler_hz: tuple[float, ...] = (0.0,)
    speed_kmph: tuple[float, ...] | None = None
    carrier_hz: float = DEFAULT_CARRIER_HZ
    csi: CsiMode = CsiMode()
    despread: str = "soft"
    stopping: StoppingRule = StoppingRule()
    frame_bits: int = 1200
    seed: int = 0
    theory: bool = False
    output: Path | None = None
    name: str | None = None

    @property
    def code_period(self) -> int:
        return self.code_polynomial.period_bound

    @property
    def scheme(self) -> Scheme:
        """The first (often only) scheme."""
        return self.schemes[0]

    def symbol_rate(self, scheme=None) -> float:
        """Modulation symbols per second (one noise/fading sample each)."""
        scheme = self.scheme if scheme is None else Scheme.parse(scheme)
        return self.bit_rate * self.spreading_factor / scheme.bits_per_symbol

    def doppler_values(self) -> tuple[float, ...]:
        return self.doppler_hz

    def ebn0_index(self, ebn0_db: float) -> int:
        try:
            return self.ebn0_db.index(float(ebn0_db))
        except ValueError:
            return 0

    def grid(self) -> list[tuple[Scheme, int, float, int, float]]:
        """``(scheme, ebn0 index, ebn0_db, users, doppler_hz)`` in output order."""
        return [
            (s, i, e, u, d)
            for s in self.schemes
            for u in self.num_users
            for d in self.doppler_hz
            for i, e in enumerate(self.ebn0_db)
        ]

    def with_seed(self, seed: int) -> "SimulationConfig":
        return replace(self, seed=int(seed))


def parse_range(text: str) -> tuple[float, ...]:
    """Inclusive ``"start:stop:step"`` range, e.g. ``"0:4:1"`` -> 0, 1, 2, 3, 4."""
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"range must be start:stop[:step], got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    step = float(parts[2]) if len(parts) == 3 else 1.0
    if step <= 0 or stop < start:
        raise ValueError(f"empty or invalid range {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(n))


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int(key, v, minimum=None) -> int:
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def _float(key, v) -> float:
    if isinstance(v, str):
        # YAML 1.1 reads exponents without a sign (2.0e9) as strings
        try:
            return float(v)
        except ValueError:
            pass
    if not _is_number(v):
        raise ConfigError(key, f"expected a number, got {v!r}")
    return float(v)


def _float_list(key, v) -> tuple[float, ...]:
    if isinstance(v, str):
        try:
            values = parse_range(v)
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
    elif isinstance(v, (list, tuple)):
        values = tuple(_float(key, x) for x in v)
    else:
        values = (_float(key, v),)
    if not values:
        raise ConfigError(key, "must not be empty")
    if any(math.isnan(x) for x in values):
        raise ConfigError(key, "NaN is not allowed")
    if len(set(values)) != len(values):
        raise ConfigError(key, "duplicate values")
    return tuple(sorted(values))


def parse_config(text: str | dict, base_dir: str | Path | None = None) -> SimulationConfig:
    """Validate a YAML document (or an already-loaded mapping)."""
    if isinstance(text, dict):
        data = dict(text)
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError("<document>", f"not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<document>", "expected a mapping of keys to values")
    for key in data:
        if key not in KNOWN_KEYS:
            raise ConfigError(str(key), "unknown key")
    for key in ("scheme", "channel", "ebn0_db"):
        if key not in data:
            raise ConfigError(key, "required key missing")

    kw: dict = {}
    raw_schemes = data["scheme"] if isinstance(data["scheme"], list) else [data["scheme"]]
    try:
        kw["schemes"] = tuple(Scheme.parse(v) for v in raw_schemes)
    except ValueError as exc:
        raise ConfigError("scheme", str(exc)) from None
    if not kw["schemes"]:
        raise ConfigError("scheme", "must not be empty")
    if len(set(kw["schemes"])) != len(kw["schemes"]):
        raise ConfigError("scheme", "duplicate values")
    try:
        kw["channel"] = ChannelKind.parse(data["channel"])
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from None
    kw["ebn0_db"] = _float_list("ebn0_db", data["ebn0_db"])

    if "code_polynomial" in data:
        try:
            kw["code_polynomial"] = parse_polynomial(str(data["code_polynomial"]))
        except ValueError as exc:
            raise ConfigError("code_polynomial", str(exc)) from None
        if not verify_maximal_period(kw["code_polynomial"]):
            raise ConfigError("code_polynomial", f"{kw['code_polynomial']} does not generate an M-sequence")
    period = kw.get("code_polynomial", DEFAULT_POLYNOMIAL).period_bound

    sf = _int("spreading_factor", data.get("spreading_factor", 1), 1)
    if sf > period:
        raise ConfigError("spreading_factor", f"{sf} exceeds the code period {period}")
    kw["spreading_factor"] = sf

    users = data.get("num_users", 1)
    users = tuple(_int("num_users", u, 1) for u in (users if isinstance(users, list) else [users]))
    if len(set(users)) != len(users):
        raise ConfigError("num_users", "duplicate values")
    if max(users) > period:
        raise ConfigError("num_users", f"{max(users)} users exceed the {period} distinct shifts of the code")
    kw["num_users"] = tuple(sorted(users))

    if "bit_rate" in data:
        kw["bit_rate"] = _float("bit_rate", data["bit_rate"])
        if kw["bit_rate"] <= 0:
            raise ConfigError("bit_rate", "must be positive")
    if "carrier_hz" in data:
        kw["carrier_hz"] = _float("carrier_hz", data["carrier_hz"])
        if kw["carrier_hz"] <= 0:
            raise ConfigError("carrier_hz", "must be positive")

    if "doppler_hz" in data and "speed_kmph" in data:
        raise ConfigError("speed_kmph", "speed_kmph and doppler_hz are mutually exclusive")
    for key in ("doppler_hz", "speed_kmph"):
        if key in data and kw["channel"] is not ChannelKind.RAYLEIGH_AWGN:
            raise ConfigError(key, "only valid with channel: rayleigh")
    if "speed_kmph" in data:
        speeds = _float_list("speed_kmph", data["speed_kmph"])
        if min(speeds) < 0:
            raise ConfigError("speed_kmph", "must be non-negative")
        kw["speed_kmph"] = speeds
        carrier = kw.get("carrier_hz", DEFAULT_CARRIER_HZ)
        kw["doppler_hz"] = tuple(doppler_from_speed(s, carrier) for s in speeds)
    elif "doppler_hz" in data:
        kw["doppler_hz"] = _float_list("doppler_hz", data["doppler_hz"])
        if min(kw["doppler_hz"]) < 0:
            raise ConfigError("doppler_hz", "must be non-negative")

    if "csi" in data:
        try:
            kw["csi"] = CsiMode.parse(data["csi"])
        except ValueError as exc:
            raise ConfigError("csi", str(exc)) from None
    if "despread" in data:
        if data["despread"] not in ("soft", "hard"):
            raise ConfigError("despread", f"expected soft or hard, got {data['despread']!r}")
        kw["despread"] = data["despread"]

    min_errors = data.get("min_errors", 100)
    if min_errors is not None:
        min_errors = _int("min_errors", min_errors, 1)
    max_bits = _int("max_bits", data.get("max_bits", 10_000_000), 1)
    kw["stopping"] = StoppingRule(min_errors, max_bits)

    frame_bits = _int("frame_bits", data.get("frame_bits", 1200), 1)
    for scheme in kw["schemes"]:
        k = scheme.bits_per_symbol
        if frame_bits % k:
            raise ConfigError("frame_bits", f"{frame_bits} is not a multiple of {k} bits per {scheme.value} symbol")
    kw["frame_bits"] = frame_bits

    kw["seed"] = _int("seed", data.get("seed", 0), 0)
    if "theory" in data:
        if not isinstance(data["theory"], bool):
            raise ConfigError("theory", f"expected true or false, got {data['theory']!r}")
        kw["theory"] = data["theory"]
    if "name" in data:
        kw["name"] = str(data["name"])
    if "output" in data:
        out = Path(str(data["output"]))
        if not out.is_absolute() and base_dir is not None:
            out = Path(base_dir) / out
        kw["output"] = out

    cfg = SimulationConfig(**kw)
    nyquist = min(cfg.symbol_rate(s) for s in cfg.schemes) / 2
    for d in cfg.doppler_hz:
        if d >= nyquist:
            key = "speed_kmph" if cfg.speed_kmph else "doppler_hz"
            raise ConfigError(key, f"Doppler {d:.1f} Hz is not below half the symbol rate ({nyquist:.1f} Hz)")
    return cfg


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
