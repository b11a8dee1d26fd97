"""AWGN calibrated to Eb/N0 and flat Rayleigh fading with Doppler.

Fading uses a sum-of-sinusoids Clarke model: 32 oscillators with
angle-of-arrival ``(2 pi n + theta_n) / 32`` and uniform random phases, so
the gain process has unit power and an autocorrelation close to
``J0(2 pi f_d tau)``. All randomness comes from an explicit seed or
``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "DEFAULT_CARRIER_HZ",
    "NUM_OSCILLATORS",
    "ChannelKind",
    "ChannelSpec",
    "FadingRealization",
    "noise_sigma",
    "apply_awgn",
    "doppler_from_speed",
    "rayleigh_gains",
    "rayleigh_gains_batch",
    "apply_fading",
]

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 2.0e9
NUM_OSCILLATORS = 32


class ChannelKind(str, enum.Enum):
    AWGN = "awgn"
    RAYLEIGH_AWGN = "rayleigh"

    @classmethod
    def parse(cls, value) -> "ChannelKind":
        if isinstance(value, ChannelKind):
            return value
        key = str(value).strip().lower()
        if key in ("awgn",):
            return cls.AWGN
        if key in ("rayleigh", "rayleigh_awgn", "rayleigh+awgn"):
            return cls.RAYLEIGH_AWGN
        raise ValueError(f"unsupported channel {value!r}; expected awgn or rayleigh")


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    ebn0_db: float
    sample_rate_hz: float
    doppler_hz: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind.parse(self.kind))
        if not self.sample_rate_hz > 0:
            raise ValueError("sample rate must be positive")
        if self.doppler_hz < 0:
            raise ValueError("doppler must be non-negative")
        if self.doppler_hz >= self.sample_rate_hz / 2:
            raise ValueError(
                f"doppler {self.doppler_hz} Hz must be below half the sample rate "
                f"({self.sample_rate_hz / 2} Hz)"
            )


@dataclass(frozen=True)
class FadingRealization:
    gains: np.ndarray

    def __len__(self) -> int:
        return self.gains.shape[-1]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def noise_sigma(ebn0_db: float, bits_per_symbol: int, sf: int = 1, symbol_energy: float = 1.0) -> float:
    """Per-dimension noise standard deviation for one symbol-rate sample.

    Each data bit spans ``sf`` chips and each symbol carries
    ``bits_per_symbol`` chips, so ``Eb = sf * Es / k`` and
    ``sigma = sqrt(Eb / (2 * 10**(ebn0_db / 10)))``. ``ebn0_db = inf`` gives 0.
    """
    if bits_per_symbol <= 0 or sf <= 0 or symbol_energy <= 0:
        raise ValueError("bits_per_symbol, sf and symbol_energy must be positive")
    if math.isnan(ebn0_db):
        raise ValueError("ebn0_db is NaN")
    if ebn0_db == math.inf:
        return 0.0
    eb = sf * symbol_energy / bits_per_symbol
    n0 = eb / 10.0 ** (ebn0_db / 10.0)
    return math.sqrt(n0 / 2.0)


def apply_awgn(symbols, sigma: float, seed=None) -> np.ndarray:
    """Add circular Gaussian noise with variance ``sigma**2`` per component."""
    symbols = np.asarray(symbols, dtype=complex)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return symbols.copy()
    rng = _rng(seed)
    noise = rng.standard_normal(symbols.shape + (2,))
    return symbols + sigma * (noise[..., 0] + 1j * noise[..., 1])


def doppler_from_speed(speed_kmph: float, carrier_hz: float = DEFAULT_CARRIER_HZ) -> float:
    """Maximum Doppler shift ``v * f_c / c`` for a speed in km/h."""
    if speed_kmph < 0:
        raise ValueError("speed must be non-negative")
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return (speed_kmph / 3.6) * carrier_hz / SPEED_OF_LIGHT


def rayleigh_gains_batch(
    n_frames: int,
    n_samples: int,
    doppler_hz: float,
    sample_rate_hz: float,
    seed=None,
    n_osc: int = NUM_OSCILLATORS,
) -> np.ndarray:
    """Independent fading realizations, one row of ``n_samples`` per frame."""
    if doppler_hz < 0:
        raise ValueError("doppler must be non-negative")
    if doppler_hz >= sample_rate_hz / 2:
        raise ValueError("doppler must be below half the sample rate")
    rng = _rng(seed)
    offsets = rng.uniform(-np.pi, np.pi, size=(n_frames, n_osc))
    phases = rng.uniform(-np.pi, np.pi, size=(n_frames, n_osc))
    aoa = (2 * np.pi * np.arange(n_osc) + offsets) / n_osc
    # normalized angular Doppler per oscillator, radians per sample
    w = 2 * np.pi * (doppler_hz / sample_rate_hz) * np.cos(aoa)
    t = np.arange(n_samples, dtype=float)
    gains = np.zeros((n_frames, n_samples), dtype=complex)
    for n in range(n_osc):
        gains += np.exp(1j * (w[:, n, None] * t + phases[:, n, None]))
    return gains / np.sqrt(n_osc)


def rayleigh_gains(n_samples: int, doppler_hz: float, sample_rate_hz: float, seed=None) -> FadingRealization:
    """One flat-fading gain per sample; ``doppler_hz = 0`` gives a constant gain."""
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    gains = rayleigh_gains_batch(1, n_samples, doppler_hz, sample_rate_hz, seed)[0]
    return FadingRealization(gains)


def apply_fading(symbols, realization) -> np.ndarray:
    """Elementwise multiply by the fading gains."""
    gains = realization.gains if isinstance(realization, FadingRealization) else np.asarray(realization)
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.shape != gains.shape:
        raise ValueError(f"length mismatch: {symbols.shape} vs {gains.shape}")
    return symbols * gains
