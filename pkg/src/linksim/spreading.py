"""DSSS spreading and despreading, and the synchronous multi-user downlink.

Each data bit occupies ``sf`` consecutive chips, and chips are drawn from the
user's code cyclically: chip ``j`` of bit ``i`` uses code position
``(i * sf + j) mod N``. Functions operate along the last array axis, so a
batch of frames can be processed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modem import Scheme, modulate
from .pn_codes import to_bits

__all__ = [
    "DEFAULT_BIT_RATE",
    "SpreadingConfig",
    "DownlinkFrame",
    "code_chips",
    "spread_bits",
    "despread_soft",
    "despread_hard",
    "build_downlink",
]

DEFAULT_BIT_RATE = 384_000.0


@dataclass(frozen=True)
class SpreadingConfig:
    spreading_factor: int = 1
    bit_rate: float = DEFAULT_BIT_RATE

    def __post_init__(self):
        if self.spreading_factor < 1:
            raise ValueError("spreading factor must be >= 1")
        if self.bit_rate <= 0:
            raise ValueError("bit rate must be positive")

    @property
    def chip_rate(self) -> float:
        return self.spreading_factor * self.bit_rate


@dataclass(frozen=True)
class DownlinkFrame:
    """Composite transmit symbols plus the per-user bits that produced them."""

    composite: np.ndarray
    user_bits: np.ndarray
    scheme: Scheme

    @property
    def num_users(self) -> int:
        return self.user_bits.shape[0]


def _check_sf(code, sf: int) -> np.ndarray:
    code = np.asarray(code)
    if sf < 1:
        raise ValueError("spreading factor must be >= 1")
    if sf > code.size:
        raise ValueError(f"spreading factor {sf} exceeds code period {code.size}")
    return code


def code_chips(code, n_chips: int) -> np.ndarray:
    """The code repeated cyclically out to ``n_chips`` chips."""
    code = np.asarray(code)
    return np.resize(code, n_chips)


def spread_bits(bits, code, sf: int) -> np.ndarray:
    """XOR every data bit with its ``sf`` code chips (as bits)."""
    code = _check_sf(code, sf)
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    pattern = code_chips(to_bits(code), n * sf)
    return np.repeat(bits, sf, axis=-1) ^ pattern


def _windows(values, sf: int) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[-1] % sf:
        raise ValueError(f"{values.shape[-1]} chips is not a multiple of sf={sf}")
    return values.reshape(values.shape[:-1] + (-1, sf))


def despread_soft(metrics, code, sf: int) -> np.ndarray:
    """Correlate per-chip soft metrics with the code; a zero sum decides 0."""
    code = _check_sf(code, sf)
    metrics = np.asarray(metrics, dtype=float)
    chips = code_chips(code, metrics.shape[-1]).astype(float)
    corr = _windows(metrics * chips, sf).sum(axis=-1)
    return (corr < 0).astype(np.uint8)


def despread_hard(chip_bits, code, sf: int) -> np.ndarray:
    """XOR with the code bits, then majority vote per bit; ties decide 0."""
    code = _check_sf(code, sf)
    chip_bits = np.asarray(chip_bits, dtype=np.uint8)
    pattern = code_chips(to_bits(code), chip_bits.shape[-1])
    ones = _windows(chip_bits ^ pattern, sf).sum(axis=-1, dtype=np.int64)
    return (2 * ones > sf).astype(np.uint8)


def build_downlink(user_bits, codes, sf: int, scheme) -> DownlinkFrame:
    """Spread and modulate every user, then sum at equal power.

    ``user_bits`` has users on the first axis. The composite is scaled by
    ``1/sqrt(K)`` so its average symbol energy stays 1.
    """
    scheme = Scheme.parse(scheme)
    user_bits = np.asarray(user_bits, dtype=np.uint8)
    if user_bits.ndim < 2:
        raise ValueError("user_bits must have shape (users, ..., bits)")
    k_users = user_bits.shape[0]
    if len(codes) != k_users:
        raise ValueError(f"{k_users} users but {len(codes)} codes")
    if len({np.asarray(c, dtype=np.int8).tobytes() for c in codes}) != k_users:
        raise ValueError("user codes must be distinct")
    composite = None
    for bits, code in zip(user_bits, codes):
        symbols = modulate(spread_bits(bits, code, sf), scheme)
        composite = symbols if composite is None else composite + symbols
    composite = composite / np.sqrt(k_users)
    return DownlinkFrame(composite, user_bits, scheme)
