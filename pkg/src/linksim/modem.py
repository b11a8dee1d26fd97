"""Gray-labeled QPSK, 16-QAM and 8PSK mapping and coherent demapping.

Symbols are complex baseband samples at unit average energy. Bits enter a
symbol most-significant first, so the label of a symbol is the integer whose
binary digits are its ``k`` bits in stream order.

Fixed label tables (points before energy scaling)::

    QPSK   b1 b0 : 00 -> +1+j   01 -> -1+j   11 -> -1-j   10 -> +1-j
    16-QAM b3 b2 | b1 b0 : per axis 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3,
           b3 b2 on I, b1 b0 on Q
    8PSK   000 001 011 010 110 111 101 100 counter-clockwise from angle 0

In QPSK the first stream bit (b1) rides on Q and the second (b0) on I.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "Scheme",
    "Constellation",
    "constellation",
    "modulate",
    "demodulate_hard",
    "soft_bit_metrics",
    "labels_to_bits",
    "bits_to_labels",
]


class Scheme(str, enum.Enum):
    QPSK = "qpsk"
    QAM16 = "qam16"
    PSK8 = "psk8"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, Scheme):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"qpsk": cls.QPSK, "4psk": cls.QPSK, "qam16": cls.QAM16,
                   "16qam": cls.QAM16, "psk8": cls.PSK8, "8psk": cls.PSK8}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unsupported scheme {value!r}; expected qpsk, qam16 or psk8") from None

    @property
    def order(self) -> int:
        return {Scheme.QPSK: 4, Scheme.QAM16: 16, Scheme.PSK8: 8}[self]

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1


# per-axis 4-PAM Gray map for 16-QAM: 2-bit axis label -> level
_PAM4 = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}
_PSK8_GRAY = (0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100)


@dataclass(frozen=True)
class Constellation:
    """Points indexed by label, so ``points[label]`` is the symbol for that label."""

    scheme: Scheme
    points: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.scheme.order

    @property
    def bits_per_symbol(self) -> int:
        return self.scheme.bits_per_symbol

    @property
    def bit_table(self) -> np.ndarray:
        """``(M, k)`` array of label bits, most significant first."""
        return labels_to_bits(np.arange(self.order), self.bits_per_symbol).reshape(self.order, -1)

    def min_distance(self) -> float:
        d = np.abs(self.points[:, None] - self.points[None, :])
        return float(d[~np.eye(self.order, dtype=bool)].min())


@lru_cache(maxsize=None)
def constellation(scheme) -> Constellation:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.QPSK:
        pts = np.empty(4, dtype=complex)
        for label in range(4):
            b1, b0 = label >> 1, label & 1
            pts[label] = complex(1 - 2 * b0, 1 - 2 * b1)
        pts /= np.sqrt(2.0)
    elif scheme is Scheme.QAM16:
        pts = np.array([complex(_PAM4[label >> 2], _PAM4[label & 3]) for label in range(16)])
        pts /= np.sqrt(10.0)
    else:
        pts = np.empty(8, dtype=complex)
        for pos, label in enumerate(_PSK8_GRAY):
            pts[label] = np.exp(2j * np.pi * pos / 8)
    pts.setflags(write=False)
    return Constellation(scheme, pts)


def bits_to_labels(bits, k: int) -> np.ndarray:
    """Group the last axis into ``k``-bit labels, most significant bit first."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] % k:
        raise ValueError(f"bit count {bits.shape[-1]} is not a multiple of {k}")
    grouped = bits.reshape(bits.shape[:-1] + (-1, k)).astype(np.int64)
    weights = 1 << np.arange(k - 1, -1, -1)
    return grouped @ weights


def labels_to_bits(labels, k: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    bits = (labels[..., None] >> shifts) & 1
    return bits.reshape(labels.shape[:-1] + (-1,)).astype(np.uint8) if labels.ndim else bits.astype(np.uint8)


def modulate(bits, scheme) -> np.ndarray:
    """Map bits (last axis) to unit-energy complex symbols.

    Raises ``ValueError`` if the bit count is not a multiple of the bits per
    symbol; no padding is applied.
    """
    const = constellation(scheme)
    return const.points[bits_to_labels(bits, const.bits_per_symbol)]


def _sq_distances(symbols, points) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=complex)
    if not np.all(np.isfinite(symbols)):
        raise ValueError("symbols must be finite")
    diff = symbols[..., None] - points
    return diff.real**2 + diff.imag**2


def demodulate_hard(symbols, scheme) -> np.ndarray:
    """Nearest-point decisions; exact ties go to the lowest label."""
    const = constellation(scheme)
    labels = np.argmin(_sq_distances(symbols, const.points), axis=-1)
    return labels_to_bits(labels, const.bits_per_symbol)


def soft_bit_metrics(symbols, scheme) -> np.ndarray:
    """Per-bit real metrics in stream order; positive favours bit 0.

    QPSK returns the raw component each bit rides on (Q for the first bit,
    I for the second). 16-QAM and 8PSK return the max-log difference
    ``min |r - p1|^2 - min |r - p0|^2`` over points whose bit is 1 and 0.
    """
    scheme = Scheme.parse(scheme)
    symbols = np.asarray(symbols, dtype=complex)
    if scheme is Scheme.QPSK:
        if not np.all(np.isfinite(symbols)):
            raise ValueError("symbols must be finite")
        out = np.stack([symbols.imag, symbols.real], axis=-1)
        return out.reshape(symbols.shape[:-1] + (-1,)) if symbols.ndim else out
    const = constellation(scheme)
    d2 = _sq_distances(symbols, const.points)
    table = const.bit_table.astype(bool)
    k = const.bits_per_symbol
    metrics = np.empty(symbols.shape + (k,))
    for b in range(k):
        ones = table[:, b]
        metrics[..., b] = d2[..., ones].min(axis=-1) - d2[..., ~ones].min(axis=-1)
    return metrics.reshape(symbols.shape[:-1] + (-1,)) if symbols.ndim else metrics
