"""Coherent detection: channel compensation, demapping and despreading."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import FadingRealization
from .modem import Scheme, demodulate_hard, soft_bit_metrics
from .spreading import despread_hard, despread_soft

__all__ = ["ERASURE_THRESHOLD", "CsiMode", "compensate", "receive_user"]

ERASURE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class CsiMode:
    """Channel knowledge at the receiver.

    ``block_len = None`` is genie CSI per sample; otherwise each block of
    ``block_len`` symbols is corrected with the gain of its first symbol.
    """

    block_len: int | None = None

    def __post_init__(self):
        if self.block_len is not None and self.block_len < 1:
            raise ValueError("block length must be >= 1")

    @classmethod
    def parse(cls, value) -> "CsiMode":
        if isinstance(value, CsiMode):
            return value
        text = str(value).strip().lower()
        if text == "perfect":
            return cls()
        if text.startswith("block:"):
            try:
                return cls(int(text.split(":", 1)[1]))
            except ValueError:
                raise ValueError(f"bad block length in csi mode {value!r}") from None
        raise ValueError(f"unsupported csi mode {value!r}; expected 'perfect' or 'block:<len>'")

    @property
    def is_perfect(self) -> bool:
        return self.block_len is None

    def __str__(self) -> str:
        return "perfect" if self.is_perfect else f"block:{self.block_len}"


def _estimates(gains: np.ndarray, mode: CsiMode) -> np.ndarray:
    if mode.is_perfect:
        return gains
    n = gains.shape[-1]
    starts = (np.arange(n) // mode.block_len) * mode.block_len
    return gains[..., starts]


def compensate(received, realization, mode: CsiMode = CsiMode()) -> np.ndarray:
    """Zero-force the received samples with the (possibly stale) gain estimate.

    Samples whose estimate has magnitude below ``ERASURE_THRESHOLD`` are
    passed through unscaled.
    """
    gains = realization.gains if isinstance(realization, FadingRealization) else np.asarray(realization)
    received = np.asarray(received, dtype=complex)
    if received.shape != gains.shape:
        raise ValueError(f"length mismatch: {received.shape} vs {gains.shape}")
    est = _estimates(gains, CsiMode.parse(mode))
    erased = np.abs(est) < ERASURE_THRESHOLD
    safe = np.where(erased, 1.0, est)
    return np.where(erased, received, received / safe)


def receive_user(symbols, user_index: int, codes, sf: int, scheme, despread: str = "soft") -> np.ndarray:
    """Recover one user's bits from compensated composite symbols."""
    if not 0 <= user_index < len(codes):
        raise IndexError(f"user index {user_index} out of range for {len(codes)} codes")
    code = codes[user_index]
    scheme = Scheme.parse(scheme)
    if despread == "soft":
        return despread_soft(soft_bit_metrics(symbols, scheme), code, sf)
    if despread == "hard":
        return despread_hard(demodulate_hard(symbols, scheme), code, sf)
    raise ValueError(f"despread mode must be 'soft' or 'hard', got {despread!r}")
