"""Error counting, confidence intervals and the per-point Monte-Carlo loop."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from .channel import ChannelKind, apply_awgn, apply_fading, noise_sigma, rayleigh_gains_batch
from .modem import Scheme
from .pn_codes import assign_user_codes, generate_msequence, to_bipolar
from .receiver import compensate, receive_user
from .spreading import build_downlink

if TYPE_CHECKING:
    from .config import SimulationConfig

__all__ = [
    "CSV_COLUMNS",
    "BATCH_BITS",
    "StoppingRule",
    "BerRecord",
    "count_errors",
    "confidence_interval",
    "derive_seed",
    "user_codes",
    "run_point",
]

CSV_COLUMNS = (
    "source", "scheme", "channel", "ebn0_db", "sf", "users", "doppler_hz", "csi",
    "despread", "bits", "bit_errors", "ber", "symbols", "symbol_errors", "ser",
    "ci_low", "ci_high", "seed",
)

# data bits per user drawn per vectorized batch
BATCH_BITS = 1 << 16


@dataclass(frozen=True)
class StoppingRule:
    """Stop once ``min_errors`` bit errors are seen or ``max_bits`` are sent.

    ``min_errors=None`` disables the error target, so exactly the bit budget
    is simulated.
    """

    min_errors: int | None = 100
    max_bits: int = 10_000_000

    def __post_init__(self):
        if self.min_errors is not None and self.min_errors <= 0:
            raise ValueError("min_errors must be positive (or None)")
        if self.max_bits <= 0:
            raise ValueError("max_bits must be positive")


@dataclass(frozen=True)
class BerRecord:
    ebn0_db: float
    scheme: str
    channel: str
    sf: int
    users: int
    doppler_hz: float
    csi: str
    despread: str
    bits_sent: int
    bit_errors: int
    symbols_sent: int
    symbol_errors: int
    ci_low: float
    ci_high: float
    seed: int
    source: str = "sim"

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols_sent if self.symbols_sent else 0.0

    @property
    def below_resolution(self) -> bool:
        """No errors observed: the true rate is below what this run can resolve."""
        return self.bit_errors == 0

    def sigma_errors(self, p: float) -> float:
        """Binomial standard deviation of the error count at true rate ``p``."""
        return math.sqrt(self.bits_sent * p * (1 - p))

    def row(self) -> dict:
        return {
            "source": self.source, "scheme": self.scheme, "channel": self.channel,
            "ebn0_db": self.ebn0_db, "sf": self.sf, "users": self.users,
            "doppler_hz": self.doppler_hz, "csi": self.csi, "despread": self.despread,
            "bits": self.bits_sent, "bit_errors": self.bit_errors, "ber": self.ber,
            "symbols": self.symbols_sent, "symbol_errors": self.symbol_errors,
            "ser": self.ser, "ci_low": self.ci_low, "ci_high": self.ci_high,
            "seed": self.seed,
        }


def count_errors(tx, rx) -> tuple[int, int]:
    """Return ``(bits compared, bit errors)``."""
    tx = np.asarray(tx, dtype=np.uint8)
    rx = np.asarray(rx, dtype=np.uint8)
    if tx.shape != rx.shape:
        raise ValueError(f"length mismatch: {tx.shape} vs {rx.shape}")
    return int(tx.size), int(np.count_nonzero(tx != rx))


def confidence_interval(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= errors <= trials:
        raise ValueError("errors must lie in [0, trials]")
    z = stats.norm.ppf(0.5 + level / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == trials else min(1.0, center + half)
    return float(low), float(high)


def derive_seed(master_seed: int, ebn0_db: float, point_index: int) -> int:
    """64-bit seed for one operating point, independent of evaluation order."""
    (ebn0_bits,) = struct.unpack("<Q", struct.pack("<d", float(ebn0_db)))
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), ebn0_bits, int(point_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def user_codes(polynomial, num_users: int) -> list[np.ndarray]:
    base = to_bipolar(generate_msequence(polynomial))
    return assign_user_codes(base, num_users)


def run_point(
    config: "SimulationConfig",
    ebn0_db: float,
    rule: StoppingRule | None = None,
    *,
    scheme=None,
    users: int | None = None,
    doppler_hz: float | None = None,
    seed: int | None = None,
    point_index: int | None = None,
) -> BerRecord:
    """Simulate one operating point through the full link.

    ``scheme``, ``users`` and ``doppler_hz`` pick one grid value when the
    config sweeps them. Without an explicit ``seed`` the point seed is derived from the
    master seed, ``ebn0_db`` and ``point_index`` (its position in the Eb/N0
    sweep). Points that differ only in users or Doppler therefore share
    random streams, which pairs them for comparison.

    Users draw bits from their own streams, and noise and fading from two
    more, so user ``u``'s bits do not depend on how many users are active.
    """
    rule = rule or config.stopping
    scheme = Scheme.parse(scheme if scheme is not None else config.scheme)
    k = scheme.bits_per_symbol
    sf = config.spreading_factor
    n_users = users if users is not None else config.num_users[0]
    doppler = doppler_hz if doppler_hz is not None else config.doppler_values()[0]
    if point_index is None:
        point_index = config.ebn0_index(ebn0_db)
    if seed is None:
        seed = derive_seed(config.seed, ebn0_db, point_index)

    codes = user_codes(config.code_polynomial, n_users)
    fading = config.channel is ChannelKind.RAYLEIGH_AWGN
    frame_bits = config.frame_bits
    n_sym = frame_bits * sf // k
    sample_rate = config.symbol_rate(scheme)
    sigma = noise_sigma(ebn0_db, k, sf, 1.0 / n_users)

    root = np.random.SeedSequence(seed)
    bits_ss, noise_ss, fade_ss = root.spawn(3)
    user_rngs = [np.random.default_rng(s) for s in bits_ss.spawn(n_users)]
    noise_rng = np.random.default_rng(noise_ss)
    fade_rng = np.random.default_rng(fade_ss)

    max_frames = max(1, rule.max_bits // (frame_bits * n_users))
    batch_frames = max(1, BATCH_BITS // frame_bits)
    frames_done = bits = errors = sym_errors = 0
    while frames_done < max_frames:
        n = min(batch_frames, max_frames - frames_done)
        tx = np.stack([r.integers(0, 2, size=(n, frame_bits), dtype=np.uint8) for r in user_rngs])
        rx = build_downlink(tx, codes, sf, scheme).composite
        if fading:
            gains = rayleigh_gains_batch(n, n_sym, doppler, sample_rate, fade_rng)
            rx = apply_fading(rx, gains)
        rx = apply_awgn(rx, sigma, noise_rng)
        if fading:
            rx = compensate(rx, gains, config.csi)
        frame_errors = np.zeros(n, dtype=np.int64)
        frame_sym_errors = np.zeros(n, dtype=np.int64)
        for u in range(n_users):
            decided = receive_user(rx, u, codes, sf, scheme, config.despread)
            wrong = decided != tx[u]
            frame_errors += np.count_nonzero(wrong, axis=-1)
            frame_sym_errors += np.count_nonzero(wrong.reshape(n, -1, k).any(axis=-1), axis=-1)
        used = n
        if rule.min_errors is not None:
            # stop at the frame that reaches the target; later frames are discarded
            reached = np.nonzero(errors + np.cumsum(frame_errors) >= rule.min_errors)[0]
            if reached.size:
                used = int(reached[0]) + 1
        errors += int(frame_errors[:used].sum())
        sym_errors += int(frame_sym_errors[:used].sum())
        bits += used * frame_bits * n_users
        frames_done += used
        if used < n or (rule.min_errors is not None and errors >= rule.min_errors):
            break

    low, high = confidence_interval(errors, bits)
    return BerRecord(
        ebn0_db=float(ebn0_db), scheme=scheme.value, channel=config.channel.value, sf=sf,
        users=n_users, doppler_hz=float(doppler), csi=str(config.csi), despread=config.despread,
        bits_sent=bits, bit_errors=errors, symbols_sent=bits // k, symbol_errors=sym_errors,
        ci_low=low, ci_high=high, seed=seed,
    )
