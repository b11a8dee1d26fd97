"""Closed-form and semianalytic error-rate references.

AWGN expressions are the usual coherent Gray-coded ones::

    QPSK     Pb = Q(sqrt(2 g))
    M-QAM    Pb ~ (4/k)(1 - 1/sqrt(M)) Q(sqrt(3 k g / (M - 1)))
    M-PSK    Ps ~ 2 Q(sqrt(2 k g) sin(pi/M)),   Pb ~ Ps / k

with ``g`` the linear Eb/N0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .channel import ChannelKind
from .modem import _PSK8_GRAY, Scheme, constellation, demodulate_hard

__all__ = [
    "TheoryPoint",
    "q_function",
    "db_to_linear",
    "ber_awgn",
    "ber_rayleigh_qpsk",
    "ber_rayleigh",
    "theory_point",
    "semianalytic_ber",
    "crossover_db",
]


@dataclass(frozen=True)
class TheoryPoint:
    scheme: Scheme
    channel: ChannelKind
    gamma_b: float
    ber: float
    ser: float

    @property
    def ebn0_db(self) -> float:
        return 10 * math.log10(self.gamma_b) if self.gamma_b > 0 else -math.inf


def q_function(x):
    """Gaussian upper tail ``Q(x) = erfc(x / sqrt(2)) / 2``."""
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _check_gamma(gamma_b: float) -> float:
    gamma_b = float(gamma_b)
    if not gamma_b >= 0:
        raise ValueError(f"gamma_b must be >= 0, got {gamma_b}")
    return gamma_b


def _awgn_rates(scheme: Scheme, g: float) -> tuple[float, float]:
    k = scheme.bits_per_symbol
    m = scheme.order
    if scheme is Scheme.QPSK:
        pb = q_function(math.sqrt(2 * g))
        return pb, pb * (2 - pb)
    if scheme is Scheme.QAM16:
        q = q_function(math.sqrt(3 * k * g / (m - 1)))
        pb = (4 / k) * (1 - 1 / math.sqrt(m)) * q
        p_axis = 2 * (1 - 1 / math.sqrt(m)) * q
        return pb, p_axis * (2 - p_axis)
    ps = min(1.0, 2 * q_function(math.sqrt(2 * k * g) * math.sin(math.pi / m)))
    return ps / k, ps


def ber_awgn(scheme, gamma_b: float) -> TheoryPoint:
    scheme = Scheme.parse(scheme)
    g = _check_gamma(gamma_b)
    pb, ps = _awgn_rates(scheme, g)
    return TheoryPoint(scheme, ChannelKind.AWGN, g, pb, ps)


def ber_rayleigh_qpsk(gamma_b_mean: float) -> float:
    """Average QPSK bit error rate over unit-power flat Rayleigh fading."""
    g = _check_gamma(gamma_b_mean)
    return 0.5 * (1 - math.sqrt(g / (1 + g)))


def _fading_average(fn, mean: float) -> float:
    if mean == 0:
        return fn(0.0)
    val, _ = integrate.quad(lambda g: fn(g) * math.exp(-g / mean) / mean, 0, math.inf, limit=200)
    return val


def ber_rayleigh(scheme, gamma_b_mean: float) -> TheoryPoint:
    """AWGN expressions averaged over the exponential SNR density.

    QPSK uses its closed form for the bit rate and 8PSK keeps ``ber = ser / k``;
    everything else is numerical.
    """
    scheme = Scheme.parse(scheme)
    g = _check_gamma(gamma_b_mean)
    ser = _fading_average(lambda x: _awgn_rates(scheme, x)[1], g)
    if scheme is Scheme.QPSK:
        ber = ber_rayleigh_qpsk(g)
    elif scheme is Scheme.PSK8:
        ber = ser / scheme.bits_per_symbol
    else:
        ber = _fading_average(lambda x: _awgn_rates(scheme, x)[0], g)
    return TheoryPoint(scheme, ChannelKind.RAYLEIGH_AWGN, g, ber, ser)


def theory_point(scheme, channel, ebn0_db: float) -> TheoryPoint:
    g = db_to_linear(ebn0_db)
    if ChannelKind.parse(channel) is ChannelKind.AWGN:
        return ber_awgn(scheme, g)
    return ber_rayleigh(scheme, g)


# -- semianalytic ------------------------------------------------------------

# per axis: decision thresholds and the axis label bits of each interval
_AXES = {
    Scheme.QPSK: ((0.0,), ((1,), (0,))),
    Scheme.QAM16: (
        tuple(t / math.sqrt(10) for t in (-2.0, 0.0, 2.0)),
        ((0, 0), (0, 1), (1, 1), (1, 0)),
    ),
}
# stream bit position -> (axis, bit index within the axis label)
_BIT_AXIS = {
    Scheme.QPSK: (("imag", 0), ("real", 0)),
    Scheme.QAM16: (("real", 0), ("real", 1), ("imag", 0), ("imag", 1)),
}


def _interval_error(x, tx_bit, j, thresholds, labels, sigma):
    edges = (-math.inf,) + tuple(thresholds) + (math.inf,)
    p = np.zeros_like(x)
    for i, lab in enumerate(labels):
        lo, hi = edges[i], edges[i + 1]
        mass = q_function((lo - x) / sigma) - q_function((hi - x) / sigma)
        p = p + np.where(tx_bit != lab[j], mass, 0.0)
    return p


def semianalytic_ber(noiseless_rx, scheme, gamma_b: float, reference=None) -> float:
    """Bit error rate of a noiseless received frame with Gaussian noise integrated out.

    Parameters
    ----------
    noiseless_rx : array of complex
        Receiver-side samples with every deterministic distortion applied and
        no noise.
    scheme : Scheme or str
    gamma_b : float
        Linear Eb/N0 setting the noise level for unit-energy symbols.
    reference : array of complex, optional
        Transmitted ideal symbols. Without it, each sample is assumed to have
        been sent as its nearest constellation point.

    Rectangular constellations use exact per-axis boundary probabilities;
    8PSK uses the two nearest angular boundaries of the sent symbol.
    """
    scheme = Scheme.parse(scheme)
    rx = np.ravel(np.asarray(noiseless_rx, dtype=complex))
    if rx.size == 0:
        raise ValueError("empty frame")
    g = float(gamma_b)
    if not g > 0:
        raise ValueError("gamma_b must be positive")
    k = scheme.bits_per_symbol
    sigma = math.sqrt(1.0 / (2 * k * g))
    ref = rx if reference is None else np.ravel(np.asarray(reference, dtype=complex))
    if ref.shape != rx.shape:
        raise ValueError("reference and frame lengths differ")
    tx_bits = demodulate_hard(ref, scheme).reshape(-1, k)

    if scheme in _AXES:
        thresholds, labels = _AXES[scheme]
        per_bit = np.empty_like(tx_bits, dtype=float)
        for pos, (axis, j) in enumerate(_BIT_AXIS[scheme]):
            x = rx.real if axis == "real" else rx.imag
            per_bit[:, pos] = _interval_error(x, tx_bits[:, pos], j, thresholds, labels, sigma)
        return float(per_bit.mean())

    const = constellation(scheme)
    weights = 1 << np.arange(k - 1, -1, -1)
    tx_labels = tx_bits.astype(np.int64) @ weights
    pos_of = {lab: p for p, lab in enumerate(_PSK8_GRAY)}
    pos = np.array([pos_of[int(lab)] for lab in tx_labels])
    theta = 2 * np.pi * pos / const.order
    half = np.pi / const.order
    d_up = -np.imag(rx * np.exp(-1j * (theta + half)))
    d_lo = np.imag(rx * np.exp(-1j * (theta - half)))
    up_lab = np.array(_PSK8_GRAY)[(pos + 1) % const.order]
    lo_lab = np.array(_PSK8_GRAY)[(pos - 1) % const.order]
    ham_up = np.array([bin(int(v)).count("1") for v in up_lab ^ tx_labels])
    ham_lo = np.array([bin(int(v)).count("1") for v in lo_lab ^ tx_labels])
    errs = ham_up * q_function(d_up / sigma) + ham_lo * q_function(d_lo / sigma)
    return float(errs.mean() / k)


def crossover_db(scheme_a, scheme_b, lo_db: float = 0.0, hi_db: float = 20.0, step_db: float = 0.1) -> list[float]:
    """Eb/N0 values (dB) where the two AWGN bit error curves cross."""
    def diff(db):
        g = db_to_linear(db)
        return math.log(ber_awgn(scheme_a, g).ber) - math.log(ber_awgn(scheme_b, g).ber)

    grid = np.arange(lo_db, hi_db + step_db / 2, step_db)
    vals = [diff(d) for d in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(optimize.brentq(diff, a, b)))
    return roots
