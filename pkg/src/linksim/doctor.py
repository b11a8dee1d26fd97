"""Fast invariant self-checks behind ``linksim doctor``."""

from __future__ import annotations

import math

import numpy as np

from . import correlation, modem, pn_codes, spreading, theory
from .channel import noise_sigma, rayleigh_gains
from .metrics import confidence_interval


def _msequences():
    for n in range(3, 8):
        for poly in pn_codes.primitive_polynomials(n):
            seq = pn_codes.generate_msequence(poly)
            assert seq.size == pn_codes.msequence_period(poly) == 2**n - 1
            assert int(seq.sum()) == 2 ** (n - 1)
            acf = correlation.periodic_acf_profile(pn_codes.to_bipolar(seq)).raw
            assert acf[0] == 2**n - 1 and set(acf[1:]) == {-1}


def _x5_polynomial():
    assert pn_codes.msequence_period("x^5+x^2+1") == 31


def _gray_and_energy():
    for scheme in modem.Scheme:
        const = modem.constellation(scheme)
        pts, table = const.points, const.bit_table
        assert abs(np.mean(np.abs(pts) ** 2) - 1) < 1e-12
        dmin = const.min_distance()
        for a in range(const.order):
            for b in range(a + 1, const.order):
                if abs(abs(pts[a] - pts[b]) - dmin) < 1e-9:
                    assert int(np.sum(table[a] != table[b])) == 1


def _round_trip():
    rng = np.random.default_rng(1)
    codes = [pn_codes.to_bipolar(pn_codes.generate_msequence("x^3+x+1"))]
    for scheme in modem.Scheme:
        k = scheme.bits_per_symbol
        bits = rng.integers(0, 2, (1, 12 * k), dtype=np.uint8)
        for sf in (1, 4, 7):
            frame = spreading.build_downlink(bits, codes, sf, scheme)
            out = spreading.despread_soft(modem.soft_bit_metrics(frame.composite, scheme), codes[0], sf)
            assert np.array_equal(out, bits[0])


def _q_function():
    assert theory.q_function(0.0) == 0.5
    assert abs(theory.q_function(math.sqrt(2)) - 0.0786496035) < 1e-9


def _noise_calibration():
    assert noise_sigma(0.0, 2, 1) == 0.5


def _fading_power():
    g = rayleigh_gains(200_000, 100.0, 192_000.0, seed=3).gains
    assert abs(np.mean(np.abs(g) ** 2) - 1) < 0.03


def _wilson():
    lo, hi = confidence_interval(15615, 200_000)
    assert lo < theory.q_function(math.sqrt(2)) < hi


CHECKS = [
    ("m-sequence period, balance and two-valued ACF (degree 3-7)", _msequences),
    ("x^5+x^2+1 has period 31", _x5_polynomial),
    ("Gray labels and unit energy", _gray_and_energy),
    ("noiseless spread/modulate round trip", _round_trip),
    ("Q function reference values", _q_function),
    ("noise calibration at 0 dB", _noise_calibration),
    ("fading unit mean power", _fading_power),
    ("Wilson interval for 15615/200000 covers Q(sqrt 2)", _wilson),
]


def run_checks(stream=None) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            check()
            status = "PASS"
        except AssertionError:
            status = "FAIL"
            ok = False
        if stream is not None:
            print(f"{status}  {name}", file=stream)
    return ok
