"""M-sequence generation from binary LFSR generator polynomials.

Polynomials are written ``H(x) = h_n x^n + ... + h_1 x + 1``. The register
runs the characteristic recurrence of ``H``::

    a[k + n] = h_{n-1} a[k + n - 1] + ... + h_1 a[k + 1] + a[k]   (mod 2)

so ``x^3 + x + 1`` with seed ``(1, 0, 0)`` gives ``1, 0, 0, 1, 0, 1, 1``.
Sequences are numpy arrays: ``uint8`` for bits, ``int8`` (+1/-1) for chips.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 24

__all__ = [
    "MAX_DEGREE",
    "CodeCapacityError",
    "GeneratorPolynomial",
    "parse_polynomial",
    "generate_msequence",
    "msequence_period",
    "verify_maximal_period",
    "primitive_polynomials",
    "to_bipolar",
    "to_bits",
    "assign_user_codes",
]


class CodeCapacityError(ValueError):
    """More users requested than a code family can provide."""


@dataclass(frozen=True)
class GeneratorPolynomial:
    """Binary feedback polynomial.

    ``coeffs`` holds ``(h_n, ..., h_1)``; the constant term is always 1.
    """

    degree: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.degree <= MAX_DEGREE:
            raise ValueError(f"degree must be in 1..{MAX_DEGREE}, got {self.degree}")
        if len(self.coeffs) != self.degree:
            raise ValueError("coeffs must hold exactly `degree` entries (h_n .. h_1)")
        if any(c not in (0, 1) for c in self.coeffs):
            raise ValueError("coefficients must be 0 or 1")
        if self.coeffs[0] != 1:
            raise ValueError("leading coefficient h_n must be 1")

    @classmethod
    def from_exponents(cls, exponents) -> "GeneratorPolynomial":
        exps = {int(e) for e in exponents}
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be non-negative")
        degree = max(exps, default=0)
        if degree < 1:
            raise ValueError("polynomial must have degree >= 1")
        if 0 not in exps:
            raise ValueError("constant term must be present (h_0 = 1)")
        coeffs = tuple(1 if i in exps else 0 for i in range(degree, 0, -1))
        return cls(degree, coeffs)

    @property
    def exponents(self) -> tuple[int, ...]:
        """Nonzero exponents in decreasing order, constant term included."""
        exps = [self.degree - i for i, c in enumerate(self.coeffs) if c]
        return tuple(exps) + (0,)

    @property
    def period_bound(self) -> int:
        return (1 << self.degree) - 1

    def __str__(self) -> str:
        terms = []
        for e in self.exponents:
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)


_TERM = re.compile(r"^(?:x(?:\^(\d+))?|1)$")


def parse_polynomial(text: str | GeneratorPolynomial) -> GeneratorPolynomial:
    """Parse ``"x^3+x+1"`` or the exponent shorthand ``"3,1,0"``."""
    if isinstance(text, GeneratorPolynomial):
        return text
    s = str(text).replace(" ", "").lower()
    if not s:
        raise ValueError("empty polynomial")
    if re.fullmatch(r"\d+(,\d+)*", s):
        return GeneratorPolynomial.from_exponents(int(t) for t in s.split(","))
    exps = []
    for term in s.split("+"):
        m = _TERM.match(term)
        if m is None:
            raise ValueError(f"cannot parse polynomial term {term!r} in {text!r}")
        if term == "1":
            exps.append(0)
        else:
            exps.append(int(m.group(1)) if m.group(1) else 1)
    if len(set(exps)) != len(exps):
        raise ValueError(f"repeated term in polynomial {text!r}")
    return GeneratorPolynomial.from_exponents(exps)


def _feedback_mask(poly: GeneratorPolynomial) -> int:
    # bit j of the mask selects a[k + j] in the recurrence, j = 0 .. n-1
    mask = 1
    for i, c in enumerate(poly.coeffs[1:]):
        if c:
            mask |= 1 << (poly.degree - 1 - i)
    return mask


def _seed_state(poly: GeneratorPolynomial, seed) -> int:
    seed = [int(b) for b in seed]
    if len(seed) != poly.degree:
        raise ValueError(f"seed must have {poly.degree} bits, got {len(seed)}")
    if any(b not in (0, 1) for b in seed):
        raise ValueError("seed entries must be 0 or 1")
    state = 0
    for j, b in enumerate(seed):
        state |= b << j
    if state == 0:
        raise ValueError("all-zero seed is a fixed point of the LFSR")
    return state


def generate_msequence(poly, seed=None, length: int | None = None) -> np.ndarray:
    """Run the LFSR and return ``length`` output bits.

    Parameters
    ----------
    poly : GeneratorPolynomial or str
        Feedback polynomial.
    seed : sequence of int, optional
        Initial register contents ``(a_0, ..., a_{n-1})``; these are also the
        first ``n`` output bits. Defaults to ``(1, 0, ..., 0)``.
    length : int, optional
        Number of bits to produce. Defaults to one maximal period
        ``2**n - 1``.
    """
    poly = parse_polynomial(poly)
    n = poly.degree
    if seed is None:
        seed = (1,) + (0,) * (n - 1)
    state = _seed_state(poly, seed)
    if length is None:
        length = poly.period_bound
    if length < 1:
        raise ValueError("length must be >= 1")
    mask = _feedback_mask(poly)
    top = n - 1
    out = np.empty(length, dtype=np.uint8)
    for k in range(length):
        out[k] = state & 1
        fb = (state & mask).bit_count() & 1
        state = (state >> 1) | (fb << top)
    return out


def msequence_period(poly, seed=None) -> int:
    """Steps until the register state first returns to ``seed``."""
    poly = parse_polynomial(poly)
    n = poly.degree
    if seed is None:
        seed = (1,) + (0,) * (n - 1)
    start = _seed_state(poly, seed)
    mask = _feedback_mask(poly)
    top = n - 1
    state = start
    steps = 0
    # constant term 1 makes the state map a bijection, so the orbit is a cycle
    while True:
        fb = (state & mask).bit_count() & 1
        state = (state >> 1) | (fb << top)
        steps += 1
        if state == start:
            return steps


def verify_maximal_period(poly) -> bool:
    """True iff the LFSR state cycle from ``(1, 0, ..., 0)`` has length ``2**n - 1``."""
    poly = parse_polynomial(poly)
    return msequence_period(poly) == poly.period_bound


def primitive_polynomials(degree: int) -> list[GeneratorPolynomial]:
    """All degree-``degree`` polynomials whose LFSR has maximal period (by enumeration)."""
    found = []
    for middle in range(1 << (degree - 1)):
        coeffs = (1,) + tuple((middle >> (degree - 2 - i)) & 1 for i in range(degree - 1))
        poly = GeneratorPolynomial(degree, coeffs)
        if verify_maximal_period(poly):
            found.append(poly)
    return found


def to_bipolar(bits) -> np.ndarray:
    """Map bit 0 to +1 and bit 1 to -1."""
    bits = np.asarray(bits, dtype=np.int8)
    return (1 - 2 * bits).astype(np.int8)


def to_bits(chips) -> np.ndarray:
    """Inverse of :func:`to_bipolar`."""
    chips = np.asarray(chips)
    if not np.all(np.abs(chips) == 1):
        raise ValueError("chips must be +1 or -1")
    return (chips < 0).astype(np.uint8)


def assign_user_codes(base, num_users: int) -> list[np.ndarray]:
    """Give user ``k`` the base code cyclically advanced by ``k`` chips.

    Raises
    ------
    CodeCapacityError
        If ``num_users`` exceeds the code period or two shifts coincide.
    """
    base = np.asarray(base, dtype=np.int8)
    period = base.size
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    if num_users > period:
        raise CodeCapacityError(
            f"{num_users} users requested but a period-{period} code has only {period} shifts"
        )
    codes = [np.roll(base, -k) for k in range(num_users)]
    if len({c.tobytes() for c in codes}) != num_users:
        raise CodeCapacityError("cyclic shifts of this code are not all distinct")
    return codes
