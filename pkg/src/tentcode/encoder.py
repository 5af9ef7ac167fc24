"""Exact tent codes.

A code is a plain ``str`` over ``"01"`` with ``b1`` first.  The bit rule
carries parity: the next bit repeats the previous one while the orbit is
below 1/2, flips above 1/2, and is 1 exactly at 1/2.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .numerics import DomainError, TentParams, tent_apply

BitCode = str


class Order(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def parse_code(text: str) -> BitCode:
    """Accept a bit string with optional grouping whitespace."""
    code = "".join(text.split())
    if set(code) - {"0", "1"}:
        raise DomainError(f"not a bit string: {text!r}")
    return code


def next_bit(prev: int, z: Fraction) -> int:
    """One step of the bit rule given the previous bit and the current point.

    With ``prev = 0`` this is also the rule for the first bit.
    """
    if prev == 0:
        return 0 if z < Fraction(1, 2) else 1
    return 1 if z <= Fraction(1, 2) else 0


def encode(params: TentParams, x: Fraction, n: int) -> BitCode:
    x = Fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"x = {x} is outside [0, 1)")
    if n < 0:
        raise DomainError("code length must be non-negative")
    # x_i = num / den with den = q * d**i, kept unreduced so each step is a
    # small-integer multiply instead of a gcd
    num, den = x.numerator, x.denominator
    c, d = params.c, params.d
    bits = []
    b = 0
    for i in range(n):
        if i:
            if 2 * num <= den:
                num = c * num
            else:
                num = c * (den - num)
            den *= d
        twice = 2 * num
        if b == 0:
            b = 0 if twice < den else 1
        else:
            b = 1 if twice <= den else 0
        bits.append(b)
        if num == 0:
            # orbit reached the fixed point 0: the last bit repeats forever
            bits.extend([b] * (n - i - 1))
            break
    return "".join(map(str, bits))


def orbit_trace(params: TentParams, x: Fraction, n: int) -> list[Fraction]:
    """Return ``[x_0, x_1, ..., x_n]``."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"x = {x} is outside [0, 1)")
    orbit = [x]
    for _ in range(n):
        orbit.append(tent_apply(params, orbit[-1]))
    return orbit


def reconstruct(params: TentParams, code: BitCode) -> Fraction:
    """Partial sum ``(mu - 1) * sum_i b_i mu**-i`` over the given bits."""
    c, d = params.c, params.d
    n = len(code)
    total = sum(d**i * c ** (n - i) for i, ch in enumerate(code, 1) if ch == "1")
    return Fraction((c - d) * total, d * c**n)


def lex_compare(a: BitCode, b: BitCode) -> Order:
    if len(a) != len(b):
        raise ValueError(f"codes of different length ({len(a)} vs {len(b)})")
    if a == b:
        return Order.EQ
    return Order.LT if a < b else Order.GT
