"""Exact rational helpers, the tent map and fixed-precision rounding.

Everything here works on :class:`fractions.Fraction`; there is no floating
point anywhere in the package.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

HALF = Fraction(1, 2)


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


def as_rational(value: RationalLike) -> Fraction:
    """Convert ``"p/q"``, ``"0.25"``, ints or Fractions to a Fraction.

    Floats are refused on purpose: a float has already been rounded.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction or a 'p/q' string")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse rational {value!r}") from exc


@dataclass(frozen=True)
class TentParams:
    """Slope ``mu = c/d`` of the tent map, an irreducible fraction in (1, 2)."""

    c: int
    d: int

    def __post_init__(self):
        if self.d <= 0 or self.c <= 0:
            raise DomainError(f"slope {self.c}/{self.d} must have positive terms")
        if gcd(self.c, self.d) != 1:
            raise DomainError(f"slope {self.c}/{self.d} is not in lowest terms")
        if not self.d < self.c < 2 * self.d:
            raise DomainError(f"slope {self.c}/{self.d} is not in (1, 2)")

    @classmethod
    def parse(cls, text: RationalLike) -> "TentParams":
        mu = as_rational(text)
        return cls(mu.numerator, mu.denominator)

    @property
    def mu(self) -> Fraction:
        return Fraction(self.c, self.d)

    @property
    def peak(self) -> Fraction:
        """f(1/2) = mu/2, the maximum of the map."""
        return Fraction(self.c, 2 * self.d)

    def __str__(self):
        return f"{self.c}/{self.d}"


def _check_unit(x: Fraction) -> None:
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x} is outside [0, 1]")


def tent_apply(params: TentParams, x: Fraction) -> Fraction:
    _check_unit(x)
    if x <= HALF:
        return params.mu * x
    return params.mu * (1 - x)


def tent_iterate(params: TentParams, x: Fraction, i: int) -> Fraction:
    """Return ``f^i(x)``."""
    if i < 0:
        raise DomainError("iteration count must be non-negative")
    _check_unit(x)
    for _ in range(i):
        # zero is a fixed point; long runs from 0 are common in tests
        if x == 0:
            break
        x = tent_apply(params, x)
    return x


def ceil_log(base: Fraction, target: Fraction) -> int:
    """Smallest integer k >= 0 with ``base**k >= target``, for base > 1.

    Exact replacement for ``ceil(log(target) / log(base))``.
    """
    if base <= 1:
        raise DomainError("base must exceed 1")
    k, power = 0, Fraction(1)
    while power < target:
        power *= base
        k += 1
    return k


class RoundingMode(enum.Enum):
    NEAREST_BINARY = "nearest-bin"
    FLOOR_BINARY = "floor-bin"
    FLOOR_DECIMAL = "floor-dec"

    @property
    def base(self) -> int:
        return 10 if self is RoundingMode.FLOOR_DECIMAL else 2


@dataclass(frozen=True)
class RoundingConfig:
    mode: RoundingMode
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise DomainError("rounding precision must be positive")

    @property
    def grid(self) -> int:
        return self.mode.base ** self.precision

    @property
    def max_error(self) -> Fraction:
        return Fraction(1, self.grid)


def round_fixed(x: Fraction, cfg: RoundingConfig) -> Fraction:
    """Round ``x`` onto the grid of ``cfg``; ties round half up."""
    _check_unit(x)
    scale = cfg.grid
    if cfg.mode is RoundingMode.NEAREST_BINARY:
        return Fraction((2 * scale * x.numerator + x.denominator) // (2 * x.denominator), scale)
    return Fraction(scale * x.numerator // x.denominator, scale)


class DigitStream:
    """A real in [0, 1) given by its binary digits ``0.d1 d2 d3 ...``.

    Digits are pulled lazily from ``source``; a finite source is padded with
    zeros.  ``digits_read`` records how far the stream was consumed.
    """

    def __init__(self, source: Iterable[int]):
        self._it = itertools.chain(iter(source), itertools.repeat(0))
        self._digits: list[int] = []

    @classmethod
    def from_bits(cls, text: str) -> "DigitStream":
        text = "".join(text.split())
        if set(text) - {"0", "1"}:
            raise DomainError(f"not a binary digit string: {text!r}")
        return cls(int(ch) for ch in text)

    @property
    def digits_read(self) -> int:
        return len(self._digits)

    def prefix(self, k: int) -> Fraction:
        """Truncation of the stream to ``k`` binary digits."""
        while len(self._digits) < k:
            digit = next(self._it)
            if digit not in (0, 1):
                raise DomainError(f"digit stream produced {digit!r}")
            self._digits.append(digit)
        value = 0
        for digit in self._digits[:k]:
            value = 2 * value + digit
        return Fraction(value, 2**k)

    def round_nearest(self, k: int) -> Fraction:
        """Nearest-binary rounding to ``k`` bits reading only ``k + 1`` digits."""
        head = int(self.prefix(k + 1) * 2 ** (k + 1))
        return Fraction((head + 1) // 2, 2**k)


RealInput = Union[Fraction, DigitStream]
