"""Slow, obviously-correct ground truth for tent languages.

Two independent routes:

* :func:`segment_of` pushes the segment type of a code forward one bit at a
  time with the eight-case interval rule, never touching the automaton table.
* :func:`enumerate_language` cuts ``[0, 1)`` at every preimage of 1/2 and
  encodes each cell exactly.  Exponential in ``n``; meant for ``n <= ~20``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .encoder import BitCode, encode
from .numerics import HALF, TentParams, tent_apply


@dataclass(frozen=True)
class SegmentType:
    """Half-open interval ``[v, u)`` (``closed_left``) or ``(v, u]``."""

    v: Fraction
    u: Fraction
    closed_left: bool
    level: Optional[int] = None

    @property
    def length(self) -> Fraction:
        return self.u - self.v

    def same_interval(self, other: "SegmentType") -> bool:
        return (self.v, self.u, self.closed_left) == (other.v, other.u, other.closed_left)

    def __str__(self):
        lo, hi = ("[", ")") if self.closed_left else ("(", "]")
        return f"{lo}{self.v}, {self.u}{hi}"


@dataclass(frozen=True)
class PreimageInterval:
    """``[lo, hi)``: the exact set of x whose code is ``code``."""

    lo: Fraction
    hi: Fraction
    code: BitCode

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


def initial_segment(params: TentParams, bit: str) -> SegmentType:
    # T(0) = f([0, 1/2)) and T(1) = f([1/2, 1))
    if bit == "0":
        return SegmentType(Fraction(0), params.peak, True)
    return SegmentType(Fraction(0), params.peak, False)


def segment_step(params: TentParams, seg: SegmentType, bit: str) -> Optional[SegmentType]:
    """Image of the part of ``seg`` consistent with the next bit, or None."""
    f = lambda y: tent_apply(params, y)  # noqa: E731
    v, u = seg.v, seg.u
    if seg.closed_left:
        # [v, u)
        if v < HALF < u:
            if bit == "0":
                return SegmentType(f(v), f(HALF), True)
            return SegmentType(f(u), f(HALF), False)
        if u <= HALF:
            return SegmentType(f(v), f(u), True) if bit == "0" else None
        # v >= 1/2
        return SegmentType(f(u), f(v), False) if bit == "1" else None
    # (v, u]
    if v < HALF < u:
        if bit == "1":
            return SegmentType(f(v), f(HALF), False)
        return SegmentType(f(u), f(HALF), True)
    if u <= HALF:
        return SegmentType(f(v), f(u), False) if bit == "1" else None
    return SegmentType(f(u), f(v), True) if bit == "0" else None


def segment_of(params: TentParams, code: BitCode) -> Optional[SegmentType]:
    """Segment type ``T(code)``, or None when the code is not realisable."""
    if not code:
        raise ValueError("segment type of the empty code is undefined")
    seg = initial_segment(params, code[0])
    for bit in code[1:]:
        seg = segment_step(params, seg, bit)
        if seg is None:
            return None
    return seg


def child_lengths(params: TentParams, seg: SegmentType) -> tuple[Fraction, Fraction]:
    """``(|T(b0)|, |T(b1)|)`` for a code with segment ``seg``; 0 if impossible."""
    out = []
    for bit in "01":
        child = segment_step(params, seg, bit)
        out.append(child.length if child is not None else Fraction(0))
    return out[0], out[1]


def breakpoints(params: TentParams, n: int) -> list[Fraction]:
    """All x in [0, 1) with ``f^i(x) = 1/2`` for some ``0 <= i < n``, sorted."""
    if n < 1:
        raise ValueError("n must be positive")
    mu = params.mu
    found = {HALF}
    frontier = {HALF}
    for _ in range(n - 1):
        nxt = set()
        for y in frontier:
            if y > params.peak:
                continue  # outside the range of f
            for pre in (y / mu, 1 - y / mu):
                if 0 <= pre < 1 and pre not in found:
                    nxt.add(pre)
        found |= nxt
        frontier = nxt
    return sorted(found)


def enumerate_language(params: TentParams, n: int) -> list[PreimageInterval]:
    """Every code of length ``n`` with its preimage, in increasing x order."""
    cuts = [Fraction(0)] + [a for a in breakpoints(params, n) if a > 0] + [Fraction(1)]
    cells: list[PreimageInterval] = []
    for lo, hi in zip(cuts, cuts[1:]):
        code = encode(params, lo, n)
        mid_code = encode(params, (lo + hi) / 2, n)
        if code != mid_code:
            raise AssertionError(f"code not constant on cell [{lo}, {hi})")
        if cells and cells[-1].code == code:
            cells[-1] = PreimageInterval(cells[-1].lo, hi, code)
        else:
            cells.append(PreimageInterval(lo, hi, code))
    return cells


def language(params: TentParams, n: int) -> dict[BitCode, PreimageInterval]:
    return {cell.code: cell for cell in enumerate_language(params, n)}


def codes_near(
    cells: list[PreimageInterval], x: Fraction, eps: Fraction
) -> set[BitCode]:
    """Codes of the points of ``[x - eps, x + eps] ∩ [0, 1)``."""
    lo, hi = x - eps, x + eps
    return {cell.code for cell in cells if cell.lo <= hi and cell.hi > lo}


def locate(cells: list[PreimageInterval], x: Fraction) -> PreimageInterval:
    """The cell containing ``x``."""
    i = bisect.bisect_right([cell.lo for cell in cells], x) - 1
    return cells[i]
