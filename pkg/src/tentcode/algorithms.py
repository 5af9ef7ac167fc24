"""Encoding and decision with bounded precision.

* :func:`naive_encode` rounds the orbit every step and may emit codes that
  no point has.
* :func:`valid_encode` rounds only for the first ``kappa`` steps and then
  walks the automaton, so its output is always a real tent code of some
  point within ``eps`` of ``x``.
* :func:`decide` accepts every code of a point within ``eps`` of ``x`` and
  rejects every code that is not the code of a point within ``2 eps``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .automaton import START, AutomatonTable, MachineState, step
from .encoder import BitCode, next_bit
from .numerics import (
    DigitStream,
    DomainError,
    RealInput,
    RoundingConfig,
    RoundingMode,
    TentParams,
    as_rational,
    ceil_log,
    round_fixed,
    tent_apply,
)


class InvariantViolation(RuntimeError):
    pass


class Decision(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"

    def __bool__(self):
        return self is Decision.ACCEPT


@dataclass(frozen=True)
class EpsilonConfig:
    epsilon: Fraction
    kappa: int

    @classmethod
    def create(cls, params: TentParams, epsilon) -> "EpsilonConfig":
        """``kappa = ceil(3 lg(1/eps) / lg mu)``, i.e. least k with mu**k >= eps**-3."""
        eps = as_rational(epsilon)
        if not 0 < eps < Fraction(1, 4):
            raise DomainError(f"epsilon = {eps} is outside (0, 1/4)")
        return cls(eps, ceil_log(params.mu, eps**-3))


@dataclass
class SpaceReport:
    kappa: int = 0
    max_level: int = 0
    table_levels: int = 0
    table_entries: int = 0
    max_rational_bits: int = 0
    digits_read: Optional[int] = None
    forced_bits: int = 0
    steps: int = 0

    def note(self, *values: Fraction) -> None:
        for x in values:
            bits = x.numerator.bit_length() + x.denominator.bit_length()
            if bits > self.max_rational_bits:
                self.max_rational_bits = bits

    def finish(self, table: AutomatonTable) -> "SpaceReport":
        self.table_levels = table.max_level
        self.table_entries = 3 * len(table.v) + 2 * len(table.delta)
        self.note(*table.v, *table.u)
        return self

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _nearest(kappa: int) -> RoundingConfig:
    return RoundingConfig(RoundingMode.NEAREST_BINARY, kappa)


def naive_encode(params: TentParams, x: Fraction, n: int, cfg: RoundingConfig) -> BitCode:
    """Round ``x``, then alternate bit rule and rounded map ``n`` times."""
    z = round_fixed(Fraction(x), cfg)
    b = 0
    bits = []
    for _ in range(n):
        b = next_bit(b, z)
        bits.append(b)
        z = round_fixed(tent_apply(params, z), cfg)
    return "".join(map(str, bits))


def _start_point(x: RealInput, kappa: int, report: SpaceReport) -> Fraction:
    if isinstance(x, DigitStream):
        z = x.round_nearest(kappa)
        report.digits_read = x.digits_read
        return z
    x = Fraction(x)
    if not 0 <= x < 1:
        raise DomainError(f"x = {x} is outside [0, 1)")
    return round_fixed(x, _nearest(kappa))


def valid_encode(
    params: TentParams,
    x: RealInput,
    n: int,
    eps: EpsilonConfig,
    table: Optional[AutomatonTable] = None,
) -> tuple[BitCode, SpaceReport]:
    kappa = eps.kappa
    report = SpaceReport(kappa=kappa)
    table = table or AutomatonTable(params)
    # edges out of every level up to 2 kappa
    table.extend_to(2 * kappa + 1)
    rounding = _nearest(kappa)

    z = _start_point(x, kappa, report)
    s = START
    bits = []
    for _ in range(min(kappa, n)):
        bit = next_bit(s.b, z)
        nxt = step(table, s, bit)
        if nxt.rejected:
            # the rounded orbit crossed a boundary no real point can cross
            bit = 1 - bit
            nxt = step(table, s, bit)
            report.forced_bits += 1
            if nxt.rejected:
                raise InvariantViolation(f"both bits rejected at level {s.l}")
        s = nxt
        bits.append(bit)
        report.max_level = max(report.max_level, s.l)
        report.note(z)
        z = round_fixed(tent_apply(params, z), rounding)

    for _ in range(n - len(bits)):
        if s.l >= len(table.delta):
            raise InvariantViolation(f"level {s.l} exceeds the prebuilt table")
        best = None
        for index in (0, 1):
            target = table.target(s.l, index)
            if target > 0 and (best is None or target < table.target(s.l, best)):
                best = index
        if best is None:
            raise InvariantViolation(f"no live transition out of level {s.l}")
        bit = best if s.b == table.c[s.l] else 1 - best
        s = MachineState(table.target(s.l, best), bit)
        bits.append(bit)
        report.max_level = max(report.max_level, s.l)

    report.steps = n
    return "".join(map(str, bits)), report.finish(table)


@dataclass
class DecisionState:
    """Machine state plus the boundary orbits still being followed.

    A boundary is dropped (set to None) once the input code has moved
    strictly inside it.  ``case`` numbers the combinations 1 = both
    boundaries followed, 2 = upper only, 3 = lower only, 0 = neither.
    """

    machine: MachineState = START
    z_lo: Optional[Fraction] = None
    z_hi: Optional[Fraction] = None

    @property
    def case(self) -> int:
        lo, hi = self.z_lo is not None, self.z_hi is not None
        return {(True, True): 1, (False, True): 2, (True, False): 3}.get((lo, hi), 0)


def decide(
    params: TentParams,
    code: BitCode,
    x: RealInput,
    eps: EpsilonConfig,
    table: Optional[AutomatonTable] = None,
) -> tuple[Decision, SpaceReport]:
    kappa = eps.kappa
    report = SpaceReport(kappa=kappa)
    table = table or AutomatonTable(params)
    table.extend_to(kappa)
    rounding = _nearest(kappa)

    if isinstance(x, DigitStream):
        # kappa + 2 digits keep the total error of the boundaries below 2**-kappa
        centre = x.prefix(kappa + 2)
        report.digits_read = x.digits_read
    else:
        centre = Fraction(x)
        if not 0 <= centre < 1:
            raise DomainError(f"x = {centre} is outside [0, 1)")
    margin = Fraction(3, 2) * eps.epsilon
    lower, upper = centre - margin, centre + margin
    # a boundary outside [0, 1) constrains nothing: every code lies above
    # the code of 0 and below the codes near 1
    state = DecisionState(
        z_lo=round_fixed(lower, rounding) if lower >= 0 else None,
        z_hi=round_fixed(upper, rounding) if upper < 1 else None,
    )
    prev = 0
    for i, ch in enumerate(code, 1):
        bit = 1 if ch == "1" else 0
        report.steps = i
        if state.z_lo is not None:
            b_lo = next_bit(prev, state.z_lo)
            if bit < b_lo:
                return Decision.REJECT, report.finish(table)
            # the lower orbit keeps moving only while it is pinned to the input
            state.z_lo = round_fixed(tent_apply(params, state.z_lo), rounding) if bit == b_lo else None
        if state.z_hi is not None:
            b_hi = next_bit(prev, state.z_hi)
            if bit > b_hi:
                return Decision.REJECT, report.finish(table)
            state.z_hi = round_fixed(tent_apply(params, state.z_hi), rounding) if bit == b_hi else None
        report.note(*(z for z in (state.z_lo, state.z_hi) if z is not None))

        state.machine = table.advance(state.machine, bit)
        if state.machine.rejected:
            return Decision.REJECT, report.finish(table)
        report.max_level = max(report.max_level, state.machine.l)
        prev = bit
    return Decision.ACCEPT, report.finish(table)
