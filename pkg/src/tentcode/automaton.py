"""Segment-type automaton over the kneading levels ``I_k`` / ``Ī_k``.

Level ``k`` stores the interval endpoints ``v[k] < u[k]`` of ``I_k`` and the
bit ``c[k]`` (the k-th bit of the code of 1/2).  ``I_k`` is ``[v, u)`` when
``c[k] == 0`` and ``(v, u]`` otherwise; ``Ī_k`` has the opposite closure.
``delta[k][b]`` is the level reached from ``I_k`` on bit ``b``; ``-1`` is
the reject state and level 0 is the start state ``q0 = [0, 1)``.

A machine state is ``(l, b)`` with ``b`` the last bit read.  Segment types
ending in bit 0 are always left-closed, so ``(l, b)`` is ``I_l`` exactly
when ``b == c[l]``.
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from typing import NamedTuple, Optional

from .encoder import BitCode
from .numerics import HALF, TentParams, tent_apply
from .oracle import SegmentType

REJECT = -1


class PeriodicKneadingError(RuntimeError):
    """The orbit of 1/2 returned to 1/2; the level structure breaks down."""


class TableExhausted(LookupError):
    """A transition was requested from a level whose edges are not built yet."""


class MachineState(NamedTuple):
    l: int
    b: int

    @property
    def rejected(self) -> bool:
        return self.l == REJECT


START = MachineState(0, 0)


class AutomatonTable:
    """Append-only table of levels, grown one level at a time.

    Growth is serialised by a lock; published levels never change, so readers
    need no synchronisation.
    """

    def __init__(self, params: TentParams):
        self.params = params
        # level 0 is q0 = [0, 1) with c[0] = 0; the reject sentinel lives
        # outside the lists (v[-1] = u[-1] = 0)
        self.v: list[Fraction] = [Fraction(0)]
        self.u: list[Fraction] = [Fraction(1)]
        self.c: list[int] = [0]
        self.delta: list[tuple[int, int]] = []
        self.closure_level: Optional[int] = None
        self._index: dict[tuple[Fraction, Fraction], int] = {}
        self._lock = threading.Lock()

    @property
    def max_level(self) -> int:
        return len(self.v) - 1

    @property
    def closed(self) -> bool:
        return self.closure_level is not None

    def __len__(self):
        return len(self.v)

    def endpoints(self, k: int) -> tuple[Fraction, Fraction]:
        if k == REJECT:
            return Fraction(0), Fraction(0)
        return self.v[k], self.u[k]

    def length(self, k: int) -> Fraction:
        return self.u[k] - self.v[k]

    def segment(self, k: int, closed_left: bool) -> SegmentType:
        return SegmentType(self.v[k], self.u[k], closed_left, level=k)

    def kneading_segment(self, k: int) -> SegmentType:
        """``I_k``."""
        return self.segment(k, self.c[k] == 0)

    def grow(self) -> bool:
        """Build the next level and the edges out of the current top level.

        Returns False once the table has closed (the next chain interval
        already exists), in which case nothing changes.
        """
        with self._lock:
            if self.closed:
                return False
            self._grow_locked()
            return True

    def extend_to(self, k: int) -> None:
        """Make sure edges out of every level below ``k`` exist."""
        while len(self.delta) < k and self.grow():
            pass

    def _add_level(self, v: Fraction, u: Fraction, c: int) -> int:
        self.v.append(v)
        self.u.append(u)
        self.c.append(c)
        k = len(self.v) - 1
        self._index[(v, u)] = k
        return k

    def _grow_locked(self) -> None:
        f = lambda y: tent_apply(self.params, y)  # noqa: E731
        top = self.max_level
        if top == 0:
            self._add_level(Fraction(0), self.params.peak, 1)
            self.delta.append((1, 1))
            return
        v, u, c = self.v[top], self.u[top], self.c[top]
        back: Optional[tuple[Fraction, Fraction]] = None
        if v < HALF < u:
            # the orbit of 1/2 sits at the closed end, so the chain always
            # continues on bit 0 and bit 1 is a back edge
            chain_bit = 0
            if c == 0:
                nxt, back = (f(v), f(HALF)), (f(u), f(HALF))
            else:
                nxt, back = (f(u), f(HALF)), (f(v), f(HALF))
            new_c = 0
        elif u <= HALF:
            chain_bit, nxt, new_c = c, (f(v), f(u)), c
        else:
            chain_bit, nxt, new_c = 1 - c, (f(u), f(v)), 1 - c

        closed_end = nxt[0] if new_c == 0 else nxt[1]
        if closed_end == HALF:
            raise PeriodicKneadingError(
                f"f^{top + 1}(1/2) = 1/2 for mu = {self.params}"
            )

        existing = self._index.get(nxt)
        if existing is not None:
            chain_target = existing
            self.closure_level = top
        else:
            chain_target = self._add_level(nxt[0], nxt[1], new_c)

        if back is None:
            other = REJECT
        else:
            other = self._index.get(back)
            if other is None:
                raise PeriodicKneadingError(
                    f"back edge from level {top} has no existing target"
                )
        edges = [0, 0]
        edges[chain_bit] = chain_target
        edges[1 - chain_bit] = other
        self.delta.append((edges[0], edges[1]))

    def target(self, k: int, bit: int) -> int:
        """Level reached from ``I_k`` on ``bit``."""
        if k >= len(self.delta):
            raise TableExhausted(f"edges out of level {k} are not built")
        return self.delta[k][bit]

    def step(self, s: MachineState, bit: int) -> MachineState:
        return step(self, s, bit)

    def advance(self, s: MachineState, bit: int) -> MachineState:
        """Like :func:`step` but grows the table on demand."""
        self.extend_to(s.l + 1)
        return step(self, s, bit)

    def decode(self, s: MachineState) -> SegmentType:
        """Segment type represented by a live state."""
        if s.rejected:
            raise ValueError("the reject state has no segment")
        return self.segment(s.l, s.b == 0)

    def state_name(self, s: MachineState) -> str:
        if s.l == REJECT:
            return "reject"
        if s.l == 0:
            return "q0"
        return f"I{s.l}" if s.b == self.c[s.l] else f"Ibar{s.l}"

    def bit_size(self) -> int:
        """Total bits of all stored numerators and denominators."""
        return sum(
            x.numerator.bit_length() + x.denominator.bit_length()
            for x in self.v + self.u
        )


def build_table(params: TentParams, K: int) -> AutomatonTable:
    if K < 1:
        raise ValueError("K must be at least 1")
    table = AutomatonTable(params)
    while table.max_level < K and table.grow():
        pass
    return table


def step(table: AutomatonTable, s: MachineState, bit: int) -> MachineState:
    """One transition; from ``Ī_l`` the edge of ``I_l`` on the opposite bit."""
    if s.l < 0:
        raise ValueError("cannot step out of the reject state")
    index = bit if s.b == table.c[s.l] else 1 - bit
    return MachineState(table.target(s.l, index), bit)


_shared: dict[TentParams, AutomatonTable] = {}
_shared_lock = threading.Lock()


def shared_table(params: TentParams) -> AutomatonTable:
    """Process-wide table for ``params``, grown lazily by its users."""
    with _shared_lock:
        table = _shared.get(params)
        if table is None:
            table = _shared[params] = AutomatonTable(params)
        return table


def run(table: AutomatonTable, code: BitCode) -> tuple[MachineState, list[int]]:
    """Feed ``code`` from q0; returns the final state and the levels visited."""
    s = START
    levels = []
    for ch in code:
        s = table.advance(s, 1 if ch == "1" else 0)
        levels.append(s.l)
        if s.rejected:
            break
    return s, levels


def is_member(params: TentParams, code: BitCode, table: Optional[AutomatonTable] = None):
    """Return ``(member, level_trace)``."""
    table = table or shared_table(params)
    s, levels = run(table, code)
    return not s.rejected, levels


def k_statistic(params: TentParams, code: BitCode, table: Optional[AutomatonTable] = None) -> int:
    """Highest level visited while reading a valid code."""
    ok, levels = is_member(params, code, table)
    if not ok:
        raise ValueError(f"{code} is not a valid tent code for mu = {params}")
    return max(levels, default=0)


def export_dot(table: AutomatonTable) -> str:
    lines = [
        "digraph tent_automaton {",
        "  rankdir=LR;",
        '  label="mu = %s";' % table.params,
        '  q0 [shape=circle, label="q0"];',
    ]
    built = range(1, table.max_level + 1)
    for k in built:
        lines.append(f'  I{k} [shape=circle, label="I{k}"];')
    for k in built:
        lines.append(f'  Ibar{k} [shape=circle, label="Ī{k}"];')
    lines.append('  reject [shape=doublecircle, label="∅"];')
    sources = [MachineState(0, 0)]
    for k in range(1, len(table.delta)):
        sources += [MachineState(k, table.c[k]), MachineState(k, 1 - table.c[k])]
    for s in sources:
        for bit in (0, 1):
            dest = step(table, s, bit)
            style = ", style=dashed" if dest.rejected else ""
            lines.append(
                f'  {table.state_name(s)} -> {table.state_name(dest)} [label="{bit}"{style}];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def table_dict(table: AutomatonTable) -> dict:
    levels = [{"k": -1, "v": "0", "u": "0", "c": None, "delta0": None, "delta1": None}]
    for k in range(table.max_level + 1):
        d0, d1 = table.delta[k] if k < len(table.delta) else (None, None)
        levels.append(
            {
                "k": k,
                "v": str(table.v[k]),
                "u": str(table.u[k]),
                "c": table.c[k],
                "delta0": d0,
                "delta1": d1,
            }
        )
    return {
        "mu": str(table.params),
        "max_level": table.max_level,
        "closure_level": table.closure_level,
        "levels": levels,
    }


def export_json(table: AutomatonTable) -> str:
    return json.dumps(table_dict(table), indent=2)
