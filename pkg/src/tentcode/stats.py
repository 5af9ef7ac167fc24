"""Sampling tent codes and measuring the automaton level they reach."""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .automaton import (
    START,
    AutomatonTable,
    MachineState,
    PeriodicKneadingError,
    k_statistic,
    shared_table,
)
from .encoder import BitCode, encode
from .numerics import HALF, DomainError, TentParams, ceil_log
from .oracle import segment_step


def _draw(rng: random.Random, p: Fraction) -> bool:
    """True with probability exactly ``p``."""
    return rng.randrange(p.denominator) < p.numerator


def split_lengths(table: AutomatonTable, s: MachineState) -> tuple[Fraction, Fraction]:
    """Lengths of the children of the state's segment, indexed by next bit."""
    v, u = table.v[s.l], table.u[s.l]
    mu = table.params.mu
    same = mu * (min(u, HALF) - v) if v < HALF else Fraction(0)
    flip = mu * (u - max(v, HALF)) if u > HALF else Fraction(0)
    return (same, flip) if s.b == 0 else (flip, same)


def sample_dn(params: TentParams, n: int, rng: random.Random,
              table: Optional[AutomatonTable] = None) -> BitCode:
    """Draw the code of a uniform point of [0, 1) by walking the automaton."""
    if n < 1:
        raise DomainError("n must be positive")
    table = table or shared_table(params)
    s = START
    bits = []
    for _ in range(n):
        zero, one = split_lengths(table, s)
        bit = 0 if _draw(rng, zero / (zero + one)) else 1
        s = table.advance(s, bit)
        bits.append(bit)
    return "".join(map(str, bits))


@dataclass(frozen=True)
class ExperimentConfig:
    params: TentParams
    x: Fraction
    epsilon: Fraction
    n: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("need at least one trial")
        if not 0 < self.epsilon < Fraction(1, 4):
            raise DomainError(f"epsilon = {self.epsilon} is outside (0, 1/4)")
        if self.n < 1:
            raise DomainError("n must be positive")
        lo, hi = self.window
        if lo >= hi:
            raise DomainError("[x - eps, x + eps] does not meet [0, 1)")

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return max(self.x - self.epsilon, Fraction(0)), min(self.x + self.epsilon, Fraction(1))

    @property
    def resolution_bits(self) -> int:
        return 2 * self.n + ceil_log(Fraction(2), 1 / self.epsilon)


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent stream per (seed, trial), whatever the scheduling."""
    return random.Random(f"tentcode:{seed}:{trial}")


def sample_perturbed(cfg: ExperimentConfig, rng: random.Random) -> BitCode:
    """Code of X drawn uniformly from a fine grid on the clamped window."""
    lo, hi = cfg.window
    m = cfg.resolution_bits
    x = lo + (hi - lo) * Fraction(rng.getrandbits(m), 2**m)
    return encode(cfg.params, x, cfg.n)


@dataclass
class KSummary:
    trials: int
    mean_k: Fraction
    mean_k_sq: Fraction
    max_k: int
    histogram: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_values(cls, values: list[int]) -> "KSummary":
        hist = Counter(values)
        return cls(
            trials=len(values),
            mean_k=Fraction(sum(values), len(values)),
            mean_k_sq=Fraction(sum(k * k for k in values), len(values)),
            max_k=max(values),
            histogram=dict(sorted(hist.items())),
        )

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_k": float(self.mean_k),
            "mean_k_sq": float(self.mean_k_sq),
            "mean_k_exact": str(self.mean_k),
            "mean_k_sq_exact": str(self.mean_k_sq),
            "max_k": self.max_k,
            "histogram": {str(k): v for k, v in self.histogram.items()},
        }


def _run_trials(cfg: ExperimentConfig, trials: range, use_decide: bool) -> list[int]:
    table = AutomatonTable(cfg.params)
    out = []
    for t in trials:
        code = sample_perturbed(cfg, trial_rng(cfg.seed, t))
        if use_decide:
            from .algorithms import EpsilonConfig, decide

            verdict, report = decide(cfg.params, code, cfg.x,
                                     EpsilonConfig.create(cfg.params, cfg.epsilon), table)
            if not verdict:
                raise AssertionError(f"decide rejected the code of a point in the window: {code}")
            out.append(report.max_level)
        else:
            out.append(k_statistic(cfg.params, code, table))
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1,
                   use_decide: bool = False) -> list[int]:
    """Per-trial K values, in trial order."""
    if workers <= 1:
        return _run_trials(cfg, range(cfg.trials), use_decide)
    chunks = [range(i, cfg.trials, workers) for i in range(workers)]
    values = [0] * cfg.trials
    with ProcessPoolExecutor(workers) as pool:
        for chunk, ks in zip(chunks, pool.map(_run_trials, [cfg] * workers, chunks,
                                               [use_decide] * workers)):
            for t, k in zip(chunk, ks):
                values[t] = k
    return values


def smoothed_experiment(cfg: ExperimentConfig, workers: int = 1,
                        use_decide: bool = False) -> KSummary:
    return KSummary.from_values(run_experiment(cfg, workers, use_decide))


@dataclass
class LevelBoundsReport:
    params: TentParams
    n: int
    l_star: int
    witness: Optional[int] = None
    witness_ratio: Optional[Fraction] = None
    ratios_at_most_one: bool = True
    telescoping_ok: bool = True
    levels_checked: int = 0
    min_length_scaled: Optional[Fraction] = None
    shape_violations: list = field(default_factory=list)
    windows_without_back_edge: list = field(default_factory=list)
    in_edge_violations: list = field(default_factory=list)
    hypotheses_violated: Optional[str] = None

    @property
    def ok(self) -> bool:
        return (
            self.hypotheses_violated is None
            and self.witness is not None
            and self.witness <= self.l_star
            and self.ratios_at_most_one
            and self.telescoping_ok
            and (self.min_length_scaled is None or self.min_length_scaled >= 1)
            and not self.shape_violations
            and not self.windows_without_back_edge
            and not self.in_edge_violations
        )

    def to_dict(self) -> dict:
        return {
            "mu": str(self.params),
            "n": self.n,
            "l_star": self.l_star,
            "witness_l": self.witness,
            "witness_ratio": None if self.witness_ratio is None else float(self.witness_ratio),
            "ratios_at_most_one": self.ratios_at_most_one,
            "telescoping_ok": self.telescoping_ok,
            "levels_checked": self.levels_checked,
            "min_length_times_2d^k": None if self.min_length_scaled is None
            else float(self.min_length_scaled),
            "shape_violations": self.shape_violations,
            "windows_without_back_edge": self.windows_without_back_edge,
            "in_edge_violations": self.in_edge_violations,
            "hypotheses_violated": self.hypotheses_violated,
            "ok": self.ok,
        }


def chain_ratio(table: AutomatonTable, l: int) -> Fraction:
    """``|I_2l| / (mu**l |I_l|)``: probability of climbing from level l to 2l."""
    return table.length(2 * l) / (table.params.mu**l * table.length(l))


def chain_product(table: AutomatonTable, l: int) -> Fraction:
    """Same probability as a product of one-step ratios along the chain.

    Each child length comes from the interval rule applied to ``I_i``, not
    from the stored level ``i + 1``.
    """
    params = table.params
    prob = Fraction(1)
    for i in range(l, 2 * l):
        seg = table.kneading_segment(i)
        bit = next(b for b in (0, 1) if table.delta[i][b] == i + 1)
        child = segment_step(params, seg, str(bit))
        prob *= child.length / (params.mu * seg.length)
    return prob


def edge_structure(table: AutomatonTable, report: LevelBoundsReport) -> None:
    """Check the chain / back-edge shape of every built transition.

    Level 1 is skipped for the shape check: its self-loop ``I_1 -> I_1`` is
    the base case of the recursion.
    """
    built = len(table.delta)
    back_levels = set()
    for k in range(2, built):
        for bit in (0, 1):
            t = table.delta[k][bit]
            if t == -1 or (t == k + 1 and bit == table.c[t]):
                continue
            if 2 <= t <= k // 2 + 1 and bit != table.c[t]:
                back_levels.add(k)
            else:
                report.shape_violations.append((k, bit, t))
    for m in range(1, (built - 1) // 2 + 1):
        if not back_levels.intersection(range(m + 1, 2 * m + 1)):
            report.windows_without_back_edge.append(m)
    # a first visit to level t must come straight up the chain: every other
    # edge into t starts at level 2t - 2 or higher
    for k in range(1, built):
        for t in table.delta[k]:
            if t >= 2 and k != t - 1 and k < 2 * t - 2:
                report.in_edge_violations.append((k, t))


def verify_level_bounds(params: TentParams, n: int, levels: int = 50) -> LevelBoundsReport:
    if n < 2:
        raise DomainError("n must be at least 2")
    mu = params.mu
    l_star = 8 * ceil_log(mu, Fraction(params.d)) * ceil_log(mu, Fraction(n))
    report = LevelBoundsReport(params, n, l_star)
    table = AutomatonTable(params)
    bound = Fraction(1, n**3)
    try:
        for l in range(1, l_star + 1):
            table.extend_to(2 * l + 1)
            if table.max_level < 2 * l:
                report.hypotheses_violated = f"table closed at level {table.closure_level}"
                break
            ratio = chain_ratio(table, l)
            if ratio > 1:
                report.ratios_at_most_one = False
            if ratio <= bound:
                report.witness, report.witness_ratio = l, ratio
                report.telescoping_ok = chain_product(table, l) == ratio
                break
        table.extend_to(levels + 1)
    except PeriodicKneadingError as exc:
        report.hypotheses_violated = str(exc)
        return report

    report.levels_checked = table.max_level
    scaled = [table.length(k) * 2 * params.d**k for k in range(2, table.max_level + 1)]
    report.min_length_scaled = min(scaled, default=None)
    edge_structure(table, report)
    return report
