"""Tent codes of the tent map with rational slope, computed exactly."""

from .algorithms import (
    Decision,
    EpsilonConfig,
    InvariantViolation,
    SpaceReport,
    decide,
    naive_encode,
    valid_encode,
)
from .automaton import (
    REJECT,
    START,
    AutomatonTable,
    MachineState,
    PeriodicKneadingError,
    build_table,
    export_dot,
    export_json,
    is_member,
    k_statistic,
    shared_table,
)
from .encoder import BitCode, Order, encode, lex_compare, next_bit, orbit_trace, parse_code, reconstruct
from .numerics import (
    DigitStream,
    DomainError,
    RoundingConfig,
    RoundingMode,
    TentParams,
    as_rational,
    ceil_log,
    round_fixed,
    tent_apply,
    tent_iterate,
)
from .oracle import SegmentType, enumerate_language, language, segment_of
from .stats import ExperimentConfig, KSummary, run_experiment, sample_dn, verify_level_bounds

__version__ = "0.1.0"
