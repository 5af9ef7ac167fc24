from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import slopes
from tentcode.algorithms import (
    Decision,
    DecisionState,
    EpsilonConfig,
    decide,
    naive_encode,
    valid_encode,
)
from tentcode.automaton import AutomatonTable, MachineState, is_member, shared_table
from tentcode.encoder import Order, encode, lex_compare
from tentcode.numerics import (
    DigitStream,
    DomainError,
    RoundingConfig,
    RoundingMode,
    TentParams,
    round_fixed,
    tent_iterate,
)
from tentcode.oracle import codes_near, enumerate_language, segment_of

MU85 = TentParams(8, 5)
MU8150 = TentParams(81, 50)

eps_values = st.sampled_from([Fraction(1, 32), Fraction(1, 64), Fraction(1, 9), Fraction(1, 5)])


def dyadic_points(bits=10):
    return st.integers(0, 2**bits - 1).map(lambda k: Fraction(k, 2**bits))


def sandwiched(p, x, eps, code):
    n = len(code)
    if x - eps >= 0 and lex_compare(encode(p, x - eps, n), code) is Order.GT:
        return False
    if x + eps < 1 and lex_compare(code, encode(p, x + eps, n)) is Order.GT:
        return False
    return True


class TestEpsilonConfig:
    def test_kappa(self):
        # (8/5)**23 >= 32**3 > (8/5)**22
        assert EpsilonConfig.create(MU85, "1/32").kappa == 23
        assert EpsilonConfig.create(MU85, Fraction(1, 64)).kappa == 27

    @pytest.mark.parametrize("eps", ["0", "1/4", "1/2", "-1/8"])
    def test_range(self, eps):
        with pytest.raises(DomainError):
            EpsilonConfig.create(MU85, eps)


class TestNaive:
    def test_prop6_floor_binary(self):
        cfg = RoundingConfig(RoundingMode.FLOOR_BINARY, 8)
        code = naive_encode(MU8150, Fraction(1, 2), 14, cfg)
        assert code == "10001101101100"
        assert not is_member(MU8150, code)[0]

    def test_prop6_floor_decimal(self):
        cfg = RoundingConfig(RoundingMode.FLOOR_DECIMAL, 3)
        code = naive_encode(MU8150, Fraction(1, 2), 15, cfg)
        assert code == "100011011011010"
        assert not is_member(MU8150, code)[0]
        assert segment_of(MU8150, code) is None

    def test_zero(self):
        cfg = RoundingConfig(RoundingMode.NEAREST_BINARY, 4)
        assert naive_encode(MU85, Fraction(0), 12, cfg) == encode(MU85, Fraction(0), 12)

    def test_fine_grid_agrees_early(self):
        cfg = RoundingConfig(RoundingMode.NEAREST_BINARY, 60)
        assert naive_encode(MU8150, Fraction(1, 2), 15, cfg)[:10] == encode(MU8150, Fraction(1, 2), 10)


class TestValidEncode:
    def test_zero(self):
        eps = EpsilonConfig.create(MU85, Fraction(1, 32))
        code, _ = valid_encode(MU85, Fraction(0), 20, eps)
        assert code == "0" * 20

    def test_example(self):
        x, e = Fraction(1, 5), Fraction(1, 32)
        code, report = valid_encode(MU85, x, 30, EpsilonConfig.create(MU85, e))
        assert is_member(MU85, code)[0]
        assert sandwiched(MU85, x, e, code)
        assert report.kappa == 23 and report.forced_bits == 0
        assert report.max_level <= 2 * report.kappa
        assert report.table_levels >= 2 * report.kappa

    def test_short_code_is_phase_one(self):
        x, e = Fraction(3, 7), Fraction(1, 32)
        eps = EpsilonConfig.create(MU85, e)
        code, _ = valid_encode(MU85, x, 10, eps)
        z = round_fixed(x, RoundingConfig(RoundingMode.NEAREST_BINARY, eps.kappa))
        assert len(code) == 10 and sandwiched(MU85, x, e, code)
        # rounded start is within 2**-kappa of x, far inside every cell here
        assert code == encode(MU85, z, 10)

    def test_digit_stream(self):
        bits = "0011" * 30
        eps = EpsilonConfig.create(MU85, Fraction(1, 64))
        stream = DigitStream.from_bits(bits)
        code, report = valid_encode(MU85, stream, 64, eps)
        assert report.digits_read == eps.kappa + 1
        x = DigitStream.from_bits(bits).prefix(len(bits))
        assert sandwiched(MU85, x, Fraction(1, 64), code)

    def test_domain(self):
        with pytest.raises(DomainError):
            valid_encode(MU85, Fraction(1), 4, EpsilonConfig.create(MU85, Fraction(1, 32)))

    @given(slopes, dyadic_points(), eps_values, st.integers(1, 80))
    def test_contract(self, p, x, e, n):
        table = shared_table(p)
        code, report = valid_encode(p, x, n, EpsilonConfig.create(p, e), table)
        assert len(code) == n
        assert is_member(p, code, table)[0]
        assert segment_of(p, code) is not None
        assert sandwiched(p, x, e, code)
        assert report.forced_bits == 0


@given(slopes, dyadic_points(12), eps_values)
def test_phase_one_keeps_order(p, x, e):
    """While the lower boundary and the rounded orbit share a code, they stay
    at least eps/2 apart (and likewise for the upper boundary)."""
    kappa = EpsilonConfig.create(p, e).kappa
    cfg = RoundingConfig(RoundingMode.NEAREST_BINARY, kappa)
    z = round_fixed(x, cfg)
    zs = [z]
    for _ in range(kappa):
        z = round_fixed(tent_iterate(p, z, 1), cfg)
        zs.append(z)
    for side in (x - e, x + e):
        if not 0 <= side < 1:
            continue
        for i in range(kappa + 1):
            if encode(p, side, i + 1) != _rounded_code(p, zs, i + 1):
                break
            assert abs(tent_iterate(p, side, i) - zs[i]) >= e / 2


def _rounded_code(p, zs, n):
    from tentcode.encoder import next_bit

    b, bits = 0, []
    for z in zs[:n]:
        b = next_bit(b, z)
        bits.append(str(b))
    return "".join(bits)


class TestDecide:
    def test_center_code_accepted(self):
        eps = EpsilonConfig.create(MU85, Fraction(1, 32))
        for x in (Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(31, 32)):
            verdict, _ = decide(MU85, encode(MU85, x, 40), x, eps)
            assert verdict is Decision.ACCEPT and verdict

    def test_invalid_code_rejected(self):
        code = "100011011011010"
        for x in (Fraction(1, 2), Fraction(1, 3), Fraction(9, 10)):
            for e in (Fraction(1, 32), Fraction(1, 5)):
                verdict, _ = decide(MU8150, code, x, EpsilonConfig.create(MU8150, e))
                assert not verdict

    def test_far_code_rejected(self):
        x, e, n = Fraction(1, 5), Fraction(1, 32), 20
        far = encode(MU85, x + 3 * e, n)
        assert lex_compare(far, encode(MU85, x + 2 * e, n)) is Order.GT
        verdict, _ = decide(MU85, far, x, EpsilonConfig.create(MU85, e))
        assert verdict is Decision.REJECT

    def test_report(self):
        eps = EpsilonConfig.create(MU85, Fraction(1, 32))
        verdict, report = decide(MU85, "100100", Fraction(1, 2), eps)
        assert verdict and report.max_level == 6 and report.steps == 6

    def test_digit_stream_reads_bounded_prefix(self):
        eps = EpsilonConfig.create(MU85, Fraction(1, 32))
        stream = DigitStream.from_bits("1" + "0" * 200)
        verdict, report = decide(MU85, encode(MU85, Fraction(1, 2), 30), stream, eps)
        assert verdict and report.digits_read == eps.kappa + 2

    def test_level_grows_by_at_most_one(self):
        table = shared_table(MU8150)
        eps = EpsilonConfig.create(MU8150, Fraction(1, 64))
        x = Fraction(2, 7)
        code = encode(MU8150, x, 300)
        s = MachineState(0, 0)
        top = 0
        for ch in code:
            s = table.advance(s, int(ch))
            assert s.l <= top + 1
            top = max(top, s.l)
        verdict, report = decide(MU8150, code, x, eps, table)
        assert verdict and report.max_level == top

    @pytest.mark.parametrize("p", [MU85, MU8150, TentParams(3, 2), TentParams(7, 4)])
    @pytest.mark.parametrize("e", [Fraction(1, 32), Fraction(1, 9)])
    def test_exhaustive_small(self, p, e):
        n = 7
        cells = enumerate_language(p, n)
        eps = EpsilonConfig.create(p, e)
        table = AutomatonTable(p)
        for k in range(0, 16):
            x = Fraction(2 * k + 1, 32)
            inner = codes_near(cells, x, e)
            outer = codes_near(cells, x, 2 * e)
            for bits in product("01", repeat=n):
                code = "".join(bits)
                verdict, _ = decide(p, code, x, eps, table)
                if code in inner:
                    assert verdict, (code, x)
                if code not in outer:
                    assert not verdict, (code, x)

    @given(slopes, dyadic_points(), eps_values, st.data())
    def test_sound_on_perturbed_points(self, p, x, e, data):
        y = data.draw(dyadic_points(14))
        assume(abs(y - x) <= e)
        code = encode(p, y, 40)
        verdict, _ = decide(p, code, x, EpsilonConfig.create(p, e), shared_table(p))
        assert verdict

    @given(slopes, dyadic_points(), eps_values, st.data())
    def test_rejects_far_points(self, p, x, e, data):
        n = 12
        y = data.draw(dyadic_points(14))
        cells = {c.code: c for c in enumerate_language(p, n)}
        code = encode(p, y, n)
        cell = cells[code]
        # the whole cell must miss [x - 2e, x + 2e]
        assume(cell.hi <= x - 2 * e or cell.lo > x + 2 * e)
        verdict, _ = decide(p, code, x, EpsilonConfig.create(p, e), shared_table(p))
        assert not verdict


def test_decision_state_case():
    assert DecisionState(z_lo=Fraction(0), z_hi=Fraction(1, 2)).case == 1
    assert DecisionState(z_hi=Fraction(1, 2)).case == 2
    assert DecisionState(z_lo=Fraction(0)).case == 3
    assert DecisionState().case == 0
