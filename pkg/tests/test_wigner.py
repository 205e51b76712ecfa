import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpmhd.errors import DomainError
from lpmhd.quantization import wigner3j
from lpmhd.quantization.wigner import wigner3j_twice
from oracles import wigner3j_exact, wigner3j_oracle

half = Fraction(1, 2)


def test_known_value():
    assert wigner3j(1, 1, 0, 1, -1, 0) == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert wigner3j(1, 1, 0, 1, -1, 0) == pytest.approx(wigner3j_oracle(1, 1, 0, 1, -1, 0), abs=1e-15)


def test_selection_rules_give_exact_zero():
    assert wigner3j(1, 1, 1, 1, 1, 0) == 0.0
    # triangle violated
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0


def test_half_integer_value_matches_oracle():
    got = wigner3j(half, 1, half, -half, 0, half)
    assert got == pytest.approx(wigner3j_oracle(half, 1, half, -half, 0, half), abs=1e-15)
    # floats that are exact half-integers are accepted too
    assert wigner3j(0.5, 1, 0.5, -0.5, 0, 0.5) == got


@pytest.mark.parametrize("args", [
    (half, 1, half, 0, 0, 0),      # j - m not an integer
    (1, 1, 1, half, -half, 0),
    (0.3, 1, 1, 0, 0, 0),          # not a half-integer
    (-1, 1, 1, 0, 0, 0),           # negative j
    (1, 1, 1, 2, -2, 0),           # |m| > j
])
def test_invalid_arguments_raise(args):
    with pytest.raises(DomainError):
        wigner3j(*args)


@pytest.mark.parametrize("tj1,tj2", [(1, 1), (2, 3), (5, 4), (7, 7), (20, 12)])
def test_orthogonality_sum(tj1, tj2):
    # sum_{m1, m2} (2 j3 + 1) 3j^2 = 1 for every allowed j3, m3
    for tj3 in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
        for tm3 in range(-tj3, tj3 + 1, 2):
            total = 0.0
            for tm1 in range(-tj1, tj1 + 1, 2):
                tm2 = -tm1 - tm3
                if abs(tm2) <= tj2:
                    total += wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) ** 2
            assert (tj3 + 1) * total == pytest.approx(1.0, abs=1e-12)


def test_large_j_against_exact_oracle():
    # the regime of the N = 64 basis, where naive float sums lose digits
    s = Fraction(63, 2)
    worst = 0.0
    for l in (5, 31, 47, 63):
        for m in (0, 3, l // 2, l):
            for i in (0, 7, 20, 40):
                m1 = s - i
                m2 = m1 - m
                if abs(m2) > s:
                    continue
                sign, sq = wigner3j_exact(s, l, s, -m1, m, m2)
                ref = sign * math.sqrt(sq)
                got = wigner3j(s, l, s, -m1, m, m2)
                worst = max(worst, abs(got - ref))
    assert worst < 1e-15


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 16), st.integers(0, 16), st.data())
def test_random_symbols_match_oracle(tj1, tj2, data):
    tj3 = data.draw(st.sampled_from(range(abs(tj1 - tj2), tj1 + tj2 + 1, 2)))
    tm1 = data.draw(st.sampled_from(range(-tj1, tj1 + 1, 2)))
    tm2 = data.draw(st.sampled_from(range(-tj2, tj2 + 1, 2)))
    tm3 = -tm1 - tm2
    args = [Fraction(x, 2) for x in (tj1, tj2, tj3, tm1, tm2, tm3)]
    if abs(tm3) > tj3:
        assert wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) == 0.0
        return
    assert wigner3j(*args) == pytest.approx(wigner3j_oracle(*args), abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10), st.data())
def test_column_permutation_symmetry(tj1, tj2, data):
    tj3 = data.draw(st.sampled_from(range(abs(tj1 - tj2), tj1 + tj2 + 1, 2)))
    tm1 = data.draw(st.sampled_from(range(-tj1, tj1 + 1, 2)))
    tm2 = data.draw(st.sampled_from(range(-tj2, tj2 + 1, 2)))
    tm3 = -tm1 - tm2
    if abs(tm3) > tj3:
        return
    a = wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3)
    # odd permutation picks up (-1)^(j1 + j2 + j3)
    b = wigner3j_twice(tj2, tj1, tj3, tm2, tm1, tm3)
    sign = -1 if ((tj1 + tj2 + tj3) // 2) % 2 else 1
    assert b == pytest.approx(sign * a, abs=1e-15)
    # flipping all m picks up the same sign
    c = wigner3j_twice(tj1, tj2, tj3, -tm1, -tm2, -tm3)
    assert c == pytest.approx(sign * a, abs=1e-15)


def test_sympy_cross_check():
    sympy_wigner = pytest.importorskip("sympy.physics.wigner")
    for args in [(3, 2, 4, 1, -2, 1), (half * 7, half * 5, 2, half, -half * 3, 1),
                 (10, 10, 10, 0, 0, 0)]:
        ref = float(sympy_wigner.wigner_3j(*args))
        assert wigner3j(*args) == pytest.approx(ref, abs=1e-15)
    assert np.isfinite(wigner3j(30, 30, 30, 0, 0, 0))
