"""Wigner 3j symbols via the Racah single-sum formula.

The alternating sum is carried out exactly in integer arithmetic over a
common denominator and rounded once at the end, so the result is accurate
to about one ulp even at j ~ 60 where the terms cancel by ten or more
orders of magnitude. Arguments may be ints, floats or Fractions as long as
they are integers or half-integers.
"""

import math
from fractions import Fraction

from ..errors import DomainError

_FACT = [1]


def _factorial(n):
    while len(_FACT) <= n:
        _FACT.append(_FACT[-1] * len(_FACT))
    return _FACT[n]


def _twice(x, name):
    d = 2 * Fraction(x)
    if d.denominator != 1:
        raise DomainError(f"{name}={x} is not an integer or half-integer")
    return int(d)


def wigner3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3) as a float.

    Returns exactly 0.0 when m1 + m2 + m3 != 0 or the triangle condition
    fails. Raises :class:`DomainError` if some j_i - m_i is not an integer,
    a j is negative, or |m_i| > j_i.
    """
    tj = [_twice(j, f"j{k}") for k, j in enumerate((j1, j2, j3), 1)]
    tm = [_twice(m, f"m{k}") for k, m in enumerate((m1, m2, m3), 1)]
    for k in range(3):
        if tj[k] < 0:
            raise DomainError(f"j{k + 1} must be non-negative")
        if (tj[k] - tm[k]) % 2:
            raise DomainError(f"j{k + 1} - m{k + 1} must be an integer")
        if abs(tm[k]) > tj[k]:
            raise DomainError(f"|m{k + 1}| exceeds j{k + 1}")
    return wigner3j_twice(*tj, *tm)


def wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3):
    """Same as :func:`wigner3j` but with every argument doubled (all ints).

    No domain validation; intended for inner loops that already guarantee
    consistent parities.
    """
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if tj3 > tj1 + tj2 or tj3 < abs(tj1 - tj2) or (tj1 + tj2 + tj3) % 2:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0

    f = _factorial
    t1 = (tj2 - tm1 - tj3) // 2
    t2 = (tj1 + tm2 - tj3) // 2
    t3 = (tj1 + tj2 - tj3) // 2
    t4 = (tj1 - tm1) // 2
    t5 = (tj2 + tm2) // 2
    tmin = max(0, t1, t2)
    tmax = min(t3, t4, t5)

    # every term's denominator divides this product
    common = (f(tmax) * f(tmax - t1) * f(tmax - t2)
              * f(t3 - tmin) * f(t4 - tmin) * f(t5 - tmin))
    total = 0
    for t in range(tmin, tmax + 1):
        q = common // (f(t) * f(t - t1) * f(t - t2) * f(t3 - t) * f(t4 - t) * f(t5 - t))
        total += -q if t % 2 else q
    if total == 0:
        return 0.0

    num = (f((tj1 + tj2 - tj3) // 2) * f((tj1 - tj2 + tj3) // 2) * f((-tj1 + tj2 + tj3) // 2)
           * f((tj1 + tm1) // 2) * f((tj1 - tm1) // 2)
           * f((tj2 + tm2) // 2) * f((tj2 - tm2) // 2)
           * f((tj3 + tm3) // 2) * f((tj3 - tm3) // 2))
    den = f((tj1 + tj2 + tj3) // 2 + 1)
    value = math.sqrt(Fraction(total * total * num, common * common * den))
    negative = (total < 0) != bool(((tj1 - tj2 - tm3) // 2) % 2)
    return -value if negative else value
