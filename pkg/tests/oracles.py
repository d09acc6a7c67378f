"""Independent reference computations for the tests.

These deliberately avoid the library's code paths: plain loops in
extended precision (mpmath) or exact rationals, written from the textbook
definitions.
"""

from fractions import Fraction

import mpmath

mpmath.mp.dps = 50


def _mp(values):
    return [mpmath.mpf(float(v)) for v in values]


def entropy_bits(p):
    total = mpmath.mpf(0)
    for x in _mp(p):
        if x > 0:
            total -= x * mpmath.log(x, 2)
    return total


def effective_number(p):
    return mpmath.power(2, entropy_bits(p))


def inverse_simpson(p):
    s = mpmath.mpf(0)
    for x in _mp(p):
        s += x * x
    return 1 / s


def kl_bits(p, q):
    total = mpmath.mpf(0)
    for x, y in zip(_mp(p), _mp(q)):
        if x > 0:
            total += x * mpmath.log(x / y, 2)
    return total


def pedersen(p, q):
    return Fraction(1, 2) * sum(abs(Fraction(float(a)) - Fraction(float(b))) for a, b in zip(p, q))


def ols_slope(y):
    """Least-squares slope of y against 0..n-1, exact rational arithmetic."""
    n = len(y)
    xs = [Fraction(i) for i in range(n)]
    ys = [Fraction(float(v)) for v in y]
    mx, my = sum(xs) / n, sum(ys) / n
    num = sum((x - mx) * (v - my) for x, v in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return float(num / den)


def average_ranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for m in range(i, j + 1):
            ranks[order[m]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(a, b):
    ra, rb = average_ranks(a), average_ranks(b)
    n = len(a)
    ma, mb = sum(ra) / n, sum(rb) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(ra, rb))
    va = sum((x - ma) ** 2 for x in ra)
    vb = sum((y - mb) ** 2 for y in rb)
    return cov / (va * vb) ** 0.5
