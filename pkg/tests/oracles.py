"""Slow reference computations used as test oracles.

Nothing here imports the package under test.
"""
from decimal import Decimal, localcontext
from fractions import Fraction
from math import comb

_PI = Decimal("3.14159265358979323846264338327950288419716939937510582097494459")


def normal_cdf_decimal(x, digits=50):
    """Phi(x) from the all-positive-term series

        erf(t) = 2/sqrt(pi) * exp(-t^2) * sum_n (2 t^2)^n t / (1*3*...*(2n+1)),

    evaluated in ``digits``-digit decimal arithmetic.  Every term is positive,
    so no cancellation occurs inside the sum.
    """
    with localcontext() as ctx:
        ctx.prec = digits
        t = abs(Decimal(x)) / Decimal(2).sqrt()
        two_t2 = 2 * t * t
        term = t
        total = term
        n = 0
        eps = Decimal(10) ** (-digits)
        while term > eps * total:
            n += 1
            term = term * two_t2 / (2 * n + 1)
            total += term
        erf = 2 / _PI.sqrt() * (-t * t).exp() * total
        half = Decimal(1) / 2
        result = half + erf / 2 if x >= 0 else half - erf / 2
        return float(result)


def normal_pdf_decimal(x, digits=40):
    with localcontext() as ctx:
        ctx.prec = digits
        x = Decimal(x)
        return float((-(x * x) / 2).exp() / (2 * _PI).sqrt())


def binomial_tail_exact(n, k, p0):
    """P(X >= k) by exact rational summation; ``p0`` is taken as a Fraction."""
    p = Fraction(p0)
    q = 1 - p
    return float(sum(comb(n, j) * p**j * q ** (n - j) for j in range(k, n + 1)))


def normal_quantile_bisect(p, lo=-40.0, hi=40.0):
    """Quantile by bisection on the decimal CDF oracle (slow, ~60 oracle calls)."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if normal_cdf_decimal(mid, digits=30) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
