from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np
import pytest

from solitons import families, toric


@pytest.fixture(scope="session")
def cigar21():
    return families.make_cigar(2.0, 1.0)


@pytest.fixture(scope="session")
def product_12():
    return families.make_product([2.0, 2.0], [1.0, 2.0])


@pytest.fixture(scope="session")
def cao21():
    return families.make_cao(2, 1.0)


def dilog_axis_coeffs(c, h, depth):
    """Exact expansion of the one-axis potential: u_k = 2 (-1)^(k+1) h^(k-1) / (k^2 c^k)."""
    return {
        k: Fraction(2) * (-1) ** (k + 1) * Fraction(h) ** (k - 1) / (Fraction(c) ** k * k * k)
        for k in range(1, depth + 1)
    }


def cao_a_coeffs(n, h, depth):
    """Exact radial metric coefficient a(s) = sum a_k s^k from the profile identity.

    a solves a^(n-1) (s a)' e^((h/2) s a) = 1 with a(0) = 1; matching the s^m
    coefficient gives a linear equation for a_m with coefficient n + m, so the
    whole expansion is a rational recursion independent of the library code.
    """
    h = Fraction(h)
    a = [Fraction(1)] + [Fraction(0)] * depth

    def mul(x, y):
        out = [Fraction(0)] * (depth + 1)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j in range(0, depth + 1 - i):
                if y[j] != 0:
                    out[i + j] += xi * y[j]
        return out

    for m in range(1, depth + 1):
        ring_deriv = [(k + 1) * a[k] for k in range(depth + 1)]
        power = [Fraction(1)] + [Fraction(0)] * depth
        for _ in range(n - 1):
            power = mul(power, a)
        sa = [Fraction(0)] + [(h / 2) * a[k] for k in range(depth)]
        expo = [Fraction(1)] + [Fraction(0)] * depth
        term = [Fraction(1)] + [Fraction(0)] * depth
        for k in range(1, depth + 1):
            term = [t / k for t in mul(term, sa)]
            expo = [e + t for e, t in zip(expo, term)]
        residual = mul(mul(power, ring_deriv), expo)
        a[m] = -residual[m] / (n + m)
    return a


def cao_potential_coeffs(n, h, depth):
    """Exact expansion of P(s) = int_0^s a: P_k = a_(k-1) / k."""
    a = cao_a_coeffs(n, h, depth - 1)
    return {k: a[k - 1] / k for k in range(1, depth + 1)}


def dilog_series(c, h, depth):
    coeffs = dilog_axis_coeffs(c, h, depth)
    return toric.TruncatedSeries.from_terms(
        1, depth, {(k,): float(v) for k, v in coeffs.items()}
    )


def product_series(c, h, depth):
    """Exact sum-of-axes expansion of the product potential, any dimension."""
    n = len(c)
    u = toric.TruncatedSeries.zero(n, depth)
    for axis in range(n):
        for k, v in dilog_axis_coeffs(c[axis], h[axis], depth).items():
            exp = tuple(k if j == axis else 0 for j in range(n))
            u.coeffs[u.ring.index[exp]] = float(v)
    return u


def cao_series(n, h, depth):
    """Exact expansion of P(r^1 + ... + r^n) over the full exponent simplex."""
    pot = cao_potential_coeffs(n, h, depth)
    u = toric.TruncatedSeries.zero(n, depth)
    for exp in u.ring.exponents:
        total = sum(exp)
        if total == 0:
            continue
        multi = 1
        rest = total
        for e in exp:
            multi *= comb(rest, e)
            rest -= e
        u.coeffs[u.ring.index[exp]] = float(pot[total] * multi)
    return u


def max_offdiag(mat):
    off = np.asarray(mat).copy()
    idx = np.arange(off.shape[-1])
    off[..., idx, idx] = 0.0
    return float(np.max(np.abs(off)))
