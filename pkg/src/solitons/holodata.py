"""Exact arithmetic for diagonal holomorphic vector fields.

A linear field with positive rational weights h = (h_1, ..., h_n) drives
everything downstream: the torus flow z_i -> e^{h_i t} z_i, the integer
lattice of multiplicative relations among the weights, and the count of
monomial resonances k . h = h_i that controls how many deformation
parameters a local solution carries.  All computations here are exact over
the rationals; floats are admitted only when they already are rationals
with a small denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InvalidParam,
    IrrationalInput,
    NonPositiveEigenvalue,
)

FLOAT_DENOMINATOR_CAP = 10**6


def _to_fraction(value):
    """Coerce one eigenvalue to an exact Fraction.

    Strings and integers convert exactly.  A float is accepted only when its
    exact binary value already is a fraction with denominator at most 10^6;
    otherwise the caller almost certainly meant a decimal that the float
    cannot represent, and we refuse rather than guess.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise IrrationalInput(f"cannot interpret {value!r} as an eigenvalue")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise IrrationalInput(f"cannot parse eigenvalue {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        exact = Fraction(float(value))
        if exact.limit_denominator(FLOAT_DENOMINATOR_CAP) != exact:
            raise IrrationalInput(
                f"float {value!r} is not an exact small-denominator rational; "
                "pass a string or Fraction instead"
            )
        return exact
    raise IrrationalInput(f"cannot interpret {value!r} as an eigenvalue")


@dataclass(frozen=True)
class EigenData:
    """Ordered tuple of exact rational eigenvalues of a diagonal field."""

    h: tuple

    def __post_init__(self):
        if len(self.h) == 0:
            raise InvalidParam("need at least one eigenvalue")
        if not all(isinstance(x, Fraction) for x in self.h):
            raise InvalidParam("EigenData stores Fractions; use EigenData.parse")

    @classmethod
    def parse(cls, values):
        return cls(h=tuple(_to_fraction(v) for v in values))

    @property
    def n(self):
        return len(self.h)

    @property
    def real(self):
        return np.array([float(x) for x in self.h], dtype=np.float64)

    def require_positive(self):
        for x in self.h:
            if x <= 0:
                raise NonPositiveEigenvalue(f"eigenvalue {x} is not positive")


def _coerce_eigen(h):
    if isinstance(h, EigenData):
        return h
    return EigenData.parse(h)


def flow_Zh(h, t, z):
    """Time-t flow of the diagonal field: multiply z_i by e^{h_i t}."""
    ed = _coerce_eigen(h)
    z = np.asarray(z, dtype=np.complex128)
    if z.shape[-1] != ed.n:
        raise InvalidParam(
            f"points have {z.shape[-1]} coordinates for {ed.n} eigenvalues"
        )
    factors = np.exp(ed.real * complex(t))
    return factors * z


# ---------------------------------------------------------------------------
# lattice of multiplicative relations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeResult:
    """Basis of integer vectors k with k . h = 0."""

    basis: tuple
    rank: int
    q_rank: int


def _normalize_sign(vec):
    for x in vec:
        if x != 0:
            return vec if x > 0 else tuple(-y for y in vec)
    return vec


def lattice_basis(h):
    """Integer basis of the relation lattice {k : k . h = 0} of the weights.

    Clears denominators, then runs exact Euclidean column elimination on the
    identity matrix tagged with the integer weight of each column.  Columns
    whose weight reaches zero span the kernel; the elimination is unimodular,
    so they form a genuine lattice basis, not just a rational one.
    """
    ed = _coerce_eigen(h)
    n = ed.n
    scale = math.lcm(*(x.denominator for x in ed.h))
    weights = [int(x * scale) for x in ed.h]
    work = [[weights[i], [int(i == j) for j in range(n)]] for i in range(n)]
    while True:
        live = [col for col in work if col[0] != 0]
        if len(live) <= 1:
            break
        pivot = min(live, key=lambda col: abs(col[0]))
        for col in work:
            if col is pivot or col[0] == 0:
                continue
            q = col[0] // pivot[0]
            col[0] -= q * pivot[0]
            col[1] = [a - q * b for a, b in zip(col[1], pivot[1])]
    kernel = sorted(
        _normalize_sign(tuple(col[1])) for col in work if col[0] == 0
    )
    for vec in kernel:
        assert sum(k * x for k, x in zip(vec, ed.h)) == 0
    rank = len(kernel)
    return LatticeResult(basis=tuple(kernel), rank=rank, q_rank=n - rank)


# ---------------------------------------------------------------------------
# resonances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResonanceResult:
    """All pairs (i, k) with k in Z_{>=0}^n and k . h = h_i, plus the count."""

    pairs: tuple
    d_h: int


def _exponent_solutions(h, target):
    """All nonnegative integer k with k . h = target, by bounded search."""
    n = len(h)
    found = []

    def descend(j, remaining, prefix):
        if j == n:
            if remaining == 0:
                found.append(tuple(prefix))
            return
        bound = int(remaining / h[j])
        for k in range(bound + 1):
            descend(j + 1, remaining - k * h[j], prefix + (k,))

    descend(0, target, ())
    return found


def resonances(h):
    """Count the monomial resonances of a positive rational weight vector.

    Each solution of k . h = h_i gives an independent direction in which a
    local solution can be deformed, so d_h = #pairs is the parameter count.
    The identity vectors k = e_i always solve their own equation, hence
    d_h >= n, with equality exactly when the weights admit no extra relation.
    """
    ed = _coerce_eigen(h)
    ed.require_positive()
    pairs = []
    for i, target in enumerate(ed.h):
        for k in _exponent_solutions(ed.h, target):
            pairs.append((i, k))
    return ResonanceResult(pairs=tuple(pairs), d_h=len(pairs))
