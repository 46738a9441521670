"""Closed-form soliton families with exact evaluators.

Three constructions are provided, all in coordinates where the associated
holomorphic field is linear (Z = sum h_i z^i d/dz^i) and normalized so the
soliton function vanishes at the origin:

* a one-variable rotationally symmetric metric 2|dw|^2/(c + h|w|^2),
* finite products of those, block diagonal per axis,
* the U(n)-invariant family on C^n whose radial profile solves a singular
  ODE; its inverse function b(r) is obtained by Newton inversion of a
  stably evaluated special function, and every derived quantity (a, a',
  b', b'') is expressed through two cancellation-free helper series so no
  formula divides by r.

Families expose exact potential, metric, soliton function, Ricci, scalar
curvature and vector-field evaluators, batched over points, plus exact
log-radial graph samples for the Lagrangian-form checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import spence

from .ckgeom import as_points
from .errors import InvalidParam, NonConvergent, OutOfDomain
from .toric import RhoGraph

NEWTON_TOL = 1e-14
NEWTON_MAX_ITERS = 50


class Domain:
    """Vectorized membership test for a family's region of definition."""

    def __init__(self, dim, predicate=None, description="all of C^n"):
        self.dim = dim
        self._predicate = predicate
        self.description = description

    def contains(self, z):
        pts = np.asarray(z, dtype=np.complex128)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if self._predicate is None:
            return np.ones(pts.shape[0], dtype=bool)
        return np.asarray(self._predicate(pts), dtype=bool)

    def __repr__(self):
        return f"Domain({self.dim}, {self.description!r})"


@dataclass(frozen=True)
class PotentialField:
    """Real scalar potential on a region of C^n; evaluator is batched."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    domain: Domain

    def __call__(self, z):
        pts, single = as_points(z, self.dim)
        vals = np.asarray(self.eval(pts), dtype=np.float64).reshape(pts.shape[0])
        return vals[0] if single else vals


@dataclass(frozen=True)
class AnalyticFamily:
    """A closed-form soliton with exact batched evaluators.

    `special` is true when -log det g equals the soliton function on the
    nose; otherwise the two differ by `gauge_constant` (a by-product of
    allowing metric normalizations with det g(0) != 1).
    """

    name: str
    dim: int
    params: dict
    Z_eigen: np.ndarray
    soliton_h: float
    gauge_constant: float
    special: bool
    domain: Domain
    potential: PotentialField
    metric_fn: Callable = field(repr=False)
    f_fn: Callable = field(repr=False)
    ricci_fn: Callable = field(repr=False)
    scalar_fn: Callable = field(repr=False)
    grad_sq_fn: Callable = field(repr=False)
    rho_fn: Optional[Callable] = field(repr=False, default=None)

    def _pts(self, z):
        pts, single = as_points(z, self.dim)
        inside = self.domain.contains(pts)
        if not np.all(inside):
            raise OutOfDomain(
                f"{int(np.sum(~inside))} point(s) outside the {self.name} domain "
                f"({self.domain.description})"
            )
        return pts, single

    def metric(self, z):
        pts, single = self._pts(z)
        out = self.metric_fn(pts)
        return out[0] if single else out

    def f(self, z):
        pts, single = self._pts(z)
        out = self.f_fn(pts)
        return float(out[0]) if single else out

    def ricci(self, z):
        pts, single = self._pts(z)
        out = self.ricci_fn(pts)
        return out[0] if single else out

    def scalar(self, z):
        pts, single = self._pts(z)
        out = self.scalar_fn(pts)
        return float(out[0]) if single else out

    def Z(self, z):
        pts, single = self._pts(z)
        out = self.Z_eigen[None, :] * pts
        return out[0] if single else out

    def grad_f_sq(self, z):
        """|grad f|^2 = g_{l kbar} Z^l conj(Z^k), evaluated in closed form."""
        pts, single = self._pts(z)
        out = self.grad_sq_fn(pts)
        return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# product-of-axes families
# ---------------------------------------------------------------------------


def _axis_potential(c, h, r):
    """Potential u with (r u')' = 2/(c + h r), u(0) = 0, on one axis."""
    if h == 0.0:
        return 2.0 * r / c
    # integral of log(1 + (h/c)s)/s, a dilogarithm
    return -(2.0 / h) * spence(1.0 + (h / c) * r)


def make_product(c, h):
    """Block-diagonal product of one-variable families, one (c_k, h_k) each."""
    c = np.atleast_1d(np.asarray(c, dtype=np.float64))
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    if c.ndim != 1 or h.shape != c.shape or len(c) < 1:
        raise InvalidParam("c and h must be equal-length nonempty vectors")
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(h))):
        raise InvalidParam("parameters must be finite")
    if np.any(c <= 0.0):
        raise InvalidParam(f"all c_k must be positive, got {c.tolist()}")
    n = len(c)

    def radii(pts):
        return np.abs(pts) ** 2

    def denoms(pts):
        return c[None, :] + h[None, :] * radii(pts)

    def predicate(pts):
        return np.all(denoms(pts) > 0.0, axis=1)

    if np.all(h >= 0.0):
        domain = Domain(n, None, "all of C^n")
    else:
        domain = Domain(n, predicate, "c_k + h_k |z^k|^2 > 0 on every axis")

    def metric_fn(pts):
        d = denoms(pts)
        g = np.zeros(pts.shape + (n,), dtype=np.complex128)
        idx = np.arange(n)
        g[:, idx, idx] = 2.0 / d
        return g

    def f_fn(pts):
        return np.sum(np.log1p(h[None, :] * radii(pts) / c[None, :]), axis=1)

    def ricci_fn(pts):
        d = denoms(pts)
        ric = np.zeros(pts.shape + (n,), dtype=np.complex128)
        idx = np.arange(n)
        ric[:, idx, idx] = 2.0 * c[None, :] * h[None, :] / d**2
        return ric

    def scalar_fn(pts):
        return np.sum(2.0 * c[None, :] * h[None, :] / denoms(pts), axis=1)

    def grad_sq_fn(pts):
        r = radii(pts)
        return np.sum((2.0 / denoms(pts)) * h[None, :] ** 2 * r, axis=1)

    def phi_fn(pts):
        r = radii(pts)
        out = np.zeros(pts.shape[0])
        for k in range(n):
            out += _axis_potential(c[k], h[k], r[:, k])
        return out

    def rho_fn(rho):
        r = np.exp(rho)
        d = c[None, :] + h[None, :] * r
        if np.any(d <= 0.0):
            raise OutOfDomain("log-radial sample outside the family domain")
        u = np.zeros(len(rho))
        grad = np.empty_like(rho)
        for k in range(n):
            u += _axis_potential(c[k], h[k], r[:, k])
            if h[k] == 0.0:
                grad[:, k] = 2.0 * r[:, k] / c[k]
            else:
                grad[:, k] = (2.0 / h[k]) * np.log1p(h[k] * r[:, k] / c[k])
        hess = np.zeros((len(rho), n, n))
        idx = np.arange(n)
        hess[:, idx, idx] = 2.0 * r / d
        return u, grad, hess

    name = "cigar" if n == 1 else "product"
    gauge = float(np.sum(np.log(2.0 / c)))
    return AnalyticFamily(
        name=name,
        dim=n,
        params={"c": c.tolist(), "h": h.tolist()},
        Z_eigen=h.copy(),
        soliton_h=float(np.sum(h)),
        gauge_constant=gauge,
        special=bool(gauge == 0.0),
        domain=domain,
        potential=PotentialField(n, phi_fn, domain),
        metric_fn=metric_fn,
        f_fn=f_fn,
        ricci_fn=ricci_fn,
        scalar_fn=scalar_fn,
        grad_sq_fn=grad_sq_fn,
        rho_fn=rho_fn,
    )


def make_cigar(c, h):
    """One-variable family with metric 2|dw|^2/(c + h|w|^2)."""
    fam = make_product([c], [h])
    return AnalyticFamily(
        **{
            **fam.__dict__,
            "name": "cigar",
            "params": {"c": float(c), "h": float(h)},
        }
    )


def cigar_flow_pullback(c, h, t, w):
    """Both sides of the self-similarity identity for the 1-D family.

    `evolved` is the time-t metric coefficient 2/(e^{2ht} c + h|w|^2);
    `pulled_back` transports the initial metric along w -> e^{-ht} w.  The
    two agree identically; computing them separately exercises the identity.
    """
    if c <= 0.0:
        raise InvalidParam(f"c must be positive, got {c}")
    w = np.asarray(w, dtype=np.complex128)
    r = np.abs(w) ** 2
    denom = math.exp(2.0 * h * t) * c + h * r
    if np.any(denom <= 0.0):
        raise OutOfDomain("evolved point leaves the region c + h|w|^2 > 0")
    evolved = 2.0 / denom
    shrink = math.exp(-h * t)
    pulled = shrink**2 * 2.0 / (c + h * shrink**2 * r)
    return {"evolved": evolved, "pulled_back": pulled}


# ---------------------------------------------------------------------------
# the U(n)-invariant family and its radial profile
# ---------------------------------------------------------------------------


def _w_pair(n, b):
    """W(b) = n b^{-n} int_0^b s^{n-1} e^s ds and its derivative W'(b).

    W is entire, positive, W(0) = 1; everything about the radial profile is
    a smooth expression in (b, W, W'), which is what makes the evaluators
    below free of 0/0 branches.  A power series handles |b| < 1/2 where the
    closed form cancels catastrophically.
    """
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    w = np.empty_like(b)
    wp = np.empty_like(b)
    small = np.abs(b) < 0.5
    if np.any(small):
        bs = b[small]
        prev = np.ones_like(bs)  # b^{m-1} / (m-1)!
        ws = np.ones_like(bs)  # m = 0 term of W is 1
        wps = np.zeros_like(bs)
        for m in range(1, 40):
            term = prev * bs / m
            ws += n * term / (n + m)
            wps += n * prev / (n + m)
            if np.all(np.abs(term) < 1e-20):
                break
            prev = term
        w[small] = ws
        wp[small] = wps
    if np.any(~small):
        bl = b[~small]
        kfac = np.ones_like(bl)
        ssum = np.ones_like(bl)
        for k in range(1, n):
            kfac = kfac * (-bl) / k
            ssum += kfac
        big_f = (-1.0) ** n * math.factorial(n - 1) * (1.0 - np.exp(bl) * ssum)
        wl = n * big_f / bl**n
        w[~small] = wl
        wp[~small] = n * (np.exp(bl) - wl) / bl
    return w, wp


def cao_F(n, b):
    """The profile quadrature F(b) and its signed n-th-root transform f(b).

    F(b) = int_0^b s^{n-1} e^s ds, evaluated through the W helper; f is the
    real n-th root of n F carrying the sign of b, which is strictly
    increasing and tends to -(n!)^{1/n} as b -> -infinity.
    """
    if n < 1 or n != int(n):
        raise InvalidParam(f"n must be a positive integer, got {n}")
    n = int(n)
    scalar = np.isscalar(b) or np.ndim(b) == 0
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    w, _ = _w_pair(n, b)
    big_f = w * b**n / n
    f = b * w ** (1.0 / n)
    if scalar:
        return {"F": float(big_f[0]), "f": float(f[0])}
    return {"F": big_f, "f": f}


def _f_and_deriv(n, b):
    w, _ = _w_pair(n, b)
    f = b * w ** (1.0 / n)
    fp = np.exp(b) * w ** (-(n - 1.0) / n)
    return f, fp


def _invert_profile(n, y):
    """Solve f(b) = y for b by Newton with a series seed, brentq fallback."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    seed_small = y - y**2 / (n + 1.0)
    seed_large = np.where(
        y > 0.0, n * np.log(np.maximum(np.abs(y), 1.5)), -1.0 - 3.0 * np.abs(y)
    )
    b = np.where(np.abs(y) < 1.0, seed_small, seed_large)
    active = np.ones(b.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITERS):
        f, fp = _f_and_deriv(n, b[active])
        resid = f - y[active]
        done = np.abs(resid) <= NEWTON_TOL * np.maximum(1.0, np.abs(y[active]))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            upd = b[active] - resid / fp
        # an underflowing derivative stalls the update; brentq rescues it below
        upd = np.where(np.isfinite(upd), upd, b[active])
        b[active] = np.where(done, b[active], upd)
        still = np.zeros_like(active)
        still[active] = ~done
        active = still
        if not np.any(active):
            break
    if np.any(active):
        for idx in np.nonzero(active)[0]:
            target = y[idx]

            def shifted(t):
                return _f_and_deriv(n, np.asarray([t]))[0][0] - target

            lo = -800.0 if target < 0.0 else 0.0
            hi = 0.0 if target < 0.0 else max(4.0, 4.0 * n * np.log(2.0 + abs(target)))
            try:
                b[idx] = brentq(shifted, lo, hi, xtol=1e-15, rtol=8.9e-16)
            except ValueError as exc:
                raise NonConvergent(f"profile inversion failed at y={target}") from exc
    return b


@dataclass(frozen=True)
class CaoProfile:
    """Radial profile of the U(n)-invariant family.

    b(r) inverts f(b) = (h/2) r; the metric coefficient is a = W(b)^{-1/n}
    with a(0) = 1, and b', b'', a' follow from W and W' alone.  For
    h_axis < 0 the profile only exists for r < r_max = -(2/h)(n!)^{1/n}.
    """

    n: int
    h_axis: float
    r_max: float

    def _radii(self, r):
        scalar = np.isscalar(r) or np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        if np.any(r < 0.0):
            raise InvalidParam("squared radius must be nonnegative")
        if np.any(r >= self.r_max):
            raise OutOfDomain(
                f"r = {float(np.max(r)):.6g} is outside the profile domain "
                f"r < {self.r_max:.6g} (h_axis = {self.h_axis})"
            )
        return r, scalar

    def _shape(self, out, scalar):
        return float(out[0]) if scalar else out

    def b(self, r):
        r, scalar = self._radii(r)
        return self._shape(_invert_profile(self.n, 0.5 * self.h_axis * r), scalar)

    def a(self, r):
        r, scalar = self._radii(r)
        b = _invert_profile(self.n, 0.5 * self.h_axis * r)
        w, _ = _w_pair(self.n, b)
        return self._shape(w ** (-1.0 / self.n), scalar)

    def b_prime(self, r):
        r, scalar = self._radii(r)
        b = _invert_profile(self.n, 0.5 * self.h_axis * r)
        w, _ = _w_pair(self.n, b)
        out = 0.5 * self.h_axis * w ** ((self.n - 1.0) / self.n) * np.exp(-b)
        return self._shape(out, scalar)

    def b_prime2(self, r):
        r, scalar = self._radii(r)
        b = _invert_profile(self.n, 0.5 * self.h_axis * r)
        w, wp = _w_pair(self.n, b)
        bp = 0.5 * self.h_axis * w ** ((self.n - 1.0) / self.n) * np.exp(-b)
        out = bp**2 * (((self.n - 1.0) / self.n) * wp / w - 1.0)
        return self._shape(out, scalar)

    def a_prime(self, r):
        r, scalar = self._radii(r)
        b = _invert_profile(self.n, 0.5 * self.h_axis * r)
        w, wp = _w_pair(self.n, b)
        bp = 0.5 * self.h_axis * w ** ((self.n - 1.0) / self.n) * np.exp(-b)
        out = -(1.0 / self.n) * w ** (-(self.n + 1.0) / self.n) * wp * bp
        return self._shape(out, scalar)

    def potential(self, r):
        """P(r) = int_0^r a, by two-panel Gauss-Legendre (a is analytic)."""
        r, scalar = self._radii(r)
        nodes, weights = _GL_RULE
        total = np.zeros_like(r)
        edges = [(np.zeros_like(r), 0.5 * r), (0.5 * r, r)]
        for lo, hi in edges:
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            samples = mid[:, None] + half[:, None] * nodes[None, :]
            avals = self.a(samples.reshape(-1)).reshape(samples.shape)
            total += half * (avals @ weights)
        return self._shape(total, scalar)

    def consistency_residual(self, r):
        """|(r a)' - (2/h) b'| with (r a)' = a + r a'; identically zero."""
        r, scalar = self._radii(r)
        out = np.abs(
            self.a(r) + r * self.a_prime(r) - (2.0 / self.h_axis) * self.b_prime(r)
        )
        return self._shape(out, scalar)


_GL_RULE = leggauss(64)


def _cao_args(n, h_axis):
    if n < 1 or n != int(n):
        raise InvalidParam(f"n must be a positive integer, got {n}")
    if not (np.isfinite(h_axis) and h_axis != 0.0):
        raise InvalidParam(f"h_axis must be finite and nonzero, got {h_axis}")
    n = int(n)
    h_axis = float(h_axis)
    if h_axis > 0.0:
        r_max = np.inf
    else:
        r_max = -(2.0 / h_axis) * math.factorial(n) ** (1.0 / n)
    return n, h_axis, r_max


def cao_profile(n, h_axis, r):
    """Profile values (a, b, b') at a single squared radius."""
    prof = CaoProfile(*_cao_args(n, h_axis))
    return {"a": prof.a(r), "b": prof.b(r), "b_prime": prof.b_prime(r)}


def make_cao(n, h_axis):
    """U(n)-invariant family g_{i jbar} = a(r) delta_ij + a'(r) zbar^i z^j."""
    n, h_axis, r_max = _cao_args(n, h_axis)
    profile = CaoProfile(n, h_axis, r_max)

    def radius(pts):
        return np.sum(np.abs(pts) ** 2, axis=1)

    if np.isinf(r_max):
        domain = Domain(n, None, "all of C^n")
    else:
        domain = Domain(
            n,
            lambda pts: radius(pts) < r_max,
            f"|z|^2 < {r_max:.6g}",
        )

    def metric_fn(pts):
        r = radius(pts)
        a = profile.a(r)
        ap = profile.a_prime(r)
        eye = np.eye(n)
        outer = np.conj(pts)[:, :, None] * pts[:, None, :]
        return a[:, None, None] * eye[None, :, :] + ap[:, None, None] * outer

    def f_fn(pts):
        return profile.b(radius(pts))

    def ricci_fn(pts):
        r = radius(pts)
        bp = profile.b_prime(r)
        bpp = profile.b_prime2(r)
        eye = np.eye(n)
        outer = np.conj(pts)[:, :, None] * pts[:, None, :]
        return 2.0 * (
            bp[:, None, None] * eye[None, :, :] + bpp[:, None, None] * outer
        )

    def scalar_fn(pts):
        g = metric_fn(pts)
        ric = ricci_fn(pts)
        return 2.0 * np.real(np.trace(np.linalg.solve(g, ric), axis1=-2, axis2=-1))

    def grad_sq_fn(pts):
        g = metric_fn(pts)
        zvec = h_axis * pts
        return np.real(np.einsum("mlk,ml,mk->m", g, zvec, np.conj(zvec)))

    def phi_fn(pts):
        return profile.potential(radius(pts))

    def rho_fn(rho):
        r = np.exp(rho)
        s = np.sum(r, axis=1)
        if np.any(s >= r_max):
            raise OutOfDomain("log-radial sample outside the profile domain")
        a = profile.a(s)
        ap = profile.a_prime(s)
        u = profile.potential(s)
        grad = r * a[:, None]
        hess = r[:, :, None] * r[:, None, :] * ap[:, None, None]
        idx = np.arange(n)
        hess[:, idx, idx] += r * a[:, None]
        return u, grad, hess

    return AnalyticFamily(
        name="cao",
        dim=n,
        params={"n": n, "h_axis": h_axis},
        Z_eigen=np.full(n, h_axis),
        soliton_h=n * h_axis,
        gauge_constant=0.0,
        special=True,
        domain=domain,
        potential=PotentialField(n, phi_fn, domain),
        metric_fn=metric_fn,
        f_fn=f_fn,
        ricci_fn=ricci_fn,
        scalar_fn=scalar_fn,
        grad_sq_fn=grad_sq_fn,
        rho_fn=rho_fn,
    )


def rho_graph(family, rho):
    """Exact log-radial graph samples (rho, u, grad, hess) for a family."""
    if family.rho_fn is None:
        raise InvalidParam(f"family {family.name} has no log-radial sampler")
    rho = np.atleast_2d(np.asarray(rho, dtype=np.float64))
    if rho.shape[1] != family.dim:
        raise InvalidParam(
            f"rho points need {family.dim} coordinates, got {rho.shape[1]}"
        )
    u, grad, hess = family.rho_fn(rho)
    return RhoGraph(rho=rho, u=u, u_grad=grad, u_hess=hess)
