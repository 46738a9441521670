"""Finite-difference complex calculus for Kähler metrics.

Derivatives in z and z-bar are assembled from real central differences: for
a field phi on C^n viewed as R^2n,

    d phi / dz^i          = (phi_{x_i} - i phi_{y_i}) / 2,
    d^2 phi / dz^i dzb^j  = (phi_{x_i x_j} + phi_{y_i y_j}
                             + i (phi_{x_i y_j} - phi_{y_i x_j})) / 4,

so one real gradient or Hessian sweep per point yields the complex objects.
Steps scale with the coordinate size; second-derivative stencils use the
square root of the base step, which balances truncation against roundoff in
the divided second difference.  Everything passes through a Richardson
table, and the default one-level table upgrades the order-2 central stencils
to order 4.

All entry points accept a single point (shape (n,) or a bare complex for
n = 1) or a batch (m, n); results carry the matching leading shape.  Field
evaluators must be vectorized over the batch axis, and every displaced
stencil point for one Richardson level is evaluated in a single call.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainTooSmall,
    InvalidParam,
    NonFinite,
    NotPositiveDefinite,
    ShapeMismatch,
    SingularMetric,
)

COND_LIMIT = 1.0e12
FD_STEP_ENV = "SOLITON_FD_STEP"


@dataclass(frozen=True)
class FDScheme:
    """Finite-difference controls.

    `rel_step` scales with max(1, |z_i|) per coordinate.  `order` 4 is the
    order-2 scheme with one extra Richardson level; `richardson_levels` adds
    further levels on top of either base order.
    """

    rel_step: float = 1e-5
    order: int = 2
    richardson_levels: int = 1

    def __post_init__(self):
        if not self.rel_step > 0.0:
            raise InvalidParam(f"rel_step must be positive, got {self.rel_step}")
        if self.order not in (2, 4):
            raise InvalidParam(f"order must be 2 or 4, got {self.order}")
        if self.richardson_levels < 0:
            raise InvalidParam("richardson_levels must be >= 0")

    @property
    def table_depth(self):
        return self.richardson_levels + (1 if self.order == 4 else 0)


def default_scheme():
    """Scheme with defaults; the SOLITON_FD_STEP variable overrides the step."""
    step = float(os.environ.get(FD_STEP_ENV, 1e-5))
    return FDScheme(rel_step=step)


@dataclass
class WirtingerDerivs:
    grad_z: np.ndarray
    grad_zbar: np.ndarray
    hess_mixed: np.ndarray


@dataclass
class VectorFieldSample:
    """Holomorphic-field sample Z = X - iY.

    X and Y are reported as the complex velocities of their flows:
    a curve following X satisfies dz/dt = Z/2, one following Y satisfies
    dz/dt = iZ/2 (so the rotational flow of 2Y is dz/dt = iZ).
    """

    Z: np.ndarray

    @property
    def X(self):
        return 0.5 * self.Z

    @property
    def Y(self):
        return 0.5j * self.Z


@dataclass
class RicciResult:
    G: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray


# ---------------------------------------------------------------------------
# points, fields, stencil plumbing
# ---------------------------------------------------------------------------


def as_points(z, dim=None):
    """Normalize to a (m, n) complex array plus a took-a-single-point flag."""
    pts = np.asarray(z, dtype=np.complex128)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
        single = True
    elif pts.ndim == 1:
        pts = pts.reshape(1, -1)
        single = True
    elif pts.ndim == 2:
        single = False
    else:
        raise ShapeMismatch(f"points must have at most 2 axes, got {pts.ndim}")
    if dim is not None and pts.shape[1] != dim:
        raise ShapeMismatch(f"expected {dim} coordinates, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise NonFinite("input point contains NaN or Inf")
    return pts, single


def _unbatch(x, single):
    return x[0] if single else x


def _resolve_field(field):
    fn = getattr(field, "eval", None)
    if fn is None:
        fn = field
    return fn, getattr(field, "domain", None)


def _eval_field(fn, domain, pts):
    if domain is not None:
        inside = np.asarray(domain.contains(pts), dtype=bool)
        if not np.all(inside):
            raise DomainTooSmall(
                "finite-difference stencil leaves the declared domain "
                f"({int(np.size(inside) - np.count_nonzero(inside))} points outside)"
            )
    vals = np.asarray(fn(pts))
    if vals.shape != (pts.shape[0],):
        vals = vals.reshape(pts.shape[0])
    if not np.all(np.isfinite(vals)):
        raise NonFinite("field evaluation returned NaN or Inf")
    return vals


def _eval_stack(fn, domain, stacks):
    """Evaluate the field on a (P, m, n) stack of points in one call."""
    p, m, n = stacks.shape
    vals = _eval_field(fn, domain, stacks.reshape(p * m, n))
    return vals.reshape(p, m)


def _to_complex(w):
    n = w.shape[-1] // 2
    return w[..., :n] + 1j * w[..., n:]


def _richardson(tables):
    """Extrapolate a list of estimates at steps h, h/2, ... (error in h^2)."""
    rows = list(tables)
    for j in range(1, len(rows)):
        fac = 4.0**j
        for i in range(len(rows) - 1, j - 1, -1):
            rows[i] = (fac * rows[i] - rows[i - 1]) / (fac - 1.0)
    return rows[-1]


def _coordinate_scales(pts):
    scale = np.maximum(1.0, np.abs(pts))
    return np.concatenate([scale, scale], axis=1)


def _real_gradient(fn, domain, pts, steps):
    """Central first differences in all 2n real coordinates; (m, 2n)."""
    m, n = pts.shape
    w = np.concatenate([pts.real, pts.imag], axis=1)
    disp = []
    for a in range(2 * n):
        for sgn in (1.0, -1.0):
            wd = w.copy()
            wd[:, a] += sgn * steps[:, a]
            disp.append(wd)
    vals = _eval_stack(fn, domain, _to_complex(np.stack(disp)))
    grad = np.empty((m, 2 * n), dtype=vals.dtype)
    for a in range(2 * n):
        grad[:, a] = (vals[2 * a] - vals[2 * a + 1]) / (2.0 * steps[:, a])
    return grad


def _real_hessian(fn, domain, pts, steps):
    """Central second differences over all real coordinate pairs; (m, 2n, 2n)."""
    m, n = pts.shape
    twon = 2 * n
    w = np.concatenate([pts.real, pts.imag], axis=1)
    disp = [w]
    for a in range(twon):
        for sgn in (1.0, -1.0):
            wd = w.copy()
            wd[:, a] += sgn * steps[:, a]
            disp.append(wd)
    pairs = [(a, b) for a in range(twon) for b in range(a + 1, twon)]
    for a, b in pairs:
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                wd = w.copy()
                wd[:, a] += sa * steps[:, a]
                wd[:, b] += sb * steps[:, b]
                disp.append(wd)
    vals = _eval_stack(fn, domain, _to_complex(np.stack(disp)))
    center = vals[0]
    hess = np.empty((m, twon, twon), dtype=vals.dtype)
    for a in range(twon):
        plus, minus = vals[1 + 2 * a], vals[2 + 2 * a]
        hess[:, a, a] = (plus - 2.0 * center + minus) / steps[:, a] ** 2
    base = 1 + 2 * twon
    for k, (a, b) in enumerate(pairs):
        fpp, fpm, fmp, fmm = vals[base + 4 * k : base + 4 * k + 4]
        mixed = (fpp - fpm - fmp + fmm) / (4.0 * steps[:, a] * steps[:, b])
        hess[:, a, b] = mixed
        hess[:, b, a] = mixed
    return hess


def _mixed_from_real(hess, n):
    hxx = hess[:, :n, :n]
    hyy = hess[:, n:, n:]
    hxy = hess[:, :n, n:]
    hyx = hess[:, n:, :n]
    return 0.25 * (hxx + hyy + 1j * (hxy - hyx))


def hermitize(mats):
    """Average with the conjugate transpose; the result is exactly Hermitian."""
    return 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))


def _grad_tableau(fn, domain, pts, scheme):
    base = scheme.rel_step * _coordinate_scales(pts)
    tables = [
        _real_gradient(fn, domain, pts, base / 2.0**k)
        for k in range(scheme.table_depth + 1)
    ]
    return _richardson(tables)


def _hess_tableau(fn, domain, pts, scheme):
    base = math.sqrt(scheme.rel_step) * _coordinate_scales(pts)
    tables = [
        _real_hessian(fn, domain, pts, base / 2.0**k)
        for k in range(scheme.table_depth + 1)
    ]
    return _richardson(tables)


# ---------------------------------------------------------------------------
# public derivative operators
# ---------------------------------------------------------------------------


def wirtinger_derivs(field, z, scheme=None):
    """First z/z-bar derivatives and the mixed Hessian of a scalar field."""
    scheme = scheme or default_scheme()
    fn, domain = _resolve_field(field)
    pts, single = as_points(z)
    n = pts.shape[1]
    grad = _grad_tableau(fn, domain, pts, scheme)
    grad_z = 0.5 * (grad[:, :n] - 1j * grad[:, n:])
    grad_zbar = 0.5 * (grad[:, :n] + 1j * grad[:, n:])
    hess = hermitize(_mixed_from_real(_hess_tableau(fn, domain, pts, scheme), n))
    return WirtingerDerivs(
        grad_z=_unbatch(grad_z, single),
        grad_zbar=_unbatch(grad_zbar, single),
        hess_mixed=_unbatch(hess, single),
    )


def metric_from_potential(phi, z, scheme=None):
    """Hermitian-symmetrized mixed Hessian of a real potential.

    Warns (NotPositiveDefinite) when a sample has a nonpositive eigenvalue;
    positivity is advisory here because callers often probe boundaries.
    """
    scheme = scheme or default_scheme()
    fn, domain = _resolve_field(phi)
    pts, single = as_points(z)
    n = pts.shape[1]
    mats = hermitize(_mixed_from_real(_hess_tableau(fn, domain, pts, scheme), n))
    eigs = np.linalg.eigvalsh(mats)
    if np.any(eigs[..., 0] <= 0.0):
        warnings.warn(
            "metric sample is not positive definite "
            f"(min eigenvalue {float(np.min(eigs)):.3g})",
            NotPositiveDefinite,
            stacklevel=2,
        )
    return _unbatch(mats, single)


def _resolve_metric(g):
    fn = getattr(g, "metric", None)
    if fn is None:
        fn = g
    return fn, getattr(g, "domain", None)


def _eval_metric(fn, domain, pts):
    if domain is not None:
        inside = np.asarray(domain.contains(pts), dtype=bool)
        if not np.all(inside):
            raise DomainTooSmall("metric stencil leaves the declared domain")
    mats = np.asarray(fn(pts), dtype=np.complex128)
    m, n = pts.shape
    if mats.shape == (n, n) and m == 1:
        mats = mats.reshape(1, n, n)
    if mats.shape != (m, n, n):
        raise ShapeMismatch(f"metric evaluator returned shape {mats.shape}")
    if not np.all(np.isfinite(mats)):
        raise NonFinite("metric evaluation returned NaN or Inf")
    return hermitize(mats)


def _checked_eigs(mats):
    eigs = np.linalg.eigvalsh(mats)
    lo, hi = eigs[..., 0], eigs[..., -1]
    if np.any(lo <= 0.0):
        raise SingularMetric(
            f"metric has a nonpositive eigenvalue (min {float(np.min(lo)):.3g})"
        )
    cond = float(np.max(hi / lo))
    if cond > COND_LIMIT:
        raise SingularMetric(f"metric condition number {cond:.3g} exceeds {COND_LIMIT:.0e}")
    return eigs


def _logdet_field(fn, domain):
    def g_field(pts):
        mats = _eval_metric(fn, domain, pts)
        eigs = _checked_eigs(mats)
        return np.sum(np.log(eigs), axis=-1)

    return g_field


def ricci_from_metric(g, z, scheme=None):
    """Log-determinant potential, Ricci matrix and scalar curvature.

    The Ricci form of a Kähler metric is computed from the metric's
    log-determinant: ricci = -2 x (mixed Hessian of log det g), and
    scalar = 2 Re tr(g^{-1} ricci).
    """
    scheme = scheme or default_scheme()
    fn, domain = _resolve_metric(g)
    pts, single = as_points(z)
    n = pts.shape[1]
    g_field = _logdet_field(fn, domain)
    big_g = g_field(pts)
    ricci = -2.0 * hermitize(
        _mixed_from_real(_hess_tableau(g_field, domain, pts, scheme), n)
    )
    gm = _eval_metric(fn, domain, pts)
    _checked_eigs(gm)
    scalar = 2.0 * np.real(np.trace(np.linalg.solve(gm, ricci), axis1=-2, axis2=-1))
    return RicciResult(
        G=_unbatch(big_g, single),
        ricci=_unbatch(ricci, single),
        scalar=_unbatch(scalar, single),
    )


def associated_Z(g, z, scheme=None):
    """Holomorphic field of the metric: Z^l = 2 sum_j d(g^{l jbar})/dzb^j.

    The inverse-metric entries are differentiated in z-bar by central
    differences; for the families in this package the result is the linear
    field with the family's eigenvalues.
    """
    scheme = scheme or default_scheme()
    fn, domain = _resolve_metric(g)
    pts, single = as_points(z)
    m, n = pts.shape

    def upper_entries(p):
        mats = _eval_metric(fn, domain, p)
        _checked_eigs(mats)
        return np.conj(np.linalg.inv(mats))

    scale = np.maximum(1.0, np.abs(pts))
    tables = []
    for k in range(scheme.table_depth + 1):
        h = scheme.rel_step * scale / 2.0**k
        disp = []
        for j in range(n):
            for delta in (h[:, j], -h[:, j], 1j * h[:, j], -1j * h[:, j]):
                pd = pts.copy()
                pd[:, j] += delta
                disp.append(pd)
        stack = np.stack(disp)
        mats = upper_entries(stack.reshape(-1, n)).reshape(4 * n, m, n, n)
        zk = np.zeros((m, n), dtype=np.complex128)
        for j in range(n):
            dx = (mats[4 * j] - mats[4 * j + 1]) / (2.0 * h[:, j, None, None])
            dy = (mats[4 * j + 2] - mats[4 * j + 3]) / (2.0 * h[:, j, None, None])
            dzbar = 0.5 * (dx + 1j * dy)
            zk += 2.0 * dzbar[:, :, j]
        tables.append(zk)
    z_comp = _richardson(tables)
    return VectorFieldSample(Z=_unbatch(z_comp, single))


def soliton_constant(g, z, scheme=None):
    """Half of (scalar curvature + |grad f|^2); constant on a soliton.

    |grad f|^2 is the metric contraction g_{l kbar} Z^l conj(Z^k) of the
    associated holomorphic field.
    """
    scheme = scheme or default_scheme()
    fn, domain = _resolve_metric(g)
    pts, single = as_points(z)
    rr = ricci_from_metric(g, pts, scheme)
    zs = associated_Z(g, pts, scheme)
    gm = _eval_metric(fn, domain, pts)
    grad_sq = np.real(np.einsum("mlk,ml,mk->m", gm, zs.Z, np.conj(zs.Z)))
    return _unbatch(0.5 * (rr.scalar + grad_sq), single)


def ricci_potential_special(g, z):
    """-log det g, which equals the soliton function in the volume gauge.

    Requires the evaluator's coordinates to be in that gauge; family objects
    advertise this with their `special` flag.
    """
    if getattr(g, "special", True) is False:
        raise InvalidParam(
            "coordinates are not in the volume-normalized gauge; "
            "the log-determinant differs from the soliton function by the "
            "family's gauge constant"
        )
    fn, domain = _resolve_metric(g)
    pts, single = as_points(z)
    return _unbatch(-_logdet_field(fn, domain)(pts), single)


def laplacian(g, field, z, scheme=None):
    """Metric Laplacian 2 g^{i jbar} d^2/dz^i dzb^j applied to a scalar field."""
    scheme = scheme or default_scheme()
    gfn, gdomain = _resolve_metric(g)
    ffn, fdomain = _resolve_field(field)
    pts, single = as_points(z)
    n = pts.shape[1]
    hess = hermitize(_mixed_from_real(_hess_tableau(ffn, fdomain, pts, scheme), n))
    gm = _eval_metric(gfn, gdomain, pts)
    _checked_eigs(gm)
    upper = np.conj(np.linalg.inv(gm))
    return _unbatch(2.0 * np.real(np.einsum("mij,mij->m", upper, hess)), single)
