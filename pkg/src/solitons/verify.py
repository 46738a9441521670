"""Named numerical checks, each packaged as a structured report.

Every identity the library can test lives here as a `check_*` function that
samples a deterministic grid, measures deviations and returns a
VerificationReport (pass iff max deviation is within tolerance).  The grids
are golden-angle disk products: per axis, radii grow like sqrt(k) and the
angle advances by the golden angle, which fills a disk evenly with no two
points sharing a radius or ray.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ckgeom
from .errors import (
    ConstraintViolation,
    InvalidParam,
    NonPositiveEigenvalue,
    ShapeMismatch,
)
from .families import AnalyticFamily, rho_graph
from .toric import RhoGraph, TruncatedSeries

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def sunflower_disk(radius, count):
    """`count` complex points filling the disk of the given radius evenly."""
    k = np.arange(1, count + 1)
    rad = radius * np.sqrt((k - 0.5) / count)
    return rad * np.exp(1j * GOLDEN_ANGLE * k)


@dataclass(frozen=True)
class GridSpec:
    """Cartesian product of per-axis complex sample sets."""

    axes: tuple
    description: str

    @classmethod
    def disk(cls, dim, radius=3.0, per_axis=21):
        """Golden-angle disk samples on every axis; radius may be per-axis."""
        radii = np.broadcast_to(np.asarray(radius, dtype=np.float64), (dim,))
        axes = tuple(sunflower_disk(r, per_axis) for r in radii)
        desc = f"disk grid, {per_axis}^{dim} points, radii {np.round(radii, 3).tolist()}"
        return cls(axes=axes, description=desc)

    @classmethod
    def real_rays(cls, dim, rmax, count):
        """Real nonnegative samples per axis (used by the table generator)."""
        axes = tuple(
            np.linspace(0.0, rmax, count).astype(np.complex128) for _ in range(dim)
        )
        return cls(axes=axes, description=f"real rays, {count}^{dim} points, rmax {rmax}")

    @property
    def dim(self):
        return len(self.axes)

    def points(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        if len(pts) > 10**6:
            raise InvalidParam(f"grid has {len(pts)} points; the cap is 10^6")
        return pts


def default_grid(family, per_axis=None, margin=0.8, radius=3.0):
    """Disk grid shrunk to sit safely inside the family's domain."""
    n = family.dim
    if per_axis is None:
        per_axis = 441 if n == 1 else 21
    radii = np.full(n, float(radius))
    if family.name in ("cigar", "product"):
        c = np.atleast_1d(np.asarray(family.params["c"], dtype=np.float64))
        h = np.atleast_1d(np.asarray(family.params["h"], dtype=np.float64))
        neg = h < 0.0
        radii[neg] = np.minimum(radii[neg], margin * np.sqrt(c[neg] / -h[neg]))
    elif family.name == "cao":
        h = family.params["h_axis"]
        if h < 0.0:
            r_max = -(2.0 / h) * math.factorial(n) ** (1.0 / n)
            radii[:] = np.minimum(radii, margin * math.sqrt(r_max / n))
    return GridSpec.disk(n, radii, per_axis)


@dataclass
class VerificationReport:
    check_name: str
    grid: str
    max_dev: float
    mean_dev: float
    tolerance: float
    passed: bool
    details: list = field(default_factory=list)

    def to_dict(self):
        return {
            "check": self.check_name,
            "grid": self.grid,
            "max_dev": self.max_dev,
            "mean_dev": self.mean_dev,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "details": self.details,
        }


def _report(name, grid_desc, devs, tolerance, pts=None):
    devs = np.atleast_1d(np.asarray(devs, dtype=np.float64))
    max_dev = float(np.max(devs))
    mean_dev = float(np.mean(devs))
    details = []
    order = np.argsort(devs)[::-1][:10]
    for idx in order:
        entry = {"dev": float(devs[idx])}
        if pts is not None:
            z = np.atleast_2d(pts)[idx]
            entry["point"] = [[float(w.real), float(w.imag)] for w in z]
        details.append(entry)
    return VerificationReport(
        check_name=name,
        grid=grid_desc,
        max_dev=max_dev,
        mean_dev=mean_dev,
        tolerance=float(tolerance),
        passed=bool(max_dev <= tolerance),
        details=details,
    )


# ---------------------------------------------------------------------------
# pointwise identity checks
# ---------------------------------------------------------------------------


def check_conservation(family, grid=None, scheme=None, tolerance=1e-6):
    """Half of (scalar curvature + |grad f|^2) must equal the family constant."""
    grid = grid or default_grid(family)
    pts = grid.points()
    vals = ckgeom.soliton_constant(family, pts, scheme)
    devs = np.abs(vals - family.soliton_h)
    return _report("conservation", grid.description, devs, tolerance, pts)


def _residual_target(target):
    if isinstance(target, AnalyticFamily):
        phi = target.potential
        h = np.asarray(target.Z_eigen, dtype=np.float64)
        return phi, h, target
    series, h = target
    if not isinstance(series, TruncatedSeries):
        raise InvalidParam("expected an AnalyticFamily or a (series, h) pair")
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    if len(h) != series.nvars:
        raise ShapeMismatch(f"h has {len(h)} entries for a {series.nvars}-variable series")

    def phi(pts):
        return series.evaluate(np.abs(pts) ** 2)

    return phi, h, None


def check_soliton_residual(target, grid=None, scheme=None, tolerance=1e-7):
    """Monge-Ampere residual |det(hess) e^{f} - target| and the rotational-
    invariance residual |dphi(Y)|, both from finite differences on the
    potential.  The target is 1 in the volume-normalized gauge and
    e^{gauge_constant} otherwise.  Returns the two sub-reports as a pair."""
    phi, h, family = _residual_target(target)
    gauge = 0.0 if family is None else family.gauge_constant
    if grid is None:
        if family is not None:
            grid = default_grid(family)
        else:
            n = len(h)
            grid = GridSpec.disk(n, 0.45, 441 if n == 1 else 15)
    pts = grid.points()
    wd = ckgeom.wirtinger_derivs(phi, pts, scheme)
    det = np.real(np.linalg.det(wd.hess_mixed))
    drift = np.einsum("j,mj,mj->m", h, pts, wd.grad_z)
    ma_dev = np.abs(det * np.exp(0.5 * np.real(drift)) - math.exp(gauge))
    flow_dev = np.abs(np.imag(drift))
    return (
        _report("residual_ma", grid.description, ma_dev, tolerance, pts),
        _report("residual_flow", grid.description, flow_dev, tolerance, pts),
    )


def check_lie_derivative(family, grid=None, eps=1e-4, scheme=None, tolerance=1e-5,
                         eigen_override=None):
    """Ricci must equal the Lie derivative of the metric along Re Z.

    The flow of Re Z scales coordinates by e^{h_i t / 2}; the Lie derivative
    is taken as a symmetric difference quotient of the pulled-back metric.
    `eigen_override` substitutes wrong eigenvalues (negative-control hook).
    """
    grid = grid or default_grid(family)
    pts = grid.points()
    ric = ckgeom.ricci_from_metric(family, pts, scheme).ricci
    h = np.asarray(
        family.Z_eigen if eigen_override is None else eigen_override,
        dtype=np.float64,
    )

    def pullback(t):
        moved = np.exp(0.5 * h * t)[None, :] * pts
        weight = np.exp(0.5 * (h[:, None] + h[None, :]) * t)
        return weight[None, :, :] * family.metric(moved)

    lie = (pullback(eps) - pullback(-eps)) / (2.0 * eps)
    devs = np.max(np.abs(lie - ric), axis=(1, 2))
    return _report("lie_derivative", grid.description, devs, tolerance, pts)


# ---------------------------------------------------------------------------
# growth along rays
# ---------------------------------------------------------------------------


@dataclass
class GrowthReport:
    """Ray-growth samples of f against log |z|, plus the global verdict.

    `ratios` holds f(s d)/log s per direction (rows) and radius (columns);
    `mu_hat` extrapolates each row to its large-radius limit from the two
    largest radii.  The sandwich verdict is global: the smallest limit must
    sit at or below 2n and the largest at or above it, within tolerance.
    `lambda_hat` samples |grad f|^2 at the largest radius and `a2_hat`
    divides it by the largest eigenvalue (an asymptotic shape estimate);
    both are informational.
    """

    directions: np.ndarray
    radii: np.ndarray
    ratios: np.ndarray
    mu_hat: np.ndarray
    lambda_hat: np.ndarray
    a2_hat: np.ndarray
    sandwich: dict
    passed: bool

    def to_dict(self):
        return {
            "directions": [
                [[float(x.real), float(x.imag)] for x in d] for d in self.directions
            ],
            "radii": self.radii.tolist(),
            "ratios": self.ratios.tolist(),
            "mu_hat": self.mu_hat.tolist(),
            "lambda_hat": self.lambda_hat.tolist(),
            "a2_hat": self.a2_hat.tolist(),
            "sandwich": self.sandwich,
            "pass": self.passed,
        }


def check_growth(family, directions=None, radii=None, tol=0.1):
    """Ray growth of the soliton function against 2n = real dimension.

    Samples f along geometrically spaced radii in each unit direction
    (default: the coordinate axes plus the uniform diagonal) and
    extrapolates f/log|z|.  Anisotropic eigenvalues make single rays grow
    slower than 2n, so the verdict brackets 2n between the extreme
    directions rather than testing each ray alone.
    """
    h = np.asarray(family.Z_eigen, dtype=np.float64)
    if np.any(h <= 0.0):
        raise NonPositiveEigenvalue(
            "growth sampling needs all eigenvalues positive"
        )
    if radii is None:
        radii = np.geomspace(10.0, 1.0e6, 12)
    radii = np.asarray(radii, dtype=np.float64)
    if radii.ndim != 1 or len(radii) < 2 or np.any(np.diff(radii) <= 0.0):
        raise InvalidParam("radii must be strictly increasing with at least 2 entries")
    n = family.dim
    if directions is None:
        directions = [np.eye(n)[i] for i in range(n)]
        if n > 1:
            directions.append(np.ones(n) / math.sqrt(n))
    else:
        arr = np.asarray(directions, dtype=np.complex128)
        directions = [arr] if arr.ndim == 1 else list(arr)
    units = []
    for d in directions:
        d = np.asarray(d, dtype=np.complex128).reshape(-1)
        if len(d) != n:
            raise InvalidParam(f"directions need {n} coordinates")
        norm = math.sqrt(float(np.sum(np.abs(d) ** 2)))
        if norm == 0.0:
            raise InvalidParam("direction must be nonzero")
        units.append(d / norm)
    units = np.asarray(units)

    logs = np.log(radii)
    ratios = np.empty((len(units), len(radii)))
    mu = np.empty(len(units))
    lam = np.empty(len(units))
    for k, d in enumerate(units):
        pts = radii[:, None] * d[None, :]
        fvals = family.f(pts)
        ratios[k] = fvals / logs
        # two-point extrapolation against the 1/log falloff of f/log|z|
        mu[k] = (fvals[-1] - fvals[-2]) / (logs[-1] - logs[-2])
        lam[k] = family.grad_f_sq(pts[-1:])[0]
    two_n = 2 * n
    h_max = float(np.max(h))
    mu_min, mu_max = float(np.min(mu)), float(np.max(mu))
    sandwich = {
        "two_n": two_n,
        "mu_min": mu_min,
        "mu_max": mu_max,
        "min_at_most_2n": bool(mu_min <= two_n + tol),
        "max_at_least_2n": bool(mu_max >= two_n - tol),
        "tol": float(tol),
    }
    passed = sandwich["min_at_most_2n"] and sandwich["max_at_least_2n"]
    return GrowthReport(
        directions=units,
        radii=radii,
        ratios=ratios,
        mu_hat=mu,
        lambda_hat=lam,
        a2_hat=lam / h_max,
        sandwich=sandwich,
        passed=bool(passed),
    )


# ---------------------------------------------------------------------------
# periodic orbits of the rotational flow
# ---------------------------------------------------------------------------


def check_periodic_orbit(family, axis, z0=1.0, steps=10000, period_fraction=1.0,
                         scheme=None, tolerance=1e-6):
    """Integrate dz/dt = i Z(z) from an axis point and measure the return gap.

    Z is sampled numerically from the metric at every stage, so this chains
    the inverse-metric differentiation into the orbit prediction; after one
    full period 2 pi / h_axis the trajectory must close.
    """
    h_i = float(family.Z_eigen[axis])
    if h_i <= 0.0:
        raise NonPositiveEigenvalue(f"axis eigenvalue {h_i} is not positive")
    if z0 == 0:
        raise InvalidParam("the axis point must be nonzero")
    start = np.zeros(family.dim, dtype=np.complex128)
    start[axis] = z0
    total = 2.0 * math.pi / h_i * period_fraction
    dt = total / steps

    def vel(state):
        sample = ckgeom.associated_Z(family, state.reshape(1, -1), scheme)
        return 1j * sample.Z[0]

    z = start.copy()
    for _ in range(steps):
        k1 = vel(z)
        k2 = vel(z + 0.5 * dt * k1)
        k3 = vel(z + 0.5 * dt * k2)
        k4 = vel(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    err = float(np.sqrt(np.sum(np.abs(z - start) ** 2)))
    name = f"orbit_axis{axis + 1}"
    desc = (
        f"RK4, {steps} steps over {period_fraction} period(s) of axis {axis + 1}, "
        f"start |z| = {abs(z0)}"
    )
    return _report(name, desc, [err], tolerance, start.reshape(1, -1))


# ---------------------------------------------------------------------------
# log-radial (Lagrangian) form and its affine symmetries
# ---------------------------------------------------------------------------


def rho_residual(graph, h, tolerance=1e-9):
    """Relative residual of det(hess) e^{h.grad/2} = e^{sum rho} on a graph."""
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    if len(h) != graph.dim:
        raise ShapeMismatch(f"h has {len(h)} entries for a {graph.dim}-dim graph")
    lhs = np.linalg.det(graph.u_hess) * np.exp(0.5 * graph.u_grad @ h)
    rhs = np.exp(np.sum(graph.rho, axis=1))
    devs = np.abs(lhs - rhs) / rhs
    desc = f"{len(graph)} log-radial samples"
    pts = graph.rho.astype(np.complex128)
    return _report("rho_residual", desc, devs, tolerance, pts)


@dataclass(frozen=True)
class AffineSymmetry:
    """Affine change of the log-radial graph preserving the residual.

    With matrices acting as rho -> B rho + b, gradient -> A grad + a,
    u -> s u + a . (B rho) + c, the residual equation is preserved exactly
    when the four constraints checked in `validate` hold.
    """

    s: float
    A: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: float = 0.0

    @classmethod
    def canonical(cls, h, scale=math.log(2.0)):
        """Pure translation symmetry: rho -> rho + scale, grad_i += 2 scale/h_i."""
        h = np.atleast_1d(np.asarray(h, dtype=np.float64))
        if np.any(h == 0.0):
            raise InvalidParam("canonical symmetry needs nonzero eigenvalues")
        n = len(h)
        return cls(
            s=1.0,
            A=np.eye(n),
            B=np.eye(n),
            a=2.0 * scale / h,
            b=np.full(n, scale),
            c=0.0,
        )

    def validate(self, h, tol=1e-12):
        h = np.atleast_1d(np.asarray(h, dtype=np.float64))
        n = len(h)
        A = np.asarray(self.A, dtype=np.float64).reshape(n, n)
        B = np.asarray(self.B, dtype=np.float64).reshape(n, n)
        a = np.asarray(self.a, dtype=np.float64).reshape(n)
        b = np.asarray(self.b, dtype=np.float64).reshape(n)
        if self.s == 0.0:
            raise ConstraintViolation("scale s must be nonzero")
        if np.max(np.abs(A.T @ B - self.s * np.eye(n))) > tol:
            raise ConstraintViolation(
                "inverse pairing failed: A^T B differs from s I"
            )
        if np.max(np.abs(h @ A - h)) > tol:
            raise ConstraintViolation(
                "eigenvalue preservation failed: h A differs from h"
            )
        if np.max(np.abs(B.sum(axis=0) - 1.0)) > tol:
            raise ConstraintViolation(
                "translation weight failed: column sums of B differ from 1"
            )
        lhs = math.exp(0.5 * float(h @ a)) * float(np.linalg.det(A))
        rhs = math.exp(float(np.sum(b))) * float(np.linalg.det(B))
        if abs(lhs - rhs) > tol * max(1.0, abs(lhs), abs(rhs)):
            raise ConstraintViolation(
                "volume weight failed: e^{h.a/2} det A differs from e^{sum b} det B"
            )
        return A, B, a, b


def apply_affine_symmetry(sym, graph, h):
    """Transform a log-radial graph by a validated affine symmetry."""
    A, B, a, b = sym.validate(h)
    rho_new = graph.rho @ B.T + b[None, :]
    u_new = sym.s * graph.u + (graph.rho @ B.T) @ a + sym.c
    grad_new = graph.u_grad @ A.T + a[None, :]
    hess_new = np.einsum("ij,mjk,lk->mil", A, graph.u_hess, A) / sym.s
    return RhoGraph(rho=rho_new, u=u_new, u_grad=grad_new, u_hess=hess_new)


def default_rho_window(dim, lo=-2.0, hi=2.0, per_axis=None):
    """Uniform log-radial sample grid, 41 points for one axis, 9 per axis above."""
    if per_axis is None:
        per_axis = 41 if dim == 1 else 9
    axis = np.linspace(lo, hi, per_axis)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def check_affine_invariance(family, scale=math.log(2.0), tolerance=1e-9):
    """Canonical symmetry applied to the family's graph must keep the residual."""
    rho = default_rho_window(family.dim)
    graph = rho_graph(family, rho)
    sym = AffineSymmetry.canonical(family.Z_eigen, scale)
    moved = apply_affine_symmetry(sym, graph, family.Z_eigen)
    rep = rho_residual(moved, family.Z_eigen, tolerance)
    rep.check_name = "affine_invariance"
    return rep


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


def write_report(path, reports, meta=None):
    doc = {
        "meta": meta or {},
        "checks": [r.to_dict() for r in reports],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
