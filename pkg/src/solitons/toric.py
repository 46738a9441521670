"""Truncated multivariate power series and the rotation-invariant potential solver.

A potential that only depends on the squared moduli ``r^i = |z^i|^2`` is
represented here by a real power series ``u(r^1, ..., r^n)`` truncated at a
total degree cap.  The scalar soliton equation for such potentials reduces to

    det(E_i E_j u) * exp(h . (E u) / 2) = r^1 ... r^n,

where ``E_j = r^j d/dr^j`` is the Euler operator in the j-th variable and
``h`` is the eigenvalue vector of the linear holomorphic field.  The last
variable plays a distinguished role: prescribing ``u`` at ``r^n = 0`` is a
characteristic (singular) initial value problem, and the solver below peels
off powers of ``t = r^n`` one at a time, each order being fixed by a division
by ``m^2 det F`` with ``F`` the transverse Hessian block of the initial data.

Storage is dense over the full exponent simplex, which stays small for the
supported sizes (nvars <= 4, degree <= 16 gives fewer than 5000 terms).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import (
    DegenerateInitialData,
    DimensionTooLarge,
    NonConvergent,
    OutOfTrustRegion,
    ShapeMismatch,
)

MAX_VARS = 4
MAX_DEGREE = 16

# Largest coefficient tolerated while peeling orders in the singular solver;
# beyond this the recursion is considered to have blown up.
BLOWUP_LIMIT = 1.0e12


def _compositions(total, parts):
    """All exponent tuples of length `parts` summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Ring:
    """Shared index tables for one (nvars, degree) coefficient layout."""

    def __init__(self, nvars, degree):
        if nvars < 0 or nvars > MAX_VARS:
            raise DimensionTooLarge(
                f"dense series storage supports 0..{MAX_VARS} variables, got {nvars}"
            )
        if degree < 0 or degree > MAX_DEGREE:
            raise DimensionTooLarge(
                f"dense series storage supports degree 0..{MAX_DEGREE}, got {degree}"
            )
        self.nvars = nvars
        self.degree = degree
        if nvars == 0:
            exps = [()]
        else:
            exps = []
            for d in range(degree + 1):
                exps.extend(_compositions(d, nvars))
        self.exponents = tuple(exps)
        self.size = len(exps)
        self.exps = np.array(exps, dtype=np.int64).reshape(self.size, nvars)
        self.degs = self.exps.sum(axis=1)
        base = degree + 1
        self._weights = base ** np.arange(nvars, dtype=np.int64)
        self.codes = self.exps @ self._weights
        self.lookup = np.full(base**nvars if nvars else 1, -1, dtype=np.int64)
        self.lookup[self.codes] = np.arange(self.size)
        self.index = {e: i for i, e in enumerate(self.exponents)}
        self._mul_table = None
        self._diff_maps = {}
        self._shift_maps = {}
        self._slice_maps = {}

    def mul_table(self):
        if self._mul_table is None:
            ok = self.degs[:, None] + self.degs[None, :] <= self.degree
            i_idx, j_idx = np.nonzero(ok)
            k_idx = self.lookup[self.codes[i_idx] + self.codes[j_idx]]
            self._mul_table = (i_idx, j_idx, k_idx)
        return self._mul_table

    def mul(self, a, b):
        i_idx, j_idx, k_idx = self.mul_table()
        return np.bincount(k_idx, weights=a[i_idx] * b[j_idx], minlength=self.size)

    def diff_map(self, var):
        if var not in self._diff_maps:
            src = np.nonzero(self.exps[:, var] > 0)[0]
            dst = self.lookup[self.codes[src] - self._weights[var]]
            fac = self.exps[src, var].astype(np.float64)
            self._diff_maps[var] = (src, dst, fac)
        return self._diff_maps[var]

    def shift_map(self, var):
        if var not in self._shift_maps:
            src = np.nonzero(self.degs < self.degree)[0]
            dst = self.lookup[self.codes[src] + self._weights[var]]
            self._shift_maps[var] = (src, dst)
        return self._shift_maps[var]

    def slice_map(self, var, power, sub_ring):
        """Indices of terms with exponent `power` in `var`, and where the
        remaining exponents land in the ring with that variable removed."""
        key = (var, power)
        if key not in self._slice_maps:
            src = np.nonzero(self.exps[:, var] == power)[0]
            rest = np.delete(self.exps[src], var, axis=1)
            dst = np.array(
                [sub_ring.index[tuple(e)] for e in rest], dtype=np.int64
            )
            self._slice_maps[key] = (src, dst)
        return self._slice_maps[key]


@lru_cache(maxsize=None)
def _ring(nvars, degree):
    return _Ring(nvars, degree)


class TruncatedSeries:
    """Real power series in up to four variables, truncated at total degree.

    Coefficients live in a flat float64 array over the graded exponent basis.
    All arithmetic truncates at the degree cap; differentiation is exact on
    the stored coefficients.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, nvars, degree, coeffs=None):
        self.ring = _ring(nvars, degree)
        if coeffs is None:
            self.coeffs = np.zeros(self.ring.size)
        else:
            coeffs = np.asarray(coeffs, dtype=np.float64)
            if coeffs.shape != (self.ring.size,):
                raise ValueError("coefficient array has the wrong length")
            self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars, degree):
        return cls(nvars, degree)

    @classmethod
    def constant(cls, value, nvars, degree):
        s = cls(nvars, degree)
        s.coeffs[0] = value
        return s

    @classmethod
    def variable(cls, var, nvars, degree):
        e = [0] * nvars
        e[var] = 1
        return cls.from_terms(nvars, degree, {tuple(e): 1.0})

    @classmethod
    def from_terms(cls, nvars, degree, terms):
        s = cls(nvars, degree)
        for exp, c in terms.items():
            exp = tuple(int(x) for x in exp)
            if exp not in s.ring.index:
                raise ValueError(f"exponent {exp} outside degree-{degree} basis")
            s.coeffs[s.ring.index[exp]] = float(c)
        return s

    # -- basic properties --------------------------------------------------

    @property
    def nvars(self):
        return self.ring.nvars

    @property
    def degree(self):
        return self.ring.degree

    def copy(self):
        return TruncatedSeries(self.nvars, self.degree, self.coeffs.copy())

    def coefficient(self, exp):
        exp = tuple(int(x) for x in exp)
        idx = self.ring.index.get(exp)
        if idx is None:
            raise ValueError(f"exponent {exp} outside degree-{self.degree} basis")
        return float(self.coeffs[idx])

    def terms(self):
        """Yield (exponent_tuple, coefficient) for the nonzero terms."""
        for i in np.nonzero(self.coeffs)[0]:
            yield self.ring.exponents[i], float(self.coeffs[i])

    def max_abs_coeff(self):
        return float(np.max(np.abs(self.coeffs))) if self.ring.size else 0.0

    def allclose(self, other, atol=1e-12):
        return (
            self.nvars == other.nvars
            and self.degree == other.degree
            and bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))
        )

    def __repr__(self):
        head = [
            f"{c:+.6g}*r^{e}"
            for e, c in list(self.terms())[:4]
        ]
        tail = "..." if np.count_nonzero(self.coeffs) > 4 else ""
        body = " ".join(head) if head else "0"
        return f"TruncatedSeries({self.nvars} vars, deg {self.degree}: {body}{tail})"

    # -- arithmetic --------------------------------------------------------

    def _like(self, coeffs):
        return TruncatedSeries(self.nvars, self.degree, coeffs)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.ring is not self.ring:
                raise ShapeMismatch(
                    f"series shapes differ: ({self.nvars} vars, cap {self.degree}) "
                    f"vs ({other.nvars} vars, cap {other.degree})"
                )
            return other
        return TruncatedSeries.constant(float(other), self.nvars, self.degree)

    def __add__(self, other):
        other = self._coerce(other)
        return self._like(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return self._like(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            other = self._coerce(other)
            return self._like(self.ring.mul(self.coeffs, other.coeffs))
        return self._like(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._like(self.coeffs / float(scalar))

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------

    def diff(self, var):
        """Partial derivative with respect to variable `var`."""
        src, dst, fac = self.ring.diff_map(var)
        out = np.zeros(self.ring.size)
        out[dst] = self.coeffs[src] * fac
        return self._like(out)

    def euler(self, var):
        """Euler operator r^var * d/dr^var (degree preserving, exact)."""
        return self._like(self.coeffs * self.ring.exps[:, var])

    def mul_var(self, var):
        """Multiply by the variable r^var (terms at the cap fall off)."""
        src, dst = self.ring.shift_map(var)
        out = np.zeros(self.ring.size)
        out[dst] = self.coeffs[src]
        return self._like(out)

    def truncate_above(self, maxdeg):
        out = self.coeffs.copy()
        out[self.ring.degs > maxdeg] = 0.0
        return self._like(out)

    def exp(self):
        """Series exponential, exact through the degree cap."""
        a0 = self.coeffs[0]
        tail = self._like(self.coeffs.copy())
        tail.coeffs[0] = 0.0
        acc = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        term = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        for k in range(1, self.degree + 1):
            term = term * tail / k
            if not np.any(term.coeffs):
                break
            acc = acc + term
        return acc * math.exp(a0)

    def reciprocal(self):
        """Multiplicative inverse; the constant term must be nonzero."""
        a0 = self.coeffs[0]
        if a0 == 0.0:
            raise ZeroDivisionError("series has zero constant term")
        t = self._like(-self.coeffs / a0)
        t.coeffs[0] = 0.0
        acc = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        term = TruncatedSeries.constant(1.0, self.nvars, self.degree)
        for k in range(1, self.degree + 1):
            term = term * t
            if not np.any(term.coeffs):
                break
            acc = acc + term
        return acc / a0

    def with_degree(self, degree):
        """Re-embed into a (possibly larger) degree cap."""
        if degree == self.degree:
            return self.copy()
        out = TruncatedSeries(self.nvars, degree)
        for e, c in self.terms():
            if sum(e) > degree:
                raise ValueError("cannot lower the degree cap below stored terms")
            out.coeffs[out.ring.index[e]] = c
        return out

    def evaluate(self, point):
        """Evaluate at `point` with shape (..., nvars); returns floats."""
        pt = np.asarray(point, dtype=np.float64)
        if self.nvars == 0:
            return np.full(pt.shape[:-1] if pt.ndim else (), self.coeffs[0])
        if pt.shape[-1] != self.nvars:
            raise ValueError("point has the wrong number of coordinates")
        lead = pt.shape[:-1]
        flat = pt.reshape(-1, self.nvars)
        powers = flat[:, None, :] ** self.ring.exps[None, :, :]
        vals = np.prod(powers, axis=-1) @ self.coeffs
        return vals.reshape(lead)


def series_mul(a, b):
    """Cauchy product truncated at the shared degree cap."""
    if not isinstance(a, TruncatedSeries):
        a, b = b, a
    return a * b


def series_exp(a):
    """Series exponential of `a` (any constant term), exact through the cap."""
    return a.exp()


def series_det(mat):
    """Determinant of a small square matrix of series (Laplace over
    permutations; fine for the sizes the dense backend supports)."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    for row in mat:
        if len(row) != n:
            raise ValueError("matrix is not square")
    acc = None
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = mat[0][perm[0]]
        for i in range(1, n):
            term = term * mat[i][perm[i]]
        term = term * sign
        acc = term if acc is None else acc + term
    return acc


def _det_or_one(mat, nvars, degree):
    if not mat:
        return TruncatedSeries.constant(1.0, nvars, degree)
    return series_det(mat)


# ---------------------------------------------------------------------------
# the scalar soliton equation on rotation-invariant potentials
# ---------------------------------------------------------------------------


def ma_residual(u, h):
    """Residual of det(E_i E_j u) e^(h.Eu/2) - r^1...r^n as a series.

    A potential solving the reduced soliton equation in the normalized gauge
    makes this vanish identically through the degree cap.
    """
    n = u.nvars
    if n == 0:
        raise ValueError("residual needs at least one variable")
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (n,):
        raise ValueError(f"eigenvalue vector must have length {n}")
    if u.degree < n:
        raise ValueError(f"degree cap {u.degree} cannot hold the degree-{n} source term")
    eu = [u.euler(j) for j in range(n)]
    mat = [[eu[j].euler(i) for j in range(n)] for i in range(n)]
    det = series_det(mat)
    lin = None
    for j in range(n):
        piece = eu[j] * (h[j] / 2.0)
        lin = piece if lin is None else lin + piece
    res = det * lin.exp()
    res.coeffs[res.ring.index[(1,) * n]] -= 1.0
    return res


@dataclass(frozen=True)
class ToricInitialData:
    """Initial slice for the characteristic solve.

    `transverse` is the restriction of the potential to the hypersurface
    where the last radial variable vanishes: a series in the first n-1
    variables, vanishing at the origin, with positive slopes (the diagonal
    metric coefficients at the origin).  `h` lists all n eigenvalues.
    """

    transverse: TruncatedSeries
    h: tuple

    def __post_init__(self):
        h = tuple(float(x) for x in self.h)
        object.__setattr__(self, "h", h)
        n = len(h)
        if n < 1:
            raise ValueError("need at least one eigenvalue")
        if n > MAX_VARS:
            raise DimensionTooLarge(f"at most {MAX_VARS} variables supported")
        v = self.transverse
        if v.nvars != n - 1:
            raise ValueError(
                f"transverse data has {v.nvars} variables, expected {n - 1}"
            )
        if v.coeffs[0] != 0.0:
            raise ValueError("transverse data must vanish at the origin")
        for i in range(n - 1):
            slope = v.coefficient(tuple(1 if k == i else 0 for k in range(n - 1)))
            if slope <= 0.0:
                raise DegenerateInitialData(
                    f"slope of variable {i} at the origin is {slope}; "
                    "the transverse metric block must be positive"
                )

    @property
    def dim(self):
        return len(self.h)


def _transverse_det(v):
    """det of the transverse Hessian block F_ij = d_ij v_i + r^j v_ij."""
    m = v.nvars
    rows = []
    for i in range(m):
        row = []
        vi = v.diff(i)
        for j in range(m):
            entry = vi.diff(j).mul_var(j)
            if i == j:
                entry = entry + vi
            row.append(entry)
        rows.append(row)
    return _det_or_one(rows, v.nvars, v.degree)


def _lift_transverse(v, degree):
    """Embed an (n-1)-variable series as the t^0 slice of an n-variable one."""
    n = v.nvars + 1
    out = TruncatedSeries(n, degree)
    for e, c in v.terms():
        out.coeffs[out.ring.index[e + (0,)]] = c
    return out


def _slice_last(u, power, sub):
    """Coefficient series of t^power, as a series in the other variables."""
    src, dst = u.ring.slice_map(u.nvars - 1, power, sub.ring)
    out = TruncatedSeries(sub.nvars, sub.degree)
    out.coeffs[dst] = u.coeffs[src]
    return out


def _lift_slice(zc, power, target):
    """Inverse of _slice_last: place an (n-1)-variable series at t^power."""
    src, dst = target.ring.slice_map(target.nvars - 1, power, zc.ring)
    out = TruncatedSeries(target.nvars, target.degree)
    out.coeffs[src] = zc.coeffs[dst]
    return out


def _characteristic_residual(u, h):
    """Residual in the form whose t^m coefficient isolates m^2 det(F) z_m.

    Factor r^1..r^(n-1) out of the full determinant and move the exponential
    to the source side: det(P) - t * exp(-h.Eu/2), where P has rows
    d/dr^i (E_j u) for i < n and E_n(E_j u) in the last row.
    """
    n = u.nvars
    eu = [u.euler(j) for j in range(n)]
    rows = []
    for i in range(n - 1):
        rows.append([eu[j].diff(i) for j in range(n)])
    rows.append([eu[j].euler(n - 1) for j in range(n)])
    det = series_det(rows)
    lin = None
    for j in range(n):
        piece = eu[j] * (-h[j] / 2.0)
        lin = piece if lin is None else lin + piece
    return det - lin.exp().mul_var(n - 1)


def solve_singular_ivp(init, degree):
    """Solve the reduced soliton equation as a formal series in t = r^n.

    Builds the unique series u = v + z_1 t + z_2 t^2 + ... extending the
    transverse initial slice v, order by order: the t^m coefficient of the
    characteristic residual is linear in z_m with invertible factor
    m^2 det(F), so each order is one series division.  The result is
    deterministic (pure float arithmetic in a fixed order).
    """
    if degree < 2:
        raise ValueError("degree cap must be at least 2")
    if degree > MAX_DEGREE:
        raise DimensionTooLarge(f"degree cap at most {MAX_DEGREE}")
    n = init.dim
    h = np.asarray(init.h, dtype=np.float64)
    v = init.transverse.with_degree(degree)

    det_f = _transverse_det(v)
    c0 = det_f.coeffs[0]
    if not (c0 > 0.0):
        raise DegenerateInitialData(
            f"transverse Hessian determinant at the origin is {c0}"
        )
    recip = det_f.reciprocal()

    u = _lift_transverse(v, degree)
    sub = v  # ring/degree template for slices
    for m in range(1, degree + 1):
        res = _characteristic_residual(u, h)
        cm = _slice_last(res, m, sub)
        zm = (cm * recip).truncate_above(degree - m) * (-1.0 / (m * m))
        if not np.all(np.isfinite(zm.coeffs)) or zm.max_abs_coeff() > BLOWUP_LIMIT:
            raise NonConvergent(f"order-{m} coefficients blew up")
        u = u + _lift_slice(zm, m, u)
    return u


# ---------------------------------------------------------------------------
# pointwise evaluation of toric data
# ---------------------------------------------------------------------------


@dataclass
class ToricMetricSample:
    """Potential, soliton function and metric of a toric series at a point."""

    phi: np.ndarray
    f: np.ndarray
    metric: np.ndarray
    r: np.ndarray


def toric_eval(u, h, z, trust_radius=0.5):
    """Evaluate potential, soliton function and metric at complex points.

    `z` has shape (..., n).  Every squared modulus must stay within
    `trust_radius`; beyond that the truncated series is not a faithful stand-in
    for the function it represents and OutOfTrustRegion is raised.
    """
    n = u.nvars
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (n,):
        raise ValueError(f"eigenvalue vector must have length {n}")
    z = np.asarray(z, dtype=np.complex128)
    if z.shape[-1] != n:
        raise ValueError(f"points must have {n} complex coordinates")
    r = np.abs(z) ** 2
    if np.any(r > trust_radius * (1.0 + 1e-12)):
        worst = float(np.max(r))
        raise OutOfTrustRegion(
            f"squared modulus {worst:.6g} exceeds trust radius {trust_radius}"
        )
    phi = u.evaluate(r)
    du = np.stack([u.diff(i).evaluate(r) for i in range(n)], axis=-1)
    metric = np.zeros(z.shape + (n,), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            uij = u.diff(i).diff(j).evaluate(r)
            metric[..., i, j] = np.conj(z[..., i]) * z[..., j] * uij
            if i != j:
                metric[..., j, i] = np.conj(metric[..., i, j])
            else:
                metric[..., i, i] += du[..., i]
    f = 0.5 * np.sum(h * r * du, axis=-1)
    return ToricMetricSample(phi=phi, f=f, metric=metric, r=r)


@dataclass
class RhoGraph:
    """Samples of a rotation-invariant potential in log-radial coordinates.

    Each row pairs a point rho (componentwise log of the squared moduli) with
    the potential value, its gradient and its Hessian taken with respect to
    rho.  In these coordinates the reduced soliton equation reads

        det(hess) * exp(h . grad / 2) = exp(rho^1 + ... + rho^n),

    which is what the verification checks test, and the affine symmetry group
    acts by the linear changes of (rho, u) handled in the verify module.
    """

    rho: np.ndarray
    u: np.ndarray
    u_grad: np.ndarray
    u_hess: np.ndarray

    def __post_init__(self):
        self.rho = np.atleast_2d(np.asarray(self.rho, dtype=np.float64))
        self.u = np.asarray(self.u, dtype=np.float64).reshape(len(self.rho))
        n = self.rho.shape[1]
        self.u_grad = np.asarray(self.u_grad, dtype=np.float64).reshape(len(self.rho), n)
        self.u_hess = np.asarray(self.u_hess, dtype=np.float64).reshape(
            len(self.rho), n, n
        )
        if not np.allclose(self.u_hess, np.swapaxes(self.u_hess, 1, 2), atol=1e-12):
            raise ValueError("Hessian samples must be symmetric")

    @property
    def dim(self):
        return self.rho.shape[1]

    def __len__(self):
        return len(self.rho)


def rho_graph_from_series(u, rho, trust_radius=0.5):
    """Sample a series potential on log-radial points (r^i = e^(rho^i)).

    Every e^(rho^i) must stay inside the trust radius, so only sufficiently
    negative rho are usable; closed-form families provide graphs on wider
    windows through their own exact samplers.
    """
    rho = np.atleast_2d(np.asarray(rho, dtype=np.float64))
    n = u.nvars
    if rho.shape[1] != n:
        raise ValueError(f"rho points must have {n} coordinates")
    r = np.exp(rho)
    if np.any(r > trust_radius * (1.0 + 1e-12)):
        raise OutOfTrustRegion(
            f"e^rho up to {float(np.max(r)):.6g} exceeds trust radius {trust_radius}"
        )
    vals = u.evaluate(r)
    grad = np.stack([u.euler(i).evaluate(r) for i in range(n)], axis=-1)
    hess = np.empty((len(rho), n, n))
    for i in range(n):
        for j in range(i, n):
            hij = u.euler(j).euler(i).evaluate(r)
            hess[:, i, j] = hij
            hess[:, j, i] = hij
    return RhoGraph(rho=rho, u=vals, u_grad=grad, u_hess=hess)


# ---------------------------------------------------------------------------
# text round trip
# ---------------------------------------------------------------------------


def series_dumps(u):
    """Serialize a series to JSON text, coefficients at 17 significant digits
    (enough for a bit-exact float64 round trip)."""
    lines = ["{", f'  "nvars": {u.nvars},', f'  "degree": {u.degree},', '  "terms": [']
    body = []
    for e, c in u.terms():
        exps = ", ".join(str(x) for x in e)
        body.append('    {"exponents": [%s], "coeff": %s}' % (exps, format(c, ".17g")))
    lines.append(",\n".join(body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def series_loads(text):
    doc = json.loads(text)
    try:
        nvars = int(doc["nvars"])
        degree = int(doc["degree"])
        terms = doc["terms"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series document: {exc}") from exc
    out = TruncatedSeries(nvars, degree)
    seen = set()
    for item in terms:
        exp = tuple(int(x) for x in item["exponents"])
        if len(exp) != nvars:
            raise ValueError(f"exponent {exp} has wrong arity for nvars={nvars}")
        if exp in seen:
            raise ValueError(f"duplicate exponent {exp}")
        seen.add(exp)
        if exp not in out.ring.index:
            raise ValueError(f"exponent {exp} exceeds the degree cap {degree}")
        out.coeffs[out.ring.index[exp]] = float(item["coeff"])
    return out


def save_series(u, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(series_dumps(u))


def load_series(path):
    with open(path, "r", encoding="utf-8") as fh:
        return series_loads(fh.read())
