from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from solitons import families
from solitons.errors import InvalidParam, OutOfDomain

from conftest import cao_a_coeffs, max_offdiag


# ---------------------------------------------------------------------------
# one-axis and product families
# ---------------------------------------------------------------------------


def test_product_parameter_validation():
    with pytest.raises(InvalidParam):
        families.make_product([2.0], [1.0, 2.0])
    with pytest.raises(InvalidParam):
        families.make_product([], [])
    with pytest.raises(InvalidParam):
        families.make_product([-2.0], [1.0])
    with pytest.raises(InvalidParam):
        families.make_product([np.inf], [1.0])


def test_cigar_closed_form_values(cigar21):
    r2 = np.array([[math.sqrt(2.0) + 0.0j]])
    assert cigar21.f(r2)[0] == pytest.approx(math.log(2.0), abs=1e-15)
    assert cigar21.metric(r2)[0, 0, 0] == pytest.approx(0.5, abs=1e-15)
    assert cigar21.scalar(np.zeros((1, 1), dtype=complex))[0] == pytest.approx(2.0)
    assert cigar21.soliton_h == 1.0
    assert cigar21.gauge_constant == 0.0
    assert cigar21.special is True
    # curvature falls like the square of the metric denominator
    assert cigar21.ricci(r2)[0, 0, 0] == pytest.approx(4.0 / 16.0, abs=1e-15)


def test_flat_axis_is_allowed():
    fam = families.make_product([2.0], [0.0])
    z = np.array([[1.5 + 0.5j]])
    assert fam.scalar(z)[0] == 0.0
    assert fam.f(z)[0] == 0.0
    assert fam.metric(z)[0, 0, 0] == pytest.approx(1.0)
    # potential falls back to the flat paraboloid on that axis
    assert fam.potential(z)[0] == pytest.approx(np.abs(z[0, 0]) ** 2)


def test_product_is_sum_of_axes(product_12):
    rng = np.random.default_rng(0)
    z = rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))
    ax1 = families.make_cigar(2.0, 1.0)
    ax2 = families.make_cigar(2.0, 2.0)
    f_sum = ax1.f(z[:, :1]) + ax2.f(z[:, 1:])
    assert np.allclose(product_12.f(z), f_sum, atol=1e-14)
    assert np.allclose(
        product_12.scalar(z), ax1.scalar(z[:, :1]) + ax2.scalar(z[:, 1:]), atol=1e-14
    )
    gm = product_12.metric(z)
    assert max_offdiag(gm) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(-0.9, 3.0), st.integers(0, 10**6))
def test_cigar_profile_relations(c, h, seed):
    """Conservation and the metric/curvature relation, parameter sweep."""
    rng = np.random.default_rng(seed)
    fam = families.make_cigar(c, h)
    rmax = 3.0 if h >= 0 else 0.9 * math.sqrt(c / -h)
    z = (rmax * np.sqrt(rng.uniform(0.0, 1.0, 8)) * np.exp(2j * np.pi * rng.uniform(size=8)))
    z = z.reshape(-1, 1)
    total = fam.scalar(z) + fam.grad_f_sq(z)
    assert np.allclose(total, 2.0 * fam.soliton_h, atol=1e-12)
    r = np.abs(z[:, 0]) ** 2
    assert np.allclose(
        fam.ricci(z)[:, 0, 0].real, 2.0 * c * h / (c + h * r) ** 2, atol=1e-12
    )


def test_negative_h_domain_enforced():
    fam = families.make_cigar(2.0, -1.0)
    inside = np.array([[1.0 + 0.0j]])
    assert fam.f(inside)[0] == pytest.approx(math.log1p(-0.5))
    with pytest.raises(OutOfDomain):
        fam.f(np.array([[1.5 + 0.0j]]))


def test_gauge_constant_tracks_normalization():
    fam = families.make_product([4.0, 2.0], [1.0, 1.0])
    assert fam.gauge_constant == pytest.approx(math.log(0.5))
    assert fam.special is False
    # widths whose gauge offsets cancel still count as volume normalized
    assert families.make_product([4.0, 1.0], [1.0, 1.0]).special is True


# ---------------------------------------------------------------------------
# self-similarity of the one-axis metric
# ---------------------------------------------------------------------------


def test_flow_pullback_identity_on_sample_fan():
    rng = np.random.default_rng(12)
    w = rng.normal(size=50) + 1j * rng.normal(size=50)
    for t in (-1.0, 0.5, 2.0):
        out = families.cigar_flow_pullback(2.0, 1.0, t, w)
        assert np.max(np.abs(out["evolved"] - out["pulled_back"])) < 1e-14
    for t in (-0.3, 0.7):
        out = families.cigar_flow_pullback(3.0, -0.5, t, 0.5 * w)
        assert np.max(np.abs(out["evolved"] - out["pulled_back"])) < 1e-12


def test_flow_pullback_domain_violation():
    # h < 0 and t large enough shrinks the cap below the sampled point
    with pytest.raises(OutOfDomain):
        families.cigar_flow_pullback(2.0, -1.0, 2.0, np.array([1.2 + 0.0j]))
    with pytest.raises(InvalidParam):
        families.cigar_flow_pullback(-1.0, 1.0, 0.0, np.array([0.1 + 0.0j]))


# ---------------------------------------------------------------------------
# the radial profile of the rotationally symmetric family on C^n
# ---------------------------------------------------------------------------


def test_cao_F_oracle_values():
    out = families.cao_F(2, 1.0)
    assert out["F"] == pytest.approx(1.0, abs=1e-14)
    assert out["f"] == pytest.approx(math.sqrt(2.0), abs=1e-14)
    # limit of f as b -> -infinity is -(n!)^(1/n)
    assert families.cao_F(2, -50.0)["f"] == pytest.approx(-math.sqrt(2.0), abs=1e-6)
    assert families.cao_F(3, -60.0)["f"] == pytest.approx(-(6.0 ** (1.0 / 3.0)), abs=1e-6)
    assert families.cao_F(1, 0.0)["F"] == 0.0
    with pytest.raises(InvalidParam):
        families.cao_F(0, 1.0)


def test_cao_F_series_continuity():
    """The series window and the closed form agree where they meet."""
    for n in (1, 2, 3, 4, 6):
        for seam in (0.5, -0.5):
            lo = families.cao_F(n, seam - 1e-12)["F"]
            hi = families.cao_F(n, seam + 1e-12)["F"]
            assert hi - lo == pytest.approx(0.0, abs=1e-9)


def test_profile_leading_coefficients():
    for n in (1, 2, 3):
        for h in (1.0, 2.0, -1.0):
            prof = families.CaoProfile(*families._cao_args(n, h))
            eps = 1e-5
            assert prof.b(eps) / eps == pytest.approx(h / 2.0, abs=1e-5)
            assert prof.a(0.0) == pytest.approx(1.0, abs=1e-14)
            assert prof.a_prime(0.0) == pytest.approx(-h / (2.0 * (n + 1.0)), abs=1e-12)
            assert prof.b_prime(0.0) == pytest.approx(h / 2.0, abs=1e-14)
            assert prof.b_prime2(0.0) == pytest.approx(
                -h * h / (2.0 * (n + 1.0)), abs=1e-12
            )


def test_profile_inversion_round_trip():
    prof = families.CaoProfile(*families._cao_args(2, 1.0))
    r = np.linspace(0.0, 60.0, 101)[1:]
    f_back = families.cao_F(2, prof.b(r))["f"]
    assert np.max(np.abs(f_back - 0.5 * r) / np.maximum(1.0, 0.5 * r)) < 1e-12


def test_profile_inversion_negative_branch():
    prof = families.CaoProfile(*families._cao_args(2, -1.0))
    r = np.linspace(0.0, 0.98 * prof.r_max, 60)[1:]
    b = prof.b(r)
    assert np.all(b < 0.0)
    f_back = families.cao_F(2, b)["f"]
    assert np.max(np.abs(f_back + 0.5 * r)) < 1e-10


def test_profile_one_variable_closed_form():
    # for n = 1 the inversion is elementary: b = log(1 + (h/2) r)
    prof = families.CaoProfile(*families._cao_args(1, 2.0))
    r = np.linspace(0.0, 20.0, 41)
    assert np.max(np.abs(prof.b(r) - np.log1p(r))) < 1e-12


def test_profile_consistency_residual():
    for n, h in ((1, 1.0), (2, 1.0), (3, 2.0), (2, -1.0)):
        prof = families.CaoProfile(*families._cao_args(n, h))
        top = 30.0 if h > 0 else 0.95 * prof.r_max
        r = np.linspace(0.0, top, 33)[1:]
        assert np.max(prof.consistency_residual(r)) < 1e-11


def test_profile_a_matches_exact_series():
    coeffs = cao_a_coeffs(3, 1.0, 8)
    prof = families.CaoProfile(*families._cao_args(3, 1.0))
    s = np.linspace(0.0, 0.2, 9)
    series = sum(float(coeffs[k]) * s**k for k in range(9))
    assert np.max(np.abs(prof.a(s) - series)) < 1e-9


def test_profile_potential_matches_adaptive_quadrature():
    for n, h in ((2, 1.0), (3, 2.0), (2, -1.0)):
        prof = families.CaoProfile(*families._cao_args(n, h))
        top = 8.0 if h > 0 else 0.9 * prof.r_max
        for r in np.linspace(0.1, top, 5):
            want, err = quad(lambda s: prof.a(s), 0.0, r, epsabs=1e-13, epsrel=1e-13)
            assert err < 1e-10
            assert prof.potential(r) == pytest.approx(want, abs=1e-12)


def test_profile_domain_for_negative_h():
    prof = families.CaoProfile(*families._cao_args(2, -1.0))
    assert prof.r_max == pytest.approx(2.0 * math.sqrt(2.0))
    with pytest.raises(OutOfDomain):
        prof.b(prof.r_max + 0.01)
    with pytest.raises(InvalidParam):
        prof.b(-1.0)


def test_cao_profile_convenience_wrapper():
    out = families.cao_profile(2, 1.0, 1.3)
    prof = families.CaoProfile(*families._cao_args(2, 1.0))
    assert out["a"] == prof.a(1.3)
    assert out["b"] == prof.b(1.3)
    assert out["b_prime"] == prof.b_prime(1.3)


def test_make_cao_validation():
    with pytest.raises(InvalidParam):
        families.make_cao(0, 1.0)
    with pytest.raises(InvalidParam):
        families.make_cao(2, 0.0)


def test_cao_family_evaluators(cao21):
    assert cao21.soliton_h == 2.0
    assert cao21.special is True
    z = np.array([[0.5 + 0.2j, -0.4 + 0.1j]])
    r = float(np.sum(np.abs(z) ** 2))
    prof = families.CaoProfile(*families._cao_args(2, 1.0))
    assert cao21.f(z)[0] == pytest.approx(prof.b(r), abs=1e-14)
    # rank-one update: det(a I + a' zbar z^T) = a^(n-1) (a + r a'), n = 2 here
    gm = cao21.metric(z)[0]
    a, ap = prof.a(r), prof.a_prime(r)
    assert np.linalg.det(gm).real == pytest.approx(a * (a + r * ap), abs=1e-13)
    # det g = e^(-f): the volume gauge
    assert np.linalg.det(gm).real == pytest.approx(math.exp(-cao21.f(z)[0]), abs=1e-13)


def test_cao_negative_h_family_domain():
    fam = families.make_cao(2, -1.0)
    r_max = 2.0 * math.sqrt(2.0)
    inside = np.array([[1.0 + 0.0j, 1.0 + 0.0j]])
    assert np.isfinite(fam.f(inside)[0])
    outside = np.array([[1.4 + 0.0j, 1.0 + 0.0j]])
    with pytest.raises(OutOfDomain):
        fam.f(outside)
    assert fam.domain.description == f"|z|^2 < {r_max:.6g}"


# ---------------------------------------------------------------------------
# log-radial graphs
# ---------------------------------------------------------------------------


def test_rho_graph_shapes_and_values(cigar21, cao21):
    rho = np.linspace(-2.0, 2.0, 11).reshape(-1, 1)
    g1 = families.rho_graph(cigar21, rho)
    assert g1.dim == 1 and len(g1) == 11
    r = np.exp(rho[:, 0])
    assert np.allclose(g1.u_grad[:, 0], 2.0 * np.log1p(r / 2.0), atol=1e-13)
    assert np.allclose(g1.u_hess[:, 0, 0], 2.0 * r / (2.0 + r), atol=1e-13)

    rho2 = np.stack([rho[:, 0], rho[::-1, 0]], axis=1)
    g2 = families.rho_graph(cao21, rho2)
    s = np.exp(rho2).sum(axis=1)
    prof = families.CaoProfile(*families._cao_args(2, 1.0))
    assert np.allclose(g2.u, prof.potential(s), atol=1e-13)
    assert np.allclose(g2.u_grad, np.exp(rho2) * prof.a(s)[:, None], atol=1e-13)


def test_rho_graph_dimension_check(cigar21):
    with pytest.raises(InvalidParam):
        families.rho_graph(cigar21, np.zeros((3, 2)))
