"""Numerical toolkit for shrinking and expanding gradient Kähler solitons.

The package builds closed-form soliton families on C^n, differentiates
Kähler data by complex finite differences, solves the reduced scalar
equation for rotation-invariant potentials as a truncated power series,
counts resonances of the underlying holomorphic field exactly, and bundles
every identity relating these objects into named verification checks.
"""

from __future__ import annotations

from .ckgeom import (
    FDScheme,
    RicciResult,
    VectorFieldSample,
    WirtingerDerivs,
    associated_Z,
    default_scheme,
    hermitize,
    laplacian,
    metric_from_potential,
    ricci_from_metric,
    ricci_potential_special,
    soliton_constant,
    wirtinger_derivs,
)
from .errors import (
    ConstraintViolation,
    DegenerateInitialData,
    DimensionTooLarge,
    DomainTooSmall,
    DomainViolation,
    InvalidParam,
    IrrationalInput,
    NonConvergent,
    NonFinite,
    NonPositiveEigenvalue,
    NotPositiveDefinite,
    OutOfDomain,
    OutOfTrustRegion,
    ShapeMismatch,
    SingularMetric,
    SolitonError,
)
from .families import (
    AnalyticFamily,
    CaoProfile,
    Domain,
    PotentialField,
    cao_F,
    cao_profile,
    cigar_flow_pullback,
    make_cao,
    make_cigar,
    make_product,
    rho_graph,
)
from .holodata import (
    EigenData,
    LatticeResult,
    ResonanceResult,
    flow_Zh,
    lattice_basis,
    resonances,
)
from .toric import (
    RhoGraph,
    ToricInitialData,
    ToricMetricSample,
    TruncatedSeries,
    load_series,
    ma_residual,
    rho_graph_from_series,
    save_series,
    series_dumps,
    series_exp,
    series_loads,
    series_mul,
    solve_singular_ivp,
    toric_eval,
)
from .verify import (
    AffineSymmetry,
    GridSpec,
    GrowthReport,
    VerificationReport,
    apply_affine_symmetry,
    check_affine_invariance,
    check_conservation,
    check_growth,
    check_lie_derivative,
    check_periodic_orbit,
    check_soliton_residual,
    rho_residual,
    write_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
