"""Command-line front end: table generation, checks, series solving, counts.

Subcommands
    gen        tabulate a closed-form family along real rays to CSV + JSON
    verify     run named identity checks and write a JSON report
    toric      solve the reduced equation as a truncated series
    resonance  exact resonance count and relation lattice of eigenvalues

Exit codes: 0 success, 1 a check or computation failed, 2 bad usage or
invalid parameters, 3 a point left the region where the data is defined.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import holodata, verify
from .errors import (
    DomainViolation,
    InvalidParam,
    IrrationalInput,
    NonPositiveEigenvalue,
    ShapeMismatch,
    SolitonError,
)
from .families import make_cao, make_cigar, make_product, rho_graph
from .toric import (
    ToricInitialData,
    TruncatedSeries,
    load_series,
    ma_residual,
    save_series,
    solve_singular_ivp,
)

GEN_ROW_CAP = 10**6


# ---------------------------------------------------------------------------
# family construction from flags
# ---------------------------------------------------------------------------


def _add_family_args(sp):
    sp.add_argument(
        "--family",
        choices=("cigar", "product", "cao"),
        default="cigar",
        help="closed-form family to evaluate (default: cigar)",
    )
    sp.add_argument(
        "--c",
        type=float,
        nargs="+",
        default=None,
        help="per-axis metric normalizations (default: 2 each)",
    )
    sp.add_argument(
        "--h",
        type=float,
        nargs="+",
        default=None,
        help="per-axis field eigenvalues (default: 1 each)",
    )
    sp.add_argument("--n", type=int, default=2, help="complex dimension for --family cao")
    sp.add_argument(
        "--h-axis", type=float, default=1.0, help="shared eigenvalue for --family cao"
    )


def _family_from_args(args):
    if args.family == "cao":
        return make_cao(args.n, args.h_axis)
    h = args.h if args.h is not None else [1.0]
    c = args.c if args.c is not None else [2.0] * len(h)
    if args.family == "cigar":
        if len(h) != 1 or len(c) != 1:
            raise InvalidParam("the cigar family takes exactly one --c and one --h")
        return make_cigar(c[0], h[0])
    return make_product(c, h)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _format_row(values):
    return ",".join(format(v, ".17g") for v in values)


def cmd_gen(args):
    fam = _family_from_args(args)
    n = fam.dim
    if args.grid < 2:
        raise InvalidParam("--grid must be at least 2")
    if args.grid**n > GEN_ROW_CAP:
        raise InvalidParam(
            f"{args.grid}^{n} rows exceed the {GEN_ROW_CAP} row cap; lower --grid"
        )
    axis = np.linspace(0.0, args.rmax, args.grid)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1).astype(np.complex128)

    phi = fam.potential(pts)
    f = fam.f(pts)
    det_g = np.real(np.linalg.det(fam.metric(pts)))
    scal = fam.scalar(pts)
    zsq = fam.grad_f_sq(pts)

    os.makedirs(args.out, exist_ok=True)
    header = []
    for k in range(n):
        header += [f"re_z{k + 1}", f"im_z{k + 1}"]
    header += ["phi", "f", "det_g", "R", "Zsq"]
    csv_path = os.path.join(args.out, "table.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(pts)):
            row = []
            for k in range(n):
                row += [pts[i, k].real, pts[i, k].imag]
            row += [phi[i], f[i], det_g[i], scal[i], zsq[i]]
            fh.write(_format_row(row) + "\n")

    meta = {
        "family": fam.name,
        "dim": fam.dim,
        "params": fam.params,
        "eigenvalues": fam.Z_eigen.tolist(),
        "soliton_constant": fam.soliton_h,
        "gauge_constant": fam.gauge_constant,
        "special": fam.special,
        "domain": fam.domain.description,
        "grid": args.grid,
        "rmax": args.rmax,
        "rows": len(pts),
        "columns": header,
    }
    meta_path = os.path.join(args.out, "metadata.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")

    if args.plots:
        from . import plots

        columns = {name: None for name in header}
        for k in range(n):
            columns[f"re_z{k + 1}"] = pts[:, k].real
        columns.update(phi=phi, f=f, det_g=det_g, R=scal, Zsq=zsq)
        plots.plot_gen_table(
            columns,
            n,
            os.path.join(args.out, "table.png"),
            f"{fam.name} family along real rays",
        )
    print(f"wrote {len(pts)} rows to {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

CHECK_NAMES = ("conservation", "residual", "growth", "orbit", "lie", "rho", "affine")


def _growth_summary(growth, tol):
    sw = growth.sandwich
    dev = max(
        0.0,
        sw["mu_min"] - sw["two_n"],
        sw["two_n"] - sw["mu_max"],
    )
    return verify.VerificationReport(
        check_name="growth",
        grid=(
            f"{len(growth.directions)} rays, radii "
            f"{growth.radii[0]:g}..{growth.radii[-1]:g}"
        ),
        max_dev=float(dev),
        mean_dev=float(dev),
        tolerance=float(tol),
        passed=growth.passed,
        details=[growth.to_dict()],
    )


def _print_report(rep):
    verdict = "PASS" if rep.passed else "FAIL"
    print(
        f"{rep.check_name}: {verdict} (max dev {rep.max_dev:.3g}, "
        f"tol {rep.tolerance:.3g})"
    )


def _run_family_checks(fam, names, args):
    reports = []
    growths = None
    if "conservation" in names:
        reports.append(verify.check_conservation(fam))
    if "residual" in names:
        reports.extend(verify.check_soliton_residual(fam))
    if "lie" in names:
        reports.append(verify.check_lie_derivative(fam))
    if "rho" in names:
        graph = rho_graph(fam, verify.default_rho_window(fam.dim))
        reports.append(verify.rho_residual(graph, fam.Z_eigen))
    if "affine" in names:
        reports.append(verify.check_affine_invariance(fam))
    if "growth" in names:
        growths = verify.check_growth(fam)
        reports.append(_growth_summary(growths, tol=0.1))
    if "orbit" in names:
        for axis in range(fam.dim):
            reports.append(
                verify.check_periodic_orbit(fam, axis, steps=args.orbit_steps)
            )
    return reports, growths


def cmd_verify(args):
    if args.series is not None:
        if args.h is None:
            raise InvalidParam("--series needs --h with one eigenvalue per variable")
        u = load_series(args.series)
        ma_rep, flow_rep = verify.check_soliton_residual((u, args.h))
        reports = [ma_rep, flow_rep]
        growths = None
        meta = {"series": args.series, "eigenvalues": list(args.h)}
    else:
        fam = _family_from_args(args)
        if args.checks == "all":
            names = set(CHECK_NAMES)
        else:
            names = set(x.strip() for x in args.checks.split(",") if x.strip())
            unknown = names - set(CHECK_NAMES)
            if unknown:
                raise InvalidParam(
                    f"unknown checks {sorted(unknown)}; pick from {CHECK_NAMES}"
                )
        reports, growths = _run_family_checks(fam, names, args)
        meta = {
            "family": fam.name,
            "params": fam.params,
            "eigenvalues": fam.Z_eigen.tolist(),
            "checks": sorted(names),
        }

    for rep in reports:
        _print_report(rep)
    if args.out:
        verify.write_report(args.out, reports, meta)
        print(f"wrote report to {args.out}")
    if args.plots:
        from . import plots

        base = os.path.splitext(args.out)[0] if args.out else "verify"
        plots.plot_report(reports, base + "_checks.png")
        if growths is not None:
            plots.plot_growth(growths, base + "_growth.png")
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# toric
# ---------------------------------------------------------------------------


def cmd_toric(args):
    h = list(args.h)
    n = len(h)
    if args.init == "zero":
        transverse = TruncatedSeries.zero(n - 1, args.degree)
    else:
        transverse = load_series(args.init).with_degree(args.degree)
    init = ToricInitialData(transverse=transverse, h=tuple(h))
    u = solve_singular_ivp(init, args.degree)
    res = ma_residual(u, h)
    print(f"solved to degree {args.degree}; residual max |coeff| = "
          f"{res.max_abs_coeff():.3e}")
    if args.out:
        save_series(u, args.out)
        print(f"wrote series to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# resonance
# ---------------------------------------------------------------------------


def cmd_resonance(args):
    data = holodata.EigenData.parse(args.h)
    res = holodata.resonances(data)
    lat = holodata.lattice_basis(data)
    print(f"eigenvalues: {[str(x) for x in data.h]}")
    print(f"d_h = {res.d_h} resonance pairs (n = {data.n})")
    if args.verbose:
        for i, k in res.pairs:
            print(f"  axis {i + 1}: k = {k}")
    print(f"relation lattice rank {lat.rank}, q_rank {lat.q_rank}")
    for vec in lat.basis:
        print(f"  basis {list(vec)}")
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="soliton",
        description="closed-form soliton families, identity checks and series solving",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="tabulate a family along real rays")
    _add_family_args(gen)
    gen.add_argument("--rmax", type=float, default=3.0, help="ray endpoint per axis")
    gen.add_argument("--grid", type=int, default=25, help="samples per axis")
    gen.add_argument("--out", default="gen_out", help="output directory")
    gen.add_argument("--plots", action="store_true", help="also render figures")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="run identity checks")
    _add_family_args(ver)
    ver.add_argument(
        "--checks",
        default="all",
        help="comma list from %s or 'all'" % ",".join(CHECK_NAMES),
    )
    ver.add_argument(
        "--series", default=None, help="check a saved series file instead of a family"
    )
    ver.add_argument(
        "--orbit-steps", type=int, default=2000, help="integrator steps per orbit"
    )
    ver.add_argument("--out", default=None, help="write a JSON report here")
    ver.add_argument("--plots", action="store_true", help="also render figures")
    ver.set_defaults(func=cmd_verify)

    tor = sub.add_parser("toric", help="solve the reduced equation as a series")
    tor.add_argument(
        "--h", type=float, nargs="+", required=True, help="field eigenvalues"
    )
    tor.add_argument("--degree", type=int, default=8, help="series degree cap")
    tor.add_argument(
        "--init",
        default="zero",
        help="'zero' or a saved series file with the transverse initial data",
    )
    tor.add_argument("--out", default=None, help="write the solved series here")
    tor.set_defaults(func=cmd_toric)

    reso = sub.add_parser("resonance", help="resonance count of rational eigenvalues")
    reso.add_argument(
        "--h", nargs="+", required=True, help="eigenvalues as exact rationals (e.g. 2/3)"
    )
    reso.add_argument("--verbose", action="store_true", help="list every pair")
    reso.set_defaults(func=cmd_resonance)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if exc.code is not None else 0
        return 0 if code == 0 else 2
    try:
        return args.func(args)
    except DomainViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        InvalidParam,
        IrrationalInput,
        NonPositiveEigenvalue,
        ShapeMismatch,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolitonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
