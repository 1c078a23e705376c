"""Command-line front end.

Subcommands
-----------
kernel    tabulate the rescaled fourth-order heat kernel, fit its tail decay
spectrum  Gram matrix, eigen-residuals, adjoint polynomials of the drift operator
evolve    linear evolution of initial data and a decay-rate fit
branch    solvability coefficients / bifurcation root systems at mode k
continue  families of self-similar profiles across a list of mobility exponents
diagnose  accuracy table for the small-exponent expansion |f|^n ~ 1 + n ln|f|

Exit codes: 0 success, 2 numerical failure, 3 configuration error.

Every output is a flat file (JSON with sorted keys, CSV with comma separator
and 17 significant digits) and contains no timestamps or machine identifiers:
rerunning a command reproduces each file byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import branching, profiles, semigroup, spectral
from .config import RunConfig
from .errors import ConfigError, ContinuumDetected, NumericalError, ThinflowError
from .kernel import (D_RATE_EXACT, Grid, eval_kernel, kernel_mass,
                     kernel_slice_1d, multi_indices)


# ---------------------------------------------------------------------------
# small deterministic-output helpers


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: str, payload) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else _fmt(c) for c in row))
    return "\n".join(lines) + "\n"


def _jsonable(obj):
    """Recursively coerce numpy scalars/arrays so json.dumps accepts them."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(cfg: RunConfig, args, out: str) -> int:
    table = eval_kernel(cfg.dimension, cfg.grid(), cfg.kmax, cfg.quad())
    mass = kernel_mass(table)
    d_fit = table.decay[1]
    report = {
        "dimension": cfg.dimension,
        "grid": cfg.grid().to_dict(),
        "kmax": cfg.kmax,
        "orders_tabulated": len(table.values),
        "mass": mass,
        "mass_deviation": abs(mass - 1.0),
        "decay_amplitude": table.decay[0],
        "decay_rate_fit": d_fit,
        "decay_rate_exact": D_RATE_EXACT,
        "decay_rate_ratio": d_fit / D_RATE_EXACT,
        "tail_estimate": math.exp(-d_fit * cfg.R ** (4.0 / 3.0)),
    }
    _write_text(os.path.join(out, "kernel_table.json"), table.to_json() + "\n")
    _write_text(os.path.join(out, "kernel_values.csv"),
                table.slice_csv((0,) * cfg.dimension))
    _write_json(os.path.join(out, "decay_report.json"), _jsonable(report))
    if args.strict and report["mass_deviation"] > 1e-6:
        raise NumericalError(
            f"kernel mass deviates by {report['mass_deviation']:.3e} > 1e-06")
    print(f"kernel: mass deviation {report['mass_deviation']:.3e}, "
          f"decay rate {d_fit:.6f} (exact {D_RATE_EXACT:.6f}); "
          f"3 files in {out}")
    return 0


def cmd_spectrum(cfg: RunConfig, args, out: str) -> int:
    grid = cfg.grid()
    table = eval_kernel(cfg.dimension, grid, cfg.kmax, cfg.quad())
    gram, labels, gram_report = spectral.orthogonality_matrix(cfg.kmax, table)
    mask = spectral.inner_mask(grid)

    resid_rows = []
    worst = 0.0
    for beta in multi_indices(cfg.dimension, cfg.kmax):
        psi = spectral.eigenfunction(beta, table)
        mu = -sum(beta) / 4.0
        resid = spectral.apply_B(psi, grid) - mu * psi
        scale = float(np.max(np.abs(psi[mask])))
        rel = float(np.max(np.abs(resid[mask]))) / scale
        worst = max(worst, rel)
        resid_rows.append([".".join(map(str, beta)), mu, rel])

    polys = {}
    adjoint_exact = {}
    for beta in multi_indices(cfg.dimension, cfg.kmax):
        p = spectral.adjoint_polynomial(beta)
        polys[".".join(map(str, beta))] = p.to_json_dict()
        lhs = spectral.apply_B_star(p)
        rhs = p.scale(Fraction(-sum(beta), 4))
        adjoint_exact[".".join(map(str, beta))] = lhs.terms == rhs.terms

    sizes = [sum(1 for b in multi_indices(cfg.dimension, cfg.kmax) if sum(b) == k)
             for k in range(cfg.kmax + 1)]
    report = {
        "dimension": cfg.dimension,
        "kmax": cfg.kmax,
        "gram_max_diag_deviation": gram_report["max_diag_dev"],
        "gram_max_offdiag": gram_report["max_offdiag"],
        "gram_identity_deviation": max(gram_report["max_diag_dev"],
                                       gram_report["max_offdiag"]),
        "max_eigen_residual": worst,
        "adjoint_identity_exact": adjoint_exact,
        "eigenspace_sizes": sizes,
    }
    _write_text(os.path.join(out, "gram.csv"), spectral.gram_csv(gram, labels))
    _write_text(os.path.join(out, "eigen_residuals.csv"),
                _csv(["beta", "eigenvalue", "relative_residual"], resid_rows))
    _write_json(os.path.join(out, "adjoint_polynomials.json"), _jsonable(polys))
    _write_json(os.path.join(out, "spectrum_report.json"), _jsonable(report))
    if args.strict and worst > cfg.resid_tol:
        raise NumericalError(
            f"eigen-residual {worst:.3e} exceeds resid_tol {cfg.resid_tol:.1e}")
    print(f"spectrum: |G - I| <= {report['gram_identity_deviation']:.3e}, "
          f"max eigen-residual {worst:.3e}; 4 files in {out}")
    return 0


def _parse_data_spec(spec: str, grid: Grid):
    """'fd-cancelled:k' or 'gaussian' -> (u0 array, expected decay or None)."""
    if spec == "gaussian":
        return semigroup.gaussian(grid), None
    if spec.startswith("fd-cancelled:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"data: bad mode count in {spec!r}") from None
        if k < 1:
            raise ConfigError(f"data: mode count must be >= 1, got {k}")
        return semigroup.fd_cancelled_gaussian(grid, k), -k / 4.0
    raise ConfigError(
        f"data: expected 'gaussian' or 'fd-cancelled:<k>', got {spec!r}")


def cmd_evolve(cfg: RunConfig, args, out: str) -> int:
    grid = cfg.grid()
    table = eval_kernel(cfg.dimension, grid, cfg.kmax, cfg.quad())
    u0, expected = _parse_data_spec(args.data, grid)
    taus = [float(t) for t in args.taus]
    if any(t < 0 for t in taus) or len(taus) < 3:
        raise ConfigError("taus: need at least three non-negative log-times")
    fit = semigroup.decay_rate_fit(u0, taus, table, route=args.route)
    report = {
        "data": args.data,
        "route": args.route,
        "taus": list(fit["taus"]),
        "lambda_fit": fit["lambda_fit"],
        "intercept": fit["intercept"],
        "expected_rate": expected,
    }
    if expected is not None:
        report["relative_error"] = abs(fit["lambda_fit"] - expected) / abs(expected)
    _write_text(os.path.join(out, "evolve_norms.csv"),
                _csv(["tau", "weighted_l2_norm"],
                     zip(fit["taus"], fit["norms"])))
    _write_json(os.path.join(out, "evolve_report.json"), _jsonable(report))
    if args.strict and expected is not None and report["relative_error"] > 0.05:
        raise NumericalError(
            f"fitted decay rate {fit['lambda_fit']:.6f} off the expected "
            f"{expected:.6f} by more than 5%")
    print(f"evolve: lambda_fit = {fit['lambda_fit']:.6f}"
          + (f" (expected {expected:.3f})" if expected is not None else "")
          + f"; 2 files in {out}")
    return 0


def cmd_branch(cfg: RunConfig, args, out: str) -> int:
    k, kind = args.k, args.kind
    if k < 0:
        raise ConfigError(f"k: must be >= 0, got {k}")
    K = min(8, max(cfg.kmax, k + 3))
    table = eval_kernel(cfg.dimension, cfg.grid(), K, cfg.quad())
    report: dict = {"k": k, "kind": kind, "dimension": cfg.dimension}

    if cfg.dimension == 1:
        rep = branching.assemble_simple_solvability(k, kind, args.eta, table)
        report["solvability"] = rep.to_dict()
        headline = f"first-order coefficient {float(rep.coefficient):.10f}"
    else:
        sys_ = branching.assemble_semisimple_system(k, kind, table, eta=args.eta)
        report["system"] = sys_.to_dict()
        header, rows = branching.sample_forms(sys_)
        _write_text(os.path.join(out, "branch_forms.csv"), _csv(header, rows))
        if k == 1:
            try:
                roots = branching.solve_quadratic_branch(sys_)
                report["roots"] = roots.to_dict()
                headline = (f"{len(roots.roots)} certified root(s), "
                            f"conditions {roots.conditions}")
            except ContinuumDetected as exc:
                report["continuum"] = str(exc)
                headline = "continuum of solutions (degenerate system)"
        else:
            try:
                inter = branching.intersect_conics(sys_.equations[0],
                                                   sys_.equations[1],
                                                   noise=sys_.noise_scale)
                report["intersection"] = inter.to_dict()
                headline = f"{inter.count} certified intersection(s)"
            except ContinuumDetected as exc:
                report["continuum"] = str(exc)
                headline = "continuum of solutions (degenerate system)"
            scan = branching.dense_conic_scan(sys_.equations[0],
                                              sys_.equations[1],
                                              tol=sys_.noise_scale)
            report["dense_scan"] = scan

    _write_json(os.path.join(out, "branch_report.json"), _jsonable(report))
    print(f"branch k={k} ({kind}, N={cfg.dimension}): {headline}; "
          f"report in {out}")
    return 0


def cmd_continue(cfg: RunConfig, args, out: str) -> int:
    k, kind = args.k, args.kind
    family = profiles.continuation_family(kind, k, list(cfg.n_list),
                                          N=cfg.dimension,
                                          threads=args.threads)
    summary_rows = []
    entries = []
    for prof in family:
        tag = f"{kind}_k{k}_n{prof.n:g}".replace(".", "p")
        _write_text(os.path.join(out, f"profile_{tag}.csv"),
                    _csv(["y", "f"], zip(prof.grid.axis, prof.f)))
        dist = prof.diagnostics.get("sup_distance_limit")
        summary_rows.append([
            prof.n, prof.alpha, prof.beta_exp,
            prof.interface_radius if prof.interface_radius is not None
            else float("nan"),
            float(prof.zero_count),
            prof.growth_exponent if prof.growth_exponent is not None
            else float("nan"),
            dist if dist is not None else float("nan"),
        ])
        entries.append({
            "n": prof.n, "alpha": prof.alpha, "beta": prof.beta_exp,
            "kind": prof.kind, "k": prof.k,
            "interface_radius": prof.interface_radius,
            "zero_count": prof.zero_count,
            "growth_exponent": prof.growth_exponent,
            "limit_distance": dist,
        })
    _write_text(os.path.join(out, "branch_summary.csv"),
                _csv(["n", "alpha", "beta", "interface_radius", "zero_count",
                      "growth_exponent", "limit_distance"], summary_rows))
    _write_json(os.path.join(out, "continue_report.json"),
                _jsonable({"kind": kind, "k": k, "profiles": entries}))
    dists = [e["limit_distance"] for e in entries
             if e["limit_distance"] is not None]
    monotone = all(a >= b for a, b in zip(dists, dists[1:]))
    print(f"continue ({kind}, k={k}): {len(entries)} profiles, "
          f"limit distance monotone: {monotone}; files in {out}")
    return 0


def cmd_diagnose(cfg: RunConfig, args, out: str) -> int:
    grid = Grid(1, cfg.h, cfg.R, radial=True)
    f = kernel_slice_1d(grid.axis, 0, cfg.quad())
    n_desc = sorted(cfg.n_list, reverse=True)
    rows = profiles.expansion_diagnostic(f, n_desc, grid)
    csv_rows = []
    for row in rows:
        bound = (1.0 / row["n"]) * math.exp(-1.0 / row["n"])
        row["excluded_bound"] = bound
        csv_rows.append([row["n"], row["l1_error"], row["second_order_ratio"],
                         row["excluded_measure"], bound])
    ratios = [row["second_order_ratio"] for row in rows]
    drift = max((abs(b - a) / abs(a) for a, b in zip(ratios, ratios[1:])),
                default=0.0)
    report = {"n_list": list(n_desc), "rows": rows,
              "max_ratio_drift": drift}
    _write_text(os.path.join(out, "diagnose.csv"),
                _csv(["n", "l1_error", "second_order_ratio",
                      "excluded_measure", "excluded_bound"], csv_rows))
    _write_json(os.path.join(out, "diagnose_report.json"), _jsonable(report))
    if args.strict and drift > 0.2:
        raise NumericalError(
            f"second-order ratio drifts by {drift:.1%} > 20% under halving")
    print(f"diagnose: ratio drift {drift:.2%} across {len(rows)} exponents; "
          f"2 files in {out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors raise ConfigError (CLI exit code 3)."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="thinflow",
                     description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--dump-defaults", action="store_true",
                        help="print the default configuration file and exit")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=None,
                        help="configuration file (YAML); defaults used if absent")
    common.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default: out_dir from config)")
    common.add_argument("--strict", action="store_true",
                        help="fail (exit 2) when a headline tolerance is breached")
    common.add_argument("--threads", type=int, default=1, metavar="N",
                        help="worker threads for embarrassingly parallel sweeps")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("kernel", parents=[common],
                       help="tabulate the kernel and fit its tail decay")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("spectrum", parents=[common],
                       help="Gram matrix, eigen-residuals, adjoint polynomials")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", parents=[common],
                       help="evolve initial data and fit the decay rate")
    p.add_argument("--data", default="fd-cancelled:1",
                   help="'gaussian' or 'fd-cancelled:<k>' (default)")
    p.add_argument("--route", choices=("convolution", "spectral"),
                   default="convolution")
    p.add_argument("--taus", type=float, nargs="+",
                   default=[2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0],
                   help="log-times for the decay fit")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("branch", parents=[common],
                       help="solvability / bifurcation system at mode k")
    p.add_argument("--k", type=int, default=1, help="mode number (default 1)")
    p.add_argument("--kind", choices=("global", "blowup"), default="global")
    p.add_argument("--eta", type=float, default=1.0,
                   help="free first-order coefficient where one exists")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("continue", parents=[common],
                       help="self-similar profile family over the config n-list")
    p.add_argument("--k", type=int, default=0, help="mode number (default 0)")
    p.add_argument("--kind", choices=("global", "blowup"), default="global")
    p.set_defaults(func=cmd_continue)

    p = sub.add_parser("diagnose", parents=[common],
                       help="small-exponent expansion accuracy table")
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.dump_defaults:
            sys.stdout.write(RunConfig().to_yaml())
            return 0
        if args.command is None:
            raise ConfigError("no subcommand given (try --help)")
        if args.threads < 1:
            raise ConfigError(f"threads: must be >= 1, got {args.threads}")
        cfg = (RunConfig.from_file(args.config) if args.config
               else RunConfig()).validate()
        out = args.out or cfg.out_dir
        os.makedirs(out, exist_ok=True)
        return args.func(cfg, args, out)
    except ConfigError as exc:
        print(f"thinflow: configuration error: {exc}", file=sys.stderr)
        return 3
    except ThinflowError as exc:
        print(f"thinflow: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
