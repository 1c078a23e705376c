"""First-order branching of similarity profiles off the linear spectrum.

At n = 0 the self-similar profile equations linearize around the kernel
eigenfunctions, and the O(n) correction is fixed by Fredholm solvability:
pair the right-hand side against the (bi)orthogonal eigenfunction(s) of the
adjoint.  For a simple eigenvalue this yields one scalar coefficient
(``gamma01``/``mu10`` and friends); on a multiple eigenvalue the pairing
produces a small algebraic system in the mixing coefficients c_i, which after
normalization (sum c_i = 1) reduces to one quadratic (two-fold level) or a
pair of conics (three-fold level).

Everything here is plain trapezoid quadrature against a :class:`KernelTable`
plus exact polynomial arithmetic for the adjoints.  The logarithmic weights
ln|combo| that appear at first order are handled by `log_weighted_integral`,
which evaluates both an integrated-by-parts form (log undifferentiated, the
stable route) and a direct divergence form, excludes the set where the
combination is below exp(-1/n_floor), and reports the excluded measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    AllZeroQuadraticPart,
    ConfigError,
    ContinuumDetected,
    OrderExceeded,
    ThickNodalSet,
    UnsupportedDimension,
    VanishingDenominator,
)
from .kernel import Grid, KernelTable, multi_indices
from .spectral import (
    _D1,
    _D2,
    _conv_axis,
    SparsePolynomial,
    adjoint_polynomial,
    eigenfunction,
    inner_mask,
    inner_product,
)

N_FLOOR = 0.05          # smallest n the log linearization is trusted for
DENOM_TOL = 1e-8        # solvability denominators below this are "vanishing"
COND_LIMIT = 1e8        # resultant-root condition number considered unusable


class ReportedValue(float):
    """A float carrying a diagnostics dict in ``.report``."""

    def __new__(cls, value: float, report: dict | None = None):
        obj = super().__new__(cls, value)
        obj.report = dict(report or {})
        return obj


# --------------------------------------------------------------------------
# log-weighted pairings
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LogIntegralResult:
    """Both quadrature forms of <adjoint, div(ln|combo| grad lap target)>."""

    value: float
    ibp: float | None
    direct: float | None
    discrepancy: float | None
    excluded_fraction: float
    nodal_fraction: float
    excluded_bound: float

    def to_dict(self) -> dict:
        return {
            "value": self.value, "ibp": self.ibp, "direct": self.direct,
            "discrepancy": self.discrepancy,
            "excluded_fraction": self.excluded_fraction,
            "nodal_fraction": self.nodal_fraction,
            "excluded_bound": self.excluded_bound,
        }


def _values(obj, grid: Grid) -> np.ndarray:
    if isinstance(obj, SparsePolynomial):
        return obj.evaluate(grid)
    return np.asarray(obj, dtype=float)


def _zero_result(nodal_fraction: float = 0.0,
                 n_floor: float = N_FLOOR) -> LogIntegralResult:
    bound = (1.0 / n_floor) * math.exp(-1.0 / n_floor)
    return LogIntegralResult(0.0, 0.0, 0.0, 0.0, 0.0, nodal_fraction, bound)


def log_weighted_integral(adjoint_grad_or_fn, combo, target, grid: Grid, *,
                          target_grad_lap=None, adjoint_grad=None,
                          n_floor: float = N_FLOOR, thick_tol: float = 1e-3,
                          nodal_cut: float = 1e-12) -> LogIntegralResult:
    """Pair an adjoint mode with div(ln|combo| * grad lap target).

    Two quadrature routes are evaluated and both reported:

    * ``ibp``    -- -integral grad(adjoint) . ln|combo| grad(lap target),
      the stable form (the log stays undifferentiated);
    * ``direct`` -- integral adjoint * div(ln|combo| grad lap target), with
      the divergence taken by centered finite differences.

    The integrand is dropped on the set |combo| < exp(-1/n_floor); the
    fraction of excluded nodes is reported together with the sup bound
    (1/n_floor) exp(-1/n_floor) for the linearization error the exclusion can
    hide.  Near-zero nodes (|combo| below ``nodal_cut`` relative to the sup
    of |combo|) are harmless where the zero is transversal -- the log is
    integrable across a simple zero curve -- so a node only counts as
    degenerate when the gradient cannot lift the value above the cut within
    one grid step *and* the companion field grad(lap target) is
    non-negligible there (flat patches out in the exponentially small tail
    carry no weight).  If degenerate nodes cover more than ``thick_tol`` of
    the grid (default 0.1%) the combination is flat on a set the quadrature
    sees as positive measure and :class:`ThickNodalSet` is raised.

    ``adjoint_grad_or_fn`` may be samples of the adjoint, a
    :class:`SparsePolynomial` (exact gradient), or a tuple of gradient
    component arrays (then only the ibp form is available).  ``target`` may be
    samples, a polynomial, or None when ``target_grad_lap`` supplies the
    components of grad(lap target) directly (e.g. kernel-table slices).
    """
    ndim = grid.dimension
    h = grid.h
    combo_vals = _values(combo, grid)
    absc = np.abs(combo_vals)
    scale = float(np.max(absc))
    if scale == 0.0:
        raise ThickNodalSet("combination is identically zero on the grid")

    # grad(lap target)
    if target_grad_lap is not None:
        comps = [np.asarray(c, dtype=float) for c in target_grad_lap]
    elif isinstance(target, SparsePolynomial):
        lap = target.laplacian()
        comps = [lap.derivative(ax).evaluate(grid) for ax in range(ndim)]
    elif target is not None:
        tv = np.asarray(target, dtype=float)
        lap = sum(_conv_axis(tv, _D2, h, 2, ax) for ax in range(ndim))
        comps = [_conv_axis(lap, _D1, h, 1, ax) for ax in range(ndim)]
    else:
        raise ConfigError("either target or target_grad_lap is required")

    cut = nodal_cut * scale
    nodal = absc < cut
    nodal_fraction = float(np.mean(nodal))
    if nodal_fraction > thick_tol:
        gmax = np.zeros_like(absc)
        for ax in range(ndim):
            np.maximum(gmax, np.abs(_conv_axis(combo_vals, _D1, h, 1, ax)),
                       out=gmax)
        wmax = np.zeros_like(absc)
        for c in comps:
            np.maximum(wmax, np.abs(c), out=wmax)
        wtop = float(np.max(wmax))
        degenerate = nodal & (gmax * h < cut)
        if wtop > 0.0:
            degenerate &= wmax > 1e-9 * wtop
        deg_fraction = float(np.mean(degenerate))
        if deg_fraction > thick_tol:
            raise ThickNodalSet(
                f"combination is flat below {cut:.2e} on "
                f"{100 * deg_fraction:.3f}% of weight-bearing nodes "
                f"(> {100 * thick_tol:.2f}%)")
    floor = math.exp(-1.0 / n_floor)
    keep = absc >= floor
    excluded_fraction = float(1.0 - np.mean(keep))
    lnvals = np.where(keep, np.log(np.where(keep, absc, 1.0)), 0.0)
    weighted = [lnvals * c for c in comps]

    # adjoint: function and/or gradient
    adj_fn = None
    grads = None
    if isinstance(adjoint_grad_or_fn, SparsePolynomial):
        adj_fn = adjoint_grad_or_fn.evaluate(grid)
        grads = [adjoint_grad_or_fn.derivative(ax).evaluate(grid)
                 for ax in range(ndim)]
    elif isinstance(adjoint_grad_or_fn, (tuple, list)):
        grads = [np.asarray(g, dtype=float) for g in adjoint_grad_or_fn]
    else:
        adj_fn = np.asarray(adjoint_grad_or_fn, dtype=float)
    if adjoint_grad is not None:
        grads = [np.asarray(g, dtype=float) for g in adjoint_grad]
    if grads is None:
        grads = [_conv_axis(adj_fn, _D1, h, 1, ax) for ax in range(ndim)]

    ibp = -sum(inner_product(grads[ax], weighted[ax], grid)
               for ax in range(ndim))
    direct = None
    if adj_fn is not None:
        div = sum(_conv_axis(weighted[ax], _D1, h, 1, ax)
                  for ax in range(ndim))
        direct = inner_product(adj_fn, div, grid)
    grads_vanish = all(not np.any(g) for g in grads)
    value = direct if (grads_vanish and direct is not None) else ibp
    discrepancy = None if direct is None else abs(direct - ibp)
    bound = (1.0 / n_floor) * math.exp(-1.0 / n_floor)
    return LogIntegralResult(float(value), float(ibp),
                             None if direct is None else float(direct),
                             discrepancy, excluded_fraction, nodal_fraction,
                             bound)


# --------------------------------------------------------------------------
# eigenfunction derivative slices
# --------------------------------------------------------------------------

def _eig_sign(beta: tuple[int, ...]) -> float:
    norm = 1
    for c in beta:
        norm *= math.factorial(c)
    return (-1.0) ** sum(beta) / math.sqrt(norm)


def _shift(beta: tuple[int, ...], ax: int, by: int = 1) -> tuple[int, ...]:
    out = list(beta)
    out[ax] += by
    return tuple(out)


def eigen_gradient(beta: tuple[int, ...], table: KernelTable) -> list[np.ndarray]:
    """Components of grad psi_beta from kernel-table slices."""
    s = _eig_sign(beta)
    return [s * table.slice(_shift(beta, ax))
            for ax in range(table.grid.dimension)]


def eigen_grad_lap(beta: tuple[int, ...], table: KernelTable) -> list[np.ndarray]:
    """Components of grad(lap psi_beta) from kernel-table slices."""
    s = _eig_sign(beta)
    ndim = table.grid.dimension
    comps = []
    for ax in range(ndim):
        acc = np.zeros_like(table.slice(beta))
        for d in range(ndim):
            acc = acc + table.slice(_shift(_shift(beta, ax), d, 2))
        comps.append(s * acc)
    return comps


def _euler_values(table: KernelTable, beta: tuple[int, ...]) -> np.ndarray:
    """Samples of y . grad psi_beta."""
    meshes = table.grid.meshes()
    grad = eigen_gradient(beta, table)
    out = np.zeros_like(grad[0])
    for ax in range(table.grid.dimension):
        out = out + meshes[ax] * grad[ax]
    return out


def _one(ndim: int) -> SparsePolynomial:
    return SparsePolynomial(ndim, {(0,) * ndim: Fraction(1)})


# --------------------------------------------------------------------------
# simple-eigenvalue solvability coefficients
# --------------------------------------------------------------------------

def gamma01(eta01: float, table: KernelTable) -> ReportedValue:
    """First-order coefficient of the mass branch, eta / denominator.

    The denominator is (N/16) <1, y.grad F> plus the pairing of the constant
    adjoint with div(ln|F| grad lap F); the latter is a pure divergence of an
    integrable field, hence numerically near zero, and is evaluated in the
    direct form (the ibp form is identically zero against a constant).
    """
    grid = table.grid
    ndim = grid.dimension
    dipole = inner_product(_euler_values(table, (0,) * ndim), _one(ndim), grid)
    kernel_vals = table.slice((0,) * ndim)
    comps = eigen_grad_lap((0,) * ndim, table)
    log_res = log_weighted_integral(_one(ndim), kernel_vals, None, grid,
                                    target_grad_lap=comps)
    denom = (ndim / 16.0) * dipole + log_res.value
    if abs(denom) <= DENOM_TOL:
        raise VanishingDenominator(
            f"solvability denominator {denom:.3e} below {DENOM_TOL:.1e}")
    return ReportedValue(eta01 / denom, {
        "denominator": denom,
        "dipole": dipole,
        "log_term": log_res.to_dict(),
        "eta": eta01,
    })


def _mu_blowup(k: int, table: KernelTable,
               thick_tol: float | None = None) -> ReportedValue:
    """mu_{1,k} = -(L + (k/16) <y.grad psi*_k, psi_k>) / <psi*_k, psi_k>.

    L is the log pairing <div(ln|psi*_k| grad lap psi*_k), psi_k>.  The Euler
    pairing equals k <psi*_k, psi_k> exactly (y.grad scales the leading
    monomial by k, and the lower-degree corrections pair to zero), and the
    normalization <psi*_k, psi_k> = 1 is exact by construction, so the only
    transcendental input is L; the quadrature value of the norm is reported
    as a truncation cross-check rather than divided into the answer.
    """
    grid = table.grid
    if grid.dimension != 1:
        raise UnsupportedDimension(
            "simple blow-up levels are one-dimensional; use the semisimple "
            "assembler for N=2")
    psi_star = adjoint_polynomial((k,))
    psi_k = eigenfunction((k,), table)
    ip = inner_product(psi_k, psi_star, grid)
    euler_quad = inner_product(psi_k, psi_star.euler(), grid)
    lap_grad = psi_star.laplacian().derivative(0)
    if not lap_grad.terms:
        log_res = _zero_result()
        note = "log term vanishes (grad lap of the adjoint is zero)"
    else:
        log_res = log_weighted_integral(
            psi_k, psi_star, psi_star, grid,
            adjoint_grad=eigen_gradient((k,), table),
            thick_tol=thick_tol if thick_tol is not None else 1e-3)
        note = "log pairing taken in ibp form"
    mu = -log_res.value - k * k / 16.0
    residual = abs(log_res.value + (k / 16.0) * euler_quad + mu * ip)
    return ReportedValue(mu, {
        "log_term": log_res.to_dict(),
        "pairing_norm": ip,
        "euler_pairing_quadrature": euler_quad,
        "euler_pairing_exact": k * ip,
        "residual": residual,
        "note": note,
    })


def mu10(table: KernelTable) -> ReportedValue:
    """First-order coefficient of the trivial blow-up level (k = 0).

    Computed through the same machinery as every other level; the constant
    adjoint kills both the log weight and grad lap, so the value is an exact
    quadrature zero rather than a hard-coded one.
    """
    return _mu_blowup(0, table)


def transversality_check(table: KernelTable) -> ReportedValue:
    """<1, -(N/16) y.grad F - (N^2/16) F>, assembled as one integrand.

    The integrand is -(N/16) div(y F), a pure divergence, so the pairing
    vanishes up to the truncated boundary flux.  Keeping it as a single
    combined integrand preserves that cancellation on the grid.
    """
    grid = table.grid
    ndim = grid.dimension
    combined = (-(ndim / 16.0) * _euler_values(table, (0,) * ndim)
                - (ndim * ndim / 16.0) * table.slice((0,) * ndim))
    val = inner_product(combined, _one(ndim), grid)
    return ReportedValue(val, {"integrand_linf": float(np.max(np.abs(combined)))})


@dataclass(frozen=True)
class SolvabilityReport:
    """Scalar Fredholm solvability outcome at a simple eigenvalue."""

    k: int
    kind: str
    coefficient: float
    pairing_norm: float
    residual: float
    denominator: float | None
    transversality: float | None
    log: LogIntegralResult
    eta: float | None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "k": self.k, "kind": self.kind, "coefficient": self.coefficient,
            "pairing_norm": self.pairing_norm, "residual": self.residual,
            "denominator": self.denominator,
            "transversality": self.transversality,
            "log": self.log.to_dict(), "eta": self.eta,
            "notes": list(self.notes),
        }


def assemble_simple_solvability(k: int, kind: str, eta_or_free: float | None,
                                table: KernelTable) -> SolvabilityReport:
    """Solve the first-order solvability condition at a simple eigenvalue.

    kind='global' returns gamma_{k,1} = eta / D_k with
    D_k = ((N+k)/16) <psi*_k, y.grad psi_k> + <psi*_k, div(ln|psi_k| grad lap
    psi_k)>; kind='blowup' returns mu_{1,k} (see `_mu_blowup`).  In two
    dimensions only k = 0 is simple.
    """
    grid = table.grid
    ndim = grid.dimension
    if kind not in ("global", "blowup"):
        raise ConfigError(f"kind must be 'global' or 'blowup', got {kind!r}")
    if k < 0:
        raise ConfigError("level index k must be non-negative")
    if ndim == 2 and k > 0:
        raise ConfigError(
            "levels k >= 1 are not simple in two dimensions; "
            "use assemble_semisimple_system")

    if kind == "blowup":
        mu = _mu_blowup(k, table)
        rep = mu.report
        log_res = LogIntegralResult(**rep["log_term"])
        return SolvabilityReport(
            k=k, kind=kind, coefficient=float(mu),
            pairing_norm=rep["pairing_norm"], residual=rep["residual"],
            denominator=None, transversality=None, log=log_res, eta=None,
            notes=(rep["note"],))

    eta = 1.0 if eta_or_free is None else float(eta_or_free)
    beta = (k,) if ndim == 1 else (0, 0)
    psi_star = adjoint_polynomial(beta)
    euler_k = sum(m * g for m, g in zip(grid.meshes(),
                                        eigen_gradient(beta, table)))
    dipole = inner_product(euler_k, psi_star, grid)
    combo = eigenfunction(beta, table)
    log_res = log_weighted_integral(psi_star, combo, None, grid,
                                    target_grad_lap=eigen_grad_lap(beta, table))
    denom = ((ndim + k) / 16.0) * dipole + log_res.value
    if abs(denom) <= DENOM_TOL:
        raise VanishingDenominator(
            f"solvability denominator {denom:.3e} below {DENOM_TOL:.1e}")
    coeff = eta / denom
    residual = abs(coeff * denom - eta)
    trans = float(transversality_check(table)) if k == 0 else None
    return SolvabilityReport(
        k=k, kind=kind, coefficient=coeff,
        pairing_norm=inner_product(combo, psi_star, grid),
        residual=residual, denominator=denom, transversality=trans,
        log=log_res, eta=eta)


# --------------------------------------------------------------------------
# quadratic forms and conic systems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """q(u, v) = A u^2 + B v^2 + C u + D v + E u v + F0."""

    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    D: float = 0.0
    E: float = 0.0
    F0: float = 0.0

    @classmethod
    def univariate(cls, a: float, b: float, c: float) -> "QuadraticForm":
        """a u^2 + b u + c."""
        return cls(A=a, C=b, F0=c)

    def __call__(self, u, v=0.0):
        return (self.A * u * u + self.B * v * v + self.C * u + self.D * v
                + self.E * u * v + self.F0)

    def as_univariate(self) -> tuple[float, float, float]:
        if any(abs(x) > 0 for x in (self.B, self.D, self.E)):
            raise ConfigError("form depends on the second unknown")
        return self.A, self.C, self.F0

    @property
    def standard(self) -> tuple[float, float, float, float, float, float]:
        """(x^2, xy, y^2, x, y, 1) coefficient order."""
        return (self.A, self.E, self.B, self.C, self.D, self.F0)

    def max_abs(self) -> float:
        return max(abs(x) for x in
                   (self.A, self.B, self.C, self.D, self.E, self.F0))

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D,
                "E": self.E, "F": self.F0}


def _affine_mul(p: tuple[float, float, float],
                q: tuple[float, float, float]) -> QuadraticForm:
    """(p0 + pu u + pv v) * (q0 + qu u + qv v) as a QuadraticForm."""
    p0, pu, pv = p
    q0, qu, qv = q
    return QuadraticForm(
        A=pu * qu, B=pv * qv, C=p0 * qu + pu * q0, D=p0 * qv + pv * q0,
        E=pu * qv + pv * qu, F0=p0 * q0)


def _qf_sub(a: QuadraticForm, b: QuadraticForm) -> QuadraticForm:
    return QuadraticForm(a.A - b.A, a.B - b.B, a.C - b.C, a.D - b.D,
                         a.E - b.E, a.F0 - b.F0)


@dataclass(frozen=True)
class ConicSystem:
    """Reduced first-order system on a multiple eigenvalue.

    ``equations`` holds the polynomial (log-free) parts F_i after the
    normalization c_1 = 1 - sum c_i and elimination of the remaining scalar
    unknown (gamma for global, mu for blow-up); ``omega_sup`` bounds the
    dropped log-perturbation terms over the unit box in the c-unknowns.
    """

    k: int
    kind: str
    unknowns: tuple[str, ...]
    equations: tuple[QuadraticForm, ...]
    omega_sup: tuple[float, ...]
    omega_samples: tuple[tuple[float, ...], ...]
    excluded_samples: int
    gamma_star: float | None
    mu_star: float | None
    eta: float | None
    notes: dict = field(default_factory=dict)

    @property
    def noise_scale(self) -> float:
        return float(self.notes.get("noise_scale", 0.0))

    @property
    def degenerate_to_quadrature(self) -> bool:
        return bool(self.notes.get("degenerate_to_quadrature", False))

    def to_dict(self) -> dict:
        return {
            "k": self.k, "kind": self.kind, "unknowns": list(self.unknowns),
            "equations": [q.to_dict() for q in self.equations],
            "omega_sup": list(self.omega_sup),
            "excluded_samples": self.excluded_samples,
            "gamma_star": self.gamma_star, "mu_star": self.mu_star,
            "eta": self.eta,
            "notes": {k: v for k, v in self.notes.items()
                      if isinstance(v, (int, float, str, bool))},
        }


def _level_basis(k: int, table: KernelTable):
    idx = [b for b in multi_indices(2, k) if sum(b) == k]
    eig = [eigenfunction(b, table) for b in idx]
    adj = [adjoint_polynomial(b) for b in idx]
    return idx, eig, adj


def _c_affines(m: int) -> list[tuple[float, float, float]]:
    """c_1..c_m as affine functions of (u, v) under c_1 = 1 - sum."""
    if m == 2:
        return [(1.0, -1.0, 0.0), (0.0, 1.0, 0.0)]
    return [(1.0, -1.0, -1.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]


def _lattice(mdim: int, n: int) -> list[tuple[float, ...]]:
    ticks = np.linspace(0.0, 1.0, n)
    if mdim == 1:
        return [(float(t),) for t in ticks]
    return [(float(a), float(b)) for a in ticks for b in ticks]


def assemble_semisimple_system(k: int, kind: str, table: KernelTable, *,
                               eta: float = 1.0,
                               n_lattice: int = 5) -> ConicSystem:
    """Assemble the reduced quadratic system on the k-fold level in N = 2.

    The normalization c_1 = 1 - sum_{i>=2} c_i removes one unknown; the
    remaining scalar unknown (gamma for the global family, mu for blow-up) is
    eliminated through the summed solvability equation, leaving k quadratic
    equations in (c_2[, c_3]).  Logarithmic terms are collected into the
    perturbations omega_i, sampled on an ``n_lattice`` lattice over the unit
    box; lattice points where the combination degenerates (thick nodal set)
    are excluded and counted.
    """
    grid = table.grid
    if grid.dimension != 2:
        raise UnsupportedDimension("the multiple levels live in N = 2")
    if k not in (1, 2):
        raise ConfigError(f"semisimple assembly supports k in {{1, 2}}, got {k}")
    if kind not in ("global", "blowup"):
        raise ConfigError(f"kind must be 'global' or 'blowup', got {kind!r}")
    need = k + 3 if kind == "global" else k + 1
    if table.K < need:
        raise OrderExceeded(
            f"table order K={table.K} < {need} required for k={k} {kind}")

    idx, eig, adj = _level_basis(k, table)
    m = len(idx)
    caff = _c_affines(m)
    unknowns = ("c2",) if k == 1 else ("c2", "c3")
    meshes = grid.meshes()

    gram = np.array([[inner_product(eig[i], adj[j], grid)
                      for j in range(m)] for i in range(m)])

    if kind == "blowup":
        # t[i][j] = <psi_i, y.grad psi*_j>, with the adjoint gradients exact
        t = np.empty((m, m))
        t_ibp = np.empty((m, m))
        for j in range(m):
            ev = adj[j].euler().evaluate(grid)
            for i in range(m):
                t[i, j] = inner_product(eig[i], ev, grid)
                # same pairing moved onto the eigenfunction side:
                # <psi_i, y.grad psi*_j> = -N <psi*_j, psi_i> - <psi*_j, y.grad psi_i>
                t_ibp[i, j] = (-2.0 * gram[i, j]
                               - inner_product(_euler_values(table, idx[i]),
                                               adj[j], grid))
        two_route_dev = float(np.max(np.abs(t - t_ibp)))
        # grad lap of every degree<=2 adjoint is the zero polynomial, so the
        # log terms vanish identically and omega == 0 exactly
        lap_zero = all(not a.laplacian().derivative(ax).terms
                       for a in adj for ax in range(2))
        # eq_i(c, mu): (k/16) sum_j c_j t_ij + mu kappa_i(c) = 0 with
        # kappa_i = sum_j c_j gram[i, j]; mu eliminated via the summed
        # equation, then F_i = eq_i * (sum kappa) for i >= 2 is quadratic.
        lin_t = []      # coefficient of c-part of (k/16) (t c)_i as affine
        kappa = []
        for i in range(m):
            ti = tuple(sum((k / 16.0) * t[i, j] * caff[j][comp]
                           for j in range(m)) for comp in range(3))
            ki = tuple(sum(gram[i, j] * caff[j][comp] for j in range(m))
                       for comp in range(3))
            lin_t.append(ti)
            kappa.append(ki)
        sum_t = tuple(sum(lin_t[i][comp] for i in range(m)) for comp in range(3))
        sum_k = tuple(sum(kappa[i][comp] for i in range(m)) for comp in range(3))
        equations = []
        for i in range(1, m):
            fi = _qf_sub(_affine_mul(lin_t[i], sum_k),
                         _affine_mul(kappa[i], sum_t))
            equations.append(fi)
        # mu at the barycenter (the affine ratio -sum_t/sum_k there)
        bc = (1.0 / m,) * (m - 1) if m == 3 else (0.5,)
        u0 = bc[0]
        v0 = bc[1] if len(bc) > 1 else 0.0
        num = sum_t[0] + sum_t[1] * u0 + sum_t[2] * v0
        den = sum_k[0] + sum_k[1] * u0 + sum_k[2] * v0
        mu_star = -num / den
        dev = max(float(np.max(np.abs(t - k * np.eye(m)))),
                  float(np.max(np.abs(gram - np.eye(m)))))
        noise = 10.0 * max(k / 16.0, 1.0) * dev
        coeff_max = max(q.max_abs() for q in equations)
        if lap_zero:
            omega_sup = (0.0,) * len(equations)
            samples = ()
            excluded = 0
        else:  # pragma: no cover - not reachable for k <= 2
            omega_sup = (math.nan,) * len(equations)
            samples = ()
            excluded = 0
        notes = {
            "noise_scale": noise,
            "degenerate_to_quadrature": bool(coeff_max < noise),
            "two_route_pairing_dev": two_route_dev,
            "coeff_max": coeff_max,
            "omega_identically_zero": lap_zero,
            "gram_dev": float(np.max(np.abs(gram - np.eye(m)))),
        }
        return ConicSystem(
            k=k, kind=kind, unknowns=unknowns, equations=tuple(equations),
            omega_sup=omega_sup, omega_samples=samples,
            excluded_samples=excluded, gamma_star=None, mu_star=mu_star,
            eta=None, notes=notes)

    # ---- global family ----------------------------------------------------
    # eq_i = gamma ((N+k)/16) (R c)_i + eta (S c)_i + gamma omega_i(c) with
    # R[i][j] = <psi*_i, y.grad psi_j>, S = gram^T
    R = np.empty((m, m))
    for j in range(m):
        ej = sum(mm * gg for mm, gg in zip(meshes,
                                           eigen_gradient(idx[j], table)))
        for i in range(m):
            R[i, j] = inner_product(ej, adj[i], grid)
    S = gram.T.copy()
    U = []
    V = []
    for i in range(m):
        ui = tuple(sum(((2 + k) / 16.0) * R[i, j] * caff[j][comp]
                       for j in range(m)) for comp in range(3))
        vi = tuple(sum(S[i, j] * caff[j][comp] for j in range(m))
                   for comp in range(3))
        U.append(ui)
        V.append(vi)
    dev_R = float(np.max(np.abs(R + (2 + k) * S)))
    dev_S = float(np.max(np.abs(S - np.eye(m))))
    noise = 10.0 * max(((2 + k) / 16.0) * dev_R, abs(eta) * dev_S)

    if k == 1:
        # two equations, unknowns (gamma, c2): eliminate c2 for the gamma
        # quadratic and gamma for the c2 quadratic
        a = [U[i][1] for i in range(2)]
        d = [U[i][0] for i in range(2)]
        b = [V[i][1] for i in range(2)]
        e = [V[i][0] for i in range(2)]
        f_gamma = QuadraticForm.univariate(
            a[0] * d[1] - a[1] * d[0],
            eta * (b[0] * d[1] + a[0] * e[1] - b[1] * d[0] - a[1] * e[0]),
            eta * eta * (b[0] * e[1] - b[1] * e[0]))
        g_c2 = QuadraticForm.univariate(
            b[0] * a[1] - b[1] * a[0],
            b[0] * d[1] + e[0] * a[1] - b[1] * d[0] - e[1] * a[0],
            e[0] * d[1] - e[1] * d[0])
        equations = (f_gamma, g_c2)
        sys_unknowns = ("gamma11", "c2")
        # critical gamma from the summed equation
        sU = tuple(U[0][c] + U[1][c] for c in range(3))
        sV = tuple(V[0][c] + V[1][c] for c in range(3))
        gamma_star = -eta * (sV[0] + 0.5 * sV[1]) / (sU[0] + 0.5 * sU[1])
        c_degenerate = g_c2.max_abs() < noise
    else:
        equations = tuple(
            _qf_sub(_affine_mul(U[0], V[i]), _affine_mul(U[i], V[0]))
            for i in (1, 2))
        sys_unknowns = ("c2", "c3")
        sU = tuple(U[0][c] + U[1][c] + U[2][c] for c in range(3))
        sV = tuple(V[0][c] + V[1][c] + V[2][c] for c in range(3))
        gamma_star = (-eta * (sV[0] + (sV[1] + sV[2]) / 3.0)
                      / (sU[0] + (sU[1] + sU[2]) / 3.0))
        c_degenerate = max(q.max_abs() for q in equations) < noise

    # omega_i(c) = gamma* <psi*_i, div(ln|Psi(c)| grad lap Psi(c))>, sampled
    # over the unit box in the c-unknowns (ibp form, exact adjoint gradients)
    grad_lap = [eigen_grad_lap(b, table) for b in idx]
    samples = []
    excluded = 0
    sup = [0.0] * m
    for point in _lattice(len(unknowns), n_lattice):
        cs = [c0 + cu * point[0] + (cv * point[1] if len(point) > 1 else 0.0)
              for (c0, cu, cv) in caff]
        combo = sum(c * e for c, e in zip(cs, eig))
        comps = [sum(c * gl[ax] for c, gl in zip(cs, grad_lap))
                 for ax in range(2)]
        row = list(point)
        try:
            for i in range(m):
                res = log_weighted_integral(adj[i], combo, None, grid,
                                            target_grad_lap=comps)
                w = gamma_star * res.value
                row.append(w)
                sup[i] = max(sup[i], abs(w))
        except ThickNodalSet:
            excluded += 1
            continue
        samples.append(tuple(row))

    notes = {
        "noise_scale": noise,
        "degenerate_to_quadrature": bool(c_degenerate),
        "dev_R": dev_R,
        "dev_S": dev_S,
        "coeff_max": max(q.max_abs() for q in equations),
    }
    return ConicSystem(
        k=k, kind=kind, unknowns=sys_unknowns, equations=equations,
        omega_sup=tuple(sup), omega_samples=tuple(samples),
        excluded_samples=excluded, gamma_star=gamma_star, mu_star=None,
        eta=eta, notes=notes)


# --------------------------------------------------------------------------
# quadratic / conic solving with certificates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RootCertificate:
    value: float
    enclosure: tuple[float, float]
    multiplicity: int
    in_unit_interval: bool
    from_linear_fallback: bool = False

    def to_dict(self) -> dict:
        return {"value": self.value, "enclosure": list(self.enclosure),
                "multiplicity": self.multiplicity,
                "in_unit_interval": self.in_unit_interval,
                "from_linear_fallback": self.from_linear_fallback}


@dataclass(frozen=True)
class BranchRootReport:
    unknown: str
    roots: tuple[RootCertificate, ...]
    conditions: dict
    critical_point: float | None
    critical_value: float | None
    omega_sup: float
    perturbation_controlled: bool
    degenerate_quadratic: bool
    coefficients: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "unknown": self.unknown,
            "roots": [r.to_dict() for r in self.roots],
            "conditions": dict(self.conditions),
            "critical_point": self.critical_point,
            "critical_value": self.critical_value,
            "omega_sup": self.omega_sup,
            "perturbation_controlled": self.perturbation_controlled,
            "degenerate_quadratic": self.degenerate_quadratic,
            "coefficients": list(self.coefficients),
        }


def _enclose(fun, root: float, omega: float, span: float) -> tuple[float, float]:
    """Interval around ``root`` where |fun| stays within the perturbation."""
    if omega <= 0.0:
        w = 1e-12 * max(1.0, abs(root))
        return (root - w, root + w)
    out = []
    for sgn in (-1.0, 1.0):
        step = 1e-9 * max(1.0, abs(root))
        while abs(fun(root + sgn * step)) <= omega and step < span:
            step *= 2.0
        lo, hi = step / 2.0, step
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if abs(fun(root + sgn * mid)) <= omega:
                lo = mid
            else:
                hi = mid
        out.append(root + sgn * hi)
    return (min(out), max(out))


def solve_quadratic_branch(sys, *, equation: int = 0,
                           omega: float | None = None,
                           restrict: bool | None = None,
                           noise: float | None = None) -> BranchRootReport:
    """Certified roots of one reduced quadratic.

    Accepts the assembled :class:`ConicSystem` (solving ``equations[equation]``)
    or a bare :class:`QuadraticForm`.  Reported certificates, for
    F(u) = a u^2 + b u + c:

    * ``a``: c (a + b + c) > 0 (same sign at u = 0 and u = 1);
    * ``b``: c (c - b^2/(4a)) < 0 (sign change between endpoint and vertex);
    * ``c``: 0 < -b/(2a) < 1 (vertex inside the unit interval).

    All three holding certifies two roots in (0, 1); a vanishing critical
    value is the boundary case of a single (double) root.  The perturbation
    is controlled when ``omega`` stays below |F(vertex)|; each root gets the
    interval on which |F| <= omega as its enclosure.  If every coefficient
    and the perturbation sit below the quadrature noise floor the equation is
    satisfied identically and :class:`ContinuumDetected` is raised.  A
    vanishing leading coefficient is flagged (``degenerate_quadratic``) and
    falls back to the linear root rather than raising
    :class:`DegenerateQuadratic` outright.
    """
    if isinstance(sys, ConicSystem):
        form = sys.equations[equation]
        unknown = sys.unknowns[equation] if equation < len(sys.unknowns) else "u"
        if omega is None:
            om = sys.omega_sup[equation] if equation < len(sys.omega_sup) else 0.0
        else:
            om = omega
        nz = sys.noise_scale if noise is None else noise
    else:
        form = sys
        unknown = "u"
        om = 0.0 if omega is None else omega
        nz = 0.0 if noise is None else noise
    a, b, c = form.as_univariate()
    if restrict is None:
        restrict = unknown.startswith("c")
    scale = max(abs(a), abs(b), abs(c))
    gate = max(nz, 1e-14)
    if scale < gate:
        raise ContinuumDetected(
            f"all coefficients of the reduced quadratic in {unknown} are below "
            f"the quadrature noise floor {gate:.2e}; the unperturbed equation "
            f"holds identically on the constraint set (log perturbation sup "
            f"{om:.2e} selects solutions only at higher order)")

    degenerate = abs(a) < 1e-12 * max(scale, 1.0)
    conditions: dict = {}
    roots: list[RootCertificate] = []
    critical_point = critical_value = None
    if degenerate:
        if abs(b) < 1e-12 * max(scale, 1.0):
            # c != 0 here (the continuum gate already handled ~0): no roots
            conditions = {"a": None, "b": None, "c": None}
        else:
            r = -c / b
            fun = form.__call__
            roots.append(RootCertificate(
                value=r, enclosure=_enclose(fun, r, om, 1.0 + abs(r)),
                multiplicity=1, in_unit_interval=bool(0.0 <= r <= 1.0),
                from_linear_fallback=True))
            conditions = {"a": None, "b": None, "c": None}
    else:
        critical_point = -b / (2.0 * a)
        critical_value = c - b * b / (4.0 * a)
        # Sign conditions are gated at the same relative tolerance as the
        # discriminant: a product that is zero up to rounding (e.g. the
        # critical value at an exact double root) must not certify either way.
        ctol = 1e-10 * max(scale, 1.0) ** 2
        conditions = {
            "a": bool(c * (a + b + c) > ctol),
            "b": bool(c * critical_value < -ctol),
            "c": bool(0.0 < critical_point < 1.0),
        }
        disc = b * b - 4.0 * a * c
        dtol = 1e-10 * max(scale, 1.0) ** 2
        fun = form.__call__
        if abs(disc) <= dtol:
            r = critical_point
            roots.append(RootCertificate(
                value=r, enclosure=_enclose(fun, r, om, 1.0 + abs(r)),
                multiplicity=2, in_unit_interval=bool(0.0 <= r <= 1.0)))
        elif disc > 0.0:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b if b != 0 else 1.0))
            for r in sorted((q / a, c / q)):
                roots.append(RootCertificate(
                    value=r, enclosure=_enclose(fun, r, om, 1.0 + abs(r)),
                    multiplicity=1, in_unit_interval=bool(0.0 <= r <= 1.0)))
    if restrict:
        roots = [r for r in roots if r.in_unit_interval]
    if critical_value is not None:
        controlled = om <= abs(critical_value)
    else:
        controlled = om == 0.0
    return BranchRootReport(
        unknown=unknown, roots=tuple(roots), conditions=conditions,
        critical_point=critical_point, critical_value=critical_value,
        omega_sup=om, perturbation_controlled=bool(controlled),
        degenerate_quadratic=degenerate, coefficients=(a, b, c))


# --------------------------------------------------------------------------
# conic classification and intersection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConicClass:
    kind: str
    circle: bool
    rectangular: bool
    degenerate: bool
    discriminant: float
    det3: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "circle": self.circle,
                "rectangular": self.rectangular, "degenerate": self.degenerate,
                "discriminant": self.discriminant, "det3": self.det3}


def conic_classify(P_form: QuadraticForm, rel_tol: float = 1e-10) -> ConicClass:
    """Classify a conic by the discriminant of its quadratic part.

    With the quadratic part written a x^2 + b xy + c y^2: b^2 - 4ac negative,
    zero, positive gives ellipse / parabola / hyperbola; a = c, b = 0 marks
    the circle subcase and a + c = 0 the rectangular hyperbola.  Degeneracy
    (point, line pair) is the vanishing of the 3x3 determinant of the full
    form.  A form with zero quadratic part but a surviving linear part is
    returned as a degenerate "line"; the zero form raises
    :class:`AllZeroQuadraticPart`.
    """
    a, bxy, cyy, d, e, f = P_form.standard
    scale = max(abs(a), abs(bxy), abs(cyy))
    full_scale = max(scale, abs(d), abs(e), abs(f))
    if full_scale == 0.0:
        raise AllZeroQuadraticPart("the zero form classifies nothing")
    tol = rel_tol * max(full_scale, 1e-300)
    if scale <= tol:
        if max(abs(d), abs(e)) <= tol:
            raise AllZeroQuadraticPart(
                "quadratic and linear parts both vanish")
        return ConicClass("degenerate", False, False, True, 0.0, 0.0)
    disc = bxy * bxy - 4.0 * a * cyy
    m3 = np.array([[a, bxy / 2.0, d / 2.0],
                   [bxy / 2.0, cyy, e / 2.0],
                   [d / 2.0, e / 2.0, f]])
    det3 = float(np.linalg.det(m3))
    degenerate = abs(det3) <= rel_tol * full_scale ** 3
    dtol = rel_tol * scale * scale
    if disc < -dtol:
        kind = "ellipse"
    elif disc > dtol:
        kind = "hyperbola"
    else:
        kind = "parabola"
    circle = kind == "ellipse" and abs(a - cyy) <= tol and abs(bxy) <= tol
    rectangular = kind == "hyperbola" and abs(a + cyy) <= tol
    return ConicClass(kind, circle, rectangular, degenerate, disc, det3)


@dataclass(frozen=True)
class IntersectionReport:
    points: tuple[tuple[float, float], ...]
    residuals: tuple[float, ...]
    enclosures: tuple[float, ...]
    condition_numbers: tuple[float, ...]
    ill_conditioned: bool
    off_simplex: tuple[tuple[float, float], ...]
    resultant: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points],
                "residuals": list(self.residuals),
                "enclosures": list(self.enclosures),
                "condition_numbers": list(self.condition_numbers),
                "ill_conditioned": self.ill_conditioned,
                "off_simplex": [list(p) for p in self.off_simplex],
                "resultant": list(self.resultant),
                "count": self.count}


def _v_poly_coeffs(q: QuadraticForm):
    """Coefficients in v (low to high) as u-polynomials (low to high)."""
    # q = B v^2 + (E u + D) v + (A u^2 + C u + F0)
    return [np.array([q.F0, q.C, q.A]),
            np.array([q.D, q.E]),
            np.array([q.B])]


def _trim(c: np.ndarray, tol: float) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    nz = np.nonzero(np.abs(c) > tol)[0]
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1]


def _poly_det(mat) -> np.ndarray:
    n = len(mat)
    if n == 1:
        return np.asarray(mat[0][0], dtype=float)
    acc = np.zeros(1)
    for j in range(n):
        entry = np.asarray(mat[0][j], dtype=float)
        if not np.any(entry):
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = P.polymul(entry, _poly_det(minor))
        acc = P.polyadd(acc, term) if j % 2 == 0 else P.polysub(acc, term)
    return acc


def _sylvester_resultant(c1, c2, tol: float) -> np.ndarray:
    d1 = len(c1) - 1
    d2 = len(c2) - 1
    size = d1 + d2
    zero = np.zeros(1)
    mat = []
    for sh in range(d2):
        row = [zero] * size
        for i, coef in enumerate(reversed(c1)):
            row[sh + i] = coef
        mat.append(row)
    for sh in range(d1):
        row = [zero] * size
        for i, coef in enumerate(reversed(c2)):
            row[sh + i] = coef
        mat.append(row)
    return _trim(_poly_det(mat), tol)


def _real_roots(coeffs_low: np.ndarray) -> list[float]:
    c = np.asarray(coeffs_low, dtype=float)
    if c.size <= 1:
        return []
    roots = np.roots(c[::-1])
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-7 * (1.0 + abs(r.real)):
            out.append(float(r.real))
    return out


def intersect_conics(sys1: QuadraticForm, sys2: QuadraticForm, *,
                     simplex: bool = True, omega: float = 0.0,
                     noise: float = 0.0,
                     cond_limit: float = COND_LIMIT) -> IntersectionReport:
    """Common zeros of two conics via the Sylvester resultant in v.

    The resultant in the second unknown is a degree <= 4 polynomial in the
    first, so at most four isolated intersections exist; candidates are
    validated against both forms and (by default) filtered to the simplex
    {u >= 0, v >= 0, u + v <= 1}.  Near-proportional or below-noise pairs
    have a common component rather than isolated intersections and raise
    :class:`ContinuumDetected`.  Roots whose resultant condition number
    exceeds ``cond_limit`` are still returned, flagged ``ill_conditioned``
    and carrying wide enclosures.
    """
    q1, q2 = sys1, sys2
    s1, s2 = q1.max_abs(), q2.max_abs()
    gate = max(noise, 1e-14)
    if s1 < gate and s2 < gate:
        raise ContinuumDetected(
            f"both conics vanish to the quadrature noise floor {gate:.2e}")
    for s, tag in ((s1, "first"), (s2, "second")):
        if s < gate:
            raise ContinuumDetected(
                f"the {tag} conic vanishes to the noise floor; every point of "
                "the other conic solves the pair")
    v1 = np.array([q1.A, q1.B, q1.C, q1.D, q1.E, q1.F0]) / s1
    v2 = np.array([q2.A, q2.B, q2.C, q2.D, q2.E, q2.F0]) / s2
    if min(np.max(np.abs(v1 - v2)), np.max(np.abs(v1 + v2))) < 1e-9:
        raise ContinuumDetected("the two conics coincide up to scale")

    tol = 1e-13 * max(s1, s2)
    c1 = [_trim(c, tol) for c in _v_poly_coeffs(q1)]
    c2 = [_trim(c, tol) for c in _v_poly_coeffs(q2)]

    def vdeg(cs):
        d = len(cs) - 1
        while d > 0 and not np.any(cs[d]):
            d -= 1
        return d

    d1, d2 = vdeg(c1), vdeg(c2)
    if d1 == 0 and d2 == 0:
        # both v-free: zero sets are unions of vertical lines
        r1 = set(round(r, 9) for r in _real_roots(c1[0]))
        r2 = set(round(r, 9) for r in _real_roots(c2[0]))
        if r1 & r2:
            raise ContinuumDetected(
                "both conics are v-free with a shared root line")
        return IntersectionReport((), (), (), (), False, (), tuple(c1[0]))
    if d2 > d1:
        q1, q2 = q2, q1
        c1, c2 = c2, c1
        d1, d2 = d2, d1
    res = _sylvester_resultant(c1[: d1 + 1], c2[: d2 + 1], tol)
    res_scale = float(np.max(np.abs(res)))
    if res_scale < 1e-12 * (s1 ** d2) * (s2 ** d1):
        raise ContinuumDetected("the resultant vanishes identically; the "
                                "conics share a component")

    candidates: list[tuple[float, float]] = []
    conds: list[float] = []
    dres = P.polyder(res)
    for u in _real_roots(res):
        mag = float(np.sum(np.abs(res) * np.maximum(1.0, abs(u))
                           ** np.arange(res.size)))
        slope = abs(float(P.polyval(u, dres)))
        cond = mag / max(slope * max(1.0, abs(u)), 1e-300)
        # v from the v-dependent conic (q1 after the potential swap)
        a2 = float(c1[2][0]) if d1 == 2 else 0.0
        b1v = float(P.polyval(u, c1[1])) if len(c1) > 1 else 0.0
        c0v = float(P.polyval(u, c1[0]))
        vs: list[float] = []
        if d1 == 2 and abs(a2) > tol:
            dv = b1v * b1v - 4.0 * a2 * c0v
            if dv >= -1e-9 * max(1.0, b1v * b1v):
                sq = math.sqrt(max(dv, 0.0))
                vs = [(-b1v + sq) / (2 * a2), (-b1v - sq) / (2 * a2)]
        elif abs(b1v) > tol:
            vs = [-c0v / b1v]
        for v in vs:
            candidates.append((u, v))
            conds.append(cond)

    points, residuals, encl, cnums = [], [], [], []
    off = []
    seen: list[tuple[float, float]] = []
    for (u, v), cond in zip(candidates, conds):
        r1v = abs(q1(u, v)) / (s1 * (1.0 + u * u + v * v))
        r2v = abs(q2(u, v)) / (s2 * (1.0 + u * u + v * v))
        if max(r1v, r2v) > 1e-6:
            continue
        if any(math.hypot(u - a, v - b) < 1e-7 * (1 + abs(u) + abs(v))
               for a, b in seen):
            continue
        seen.append((u, v))
        if simplex and not (u >= -1e-9 and v >= -1e-9 and u + v <= 1.0 + 1e-9):
            off.append((u, v))
            continue
        points.append((u, v))
        residuals.append(max(r1v, r2v))
        width = max(1e-14 * max(1.0, abs(u)), 2.22e-16 * cond * max(1.0, abs(u)))
        if omega > 0.0:
            width = max(width, math.sqrt(omega / max(s1, s2)))
        encl.append(width)
        cnums.append(cond)
    order = np.argsort(residuals)[:4] if len(points) > 4 else range(len(points))
    points = [points[i] for i in order]
    residuals = [residuals[i] for i in order]
    encl = [encl[i] for i in order]
    cnums = [cnums[i] for i in order]
    ill = any(c > cond_limit for c in cnums)
    return IntersectionReport(
        tuple(points), tuple(residuals), tuple(encl), tuple(cnums), ill,
        tuple(off), tuple(float(x) for x in res))


def dense_conic_scan(eq1: QuadraticForm, eq2: QuadraticForm, *,
                     n: int = 241, tol: float | None = None,
                     domain=((0.0, 1.0), (0.0, 1.0))) -> dict:
    """Sign-change grid scan counting common-zero clusters of two forms.

    Independent of the resultant route; used as the cross-check oracle for
    intersection counts.  If both forms stay below ``tol`` on the whole
    window the pair is flagged as a continuum.
    """
    (u0, u1), (v0, v1) = domain
    us = np.linspace(u0, u1, n)
    vs = np.linspace(v0, v1, n)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    f1 = eq1(uu, vv)
    f2 = eq2(uu, vv)
    scale = max(eq1.max_abs(), eq2.max_abs(), 1e-300)
    if tol is None:
        tol = 1e-9 * scale
    if max(float(np.max(np.abs(f1))), float(np.max(np.abs(f2)))) < tol:
        return {"count": 0, "continuum": True}

    def cell_change(f):
        s = np.sign(f)
        ch = np.zeros((n - 1, n - 1), dtype=bool)
        for da, db in ((0, 0), (0, 1), (1, 0), (1, 1)):
            block = s[da:n - 1 + da, db:n - 1 + db]
            ch |= block != s[:n - 1, :n - 1]
        near = np.abs(f[:n - 1, :n - 1]) < tol
        return ch | near

    both = cell_change(f1) & cell_change(f2)
    # cluster adjacent candidate cells
    count = 0
    visited = np.zeros_like(both)
    stack: list[tuple[int, int]] = []
    for i in range(n - 1):
        for j in range(n - 1):
            if both[i, j] and not visited[i, j]:
                count += 1
                stack.append((i, j))
                visited[i, j] = True
                while stack:
                    a, b = stack.pop()
                    for da in (-1, 0, 1):
                        for db in (-1, 0, 1):
                            x, y = a + da, b + db
                            if (0 <= x < n - 1 and 0 <= y < n - 1
                                    and both[x, y] and not visited[x, y]):
                                visited[x, y] = True
                                stack.append((x, y))
    return {"count": count, "continuum": False}


def sample_forms(sys: ConicSystem, m: int = 21):
    """Sample the assembled forms over the simplex for CSV export."""
    ticks = np.linspace(0.0, 1.0, m)
    if len(sys.unknowns) == 1 or sys.unknowns[0].startswith("gamma"):
        label = sys.unknowns[0]
        header = [label] + [f"F{i + 1}" for i in range(len(sys.equations))]
        rows = [(float(t), *(q(float(t)) for q in sys.equations))
                for t in ticks]
        return header, rows
    header = ["c2", "c3"] + [f"F{i + 1}" for i in range(len(sys.equations))]
    rows = []
    for a in ticks:
        for b in ticks:
            if a + b <= 1.0 + 1e-12:
                rows.append((float(a), float(b),
                             *(q(float(a), float(b)) for q in sys.equations)))
    return header, rows


# --------------------------------------------------------------------------
# alpha expansions and spectrum bookkeeping
# --------------------------------------------------------------------------

def alpha_expansion(k: int, n, kind: str, N: int = 1, *,
                    mu1=None, table: KernelTable | None = None):
    """Similarity exponent along the k-th branch, to first order in n.

    Global branches carry the exact exponent N/(4+Nn) + k/4 (a rational
    number whenever n is); blow-up branches start at -k/4 and move with the
    computed slope mu_{1,k}.  Exact rational arithmetic is preserved whenever
    every input is rational.
    """
    if kind not in ("global", "blowup"):
        raise ConfigError(f"kind must be 'global' or 'blowup', got {kind!r}")
    if k < 0 or N not in (1, 2):
        raise ConfigError("need k >= 0 and N in {1, 2}")
    exact_n = isinstance(n, (int, Fraction))
    if kind == "global":
        if exact_n:
            nn = Fraction(n)
            return Fraction(N, 1) / (4 + N * nn) + Fraction(k, 4)
        return N / (4.0 + N * float(n)) + k / 4.0
    # blow-up
    base = Fraction(-k, 4)
    if n == 0:
        return base
    if mu1 is None:
        if k == 0:
            mu1 = Fraction(0)
        elif k <= 2:
            # grad lap of every degree <= 2 adjoint vanishes identically (in
            # any dimension), so the slope is the pure Euler pairing -k^2/16
            mu1 = Fraction(-k * k, 16)
        elif N == 1 and table is not None:
            mu1 = float(_mu_blowup(k, table))
        else:
            raise ConfigError(
                "mu1 must be supplied (or a 1D kernel table to compute it)")
    if exact_n and isinstance(mu1, Fraction):
        return base + mu1 * Fraction(n)
    return float(base) + float(mu1) * float(n)


@dataclass(frozen=True)
class BranchCoefficients:
    """A computed branch: level, family, mixing vector, first-order data."""

    k: int
    kind: str
    N: int
    first_order: float
    c: tuple[float, ...]
    eta: float | None = None

    def __post_init__(self):
        if self.c and abs(math.fsum(self.c) - 1.0) > 1e-12:
            raise ConfigError(
                f"mixing coefficients must sum to 1, got {math.fsum(self.c)!r}")

    def alpha_of_n(self, n):
        if self.kind == "global":
            return alpha_expansion(self.k, n, "global", self.N)
        return alpha_expansion(self.k, n, "blowup", self.N,
                               mu1=self.first_order)

    def to_dict(self) -> dict:
        return {"k": self.k, "kind": self.kind, "N": self.N,
                "first_order": float(self.first_order), "c": list(self.c),
                "eta": self.eta}


def spectrum_shift(alpha: float, n: float, k: int,
                   table: KernelTable) -> dict:
    """Eigenvalue of the alpha-shifted linearization, measured vs closed form.

    Rescaling y by (1-alpha n)^{1/4} maps -Lap^2 + ((1-alpha n)/4) y.grad
    + alpha onto the kernel generator, so psi_k((1-alpha n)^{1/4} y) is an
    exact eigenfunction with eigenvalue (1-alpha n)(-(k+N)/4) + alpha; the
    mode *differences* follow (1-alpha n)(-k/4).  Both are reported together
    with the measured Rayleigh quotient and sup residual on the inner region.
    """
    grid = table.grid
    if grid.dimension != 1:
        raise UnsupportedDimension("spectrum shift check is one-dimensional")
    from scipy.interpolate import CubicSpline

    s = 1.0 - alpha * n
    if s <= 0:
        raise ConfigError("need 1 - alpha n > 0 for the rescaling")
    a = s ** 0.25
    axis = grid.axis
    base = eigenfunction((k,), table)
    v = CubicSpline(axis, base)(np.clip(a * axis, axis[0], axis[-1]))
    h = grid.h
    lap2 = _conv_axis(v, np.array([7 / 240, -2 / 5, 169 / 60, -122 / 15,
                                   91 / 8, -122 / 15, 169 / 60, -2 / 5,
                                   7 / 240]), h, 4, 0)
    grad = _conv_axis(v, _D1, h, 1, 0)
    lv = -lap2 + (s / 4.0) * axis * grad + alpha * v
    mask = inner_mask(grid, 0.7)
    mask &= np.abs(axis) <= min(grid.R, grid.R / max(a, 1e-9)) * 0.7
    measured = float(np.sum(lv[mask] * v[mask]) / np.sum(v[mask] ** 2))
    absolute = s * (-(k + grid.dimension) / 4.0) + alpha
    printed = s * (-k / 4.0) + alpha
    residual = float(np.max(np.abs(lv[mask] - absolute * v[mask]))
                     / np.max(np.abs(v)))
    return {
        "measured": measured,
        "absolute": absolute,
        "printed": printed,
        "offset": absolute - printed,   # = -(1-alpha n) N/4, constant in k
        "residual": residual,
    }
