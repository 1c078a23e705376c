"""Eigenfunctions of B and the adjoint generalized Hermite polynomials.

The kernel-side family is  psi_beta = ((-1)^|beta| / sqrt(beta!)) D^beta F,
an eigenfunction of  B = -Lap^2 + (1/4) y.grad + (N/4)  with eigenvalue
-|beta|/4.  The adjoint family under  B* = -Lap^2 - (1/4) y.grad  consists of
polynomials

    psi*_beta = (1/sqrt(beta!)) [ y^beta + sum_{j=1}^{floor(|beta|/4)}
                                  (1/j!) Lap^{2j} y^beta ],

and the two families are biorthogonal, <psi_beta, psi*_gamma> = delta.

All polynomial algebra is exact: coefficients are Fractions and the 1/sqrt(beta!)
normalizer is carried as the integer beta! so identity checks never touch
floating point.  The sum limit floor(|beta|/4) is the reading under which the
adjoint eigen-identity holds coefficient-wise; the componentwise alternative
fails already at beta = (2,2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BoundaryContamination, GridMismatch, OrderExceeded
from .kernel import Grid, KernelTable, multi_indices


@dataclass(frozen=True)
class MultiIndex:
    components: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.components):
            raise ValueError("multiindex components must be non-negative")

    @property
    def degree(self) -> int:
        return sum(self.components)

    @property
    def factorial(self) -> int:
        out = 1
        for c in self.components:
            out *= math.factorial(c)
        return out

    def sort_key(self):
        """Graded lexicographic: by degree, then lexicographically descending
        in the leading component (so (k,0) precedes (k-1,1))."""
        return (self.degree, tuple(-c for c in self.components))

    def __str__(self):
        return ".".join(map(str, self.components))


@dataclass
class SparsePolynomial:
    """Exact-rational polynomial sum c_beta y^beta, optionally divided by
    sqrt(normalizer_factorial)."""

    N: int
    terms: dict[tuple[int, ...], Fraction]
    normalizer_factorial: int = 1

    def __post_init__(self):
        self.terms = {b: Fraction(c) for b, c in self.terms.items() if c != 0}

    @property
    def degree(self) -> int:
        return max((sum(b) for b in self.terms), default=0)

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        if self.normalizer_factorial != other.normalizer_factorial:
            raise ValueError("cannot add polynomials with different normalizers")
        out = dict(self.terms)
        for b, c in other.terms.items():
            out[b] = out.get(b, Fraction(0)) + c
        return SparsePolynomial(self.N, out, self.normalizer_factorial)

    def scale(self, c) -> "SparsePolynomial":
        c = Fraction(c)
        return SparsePolynomial(
            self.N, {b: c * v for b, v in self.terms.items()},
            self.normalizer_factorial)

    def derivative(self, axis: int) -> "SparsePolynomial":
        out: dict[tuple[int, ...], Fraction] = {}
        for b, c in self.terms.items():
            if b[axis] == 0:
                continue
            nb = list(b)
            nb[axis] -= 1
            out[tuple(nb)] = out.get(tuple(nb), Fraction(0)) + c * b[axis]
        return SparsePolynomial(self.N, out, self.normalizer_factorial)

    def laplacian(self) -> "SparsePolynomial":
        out = SparsePolynomial(self.N, {}, self.normalizer_factorial)
        for ax in range(self.N):
            out = out + self.derivative(ax).derivative(ax)
        return out

    def euler(self) -> "SparsePolynomial":
        """y . grad p  (each monomial scaled by its degree)."""
        return SparsePolynomial(
            self.N, {b: c * sum(b) for b, c in self.terms.items()},
            self.normalizer_factorial)

    def evaluate(self, grid: Grid) -> np.ndarray:
        meshes = grid.meshes()
        shape = meshes[0].shape
        out = np.zeros(shape)
        for b, c in self.terms.items():
            term = np.full(shape, float(c))
            for ax, p in enumerate(b):
                if p:
                    term = term * meshes[ax] ** p
            out += term
        return out / math.sqrt(self.normalizer_factorial)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparsePolynomial)
                and self.N == other.N
                and self.normalizer_factorial == other.normalizer_factorial
                and self.terms == other.terms)

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.N,
            "normalizer_factorial": self.normalizer_factorial,
            "terms": [
                {"beta": list(b), "num": c.numerator, "den": c.denominator}
                for b, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SparsePolynomial":
        terms = {tuple(t["beta"]): Fraction(t["num"], t["den"])
                 for t in d["terms"]}
        return cls(d["dimension"], terms, d["normalizer_factorial"])


def adjoint_polynomial(beta: tuple[int, ...]) -> SparsePolynomial:
    """psi*_beta as exact coefficients over sqrt(beta!)."""
    beta = tuple(beta)
    if sum(beta) > 12:
        raise OrderExceeded(f"|beta|={sum(beta)} > 12")
    N = len(beta)
    norm = 1
    for c in beta:
        norm *= math.factorial(c)
    poly = SparsePolynomial(N, {beta: Fraction(1)}, norm)
    correction = SparsePolynomial(N, {}, norm)
    power = SparsePolynomial(N, {beta: Fraction(1)}, norm)
    for j in range(1, sum(beta) // 4 + 1):
        power = power.laplacian().laplacian()   # one more Lap^2
        correction = correction + power.scale(Fraction(1, math.factorial(j)))
    return poly + correction


def apply_B_star(p: SparsePolynomial) -> SparsePolynomial:
    """B* p = -Lap^2 p - (1/4) y.grad p, exactly."""
    return p.laplacian().laplacian().scale(-1) + p.euler().scale(Fraction(-1, 4))


def eigenfunction(beta: tuple[int, ...], table: KernelTable) -> np.ndarray:
    """psi_beta sampled on the table grid."""
    beta = tuple(beta)
    if sum(beta) > table.K:
        raise OrderExceeded(f"|beta|={sum(beta)} exceeds table order K={table.K}")
    norm = 1
    for c in beta:
        norm *= math.factorial(c)
    return (-1.0) ** sum(beta) / math.sqrt(norm) * table.slice(beta)


@dataclass
class EigenPair:
    beta: MultiIndex
    lam: Fraction
    direct: np.ndarray
    adjoint: SparsePolynomial

    @classmethod
    def build(cls, beta: tuple[int, ...], table: KernelTable) -> "EigenPair":
        mi = MultiIndex(tuple(beta))
        return cls(mi, Fraction(-mi.degree, 4), eigenfunction(beta, table),
                   adjoint_polynomial(beta))


# --- grid differential operators -------------------------------------------

# 4th-order-accurate central stencils
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0            # f', +-2
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0        # f'', +-2
_D4 = np.array([7 / 240, -2 / 5, 169 / 60, -122 / 15, 91 / 8,
                -122 / 15, 169 / 60, -2 / 5, 7 / 240])        # f'''', +-4

GHOST = 4


def _conv_axis(f: np.ndarray, stencil: np.ndarray, h: float, order: int,
               axis: int) -> np.ndarray:
    """Apply a centered stencil along one axis; edges left as zeros."""
    pad = len(stencil) // 2
    out = np.zeros_like(f)
    moved = np.moveaxis(f, axis, 0)
    res = np.moveaxis(out, axis, 0)
    core = sum(c * moved[i:moved.shape[0] - 2 * pad + i]
               for i, c in enumerate(stencil))
    res[pad:-pad] = core / h ** order
    return out


def apply_B(f: np.ndarray, grid: Grid, tail_tol: float = 1e-3) -> np.ndarray:
    """-Lap^2 f + (1/4) y.grad f + (N/4) f by 4th-order finite differences.

    The outermost GHOST layers of the result are zero-filled; they are only
    trustworthy when f itself is negligible there, which is enforced.
    """
    band = np.ones_like(f, dtype=bool)
    sl = tuple(slice(GHOST, -GHOST) for _ in range(f.ndim))
    band[sl] = False
    if np.max(np.abs(f[band])) > tail_tol:
        raise BoundaryContamination(
            f"|f| up to {np.max(np.abs(f[band])):.3e} on the boundary band "
            f"(tail_tol {tail_tol:.1e})"
        )
    h = grid.h
    if grid.dimension == 1:
        lap2 = _conv_axis(f, _D4, h, 4, 0)
        ygrad = grid.axis * _conv_axis(f, _D1, h, 1, 0)
    else:
        fxx = _conv_axis(f, _D2, h, 2, 0)
        lap2 = (_conv_axis(f, _D4, h, 4, 0) + _conv_axis(f, _D4, h, 4, 1)
                + 2.0 * _conv_axis(fxx, _D2, h, 2, 1))
        y1, y2 = grid.meshes()
        ygrad = y1 * _conv_axis(f, _D1, h, 1, 0) + y2 * _conv_axis(f, _D1, h, 1, 1)
    out = -lap2 + 0.25 * ygrad + 0.25 * grid.dimension * f
    out[band] = 0.0
    return out


def inner_mask(grid: Grid, fraction: float = 0.8) -> np.ndarray:
    """Boolean mask selecting |y_i| <= fraction * R along every axis."""
    cut = fraction * grid.R
    if grid.dimension == 1:
        return np.abs(grid.axis) <= cut
    y1, y2 = grid.meshes()
    return (np.abs(y1) <= cut) & (np.abs(y2) <= cut)


# --- inner products ----------------------------------------------------------

def _weight_array(grid: Grid, weight: str, a: float) -> np.ndarray | None:
    if weight == "none":
        return None
    r43 = grid.radii() ** (4.0 / 3.0)
    if weight == "rho":
        return np.exp(a * r43)
    if weight == "rho_star":
        return np.exp(-a * r43)
    raise ValueError(f"unknown weight {weight!r}")


def inner_product(f: np.ndarray, g, grid: Grid, weight: str = "none",
                  a: float = 0.0) -> float:
    """Trapezoid quadrature of f*g (optionally weighted by rho or 1/rho)."""
    if isinstance(g, SparsePolynomial):
        g = g.evaluate(grid)
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.shape != grid.meshes()[0].shape:
        raise GridMismatch(f"shapes {f.shape} vs {g.shape} on this grid")
    integrand = f * g
    w = _weight_array(grid, weight, a)
    if w is not None:
        integrand = integrand * w
    ax = grid.axis
    if grid.dimension == 1:
        return float(np.trapezoid(integrand, ax))
    return float(np.trapezoid(np.trapezoid(integrand, ax, axis=1), ax, axis=0))


def orthogonality_matrix(kmax: int, table: KernelTable):
    """Gram matrix G[i, j] = <psi_beta_i, psi*_gamma_j> in graded-lex order.

    Returns (G, labels, report) where report carries the max diagonal
    deviation and max off-diagonal magnitude.
    """
    if kmax > table.K:
        raise OrderExceeded(f"kmax={kmax} > table K={table.K}")
    idx = multi_indices(table.grid.dimension, kmax)
    polys = [adjoint_polynomial(b).evaluate(table.grid) for b in idx]
    gram = np.empty((len(idx), len(idx)))
    for i, b in enumerate(idx):
        fi = eigenfunction(b, table)
        for j in range(len(idx)):
            gram[i, j] = inner_product(fi, polys[j], table.grid)
    dev = gram - np.eye(len(idx))
    report = {
        "max_diag_dev": float(np.max(np.abs(np.diag(dev)))),
        "max_offdiag": float(np.max(np.abs(dev - np.diag(np.diag(dev)))))
        if len(idx) > 1 else 0.0,
    }
    labels = [".".join(map(str, b)) for b in idx]
    return gram, labels, report


def gram_csv(gram: np.ndarray, labels: list[str]) -> str:
    lines = ["beta," + ",".join(labels)]
    for lab, row in zip(labels, gram):
        lines.append(lab + "," + ",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"
