"""Numerics for fourth-order thin-film self-similarity.

Five computational layers plus a CLI:

- ``kernel``:    the rescaled fundamental solution of u_t = -u_xxxx and its
                 derivative tables with certified tail decay,
- ``spectral``:  the drift operator's eigenfunctions, polynomial adjoints and
                 biorthogonality checks,
- ``semigroup``: the linear evolution in similarity variables and decay-rate
                 fits,
- ``branching``: solvability conditions and certified root systems for the
                 nonlinear eigenvalue perturbation in the mobility exponent,
- ``profiles``:  direct shooting for compactly supported and polynomial-growth
                 self-similar profiles at finite mobility exponent.
"""

from .config import RunConfig
from .errors import (
    ConfigError,
    ContinuumDetected,
    NumericalError,
    QuadratureDivergence,
    ShootingNoConvergence,
    ThinflowError,
    UnsupportedDimension,
)
from .kernel import (
    D_RATE_EXACT,
    Grid,
    KernelTable,
    QuadConfig,
    check_decay,
    eval_kernel,
    kernel_mass,
    kernel_slice_1d,
    kernel_slice_2d,
    multi_indices,
)
from .spectral import (
    SparsePolynomial,
    adjoint_polynomial,
    apply_B,
    apply_B_star,
    eigenfunction,
    orthogonality_matrix,
)
from .semigroup import (
    convolution_solution,
    decay_rate_fit,
    fd_cancelled_gaussian,
    gaussian,
    spectral_solution,
)
from .branching import (
    alpha_expansion,
    assemble_semisimple_system,
    assemble_simple_solvability,
    intersect_conics,
    solve_quadratic_branch,
    transversality_check,
)
from .profiles import (
    ShootConfig,
    SimilarityProfile,
    continuation_family,
    expansion_diagnostic,
    mass_conservation_check,
    residual_nep,
    scaling_invariance_check,
    shoot_blowup_profile,
    shoot_global_profile,
)

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "ThinflowError", "ConfigError", "NumericalError", "QuadratureDivergence",
    "UnsupportedDimension", "ShootingNoConvergence", "ContinuumDetected",
    "Grid", "QuadConfig", "KernelTable", "eval_kernel", "kernel_mass",
    "kernel_slice_1d", "kernel_slice_2d", "check_decay", "multi_indices",
    "D_RATE_EXACT",
    "SparsePolynomial", "adjoint_polynomial", "apply_B", "apply_B_star",
    "eigenfunction", "orthogonality_matrix",
    "spectral_solution", "convolution_solution", "decay_rate_fit",
    "gaussian", "fd_cancelled_gaussian",
    "assemble_simple_solvability", "assemble_semisimple_system",
    "solve_quadratic_branch", "intersect_conics", "alpha_expansion",
    "transversality_check",
    "SimilarityProfile", "ShootConfig", "shoot_global_profile",
    "shoot_blowup_profile", "continuation_family", "residual_nep",
    "mass_conservation_check", "scaling_invariance_check",
    "expansion_diagnostic",
]
