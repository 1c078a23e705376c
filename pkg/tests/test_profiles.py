import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinflow.errors import ConfigError, UnsupportedDimension
from thinflow.kernel import Grid, kernel_slice_1d
from thinflow.profiles import (SimilarityProfile, continuation_family,
                               expansion_diagnostic, interface_from_samples,
                               mass_conservation_check, residual_nep,
                               scaling_invariance_check, shoot_blowup_profile,
                               shoot_global_profile)
from thinflow.spectral import adjoint_polynomial


def _poly_samples(k: int, r: np.ndarray) -> np.ndarray:
    poly = adjoint_polynomial((k,))
    return sum(float(c) * r ** e[0] for e, c in poly.terms.items())


# ---------------------------------------------------------------------------
# the trivial growing pair (alpha, f) = (0, 1)

@pytest.mark.parametrize("n", [0.0, 0.1, 0.5, 1.0])
def test_trivial_pair_residual(n):
    prof = shoot_blowup_profile(n, 0)
    assert prof.alpha == 0.0
    assert prof.growth_exponent == 0.0
    assert prof.diagnostics["trivial"] is True
    assert np.max(np.abs(residual_nep(prof))) < 1e-12


# ---------------------------------------------------------------------------
# n = 0 linear limits satisfy the profile equations pointwise

def test_kernel_is_the_decaying_linear_limit():
    grid = Grid(1, 0.02, 20.0, radial=True)
    prof = SimilarityProfile(n=0.0, alpha=0.25, beta_exp=0.25, kind="global",
                             grid=grid, f=kernel_slice_1d(grid.axis, 0))
    assert np.max(np.abs(residual_nep(prof))) < 1e-6


@pytest.mark.parametrize("k", [1, 2, 3])
def test_polynomial_modes_are_growing_linear_limits(k):
    grid = Grid(1, 0.02, 10.0, radial=True)
    prof = SimilarityProfile(n=0.0, alpha=-k / 4.0, beta_exp=0.25,
                             kind="blowup", grid=grid,
                             f=_poly_samples(k, grid.axis), k=k)
    assert np.max(np.abs(residual_nep(prof))) < 1e-5


def test_residual_zeroes_the_contaminated_edge_band():
    grid = Grid(1, 0.1, 8.0)  # symmetric line grid, open at both ends
    prof = SimilarityProfile(n=0.0, alpha=0.25, beta_exp=0.25, kind="global",
                             grid=grid, f=np.cos(grid.axis))
    resid = residual_nep(prof)
    assert np.all(resid[:6] == 0.0) and np.all(resid[-6:] == 0.0)
    assert np.max(np.abs(resid[6:-6])) > 0.0


# ---------------------------------------------------------------------------
# the shot decaying family

def test_global_eigenvalue_is_closed_form(global_family):
    for prof, n in zip(global_family, (0.2, 0.1, 0.05)):
        assert prof.alpha == 1.0 / (4.0 + n)
        assert prof.beta_exp == (1.0 - prof.alpha * prof.n) / 4.0


def test_global_profile_shape(global_family):
    prof = global_family[0]  # n = 0.2
    assert prof.interface_radius == pytest.approx(12.93, abs=0.2)
    assert prof.zero_count >= 1
    assert prof.f[0] > 0.0
    assert prof.diagnostics["mass_drift"] < 1e-10
    rule = prof.diagnostics["interface_tail_rule"]
    assert rule is not None and rule <= prof.interface_radius + prof.grid.h


def test_global_mass_and_scaling_invariance(global_family):
    prof = global_family[0]
    mass = mass_conservation_check(prof)
    assert float(mass) < 1e-6
    assert abs(mass.report["exponent_identity"]) < 1e-15
    assert float(scaling_invariance_check(prof)) < 1e-6
    assert float(scaling_invariance_check(prof, lam=4.0)) < 1e-5


def test_global_family_approaches_the_kernel(global_family):
    dists = [p.diagnostics["sup_distance_limit"] for p in global_family]
    assert all(np.isfinite(d) for d in dists)
    assert dists[0] > dists[1] > dists[2]  # n = 0.2, 0.1, 0.05


# ---------------------------------------------------------------------------
# the shot growing family

def test_blowup_k1_eigenvalues_are_exact_monomial_values(blowup_family):
    # f = y is an exact solution with alpha = -1/(4 - n); the shooter is
    # blind to that and must land on it
    for prof, n in zip(blowup_family, (0.2, 0.1, 0.05)):
        assert prof.alpha == pytest.approx(-1.0 / (4.0 - n), abs=1e-8)
        assert prof.growth_exponent == pytest.approx(1.0, abs=0.05)


def test_blowup_k1_collapses_to_linear_mode(blowup_family):
    for prof in blowup_family:
        assert prof.diagnostics["sup_distance_limit"] < 1e-6


def test_blowup_k1_growth_matches_exponent_relation(blowup_family):
    for prof in blowup_family:
        a = abs(prof.alpha)
        gamma = 4.0 * a / (1.0 + a * prof.n)
        assert prof.growth_exponent == pytest.approx(gamma, rel=0.05)
        assert gamma < 4.0 / prof.n - 0.5


def test_blowup_k2_exact_monomial():
    prof = shoot_blowup_profile(0.2, 2)
    assert prof.alpha == pytest.approx(-2.0 / (4.0 - 2.0 * 0.2), abs=1e-8)
    assert prof.growth_exponent == pytest.approx(2.0, rel=0.05)


def test_continuation_threads_on_the_trivial_branch():
    fam = continuation_family("blowup", 0, [0.0, 0.1], threads=2)
    assert [p.alpha for p in fam] == [0.0, 0.0]
    assert all(p.diagnostics["sup_distance_limit"] == 0.0 for p in fam)


# ---------------------------------------------------------------------------
# domain guards

def test_shoot_global_domain_guards():
    with pytest.raises(ConfigError):
        shoot_global_profile(0.0)
    with pytest.raises(ConfigError):
        shoot_global_profile(0.6)
    with pytest.raises(ConfigError):
        shoot_global_profile(0.2, k=1)
    with pytest.raises(UnsupportedDimension):
        shoot_global_profile(0.2, N=3)


def test_shoot_blowup_domain_guards():
    with pytest.raises(ConfigError):
        shoot_blowup_profile(0.4, 1)
    with pytest.raises(ConfigError):
        shoot_blowup_profile(0.1, -1)
    with pytest.raises(UnsupportedDimension):
        shoot_blowup_profile(0.1, 1, N=2)
    with pytest.raises(ConfigError):
        continuation_family("neither", 0, [0.1])


@pytest.mark.parametrize("kwargs", [{}, {"alpha_guess": -0.8}])
def test_blowup_k3_origin_degenerates(kwargs):
    # the k = 3 adjoint mode is the pure cubic: the origin is a zero of
    # order three and the local launch is out of scope
    with pytest.raises(ConfigError):
        shoot_blowup_profile(0.1, 3, **kwargs)


# ---------------------------------------------------------------------------
# diagnostics

def test_interface_from_samples_rules():
    grid = Grid(1, 0.1, 10.0, radial=True)
    f = np.where(grid.axis <= 5.0, 1.0, 0.0)
    edge = interface_from_samples(f, grid)
    assert edge is not None and 5.0 < edge <= 5.2
    assert interface_from_samples(np.ones(grid.axis.size), grid) is None
    with pytest.raises(ConfigError):
        interface_from_samples(np.ones((4, 4)), grid)


def test_expansion_diagnostic_halves_with_n():
    grid = Grid(1, 0.05, 22.0, radial=True)
    f = 1.0 - (grid.axis / 4.013) ** 2
    rows = expansion_diagnostic(f, [0.2, 0.1, 0.05, 0.025], grid)
    errs = [row["l1_error"] for row in rows]
    for big, small in zip(errs, errs[1:]):
        assert 0.4 < small / big < 0.55  # second-order scaling in n
    excl = [row["excluded_measure"] for row in rows]
    assert excl[0] > excl[-1]  # transversal zero: bad set shrinks with n


def test_expansion_diagnostic_rejects_bad_n():
    grid = Grid(1, 0.1, 5.0, radial=True)
    with pytest.raises(ConfigError):
        expansion_diagnostic(np.ones(grid.axis.size), [0.1, 0.0], grid)


def test_check_domain_guards(global_family, blowup_family):
    prof = global_family[0]
    with pytest.raises(ConfigError):
        scaling_invariance_check(prof, lam=1.0)
    with pytest.raises(ConfigError):
        scaling_invariance_check(prof, lam=-2.0)
    with pytest.raises(ConfigError):
        scaling_invariance_check(shoot_blowup_profile(0.0, 0))  # n = 0
    with pytest.raises(ConfigError):
        mass_conservation_check(blowup_family[0])


# ---------------------------------------------------------------------------
# the profile container pins its exponent identity

@given(alpha=st.floats(-1.0, 1.0, allow_nan=False),
       n=st.floats(0.0, 2.0, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_profile_beta_identity(alpha, n):
    grid = Grid(1, 0.1, 8.0)
    beta = (1.0 - alpha * n) / 4.0
    prof = SimilarityProfile(n=n, alpha=alpha, beta_exp=beta, kind="global",
                             grid=grid, f=np.zeros(grid.axis.size))
    assert prof.beta_exp == beta
    with pytest.raises(ConfigError):
        SimilarityProfile(n=n, alpha=alpha, beta_exp=beta + 0.25,
                          kind="global", grid=grid,
                          f=np.zeros(grid.axis.size))


def test_profile_rejects_bad_kind_and_negative_n():
    grid = Grid(1, 0.1, 8.0)
    z = np.zeros(grid.axis.size)
    with pytest.raises(ConfigError):
        SimilarityProfile(n=0.1, alpha=0.0, beta_exp=0.25, kind="steady",
                          grid=grid, f=z)
    with pytest.raises(ConfigError):
        SimilarityProfile(n=-0.1, alpha=0.0, beta_exp=0.25 * 1.1,
                          kind="global", grid=grid, f=z)
