import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinflow.errors import (ConfigError, OrderExceeded, QuadratureDivergence,
                             UnsupportedDimension)
from thinflow.kernel import (D_RATE_EXACT, Grid, QuadConfig, check_decay,
                             eval_kernel, kernel_mass, kernel_slice_1d,
                             kernel_slice_2d, multi_indices)


# ---------------------------------------------------------------------------
# grid plumbing

def test_grid_roundtrip():
    g = Grid(2, 0.1, 12.0, radial=True)
    assert Grid.from_dict(g.to_dict()) == g


def test_grid_axis_symmetric():
    g = Grid(1, 0.05, 22.0)
    ax = g.axis
    assert ax[0] == -22.0 and ax[-1] == 22.0
    np.testing.assert_allclose(ax + ax[::-1], 0.0, atol=1e-14)


def test_grid_radial_axis_starts_at_zero():
    g = Grid(1, 0.05, 10.0, radial=True)
    assert g.axis[0] == 0.0 and g.axis[-1] == pytest.approx(10.0)


def test_grid_rejects_bad_input():
    with pytest.raises(UnsupportedDimension):
        Grid(3, 0.1, 10.0)
    with pytest.raises(ConfigError):
        Grid(1, 1.0, 8.0)  # 8 nodes per side: too coarse
    with pytest.raises(ConfigError):
        Grid(1, -0.1, 10.0)


@given(st.integers(1, 2), st.integers(0, 8))
def test_multi_indices_count_and_grading(dim, kmax):
    idx = multi_indices(dim, kmax)
    expected = kmax + 1 if dim == 1 else (kmax + 1) * (kmax + 2) // 2
    assert len(idx) == expected
    assert len(set(idx)) == len(idx)
    orders = [sum(b) for b in idx]
    assert orders == sorted(orders)


# ---------------------------------------------------------------------------
# pointwise values against the dense-quadrature oracle

def test_kernel_1d_pointwise(frozen):
    pts = np.array([0.0, 1.0, 2.0])
    for m in range(5):
        want = frozen["kernel"][f"F1d_deriv{m}_at_0_1_2"]
        got = kernel_slice_1d(pts, m)
        np.testing.assert_allclose(got, want, atol=5e-13)


def test_kernel_2d_radial_pointwise(frozen):
    pts = np.array([0.0, 1.0, 2.0])
    got = kernel_slice_2d(pts, (0, 0))
    # radial symmetry: F(r, 0) sampled through the tensor evaluator
    want = frozen["kernel"]["F2d_radial_at_0_1_2"]
    np.testing.assert_allclose(np.diag(got)[:1], want[:1], atol=5e-12)
    np.testing.assert_allclose(got[1, 0], want[1], atol=5e-12)
    np.testing.assert_allclose(got[2, 0], want[2], atol=5e-12)


def test_kernel_2d_derivative_pointwise(frozen):
    got = kernel_slice_2d(np.array([1.0]), (1, 0))
    np.testing.assert_allclose(got[0, 0],
                               frozen["kernel"]["D10F2d_tensor_at_(1,1)"],
                               atol=5e-12)


def test_kernel_1d_is_even():
    y = np.linspace(0.25, 6.0, 24)
    np.testing.assert_allclose(kernel_slice_1d(y, 0), kernel_slice_1d(-y, 0),
                               atol=1e-14)
    np.testing.assert_allclose(kernel_slice_1d(y, 1), -kernel_slice_1d(-y, 1),
                               atol=1e-14)


def test_kernel_zero_count(frozen, table_1d):
    f = table_1d.slice((0,))
    ax = table_1d.grid.axis
    half = f[ax >= 0]
    crossings = int(np.sum(np.diff(np.sign(half[np.abs(half) > 0])) != 0))
    # 5 sign changes on [0, 16], and the tail keeps oscillating beyond
    sel = ax[ax >= 0] <= 16.0
    half16 = half[sel]
    c16 = int(np.sum(np.diff(np.sign(half16)) != 0))
    assert c16 == frozen["kernel"]["zeros_1d_count_upto16"]
    assert crossings >= c16


# ---------------------------------------------------------------------------
# tabulation, mass, decay fit

def test_mass_1d(table_1d, frozen):
    mass = kernel_mass(table_1d)
    assert abs(mass - 1.0) < 1e-6
    # same truncation radius as the oracle's R = 22 partial-mass defect
    assert 1.0 - mass == pytest.approx(frozen["kernel"]["mass_defect_1d"]["22"],
                                       abs=1e-9)


def test_mass_2d(table_2d):
    assert abs(kernel_mass(table_2d) - 1.0) < 1e-4


def test_derivative_slices_integrate_to_zero(table_1d):
    # int F^(m) dy = 0 for m >= 1 (perfect derivative of a decaying function)
    for m in (1, 2, 3):
        assert abs(kernel_mass(table_1d, (m,))) < 1e-6


def test_decay_fit_matches_symbol_rate(table_1d):
    D, d = check_decay(table_1d)
    assert D > 0
    assert d == pytest.approx(D_RATE_EXACT, rel=0.08)
    # fitted rate stored on the table by eval_kernel
    assert table_1d.decay == (D, d)


def test_eval_kernel_rejects_small_radius():
    with pytest.raises(QuadratureDivergence):
        eval_kernel(1, Grid(1, 0.05, 6.0), 0)


def test_eval_kernel_rejects_marginal_tail():
    # R = 12 fits the envelope but the tail estimate exceeds tail_tol
    with pytest.raises(QuadratureDivergence):
        eval_kernel(1, Grid(1, 0.05, 12.0), 0)


def test_table_slice_order_guard(table_1d):
    with pytest.raises(OrderExceeded):
        table_1d.slice((9,))


def test_table_json_roundtrip(table_2d):
    from thinflow.kernel import KernelTable
    clone = KernelTable.from_json(table_2d.to_json())
    assert clone.grid == table_2d.grid
    assert clone.K == table_2d.K
    np.testing.assert_array_equal(clone.slice((2, 1)), table_2d.slice((2, 1)))


def test_quadconfig_validation():
    with pytest.raises(ConfigError):
        QuadConfig(tail_tol=-1.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 8.0))
def test_kernel_below_decay_envelope(r):
    # |F(y)| <= 1.05 * D exp(-d |y|^(4/3)) by construction of the fit
    table = _cached_small_table()
    D, d = table.decay
    val = float(kernel_slice_1d(np.array([r]), 0)[0])
    assert abs(val) <= 1.05 * D * math.exp(-d * r ** (4.0 / 3.0)) + 1e-12


_SMALL = {}


def _cached_small_table():
    if "t" not in _SMALL:
        _SMALL["t"] = eval_kernel(1, Grid(1, 0.05, 22.0), 0)
    return _SMALL["t"]
