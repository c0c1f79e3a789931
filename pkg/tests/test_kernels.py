import numpy as np
import pytest

from ifed.kernels import (
    KERNEL_SPECS,
    KernelId,
    bspline_phi,
    delta_weights_2d,
    even_odd_sums,
    moment_sum,
    parse_kernel,
    phi,
    stencil_1d,
    sum_of_squares,
)

from _oracles import bspline_by_convolution, smoothed_stencil_by_condition_solve

ALL_KERNELS = list(KernelId)
RNG = np.random.default_rng(1234)
OFFSETS = RNG.uniform(0.0, 1.0, 200)


class GridStub:
    def __init__(self, nx=32, ny=32, h=0.125, x0=0.0, y0=0.0):
        self.nx, self.ny, self.h, self.x0, self.y0 = nx, ny, h, x0, y0


def test_parse_kernel_tokens():
    assert parse_kernel("pwl") is KernelId.PIECEWISE_LINEAR
    assert parse_kernel("bspline2") is KernelId.PIECEWISE_LINEAR
    assert parse_kernel(" IB4 ") is KernelId.IB4
    with pytest.raises(ValueError):
        parse_kernel("gaussian")


def test_phi_peak_values():
    assert phi(KernelId.PIECEWISE_LINEAR, 0.0) == 1.0

    # 3-point IB kernel at r=0: zeroth moment + sum-of-squares reduce to
    # 3*phi0^2 - 2*phi0 = 0 for the symmetric stencil.
    phi0 = 2.0 / 3.0
    assert abs(phi(KernelId.IB3, 0.0) - phi0) < 1e-14

    # 4-point IB kernel: odd-lattice mass 2*phi(1) = 1/2.
    assert abs(phi(KernelId.IB4, 1.0) - 0.25) < 1e-14
    assert abs(phi(KernelId.IB4, 0.0) + phi(KernelId.IB4, 2.0) - 0.5) < 1e-14

    assert abs(phi(KernelId.BSPLINE3, 1.0) - 0.125) < 1e-14
    assert abs(phi(KernelId.BSPLINE4, 0.0) - 2.0 / 3.0) < 1e-14


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_bspline_matches_convolution_recursion(order):
    xs = np.linspace(-0.5 * (order + 1) - 0.25, 0.5 * (order + 1) + 0.25, 101)
    expected = bspline_by_convolution(order, xs)
    got = bspline_phi(order, xs)
    assert np.max(np.abs(got - expected)) < 1e-8


def test_bspline_examples():
    assert bspline_phi(1, 0.0) == 1.0
    assert abs(bspline_phi(2, 0.0) - 0.75) < 1e-14
    assert bspline_phi(5, 3.1) == 0.0
    with pytest.raises(ValueError):
        bspline_phi(6, 0.0)
    with pytest.raises(ValueError):
        bspline_phi(-1, 0.0)


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_zeroth_and_first_moments(kernel):
    m0 = moment_sum(kernel, 0, OFFSETS)
    m1 = moment_sum(kernel, 1, OFFSETS)
    assert np.max(np.abs(m0 - 1.0)) < 1e-12
    assert np.max(np.abs(m1)) < 1e-12


def test_even_odd_condition():
    for kernel in (KernelId.IB4, KernelId.IB6):
        even, odd = even_odd_sums(kernel, OFFSETS)
        assert np.max(np.abs(even - 0.5)) < 1e-12
        assert np.max(np.abs(odd - 0.5)) < 1e-12

    even, odd = even_odd_sums(KernelId.IB3, 0.25)
    assert abs(even - 0.5) > 0.01

    for kernel, spec in KERNEL_SPECS.items():
        even, _ = even_odd_sums(kernel, OFFSETS)
        satisfied = np.max(np.abs(even - 0.5)) < 1e-12
        assert satisfied == spec.satisfies_even_odd


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_second_moment_against_table(kernel):
    spec = KERNEL_SPECS[kernel]
    m2 = moment_sum(kernel, 2, OFFSETS)
    if spec.second_moment is not None:
        assert np.max(np.abs(m2 - spec.second_moment)) < 1e-10
    else:
        assert np.ptp(m2) > 1e-3  # genuinely offset-dependent


def test_higher_moments_against_table():
    for kernel in (KernelId.IB5, KernelId.IB6, KernelId.BSPLINE4,
                   KernelId.BSPLINE5, KernelId.BSPLINE6):
        assert np.max(np.abs(moment_sum(kernel, 3, OFFSETS))) < 1e-10
    for kernel in (KernelId.BSPLINE5, KernelId.BSPLINE6):
        m4 = moment_sum(kernel, 4, OFFSETS)
        assert np.max(np.abs(m4 - KERNEL_SPECS[kernel].fourth_moment)) < 1e-10
    assert np.max(np.abs(moment_sum(KernelId.BSPLINE6, 5, OFFSETS))) < 1e-10
    # printed table values for the smoothed kernels round to these
    assert abs(KERNEL_SPECS[KernelId.IB5].second_moment - 0.4949) < 5e-4
    assert abs(KERNEL_SPECS[KernelId.IB6].second_moment - 0.7141) < 5e-4


def test_sum_of_squares_constants():
    expected = {
        KernelId.IB3: 0.5,
        KernelId.IB4: 0.375,
        KernelId.IB5: 0.393,
        KernelId.IB6: 0.326,
    }
    for kernel, approx in expected.items():
        ss = sum_of_squares(kernel, OFFSETS)
        assert np.ptp(ss) < 1e-12
        assert abs(ss[0] - KERNEL_SPECS[kernel].sum_of_squares) < 1e-12
        assert abs(ss[0] - approx) < 5e-4

    # B-splines do not satisfy the condition
    assert abs(sum_of_squares(KernelId.BSPLINE4, 0.0)
               - sum_of_squares(KernelId.BSPLINE4, 0.5)) > 1e-3


@pytest.mark.parametrize("kernel,support", [(KernelId.IB5, 5), (KernelId.IB6, 6)])
def test_smoothed_kernels_match_condition_solve(kernel, support):
    spec = KERNEL_SPECS[kernel]
    if support == 5:
        rs = np.linspace(-0.5, 0.4999, 173)
    else:
        rs = np.linspace(0.0, 0.9999, 173)
    first_o, w_o = smoothed_stencil_by_condition_solve(
        support, spec.second_moment, spec.sum_of_squares, rs
    )
    first, w = stencil_1d(kernel, rs + 0.0)
    assert np.array_equal(first, first_o)
    assert np.max(np.abs(w - w_o)) < 1e-9


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_continuity_at_piece_boundaries(kernel):
    support = KERNEL_SPECS[kernel].support
    eps = 1e-9
    boundaries = np.arange(-support / 2.0, support / 2.0 + 0.25, 0.25)
    left = phi(kernel, boundaries - eps)
    right = phi(kernel, boundaries + eps)
    assert np.max(np.abs(left - right)) < 1e-7


@pytest.mark.parametrize("kernel", ALL_KERNELS)
def test_support_and_positivity(kernel):
    support = KERNEL_SPECS[kernel].support
    outside = np.array([support / 2.0, support / 2.0 + 0.3, -support / 2.0 - 1.0])
    assert np.all(phi(kernel, outside) == 0.0)
    if kernel in (KernelId.PIECEWISE_LINEAR, KernelId.BSPLINE3, KernelId.BSPLINE4,
                  KernelId.BSPLINE5, KernelId.BSPLINE6):
        xs = np.linspace(-support / 2.0, support / 2.0, 501)
        assert np.all(phi(kernel, xs) >= 0.0)


def test_stencil_matches_phi():
    xs = RNG.uniform(-3.0, 9.0, 57)
    for kernel in ALL_KERNELS:
        support = KERNEL_SPECS[kernel].support
        first, w = stencil_1d(kernel, xs)
        idx = first[:, None] + np.arange(support)
        direct = phi(kernel, xs[:, None] - idx)
        assert np.max(np.abs(w - direct)) < 1e-12


def test_delta_weights_on_face_center():
    grid = GridStub()
    # u-face at (8h, 8.5h)
    point = (8 * grid.h, 8.5 * grid.h)
    w = delta_weights_2d(KernelId.PIECEWISE_LINEAR, point, grid, "u")
    total = w.stencil.sum() * grid.h**2
    assert abs(total - 1.0) < 1e-12
    assert np.count_nonzero(w.stencil > 1e-14) == 1
    assert abs(w.stencil.max() - 1.0 / grid.h**2) < 1e-9


@pytest.mark.parametrize("kernel", ALL_KERNELS)
@pytest.mark.parametrize("component", ["u", "v"])
def test_delta_weights_moments(kernel, component):
    grid = GridStub()
    point = (2.0 + 0.3 * grid.h, 2.0 - 0.4 * grid.h)
    w = delta_weights_2d(kernel, point, grid, component)
    assert abs(w.stencil.sum() * grid.h**2 - 1.0) < 1e-12

    s = KERNEL_SPECS[kernel].support
    ii = w.i0 + np.arange(s)
    jj = w.j0 + np.arange(s)
    if component == "u":
        xf = grid.x0 + ii * grid.h
        yf = grid.y0 + (jj + 0.5) * grid.h
    else:
        xf = grid.x0 + (ii + 0.5) * grid.h
        yf = grid.y0 + jj * grid.h
    mx = np.sum((xf[:, None] - point[0]) * w.stencil) * grid.h**2
    my = np.sum((yf[None, :] - point[1]) * w.stencil) * grid.h**2
    assert abs(mx) < 1e-12
    assert abs(my) < 1e-12


def test_delta_weights_rejects_exterior_point():
    grid = GridStub()
    with pytest.raises(ValueError):
        delta_weights_2d(KernelId.IB4, (-1.0, 2.0), grid, "u")
