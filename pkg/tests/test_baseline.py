"""Baselines Gerchberg–Saxton e HIO."""

from __future__ import annotations

import numpy as np
import pytest

from retrieval.baseline import SupportMask, gs, hio, hio_grid, project_magnitudes, restrict
from retrieval.linop import magnitudes, make_dense, make_fourier2d, make_gaussian
from retrieval.metrics import aligned_error
from tests.helpers import noiseless_cdp, random_signal


def _image_problem(seed: int, size: int = 4):
    rng = np.random.default_rng(seed)
    op = make_fourier2d(size, size)
    x = rng.standard_normal(size * size).astype(np.complex128)
    return op, x, magnitudes(op, x)


def test_gs_fixed_point_at_truth():
    op, x, y = noiseless_cdp(1)
    x_hat = gs(y, op, x, 5)
    assert aligned_error(x_hat, x) <= 1e-20 * np.sum(np.abs(x) ** 2)


def test_gs_fast_path_matches_qr_path():
    op, x, y = noiseless_cdp(2, N=8, K=3)
    rng = np.random.default_rng(0)
    x0 = x + 0.3 * random_signal(rng, 8)
    dense = make_dense(op.matrix())
    np.testing.assert_allclose(gs(y, op, x0, 4), gs(y, dense, x0, 4), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_gs_misfit_is_nonincreasing(seed):
    rng = np.random.default_rng(seed)
    op = make_gaussian(40, 6, rng)
    y = magnitudes(op, random_signal(rng, 6)) + 0.05 * np.abs(rng.standard_normal(40))
    x = random_signal(rng, 6)
    misfits = []
    for _ in range(15):
        misfits.append(np.linalg.norm(y - magnitudes(op, x)))
        x = gs(y, op, x, 1)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(misfits, misfits[1:]))


def test_gs_zero_iterations_returns_start():
    op, x, y = noiseless_cdp(3)
    np.testing.assert_array_equal(gs(y, op, x, 0), x)
    with pytest.raises(ValueError):
        gs(y, op, x, -1)


def test_project_magnitudes():
    spectrum = np.array([3 + 4j, 0.0, -2.0])
    out = project_magnitudes(spectrum, [1.0, 2.0, 5.0])
    np.testing.assert_allclose(out, [0.6 + 0.8j, 2.0, -5.0])


def test_top_left_support():
    support = SupportMask.top_left(make_fourier2d(3, 4))
    assert support.shape == (6, 8)
    assert support.grid.sum() == 12
    assert support.grid[:3, :4].all()


def test_hio_fixed_point_at_truth():
    op, x, y = _image_problem(4)
    support = SupportMask.top_left(op)
    x_hat = hio(y, op, support, iters=20, x0=x, real=True)
    assert aligned_error(x_hat, x) <= 1e-12 * np.sum(np.abs(x) ** 2)


def test_hio_truth_is_fixed_point_for_offset_support():
    op, x, y = _image_problem(10)
    shifted = np.roll(op.pad(x), (4, 4), axis=(0, 1))
    grid = np.zeros(op.padded_shape, dtype=bool)
    grid[4:, 4:] = True
    support = SupportMask(grid)
    assert support.origin == (4, 4) and support.extent == (4, 4)

    x_hat = hio(y, op, support, iters=20, init_grid=shifted, real=True)
    np.testing.assert_allclose(x_hat, x, atol=1e-10)
    np.testing.assert_array_equal(hio(y, op, support, iters=0, init_grid=shifted), x)


def test_hio_rejects_support_that_does_not_fit_the_image():
    op, x, y = _image_problem(11)
    wide = np.zeros(op.padded_shape, dtype=bool)
    wide[0, :6] = True
    corner = np.zeros(op.padded_shape, dtype=bool)
    corner[7, 7] = True
    for grid in (wide, corner):
        with pytest.raises(ValueError):
            hio(y, op, SupportMask(grid), iters=1, rng=np.random.default_rng(0))


def test_hio_estimate_vanishes_outside_support():
    op, x, y = _image_problem(5)
    grid = np.zeros(op.padded_shape, dtype=bool)
    grid[:3, :3] = True
    x_hat = hio(y, op, SupportMask(grid), iters=10, rng=np.random.default_rng(0))
    image = x_hat.reshape(4, 4)
    assert np.all(image[3, :] == 0) and np.all(image[:, 3] == 0)


def test_hio_resume_equals_single_run():
    op, x, y = _image_problem(6)
    support = SupportMask.top_left(op)
    once = hio_grid(y, op, support, iters=20, rng=np.random.default_rng(7), real=True)
    half = hio_grid(y, op, support, iters=10, rng=np.random.default_rng(7), real=True)
    resumed = hio_grid(y, op, support, iters=10, init_grid=half, real=True)
    np.testing.assert_array_equal(resumed, once)


def test_hio_output_is_finite_and_real():
    op, x, y = _image_problem(8)
    support = SupportMask.top_left(op)
    grid = hio_grid(y, op, support, iters=50, rng=np.random.default_rng(1), real=True, nonnegative=True)
    assert grid.shape == op.padded_shape
    assert np.all(np.isfinite(grid))
    np.testing.assert_array_equal(np.imag(grid), 0.0)
    assert restrict(op, support, grid).shape == (16,)


def test_hio_rejects_invalid_setup():
    op, x, y = _image_problem(9)
    support = SupportMask.top_left(op)
    cdp, _, y_cdp = noiseless_cdp(9)
    with pytest.raises(ValueError):
        hio(y_cdp, cdp, support, iters=1, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        hio(y, op, support, beta=1.0, iters=1, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        hio(y, op, SupportMask(np.ones((4, 4), dtype=bool)), iters=1, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        hio(y, op, support, iters=1)
    with pytest.raises(ValueError):
        SupportMask(np.zeros((8, 8), dtype=bool))
