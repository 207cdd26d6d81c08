"""Informação de Fisher e limites de Cramér–Rao."""

from __future__ import annotations

import numpy as np
import pytest

from retrieval.crb import (
    FimMatrix,
    amplitude_phase_split,
    crb,
    crb_db,
    crb_gaussian,
    crb_laplacian,
    fim_amplitude_phase,
    fim_gaussian,
    fim_laplacian_complex,
    fim_laplacian_real,
    noise_variance_for_snr,
    rank_diagnostics,
)
from retrieval.errors import NonDifferentiableError, RankDiagnosticError
from retrieval.linop import make_dense, make_gaussian, make_masked_dft
from tests.helpers import random_signal


def _problem(seed: int, N: int = 4, M: int = 32):
    rng = np.random.default_rng(seed)
    return make_gaussian(M, N, rng), random_signal(rng, N)


def test_scalar_complex_fim_by_hand():
    op = make_dense([[1.0]])
    fim = fim_laplacian_complex(op, [1.0], 0.5)
    np.testing.assert_allclose(fim.entries, [[4.0, 0.0], [0.0, 0.0]], atol=1e-15)
    report = crb_laplacian(fim)
    assert report.rank == 1
    assert report.bound_total == pytest.approx(0.25)


def test_scalar_real_fim_by_hand():
    op = make_dense([[1.0]])
    fim = fim_laplacian_real(op, [2.0], 1.0)
    np.testing.assert_allclose(fim.entries, [[2.0]])
    assert crb(fim).bound_total == pytest.approx(0.5)


def test_fim_matches_finite_differences():
    op, x = _problem(1, N=3, M=12)
    sigma2 = 0.7
    fim = fim_laplacian_complex(op, x, sigma2).entries

    def mags(beta):
        return np.abs(op.forward(beta[:3] + 1j * beta[3:]))

    beta = np.concatenate([x.real, x.imag])
    t = 1e-6
    J = np.column_stack([
        (mags(beta + t * e) - mags(beta - t * e)) / (2 * t)
        for e in np.eye(6)
    ])
    expected = (2 / sigma2) * J.T @ J
    np.testing.assert_allclose(fim, expected, atol=1e-6 * np.max(np.abs(fim)))


def test_global_phase_direction_is_null():
    for seed in range(5):
        op, x = _problem(10 + seed)
        F = fim_laplacian_complex(op, x, 1.0).entries
        v = np.concatenate([-x.imag, x.real])
        assert np.linalg.norm(F @ v) <= 1e-10 * np.linalg.norm(F) * np.linalg.norm(v)


def test_fim_is_symmetric_psd():
    op, x = _problem(2)
    F = fim_laplacian_complex(op, x, 1.0).entries
    np.testing.assert_array_equal(F, F.T)
    assert np.min(np.linalg.eigvalsh(F)) >= -1e-10 * np.max(np.abs(F))


def test_fim_scales_with_inverse_variance():
    op, x = _problem(3)
    F1 = fim_laplacian_complex(op, x, 1.0).entries
    F4 = fim_laplacian_complex(op, x, 4.0).entries
    np.testing.assert_allclose(F4, F1 / 4, rtol=1e-12)


def test_real_fim_is_full_rank_and_top_left_block():
    rng = np.random.default_rng(4)
    op = make_gaussian(32, 4, rng)
    x = rng.standard_normal(4)
    real = fim_laplacian_real(op, x, 1.0)
    full = fim_laplacian_complex(op, x, 1.0)
    assert rank_diagnostics(real).rank == 4
    np.testing.assert_allclose(real.entries, full.entries[:4, :4], rtol=1e-12)
    expected = np.trace(np.linalg.solve(real.entries, np.eye(4)))
    assert crb(real).bound_total == pytest.approx(expected, rel=1e-8)


def test_real_fim_rejects_complex_signal():
    op, x = _problem(5)
    with pytest.raises(ValueError):
        fim_laplacian_real(op, x, 1.0)


def test_pseudo_inverse_on_diagonal():
    fim = FimMatrix(np.diag([2.0, 0.0]), "cartesian_complex", 1.0)
    assert crb(fim).bound_total == pytest.approx(0.5)


def test_duplicated_rows_halve_the_bound():
    op, x = _problem(6)
    doubled = make_dense(np.vstack([op.matrix(), op.matrix()]))
    single = crb_laplacian(fim_laplacian_complex(op, x, 1.0)).bound_total
    twice = crb_laplacian(fim_laplacian_complex(doubled, x, 1.0)).bound_total
    assert twice == pytest.approx(single / 2, rel=1e-8)


def test_gaussian_bound_is_exactly_twice_laplacian():
    op, x = _problem(7)
    lap = crb_laplacian(fim_laplacian_complex(op, x, 0.3))
    gau = crb_gaussian(lap)
    assert gau.bound_total == 2 * lap.bound_total
    np.testing.assert_array_equal(gau.per_parameter, 2 * lap.per_parameter)
    assert gau.noise == "gaussian"

    direct = crb(fim_gaussian(op, x, 0.3))
    assert direct.bound_total == pytest.approx(gau.bound_total, rel=1e-8)


def test_crb_laplacian_rejects_gaussian_fim():
    op, x = _problem(8)
    with pytest.raises(ValueError):
        crb_laplacian(fim_gaussian(op, x, 1.0))


def test_rank_diagnostics_complex_and_real():
    op, x = _problem(9)
    report = rank_diagnostics(fim_laplacian_complex(op, x, 1.0))
    assert report.rank == 7
    assert report.null_basis.shape == (8, 1)
    v = np.concatenate([-x.imag, x.real])
    cos = abs(report.null_basis[:, 0] @ v) / np.linalg.norm(v)
    assert cos >= 1 - 1e-8


def test_bound_invariant_to_global_phase():
    op, x = _problem(10)
    a = crb_laplacian(fim_laplacian_complex(op, x, 1.0)).bound_total
    b = crb_laplacian(fim_laplacian_complex(op, np.exp(1.1j) * x, 1.0)).bound_total
    assert b == pytest.approx(a, rel=1e-8)


def test_amplitude_phase_null_direction_and_split():
    op, x = _problem(11)
    fim = fim_amplitude_phase(op, x, 1.0)
    F = fim.entries
    v = np.concatenate([np.zeros(4), np.ones(4)])
    assert np.linalg.norm(F @ v) <= 1e-10 * np.linalg.norm(F) * np.linalg.norm(v)

    report = crb_laplacian(fim)
    assert report.rank == 7
    amplitude, phase = amplitude_phase_split(report)
    assert amplitude + phase == pytest.approx(report.bound_total, rel=1e-12)
    assert amplitude > 0 and phase > 0


def test_amplitude_phase_rejects_zero_entry():
    op, x = _problem(12)
    x[2] = 0.0
    with pytest.raises(ValueError):
        fim_amplitude_phase(op, x, 1.0)


def test_zero_measurement_is_not_differentiable():
    op = make_dense([[1.0, -1.0], [1.0, 1.0]])
    with pytest.raises(NonDifferentiableError) as info:
        fim_laplacian_complex(op, [1.0, 1.0], 1.0)
    assert info.value.index == 0


def test_too_few_measurements_is_rank_error():
    op = make_dense([[1.0, 1.0]])
    with pytest.raises(RankDiagnosticError) as info:
        crb(fim_laplacian_complex(op, [1.0, 0.5], 1.0))
    assert info.value.expected == 3
    assert info.value.rank < 3


def test_masked_dft_bound_is_finite(exponential_signal):
    op = make_masked_dft(16, 8, np.random.default_rng(13))
    report = crb_laplacian(fim_laplacian_complex(op, exponential_signal, 0.01))
    assert report.rank == 31
    assert np.isfinite(report.bound_total) and report.bound_total > 0


def test_noise_variance_for_snr():
    op, x = _problem(14)
    sigma2 = noise_variance_for_snr(op, x, 20.0)
    energy = np.sum(np.abs(op.forward(x)) ** 2)
    assert energy / (op.M * sigma2) == pytest.approx(100.0, rel=1e-12)


def test_crb_db():
    assert crb_db(1e-3) == pytest.approx(-30.0)
    assert crb_db(0.0) == -np.inf
