"""Construtores pequenos reutilizados pelos testes."""

from __future__ import annotations

import numpy as np

from retrieval.linop import magnitudes, make_masked_dft


def random_signal(rng: np.random.Generator, N: int) -> np.ndarray:
    return (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2)


def noiseless_cdp(seed: int, N: int = 16, K: int = 8):
    """(operador, x, y) sem ruído no ensemble CDP."""
    rng = np.random.default_rng(seed)
    op = make_masked_dft(N, K, rng)
    x = random_signal(rng, N)
    return op, x, magnitudes(op, x)
