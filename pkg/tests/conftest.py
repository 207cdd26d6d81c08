"""
Fixtures compartilhadas da suíte.

A raiz do repositório entra no sys.path para que `retrieval`, `nodes`,
`tools` e os módulos do topo sejam importáveis como no main.py.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from retrieval.linop import make_gaussian, make_masked_dft  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def exponential_signal() -> np.ndarray:
    t = np.arange(1, 17)
    return np.exp(1j * 0.16 * np.pi * t)


@pytest.fixture
def cdp_operator(rng):
    """maskedDft com N=16 e K=8 (M=128)."""
    return make_masked_dft(16, 8, rng)


@pytest.fixture
def gaussian_operator(rng):
    """Matriz gaussiana complexa 64×8."""
    return make_gaussian(64, 8, rng)


