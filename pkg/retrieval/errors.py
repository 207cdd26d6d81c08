"""
errors.py
─────────────────────────────────────────────────────────────────────────────
Exceções da biblioteca de phase retrieval.

Todas herdam de ValueError para que o chamador possa tratá-las como
erros de parâmetro; as subclasses carregam o diagnóstico numérico que
motivou a falha (índice, número de condição, posto).
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations


class DimensionError(ValueError):
    """Vetor com comprimento incompatível com o operador."""


class RankDeficientError(ValueError):
    """Sistema de mínimos quadrados ponderados sem posto coluna completo."""

    def __init__(self, message: str, condition: float) -> None:
        super().__init__(message)
        self.condition = condition


class NonDifferentiableError(ValueError):
    """|a_m^H x| ≈ 0: a FIM não existe nesse ponto."""

    def __init__(self, message: str, index: int) -> None:
        super().__init__(message)
        self.index = index


class RankDiagnosticError(ValueError):
    """Posto numérico da FIM diferente do esperado."""

    def __init__(self, message: str, rank: int, expected: int) -> None:
        super().__init__(message)
        self.rank = rank
        self.expected = expected


__all__ = [
    "DimensionError",
    "RankDeficientError",
    "NonDifferentiableError",
    "RankDiagnosticError",
]
