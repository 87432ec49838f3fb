# SPDX-License-Identifier: MIT
"""
Jerarquía de excepciones del laboratorio.

La biblioteca lanza estas excepciones; la CLI las traduce a códigos de salida.
"""

from __future__ import annotations

from typing import Optional, Tuple


class MongeLabError(Exception):
    """Error base de monge_lab."""


class DomainError(MongeLabError, ValueError):
    """Argumento fuera del dominio de validez de una operación."""


class BoundaryDataMissingError(MongeLabError):
    """Un estencil alcanza un nodo exterior sin dato de frontera."""

    def __init__(self, node: Tuple[int, ...]) -> None:
        super().__init__(f"El estencil del nodo {node} alcanza un nodo sin dato de frontera")
        self.node = node


class InvalidDensityError(DomainError):
    """La densidad del lado derecho no es admisible (negativa o no positiva)."""

    def __init__(self, message: str, node: Optional[Tuple[int, ...]] = None) -> None:
        super().__init__(message)
        self.node = node


class KernelUnderresolvedError(DomainError):
    """El radio del mollificador es menor que el paso de malla."""


class PositivityBreakdownError(MongeLabError):
    """El iterado de Newton pierde la positividad incluso con el paso mínimo."""

    def __init__(self, node: Tuple[int, ...], eigenvalue: float) -> None:
        super().__init__(
            f"Pérdida de positividad en el nodo {node} "
            f"(autovalor mínimo {eigenvalue:.3e})"
        )
        self.node = node
        self.eigenvalue = eigenvalue


class ChartDomainError(DomainError):
    """El punto no pertenece a la carta del modelo de métrica."""


class UnknownMetricError(MongeLabError, KeyError):
    """Nombre de métrica no registrado."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "métrica desconocida"


class IncompleteReportError(MongeLabError):
    """Al reporte le faltan los diagnósticos del máximo de H."""


class InstanceError(MongeLabError):
    """Archivo de instancia ilegible o inválido."""
