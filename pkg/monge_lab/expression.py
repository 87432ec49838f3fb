# SPDX-License-Identifier: MIT
"""
Compilador seguro de expresiones de densidad.

Las expresiones se analizan con ``ast`` y solo admiten aritmética, un
conjunto fijo de funciones y las variables de coordenadas; nunca se evalúa
código arbitrario.
"""

from __future__ import annotations

import ast
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Tuple

import numpy as np

from .errors import InstanceError

logger = logging.getLogger(__name__)

MAX_EXPRESSION_LENGTH = 512

FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "pos": lambda value: np.maximum(value, 0.0),
}

CONSTANTS: Dict[str, float] = {"pi": math.pi, "e": math.e}

_BINARY = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def variable_names(m: int) -> Tuple[str, ...]:
    """x1, y1, ..., xm, ym seguidos de s = |z|² y r = |z|."""
    names = []
    for j in range(1, m + 1):
        names.extend((f"x{j}", f"y{j}"))
    return tuple(names) + ("s", "r")


class _Validator(ast.NodeVisitor):
    """Rechaza cualquier nodo fuera de la gramática permitida."""

    def __init__(self, allowed_names: Tuple[str, ...]) -> None:
        self.allowed = set(allowed_names) | set(CONSTANTS)

    def generic_visit(self, node: ast.AST) -> None:
        allowed_nodes = (
            ast.Expression,
            ast.BinOp,
            ast.UnaryOp,
            ast.Call,
            ast.Name,
            ast.Constant,
            ast.Load,
            ast.USub,
            ast.UAdd,
        ) + tuple(_BINARY)
        if not isinstance(node, allowed_nodes):
            raise InstanceError(f"Construcción no permitida: {type(node).__name__}")
        super().generic_visit(node)

    def visit_Call(self, node: ast.Call) -> None:
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise InstanceError("Solo se admiten las funciones " + ", ".join(sorted(FUNCTIONS)))
        if len(node.args) != 1 or node.keywords:
            raise InstanceError(f"'{node.func.id}' recibe exactamente un argumento")
        self.visit(node.args[0])

    def visit_Name(self, node: ast.Name) -> None:
        if node.id not in self.allowed:
            raise InstanceError(f"Variable desconocida: {node.id}")

    def visit_Constant(self, node: ast.Constant) -> None:
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise InstanceError(f"Constante no numérica: {node.value!r}")


def _evaluate(node: ast.AST, env: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, env)
    if isinstance(node, ast.Constant):
        return np.asarray(float(node.value))
    if isinstance(node, ast.Name):
        if node.id in CONSTANTS:
            return np.asarray(CONSTANTS[node.id])
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        operand = _evaluate(node.operand, env)
        return -operand if isinstance(node.op, ast.USub) else operand
    if isinstance(node, ast.BinOp):
        operation = _BINARY[type(node.op)]
        return operation(_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.Call):
        assert isinstance(node.func, ast.Name)
        return FUNCTIONS[node.func.id](_evaluate(node.args[0], env))
    raise InstanceError(f"Nodo inesperado: {type(node).__name__}")


@dataclass(frozen=True)
class DensityExpression:
    """Expresión compilada, evaluable sobre las coordenadas de una malla."""

    source: str
    m: int
    tree: ast.Expression

    def __call__(self, *coordinates: np.ndarray, center: Tuple[float, ...] = ()) -> np.ndarray:
        if len(coordinates) != 2 * self.m:
            raise InstanceError(f"Se esperaban {2 * self.m} coordenadas")
        env: Dict[str, np.ndarray] = {}
        squared = np.zeros(np.broadcast(*coordinates).shape)
        offsets = center or (0.0,) * (2 * self.m)
        for index, coord in enumerate(coordinates):
            name = f"{'xy'[index % 2]}{index // 2 + 1}"
            env[name] = np.asarray(coord, dtype=float)
            squared = squared + (np.asarray(coord, dtype=float) - offsets[index]) ** 2
        env["s"] = squared
        env["r"] = np.sqrt(squared)
        with np.errstate(all="ignore"):
            values = _evaluate(self.tree, env)
        return np.broadcast_to(np.asarray(values, dtype=float), squared.shape)

    @property
    def is_radial(self) -> bool:
        """True si la expresión solo depende de s o r."""
        names = {node.id for node in ast.walk(self.tree) if isinstance(node, ast.Name)}
        return names - set(FUNCTIONS) <= {"s", "r"} | set(CONSTANTS)

    def radial(self, s: float, center: Tuple[float, ...] = ()) -> float:
        """Evalúa la expresión en el punto c + (sqrt(s), 0, ...) (densidades radiales)."""
        offsets = center or (0.0,) * (2 * self.m)
        coordinates = [np.asarray(float(value)) for value in offsets]
        coordinates[0] = coordinates[0] + math.sqrt(max(s, 0.0))
        return float(self(*coordinates, center=tuple(offsets)))


def compile_expression(source: str, m: int) -> DensityExpression:
    """Analiza y valida ``source``; lanza InstanceError si no es admisible."""
    text = source.strip()
    if not text:
        raise InstanceError("La expresión de la densidad está vacía")
    if len(text) > MAX_EXPRESSION_LENGTH:
        raise InstanceError("La expresión de la densidad es demasiado larga")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise InstanceError(f"Expresión inválida: {exc.msg}") from exc
    _Validator(variable_names(m)).visit(tree)
    logger.debug("Expresión compilada: %s", text)
    return DensityExpression(text, m, tree)
