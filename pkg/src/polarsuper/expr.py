"""Config-level arithmetic expressions: parse, differentiate, evaluate on jets.

The grammar is numbers, identifiers, ``+ - * / **`` (``^`` is accepted as a
power), parentheses and the functions below.  Text is checked against that
grammar with :mod:`ast` before it reaches sympy, so nothing else is ever
evaluated.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Sequence

import sympy as sp

from . import jets as J
from .errors import ConfigurationError

FUNCTIONS = ("sin", "cos", "tan", "log", "sqrt", "exp")
CONSTANTS = ("pi",)

_JET_MODULE = {"sin": J.sin, "cos": J.cos, "tan": J.tan, "log": J.log, "sqrt": J.sqrt,
               "exp": J.exp, "pi": sp.pi.evalf(17)}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
                  ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def _validate(text: str, variables: Sequence[str]) -> None:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise ConfigurationError(f"cannot parse expression {text!r}: {e.msg}") from None
    names = set(variables) | set(FUNCTIONS) | set(CONSTANTS)
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigurationError(f"{type(node).__name__} not allowed in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigurationError(f"non-numeric literal in {text!r}")
        if isinstance(node, ast.Name) and node.id not in names:
            raise ConfigurationError(f"unknown identifier {node.id!r} in {text!r}; "
                                     f"allowed: {sorted(names)}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS or node.keywords \
                    or len(node.args) != 1:
                raise ConfigurationError(f"only one-argument calls of {FUNCTIONS} allowed in {text!r}")


@dataclass(frozen=True)
class Expression:
    text: str
    variables: tuple[str, ...]
    sym: sp.Expr = field(compare=False)

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "Expression":
        if not isinstance(text, str) or not text.strip():
            raise ConfigurationError("expression must be a non-empty string")
        variables = tuple(variables)
        _validate(text, variables)
        local = {v: sp.Symbol(v, real=True) for v in variables}
        local.update({f: getattr(sp, f) for f in FUNCTIONS})
        local["pi"] = sp.pi
        sym = sp.sympify(text.replace("^", "**"), locals=local, rational=False)
        return cls(text, variables, sym)

    def _symbols(self):
        return [sp.Symbol(v, real=True) for v in self.variables]

    def derivative(self, var: str, k: int = 1) -> "Expression":
        """Symbolic ``k``-th derivative with respect to ``var``."""
        if var not in self.variables:
            raise ConfigurationError(f"{var!r} is not a variable of {self.text!r}")
        d = sp.diff(self.sym, sp.Symbol(var, real=True), k)
        return Expression(str(d), self.variables, d)

    def function(self):
        """Callable of the variables, valid on floats, arrays and jets."""
        f = sp.lambdify(self._symbols(), self.sym, modules=[_JET_MODULE, "math"])
        if self.sym.free_symbols:
            return f
        c = float(self.sym)
        return lambda *args: 0.0 * args[0] + c

    def __str__(self) -> str:
        return self.text
