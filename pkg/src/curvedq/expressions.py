"""Minimal arithmetic expression grammar for config files.

Supports + - * / ^ (power), unary minus, the functions sin cos sinh cosh
exp sqrt, the constant pi, and a caller-supplied variable set.  Parsed
with the ast module against a strict whitelist, so config files cannot
execute arbitrary code.
"""

from __future__ import annotations

import ast
from typing import Callable, Dict, Sequence

import numpy as np

from .errors import ConfigError

_FUNCTIONS: Dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
    "sqrt": np.sqrt,
}

_CONSTANTS = {"pi": np.pi}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}

_UNARYOPS = {
    ast.UAdd: lambda a: a,
    ast.USub: lambda a: -a,
}


def compile_expression(text: str, variables: Sequence[str]) -> Callable:
    """Compile an expression string to a function of the named variables.

    The returned callable accepts scalars or numpy arrays positionally in
    the order of `variables`.  Raises ConfigError for syntax errors or any
    name outside the whitelist.
    """
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {text!r}: {exc.msg}") from exc
    _validate(tree.body, text, set(variables))

    def fn(*args):
        if len(args) != len(variables):
            raise TypeError(f"expected {len(variables)} arguments")
        env = dict(zip(variables, args))
        return _evaluate(tree.body, env)

    fn.source = text
    return fn


def _validate(node: ast.AST, text: str, names: set) -> None:
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigError(f"non-numeric constant in {text!r}")
        return
    if isinstance(node, ast.Name):
        if node.id not in names and node.id not in _CONSTANTS:
            raise ConfigError(f"unknown name {node.id!r} in {text!r}")
        return
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ConfigError(f"operator not allowed in {text!r}")
        _validate(node.left, text, names)
        _validate(node.right, text, names)
        return
    if isinstance(node, ast.UnaryOp):
        if type(node.op) not in _UNARYOPS:
            raise ConfigError(f"unary operator not allowed in {text!r}")
        _validate(node.operand, text, names)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ConfigError(f"function not allowed in {text!r}")
        if node.keywords or len(node.args) != 1:
            raise ConfigError(f"functions take one positional argument in {text!r}")
        _validate(node.args[0], text, names)
        return
    raise ConfigError(f"unsupported syntax in {text!r}")


def _evaluate(node: ast.AST, env: dict):
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return env.get(node.id, _CONSTANTS.get(node.id))
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARYOPS[type(node.op)](_evaluate(node.operand, env))
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](_evaluate(node.args[0], env))
    raise AssertionError("validated tree contained an unexpected node")
