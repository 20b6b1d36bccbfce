"""
Canonical printer for .gsys documents; parse_system(print_document(doc)) == doc.
"""
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
from dsl.document import (
    BinOp, Bounds, Check, Connection, Coords, Definition, Deriv, Name, Neg, Num, Pow, Structure, SystemDocument,
    TupleExpr, Wedge,
)

PRECEDENCE = {'+': 1, '-': 1, '*': 2, '/': 2}
NEG_PRECEDENCE = 3
POW_PRECEDENCE = 4
ATOM_PRECEDENCE = 5


def _precedence(expr) -> int:
    if isinstance(expr, BinOp):
        return PRECEDENCE[expr.op]
    if isinstance(expr, Neg):
        return NEG_PRECEDENCE
    if isinstance(expr, Pow):
        return POW_PRECEDENCE
    return ATOM_PRECEDENCE


def _wrap(expr, needs_parens: bool) -> str:
    text = print_expression(expr)
    return f"({text})" if needs_parens else text


def print_expression(expr) -> str:
    if isinstance(expr, Num):
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.id
    if isinstance(expr, Deriv):
        return f"d/d{expr.coord}"
    if isinstance(expr, Neg):
        return '-' + _wrap(expr.operand, isinstance(expr.operand, BinOp))
    if isinstance(expr, Pow):
        return f"{_wrap(expr.base, _precedence(expr.base) < ATOM_PRECEDENCE)}^{expr.exponent}"
    if isinstance(expr, BinOp):
        p = PRECEDENCE[expr.op]
        left = _wrap(expr.left, _precedence(expr.left) < p)
        right = _wrap(expr.right, _precedence(expr.right) <= p)
        if expr.op in '+-':
            return f"{left} {expr.op} {right}"
        return f"{left}{expr.op}{right}"
    if isinstance(expr, TupleExpr):
        inner = ', '.join(print_expression(item) for item in expr.items)
        return f"({inner},)" if len(expr.items) == 1 else f"({inner})"
    if isinstance(expr, Wedge):
        return f"wedge({', '.join(print_expression(item) for item in expr.items)})"
    raise TypeError(f"Not an expression node: {expr!r}")


def print_statement(statement) -> str:
    if isinstance(statement, Coords):
        parts = [name if grading is None else f"{name}[{grading[0]},{grading[1]}]"
                 for name, grading in zip(statement.names, statement.gradings)]
        return f"coords {' '.join(parts)};"
    if isinstance(statement, Definition):
        return f"{statement.kind} {statement.name} = {print_expression(statement.expr)};"
    if isinstance(statement, Connection):
        return (f"connection ({statement.upper}, {statement.lower}, {statement.base}) = "
                f"{print_expression(statement.expr)};")
    if isinstance(statement, Structure):
        items = ', '.join(f"{name}: {print_expression(expr)}" for name, expr in statement.items) or '0'
        return f"structure ({statement.left}, {statement.right}) = {items};"
    if isinstance(statement, Bounds):
        return f"bounds {', '.join(f'{name} = {value}' for name, value in statement.items)};"
    if isinstance(statement, Check):
        return f"check {', '.join(statement.names)};"
    raise TypeError(f"Not a statement node: {statement!r}")


def print_document(doc: SystemDocument) -> str:
    return ''.join(print_statement(s) + '\n' for s in doc.statements)
