"""
Abstract syntax of .gsys documents. Positions are kept for diagnostics but
do not take part in equality, so a printed and re-parsed document compares
equal to the original.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

Position = Tuple[int, int]

NO_POSITION: Position = (0, 0)


def _pos():
    return field(default=NO_POSITION, compare=False, repr=False)


# Expressions

@dataclass(frozen=True)
class Num:
    value: int
    pos: Position = _pos()


@dataclass(frozen=True)
class Name:
    id: str
    pos: Position = _pos()


@dataclass(frozen=True)
class Deriv:
    coord: str
    pos: Position = _pos()


@dataclass(frozen=True)
class Neg:
    operand: 'Expr'
    pos: Position = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'
    pos: Position = _pos()


@dataclass(frozen=True)
class Pow:
    base: 'Expr'
    exponent: int
    pos: Position = _pos()


@dataclass(frozen=True)
class TupleExpr:
    items: Tuple['Expr', ...]
    pos: Position = _pos()


@dataclass(frozen=True)
class Wedge:
    items: Tuple['Expr', ...]
    pos: Position = _pos()


Expr = object


# Statements

DEFINITION_KINDS = ('constraint', 'gauge', 'vector', 'bivector', 'multivector', 'dynamics', 'form', 'master')

CHECK_NAMES = ('witnesses', 'jacobi', 'projectible', 'poisson_vector', 'master', 'observable')

BOUND_NAMES = ('max_res', 'deg')


@dataclass(frozen=True)
class Coords:
    names: Tuple[str, ...]
    gradings: Tuple[Optional[Tuple[int, int]], ...]
    pos: Position = _pos()


@dataclass(frozen=True)
class Definition:
    kind: str
    name: str
    expr: Expr
    pos: Position = _pos()


@dataclass(frozen=True)
class Connection:
    upper: str
    lower: str
    base: str
    expr: Expr
    pos: Position = _pos()


@dataclass(frozen=True)
class Structure:
    left: str
    right: str
    items: Tuple[Tuple[str, Expr], ...]
    pos: Position = _pos()


@dataclass(frozen=True)
class Bounds:
    items: Tuple[Tuple[str, int], ...]
    pos: Position = _pos()


@dataclass(frozen=True)
class Check:
    names: Tuple[str, ...]
    pos: Position = _pos()


@dataclass(frozen=True)
class SystemDocument:
    statements: Tuple[object, ...] = ()

    def definitions(self, kind: str) -> List[Definition]:
        return [s for s in self.statements if isinstance(s, Definition) and s.kind == kind]

    @property
    def coordinates(self) -> List[str]:
        names: List[str] = []
        for statement in self.statements:
            if isinstance(statement, Coords):
                names.extend(statement.names)
        return names

    @property
    def bounds(self) -> Dict[str, int]:
        values: Dict[str, int] = {}
        for statement in self.statements:
            if isinstance(statement, Bounds):
                values.update(dict(statement.items))
        return values

    @property
    def checks(self) -> List[str]:
        names: List[str] = []
        for statement in self.statements:
            if isinstance(statement, Check):
                names.extend(n for n in statement.names if n not in names)
        return names

    def is_empty(self) -> bool:
        return not self.statements
