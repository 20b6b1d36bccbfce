"""
Recursive-descent parser for .gsys documents.

    document   := statement*
    statement  := 'coords' coord+ ';'
                | KIND NAME '=' expr ';'
                | 'connection' '(' NAME ',' NAME ',' NAME ')' '=' expr ';'
                | 'structure' '(' NAME ',' NAME ')' '=' (item (',' item)* | '0') ';'
                | 'bounds' NAME '=' INT (',' NAME '=' INT)* ';'
                | 'check' NAME (',' NAME)* ';'
    expr       := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary | power)*      juxtaposition multiplies
    unary      := '-' unary | power
    power      := atom ('^' INT)?
    atom       := INT | NAME | 'd/dNAME' | '(' expr (',' expr)* ','? ')' | 'wedge' '(' expr (',' expr)* ')'

Odd factors keep their written order; signs are settled by the algebra
when the document is built.
"""
import logging
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Set, Union

sys.path.append(str(Path(__file__).parent.parent))
from dsl.document import (
    BOUND_NAMES, CHECK_NAMES, DEFINITION_KINDS, BinOp, Bounds, Check, Connection, Coords, Definition, Deriv,
    Name, Neg, Num, Pow, Structure, SystemDocument, TupleExpr, Wedge,
)
from dsl.lexer import ParseError, Token, tokenize

logger = logging.getLogger(__name__)

MAX_DEPTH = 100

# largest product of nested exponents along any path of an expression
MAX_EXPONENT = 16

ATOM_START = frozenset({'INT', 'IDENT', 'DERIV', '('})

# definitions whose value is a sum of odd monomials
ODD_KINDS = frozenset({'gauge', 'vector', 'dynamics'})


class Parser:
    def __init__(self, source: Union[str, bytes]):
        self.tokens: List[Token] = tokenize(source)
        self.index = 0
        self.depth = 0

    # ---- token helpers ----
    @property
    def tok(self) -> Token:
        return self.tokens[self.index]

    def next(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != 'EOF':
            self.index += 1
        return token

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def accept(self, kind: str, text: Optional[str] = None) -> bool:
        if self.at(kind, text):
            self.next()
            return True
        return False

    def error(self, message: str, expected=()) -> ParseError:
        found = 'end of input' if self.tok.kind == 'EOF' else repr(self.tok.text)
        return ParseError(f"{message}, found {found}", self.tok.line, self.tok.column, expected)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            label = text or kind
            raise self.error(f"expected {label!r}", (label,))
        return self.next()

    def expect_name(self) -> Token:
        if not self.at('IDENT'):
            raise self.error("expected a name", ('IDENT',))
        return self.next()

    def expect_int(self) -> int:
        negative = self.accept('-')
        value = int(self.expect('INT').text)
        return -value if negative else value

    # ---- statements ----
    def parse_document(self) -> SystemDocument:
        statements = []
        while not self.at('EOF'):
            statements.append(self.parse_statement())
        return SystemDocument(tuple(statements))

    def parse_statement(self):
        token = self.tok
        if token.kind != 'KEYWORD' or token.text == 'wedge':
            raise self.error("expected a statement", ('coords', 'check', 'bounds', 'connection', 'structure')
                             + DEFINITION_KINDS)
        self.next()
        pos = (token.line, token.column)
        if token.text == 'coords':
            statement = self.parse_coords(pos)
        elif token.text == 'connection':
            statement = self.parse_connection(pos)
        elif token.text == 'structure':
            statement = self.parse_structure(pos)
        elif token.text == 'bounds':
            statement = self.parse_bounds(pos)
        elif token.text == 'check':
            statement = self.parse_check(pos)
        else:
            name = self.expect_name().text
            self.expect('=')
            statement = Definition(token.text, name, self.parse_expr(), pos)
        self.expect(';')
        return statement

    def parse_coords(self, pos) -> Coords:
        names, gradings = [], []
        while self.at('IDENT'):
            names.append(self.next().text)
            grading = None
            if self.accept('['):
                ghost = self.expect_int()
                self.expect(',')
                degree = self.expect_int()
                self.expect(']')
                grading = (ghost, degree)
            gradings.append(grading)
        if not names:
            raise self.error("expected a coordinate name", ('IDENT',))
        return Coords(tuple(names), tuple(gradings), pos)

    def parse_connection(self, pos) -> Connection:
        self.expect('(')
        upper = self.expect_name().text
        self.expect(',')
        lower = self.expect_name().text
        self.expect(',')
        base = self.expect_name().text
        self.expect(')')
        self.expect('=')
        return Connection(upper, lower, base, self.parse_expr(), pos)

    def parse_structure(self, pos) -> Structure:
        self.expect('(')
        left = self.expect_name().text
        self.expect(',')
        right = self.expect_name().text
        self.expect(')')
        self.expect('=')
        items = []
        if self.at('INT', '0') and self.tokens[self.index + 1].kind == ';':
            self.next()
            return Structure(left, right, (), pos)
        while True:
            name = self.expect_name().text
            self.expect(':')
            items.append((name, self.parse_expr()))
            if not self.accept(','):
                break
        return Structure(left, right, tuple(items), pos)

    def parse_bounds(self, pos) -> Bounds:
        items = []
        while True:
            if not (self.at('IDENT') and self.tok.text in BOUND_NAMES):
                raise self.error("expected a bound name", BOUND_NAMES)
            name = self.next().text
            self.expect('=')
            items.append((name, int(self.expect('INT').text)))
            if not self.accept(','):
                break
        return Bounds(tuple(items), pos)

    def parse_check(self, pos) -> Check:
        names = []
        while True:
            if self.tok.kind not in ('IDENT', 'KEYWORD') or self.tok.text not in CHECK_NAMES:
                raise self.error("expected a check name", CHECK_NAMES)
            names.append(self.next().text)
            if not self.accept(','):
                break
        return Check(tuple(names), pos)

    # ---- expressions ----
    def parse_expr(self):
        left = self.parse_term()
        while self.tok.kind in ('+', '-'):
            op = self.next()
            left = BinOp(op.kind, left, self.parse_term(), (op.line, op.column))
        return left

    def _starts_atom(self) -> bool:
        return self.tok.kind in ATOM_START or self.at('KEYWORD', 'wedge')

    def parse_term(self):
        left = self.parse_unary()
        while True:
            if self.tok.kind in ('*', '/'):
                op = self.next()
                left = BinOp(op.kind, left, self.parse_unary(), (op.line, op.column))
            elif self._starts_atom():
                pos = (self.tok.line, self.tok.column)
                left = BinOp('*', left, self.parse_power(), pos)
            else:
                return left

    def parse_unary(self):
        if self.at('-'):
            op = self.next()
            self._enter()
            try:
                return Neg(self.parse_unary(), (op.line, op.column))
            finally:
                self.depth -= 1
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.at('^'):
            op = self.next()
            if not self.at('INT'):
                raise self.error("expected an integer exponent", ('INT',))
            return Pow(base, int(self.next().text), (op.line, op.column))
        return base

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")

    def parse_atom(self):
        token = self.tok
        pos = (token.line, token.column)
        if token.kind == 'INT':
            self.next()
            return Num(int(token.text), pos)
        if token.kind == 'IDENT':
            self.next()
            return Name(token.text, pos)
        if token.kind == 'DERIV':
            self.next()
            return Deriv(token.text, pos)
        if token.kind == '(' or self.at('KEYWORD', 'wedge'):
            is_wedge = token.kind == 'KEYWORD'
            self.next()
            if is_wedge:
                self.expect('(')
            self._enter()
            try:
                first = self.parse_expr()
                if not is_wedge and self.at(')'):
                    self.next()
                    return first
                items = [first]
                if is_wedge or self.at(','):
                    while self.accept(','):
                        if self.at(')'):
                            break
                        items.append(self.parse_expr())
                self.expect(')')
            finally:
                self.depth -= 1
            return Wedge(tuple(items), pos) if is_wedge else TupleExpr(tuple(items), pos)
        raise self.error("expected an expression", ('INT', 'IDENT', 'd/dNAME', '(', 'wedge'))


def generated_names(coordinates: List[str], n_constraints: int, n_generators: int) -> Dict[str, bool]:
    """Names the charts create for a document, mapped to whether they are odd."""
    names: Dict[str, bool] = {}
    for x in coordinates:
        names[x] = False
    for a in range(1, n_constraints + 1):
        names[f"eta{a}"] = True
    for alpha in range(1, n_generators + 1):
        names[f"c{alpha}"] = True
    for i in range(1, len(coordinates) + 1):
        names[f"xs{i}"] = True
    for a in range(1, n_constraints + 1):
        names[f"etas{a}"] = False
    for alpha in range(1, n_generators + 1):
        names[f"cs{alpha}"] = False
    for name, odd in list(names.items()):
        names[f"d{name}"] = not odd
    return names


_GENERATED_RE = re.compile(r"^d?(xs|eta|etas|c|cs)[0-9]+$")


class SemanticChecker:
    """Define-before-use, known coordinates and no powers of odd symbols."""

    def __init__(self, doc: SystemDocument):
        self.doc = doc
        n_constraints = len(doc.definitions('constraint'))
        n_generators = len(doc.definitions('gauge'))
        self.generated = generated_names(doc.coordinates, n_constraints, n_generators)
        self.coordinates: Set[str] = set()
        self.defined: Dict[str, str] = {}

    def fail(self, message: str, pos, expected=()) -> ParseError:
        return ParseError(message, pos[0], pos[1], expected)

    def run(self) -> None:
        velocities = {f"d{x}" for x in self.doc.coordinates}
        for statement in self.doc.statements:
            if isinstance(statement, Coords):
                for name, grading in zip(statement.names, statement.gradings):
                    if name in self.coordinates or _GENERATED_RE.match(name):
                        raise self.fail(f"coordinate {name!r} is declared twice or clashes with a generated name",
                                        statement.pos)
                    if name in velocities:
                        raise self.fail(f"coordinate {name!r} clashes with the velocity of {name[1:]!r}",
                                        statement.pos)
                    if grading is not None and grading != (0, 0):
                        raise self.fail(f"base coordinate {name!r} must have ghost and momentum degree 0",
                                        statement.pos, ('[0,0]',))
                    self.coordinates.add(name)
            elif isinstance(statement, Definition):
                self.check_expr(statement.expr)
                if statement.name in self.defined or statement.name in self.generated:
                    raise self.fail(f"name {statement.name!r} is already defined", statement.pos)
                self.defined[statement.name] = statement.kind
            elif isinstance(statement, Connection):
                for name in (statement.upper, statement.lower):
                    if not re.match(r"^(eta|c)[0-9]+$", name) or name not in self.generated:
                        raise self.fail(f"connection index {name!r} is not a ghost or antighost", statement.pos)
                if statement.base not in self.coordinates:
                    raise self.fail(f"unknown coordinate {statement.base!r}", statement.pos)
                self.check_expr(statement.expr)
            elif isinstance(statement, Structure):
                for name in (statement.left, statement.right):
                    if self.defined.get(name) != 'gauge':
                        raise self.fail(f"{name!r} is not a gauge generator", statement.pos)
                for name, expr in statement.items:
                    if self.defined.get(name) not in ('gauge', 'constraint'):
                        raise self.fail(f"{name!r} is not a gauge generator or constraint", statement.pos)
                    self.check_expr(expr)

    def _known(self, name: str) -> bool:
        return name in self.coordinates or name in self.defined or (
            name in self.generated and name not in self.doc.coordinates)

    def _is_odd_symbol(self, expr) -> bool:
        if isinstance(expr, Deriv):
            return True
        if isinstance(expr, Name):
            if expr.id in self.defined:
                return self.defined[expr.id] in ODD_KINDS
            return self.generated.get(expr.id, False)
        return False

    def check_expr(self, expr) -> None:
        stack = [(expr, 1)]
        while stack:
            node, power = stack.pop()
            if isinstance(node, Name):
                if not self._known(node.id):
                    raise self.fail(f"unknown name {node.id!r}", node.pos)
            elif isinstance(node, Deriv):
                if node.coord not in self.coordinates:
                    raise self.fail(f"unknown coordinate {node.coord!r} in derivation", node.pos)
            elif isinstance(node, Neg):
                stack.append((node.operand, power))
            elif isinstance(node, BinOp):
                stack.extend(((node.right, power), (node.left, power)))
            elif isinstance(node, Pow):
                if node.exponent >= 2 and self._is_odd_symbol(node.base):
                    raise self.fail("an odd symbol squares to zero; powers of odd symbols are not allowed",
                                    node.pos)
                power *= max(node.exponent, 1)
                if power > MAX_EXPONENT:
                    raise self.fail(f"exponent {node.exponent} exceeds the limit of {MAX_EXPONENT} "
                                    f"for nested powers", node.pos)
                stack.append((node.base, power))
            elif isinstance(node, (TupleExpr, Wedge)):
                stack.extend((item, power) for item in reversed(node.items))


def parse_system(text: Union[str, bytes]) -> SystemDocument:
    """Parse and check a .gsys document; every failure is a ParseError with a position."""
    parser = Parser(text)
    doc = parser.parse_document()
    SemanticChecker(doc).run()
    logger.debug(f"Parsed {len(doc.statements)} statements")
    return doc


def parse_expression(text: Union[str, bytes]):
    parser = Parser(text)
    expr = parser.parse_expr()
    if not parser.at('EOF'):
        raise parser.error("unexpected input after expression", ('EOF',))
    return expr
