"""
Evaluate a parsed document into a GaugeSystemSpec plus the named objects it
defines. Expressions are evaluated on the odd tangent chart, which carries
every generated name, and then moved to the chart their kind lives on.
"""
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import GsysError
from graded.grading import Chart, build_extended_chart, build_tangent_chart
from graded.superpoly import SuperPolynomial, embed, grading_of
from brackets.tables import ConnectionData
from gauge.system import GaugeSystemSpec, MasterFunction, StructureWitnesses
from dsl.document import (
    BinOp, Connection, Coords, Definition, Deriv, Name, Neg, Num, Pow, Structure, SystemDocument, TupleExpr, Wedge,
)
from dsl.lexer import ParseError
from dsl.parser import SemanticChecker, parse_expression, parse_system

logger = logging.getLogger(__name__)

# momentum degree each kind must carry
EXPECTED_DEGREE = {'constraint': 0, 'gauge': 1, 'vector': 1, 'dynamics': 1, 'bivector': 2}

MULTIVECTOR_KINDS = ('constraint', 'gauge', 'vector', 'bivector', 'multivector', 'dynamics')


@dataclass
class BuiltSystem:
    spec: GaugeSystemSpec
    vectors: Dict[str, SuperPolynomial] = field(default_factory=dict)
    multivectors: Dict[str, SuperPolynomial] = field(default_factory=dict)
    forms: Dict[str, SuperPolynomial] = field(default_factory=dict)
    master: Optional[MasterFunction] = None
    bounds: Dict[str, int] = field(default_factory=dict)
    checks: List[str] = field(default_factory=list)
    evaluator: Optional["Evaluator"] = field(default=None, repr=False)

    def named(self, name: str) -> SuperPolynomial:
        for table in (self.vectors, self.multivectors, self.forms):
            if name in table:
                return table[name]
        if self.master is not None and name == 'S':
            return self.master.value
        raise GsysError(f"No vector, multivector or form named {name!r}")

    def evaluate(self, text: str) -> SuperPolynomial:
        """A defined name or an expression over the document's names, on the odd tangent chart."""
        if self.evaluator is None:
            raise GsysError("System was built without an evaluator")
        expr = parse_expression(text)
        checker = SemanticChecker(self.evaluator.document)
        checker.run()
        checker.check_expr(expr)
        return self.evaluator.evaluate(expr)


class Evaluator:
    def __init__(self, chart: Chart, document: SystemDocument):
        self.chart = chart
        self.document = document
        self.coordinates = document.coordinates
        self.values: Dict[str, SuperPolynomial] = {}

    def fail(self, message: str, node) -> ParseError:
        line, column = getattr(node, 'pos', (0, 0))
        return ParseError(message, line, column)

    def evaluate(self, node) -> SuperPolynomial:
        chart = self.chart
        if isinstance(node, Num):
            return SuperPolynomial.constant(chart, node.value)
        if isinstance(node, Name):
            if node.id in self.values:
                return self.values[node.id]
            return SuperPolynomial.variable(chart, node.id)
        if isinstance(node, Deriv):
            return SuperPolynomial.variable(chart, chart.momentum_of(node.coord).name)
        if isinstance(node, Neg):
            return -self.evaluate(node.operand)
        if isinstance(node, Pow):
            return self.evaluate(node.base) ** node.exponent
        if isinstance(node, BinOp):
            left, right = self.evaluate(node.left), self.evaluate(node.right)
            if node.op == '+':
                return left + right
            if node.op == '-':
                return left - right
            if node.op == '*':
                return left * right
            if right.variables_used() or not right.constant_term():
                raise self.fail("division is only by a nonzero constant", node)
            return left / right.constant_term()
        if isinstance(node, TupleExpr):
            if len(node.items) != len(self.coordinates):
                raise self.fail(f"a vector needs {len(self.coordinates)} components, got {len(node.items)}", node)
            result = SuperPolynomial.zero(chart)
            for x, item in zip(self.coordinates, node.items):
                result = result + self.evaluate(item) * SuperPolynomial.variable(chart, chart.momentum_of(x).name)
            return result
        if isinstance(node, Wedge):
            result = SuperPolynomial.constant(chart, 1)
            for item in node.items:
                result = result * self.evaluate(item)
            return result
        raise self.fail(f"cannot evaluate {type(node).__name__}", node)


def _move(poly: SuperPolynomial, chart: Chart, statement, label: str) -> SuperPolynomial:
    try:
        return embed(poly, chart)
    except GsysError as exc:
        line, column = statement.pos
        raise ParseError(f"{label} uses variables outside its chart: {exc}", line, column)


def _check_degree(poly: SuperPolynomial, statement: Definition) -> None:
    expected = EXPECTED_DEGREE.get(statement.kind)
    if expected is None or not poly:
        return
    try:
        degree = grading_of(poly, 'deg')
    except GsysError as exc:
        raise ParseError(f"{statement.kind} {statement.name}: {exc}", *statement.pos)
    if degree != expected:
        raise ParseError(f"{statement.kind} {statement.name} must have momentum degree {expected}, "
                         f"got {degree}", *statement.pos)


def _coords_position(doc: SystemDocument):
    for statement in doc.statements:
        if isinstance(statement, Coords):
            return statement.pos
    return (1, 1)


def build_system(doc: SystemDocument) -> BuiltSystem:
    """GaugeSystemSpec and named objects of a checked document."""
    coordinates = doc.coordinates
    constraint_defs = doc.definitions('constraint')
    gauge_defs = doc.definitions('gauge')
    for kind in ('bivector', 'dynamics', 'master'):
        found = doc.definitions(kind)
        if len(found) > 1:
            raise ParseError(f"at most one {kind} may be given", *found[1].pos)
    try:
        extended = build_extended_chart(coordinates, len(constraint_defs), len(gauge_defs))
        evaluator = Evaluator(build_tangent_chart(extended), doc)
    except GsysError as exc:
        raise ParseError(f"cannot build charts: {exc}", *_coords_position(doc))
    spec = GaugeSystemSpec(coordinates, constraint_names=[d.name for d in constraint_defs],
                           generator_names=[d.name for d in gauge_defs])
    multivector_chart = spec.multivector_chart
    built = BuiltSystem(spec, bounds=doc.bounds, checks=doc.checks, evaluator=evaluator)
    connection: Dict = {}
    witnesses = StructureWitnesses()
    position = {d.name: i for i, d in enumerate(constraint_defs)}
    position.update({d.name: i for i, d in enumerate(gauge_defs)})
    gauge_names = {d.name for d in gauge_defs}

    for statement in doc.statements:
        try:
            if isinstance(statement, Definition):
                value = evaluator.evaluate(statement.expr)
                evaluator.values[statement.name] = value
                if statement.kind in MULTIVECTOR_KINDS:
                    poly = _move(value, multivector_chart, statement, statement.kind)
                    _check_degree(poly, statement)
                    if statement.kind == 'constraint':
                        spec.constraints.append(poly)
                    elif statement.kind == 'gauge':
                        spec.generators.append(poly)
                        built.vectors[statement.name] = poly
                    elif statement.kind == 'bivector':
                        spec.bivector = poly
                        built.multivectors[statement.name] = poly
                    elif statement.kind == 'dynamics':
                        spec.dynamics = poly
                        built.vectors[statement.name] = poly
                    elif statement.kind == 'vector':
                        built.vectors[statement.name] = poly
                    else:
                        built.multivectors[statement.name] = poly
                elif statement.kind == 'form':
                    built.forms[statement.name] = value
                elif statement.kind == 'master':
                    built.master = MasterFunction(_move(value, extended, statement, 'master'))
            elif isinstance(statement, Connection):
                value = _move(evaluator.evaluate(statement.expr), extended, statement, 'connection')
                key = (statement.upper, statement.lower, statement.base)
                connection[key] = connection.get(key, SuperPolynomial.zero(extended)) + value
            elif isinstance(statement, Structure):
                pair = (position[statement.left], position[statement.right])
                witnesses.f.setdefault(pair, {})
                for name, expr in statement.items:
                    value = _move(evaluator.evaluate(expr), multivector_chart, statement, 'structure witness')
                    if name in gauge_names:
                        witnesses.f.setdefault(pair, {})[position[name]] = value
                    else:
                        witnesses.X.setdefault(pair, {})[position[name]] = value
        except ParseError:
            raise
        except GsysError as exc:
            raise ParseError(str(exc), *statement.pos)

    if witnesses.pairs():
        spec.structure_witnesses = witnesses
    try:
        if connection:
            spec.connection = ConnectionData.from_mapping(connection)
        spec.validate()
        if built.master is not None:
            built.master.check_gradings()
    except GsysError as exc:
        raise ParseError(str(exc), 1, 1)
    logger.info(f"Built system on {', '.join(coordinates) or 'no coordinates'}: {len(spec.constraints)} "
                f"constraints, {len(spec.generators)} gauge generators")
    return built


def load_system(text) -> BuiltSystem:
    return build_system(parse_system(text))
