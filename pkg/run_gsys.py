"""
Command-line entry point for the graded gauge system toolkit.

Usage:
    python run_gsys.py verify FILE [--deg D] [--max-res N]
    python run_gsys.py complete FILE [--deg D] [--max-res N]
    python run_gsys.py bracket FILE --op {odd,even,schouten,derived-K} ARG [ARG ...]
    python run_gsys.py lift FILE
    python run_gsys.py cohomology FILE --k K --l L --deg D [--operator Q|Qhat] [--table]
    python run_gsys.py fixtures NAME [--n N]

FILE is a path to a .gsys document or fixtures:NAME (heisenberg, contact-N,
triangular-N). The JSON report goes to stdout (or --output), diagnostics to
stderr.

Exit codes: 0 every check passed, 1 a check failed, 2 inconclusive at the
bound, 3 usage or parse error, 4 the engine rejected the system. Other
exceptions are bugs and propagate with their traceback.
"""
import argparse
import logging
import re
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from gsys_utils import GsysConfig, GsysError, setup_logging
from brackets.bracket_engine import (
    RESTRICT_TO_M, bracket_conventions, derived_bracket, even_bracket, schouten, to_tangent,
)
from gauge.system import MasterFunction, NoSolutionAtBound, assemble_S0, verify_structure_witnesses
from gauge.master_solver import check_master, complete_dynamics, complete_master
from gauge.projectibility import (
    FAIL, INCONCLUSIVE, PASS, aggregate_verdict, check_projectible, check_weak_jacobi, check_weak_poisson_vector,
    time_evolution,
)
from gauge.forms import extract_Q, extract_Qhat, interior_product, lie_derivative_form, lift_master
from cohomology.cohomology import Truncation, bigraded_table, lemma_check
from dsl.builder import BuiltSystem, build_system
from dsl.lexer import ParseError
from dsl.parser import parse_system
from dsl.report import certificate_report, emit_report
from fixtures.library import fixture_names, fixture_text

logger = logging.getLogger('run_gsys')

EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
USAGE_ERROR = 3
ENGINE_ERROR = 4

ALL_CHECKS = ('witnesses', 'jacobi', 'projectible', 'poisson_vector', 'master', 'observable')

TAGS = {PASS: '[OK]', FAIL: '[FAIL]', INCONCLUSIVE: '[WARN]'}


class UsageError(GsysError):
    """Bad command-line input."""


class GsysArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"[FAIL] {message}", file=sys.stderr)
        sys.exit(USAGE_ERROR)


class Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.phases: Dict[str, float] = {}

    def run(self, phase: str, func, *args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            self.phases[phase] = self.phases.get(phase, 0.0) + time.perf_counter() - start

    @property
    def report(self) -> Optional[Dict[str, float]]:
        return self.phases if self.enabled else None


def read_source(source: str, n: Optional[int] = None) -> bytes:
    if source.startswith('fixtures:'):
        try:
            return fixture_text(source[len('fixtures:'):], n).encode('utf-8')
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc))
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"No such file: {source}")
    try:
        return path.read_bytes()
    except OSError as exc:
        raise UsageError(f"Cannot read {source}: {exc}")


def load(args) -> BuiltSystem:
    return build_system(parse_system(read_source(args.file, getattr(args, 'n', None))))


def resolve_bounds(args, built: BuiltSystem, config: GsysConfig):
    requested = args.deg if args.deg is not None else built.bounds.get('deg')
    degree = config.degree_bound(requested)
    if args.max_res is not None:
        max_res = args.max_res
    else:
        max_res = built.bounds.get('max_res', config.max_res)
    return degree, max_res


def current_master(built: BuiltSystem, max_res: int, degree: int, timer: Timer, progress: bool) -> MasterFunction:
    """The document's S when given, otherwise S0 completed at the bounds."""
    if built.master is not None:
        return built.master
    S0 = assemble_S0(built.spec)
    return timer.run('complete_master', complete_master, S0, built.spec, max_res, degree, progress)


# ---- verify ----

def check_witnesses(built: BuiltSystem, degree: int) -> Dict[str, Any]:
    spec = built.spec
    residuals = verify_structure_witnesses(spec)
    names = spec.generator_names
    report = {'check': 'witnesses',
              'verdict': PASS if not any(residuals.values()) else FAIL,
              'residuals': {f"({names[a]},{names[b]})": value for (a, b), value in residuals.items()}}
    if not residuals:
        report['note'] = 'no structure witnesses supplied'
    return report


def check_jacobi(built: BuiltSystem, degree: int) -> Dict[str, Any]:
    value, certificate = check_weak_jacobi(built.spec, degree)
    return {'check': 'jacobi', 'verdict': certificate.verdict, 'bracket': value,
            'certificate': certificate_report(certificate)}


def check_projectibility(built: BuiltSystem, degree: int) -> Dict[str, Any]:
    spec = built.spec
    fields = {}
    targets = [(name, value) for name, value in built.multivectors.items() if value is spec.bivector]
    targets += [(name, value) for name, value in built.vectors.items() if value is spec.dynamics]
    for name, value in targets:
        result = check_projectible(value, spec, degree)
        fields[name] = {'verdict': result.verdict, 'brackets': result.brackets,
                        'certificates': {k: certificate_report(c) for k, c in result.certificates.items()}}
    report = {'check': 'projectible', 'verdict': aggregate_verdict([f['verdict'] for f in fields.values()]),
              'fields': fields}
    if not fields:
        report['note'] = 'no bivector or dynamics given'
    return report


def check_poisson_vector(built: BuiltSystem, degree: int) -> Dict[str, Any]:
    value, certificate = check_weak_poisson_vector(built.spec, degree)
    return {'check': 'poisson_vector', 'verdict': certificate.verdict, 'bracket': value,
            'certificate': certificate_report(certificate)}


def check_master_function(built: BuiltSystem, degree: int, max_res: int, timer: Timer,
                          progress: bool) -> Dict[str, Any]:
    try:
        S = current_master(built, max_res, degree, timer, progress)
    except NoSolutionAtBound as exc:
        return {'check': 'master', 'verdict': INCONCLUSIVE, 'residual': exc.residual, 'reason': str(exc)}
    result = check_master(S, built.spec)
    if result.passed:
        verdict = PASS
    else:
        verdict = FAIL if built.master is not None else INCONCLUSIVE
    return {'check': 'master', 'verdict': verdict,
            'provided': built.master is not None, 'master': S.value, 'residual': result.residual,
            'components': result.residual_table(), 'relations': result.relations}


def check_observables(built: BuiltSystem, degree: int) -> Dict[str, Any]:
    spec = built.spec
    V = spec.dynamics
    forms = {}
    verdicts = []
    for name, omega in built.forms.items():
        entry: Dict[str, Any] = {}
        gauge_variation = {gname: lie_derivative_form(R, omega, spec)
                           for gname, R in zip(spec.generator_names, spec.generators)}
        entry['gauge_variation'] = gauge_variation
        ok = not any(gauge_variation.values())
        if V is not None:
            f = interior_product(V, omega, spec)
            evolution = time_evolution(V, f, spec)
            entry.update({'contraction': f, 'evolution': evolution,
                          'lie_derivative': lie_derivative_form(V, omega, spec)})
            ok = ok and not evolution
        entry['verdict'] = PASS if ok else FAIL
        verdicts.append(entry['verdict'])
        forms[name] = entry
    report = {'check': 'observable', 'verdict': aggregate_verdict(verdicts), 'forms': forms}
    if not forms:
        report['note'] = 'no forms given'
    return report


def command_verify(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    degree, max_res = resolve_bounds(args, built, config)
    requested = built.checks or [c for c in ALL_CHECKS if c != 'master' or built.master is not None]
    checks = []
    for name in requested:
        if name == 'master':
            result = check_master_function(built, degree, max_res, timer, args.progress)
        else:
            func = {'witnesses': check_witnesses, 'jacobi': check_jacobi, 'projectible': check_projectibility,
                    'poisson_vector': check_poisson_vector, 'observable': check_observables}[name]
            result = timer.run(name, func, built, degree)
        checks.append(result)
    conventions = bracket_conventions(built.spec.extended_chart, built.spec.connection)
    return {'command': 'verify', 'degree_bound': degree, 'conventions': conventions, 'checks': checks,
            'verdict': aggregate_verdict([c['verdict'] for c in checks])}


# ---- complete ----

def command_complete(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    degree, max_res = resolve_bounds(args, built, config)
    spec = built.spec
    S0 = built.master or assemble_S0(spec)
    report: Dict[str, Any] = {'command': 'complete', 'degree_bound': degree, 'max_res': max_res, 'S0': S0.value}
    try:
        S = timer.run('complete_master', complete_master, S0, spec, max_res, degree, args.progress)
    except NoSolutionAtBound as exc:
        report.update({'verdict': INCONCLUSIVE, 'reason': str(exc), 'residual': exc.residual, 'step': exc.step})
        return report
    result = check_master(S, spec)
    report.update({'master': S.value, 'steps': S.steps, 'residual': result.residual,
                   'relations': result.relations,
                   'verdict': PASS if result.passed else INCONCLUSIVE})
    if spec.dynamics is not None and result.passed:
        try:
            report['dynamics'] = timer.run('complete_dynamics', complete_dynamics, spec.dynamics, S, spec,
                                           max_res, degree, args.progress)
        except NoSolutionAtBound as exc:
            report['dynamics'] = {'verdict': INCONCLUSIVE, 'reason': str(exc), 'residual': exc.residual}
            report['verdict'] = INCONCLUSIVE
    return report


# ---- bracket ----

_DERIVED_RE = re.compile(r"^derived-(\d+)$")


def command_bracket(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    spec = built.spec
    values = [built.evaluate(text) for text in args.args]
    match = _DERIVED_RE.match(args.op)
    if args.op in ('odd', 'even', 'schouten'):
        if len(values) != 2:
            raise UsageError(f"--op {args.op} takes exactly two arguments")
        F, G = values
        if args.op == 'schouten':
            value = schouten(spec.to_M(F), spec.to_M(G))
            conventions = bracket_conventions(spec.multivector_chart)
        elif args.op == 'odd':
            value = spec.bracket(F, G)
            conventions = bracket_conventions(spec.extended_chart, spec.connection)
        else:
            value = even_bracket(to_tangent(F, spec.tangent_chart), to_tangent(G, spec.tangent_chart))
            conventions = bracket_conventions(spec.tangent_chart)
    elif match:
        k = int(match.group(1))
        if len(values) != k:
            raise UsageError(f"--op {args.op} takes exactly {k} arguments")
        degree, max_res = resolve_bounds(args, built, config)
        S = current_master(built, max_res, degree, timer, args.progress)
        value = derived_bracket(S.value, [spec.to_N(v) for v in values], RESTRICT_TO_M, spec.connection)
        conventions = bracket_conventions(spec.extended_chart, spec.connection)
    else:
        raise UsageError(f"Unknown bracket {args.op!r}; use odd, even, schouten or derived-K")
    return {'command': 'bracket', 'op': args.op, 'arguments': list(args.args), 'conventions': conventions,
            'value': value, 'verdict': PASS}


# ---- lift ----

def command_lift(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    degree, max_res = resolve_bounds(args, built, config)
    S = current_master(built, max_res, degree, timer, args.progress)
    Psi = timer.run('lift', lift_master, S, built.spec)
    square = timer.run('psi_psi', even_bracket, Psi, Psi)
    return {'command': 'lift', 'master': S.value, 'psi': Psi, 'psi_psi': square,
            'qhat': extract_Qhat(Psi).components(), 'verdict': PASS if not square else FAIL}


# ---- cohomology ----

def command_cohomology(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    degree, max_res = resolve_bounds(args, built, config)
    S = current_master(built, max_res, degree, timer, args.progress)
    if args.operator == 'Q':
        operator = extract_Q(S, built.spec)
    else:
        operator = extract_Qhat(lift_master(S, built.spec))
    base_degree = args.deg if args.deg is not None else degree
    trunc = Truncation(base_degree, args.l, args.k, args.max_res)
    status, result = timer.run('cohomology', lemma_check, operator, trunc)
    report: Dict[str, Any] = {
        'command': 'cohomology', 'operator': operator.name, 'k': args.k, 'l': args.l, 'base_degree': base_degree,
        'dimension': result.dimension, 'kernel_dimension': result.kernel_dimension,
        'image_dimension': result.image_dimension, 'source_dimension': result.source_dimension,
        'representatives': result.representatives, 'lemma': status,
    }
    if args.table:
        table = timer.run('table', bigraded_table, operator, range(args.k + 1), range(args.l + 1), base_degree,
                          args.max_res, args.progress)
        print(table.to_string(), file=sys.stderr)
        report['table'] = {str(k): {str(l): int(table.loc[k, l]) for l in table.columns} for k in table.index}
    report['verdict'] = FAIL if status == 'bound too small' else PASS
    return report


# ---- fixtures ----

def command_fixtures(args, built: BuiltSystem, config: GsysConfig, timer: Timer) -> Dict[str, Any]:
    report = command_verify(args, built, config, timer)
    report['command'] = 'fixtures'
    report['source'] = fixture_text(args.name, args.n)
    return report


COMMANDS = {
    'verify': command_verify,
    'complete': command_complete,
    'bracket': command_bracket,
    'lift': command_lift,
    'cohomology': command_cohomology,
    'fixtures': command_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--debug', action='store_true', help='Enable debug logging')
    common.add_argument('--progress', action='store_true', help='Show progress bars on stderr')
    common.add_argument('--timing', action='store_true', help='Add phase timings to the report')
    common.add_argument('--deg', type=int, help='Coefficient degree bound (GSYS_MAX_DEG overrides it)')
    common.add_argument('--max-res', type=int, help='Resolution cap of the perturbative solvers')
    common.add_argument('--output', help='Write the JSON report to this file instead of stdout')
    common.add_argument('--n', type=int, help='Size parameter for fixtures:contact-n and fixtures:triangular-n')

    parser = GsysArgumentParser(description='Verify and complete weak Poisson gauge systems')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=GsysArgumentParser)
    for name in ('verify', 'complete', 'lift'):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument('file', help='.gsys file or fixtures:NAME')
    cmd = sub.add_parser('bracket', parents=[common])
    cmd.add_argument('file', help='.gsys file or fixtures:NAME')
    cmd.add_argument('--op', required=True, help='odd, even, schouten or derived-K')
    cmd.add_argument('args', nargs='+', help='Defined names or expressions')
    cmd = sub.add_parser('cohomology', parents=[common])
    cmd.add_argument('file', help='.gsys file or fixtures:NAME')
    cmd.add_argument('--k', type=int, required=True, help='Momentum degree (Q) or form degree (Qhat)')
    cmd.add_argument('--l', type=int, required=True, help='Ghost number')
    cmd.add_argument('--operator', choices=['Q', 'Qhat'], default='Q')
    cmd.add_argument('--table', action='store_true', help='Also compute the table for 0..k by 0..l')
    cmd = sub.add_parser('fixtures', parents=[common])
    cmd.add_argument('name', help=f"One of {', '.join(fixture_names())}, optionally with -N")
    return parser


def print_summary(report: Dict[str, Any]) -> None:
    for check in report.get('checks', []):
        print(f"{TAGS[check['verdict']]} {check['check']}: {check['verdict']}", file=sys.stderr)
    print(f"{TAGS[report['verdict']]} {report['command']}: {report['verdict']}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = GsysConfig(log_level='DEBUG' if args.debug else None)
    except ValueError as exc:
        print(f"[FAIL] {exc}", file=sys.stderr)
        return USAGE_ERROR
    setup_logging(config.log_level, config.log_file)
    logger.debug(f"Configuration: {config!r}")
    if args.command == 'fixtures':
        args.file = f"fixtures:{args.name}"
    timer = Timer(args.timing)
    try:
        built = timer.run('parse', load, args)
        report = COMMANDS[args.command](args, built, config, timer)
    except ParseError as exc:
        print(f"[FAIL] {args.file}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except UsageError as exc:
        print(f"[FAIL] {exc}", file=sys.stderr)
        return USAGE_ERROR
    except GsysError as exc:
        logger.error(f"Error running {args.command}: {exc}", exc_info=args.debug)
        print(f"[FAIL] {args.command}: {exc}", file=sys.stderr)
        return ENGINE_ERROR
    text = emit_report(report, timer.report)
    if args.output:
        Path(args.output).write_text(text, encoding='utf-8')
        print(f"[INFO] Report written to {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    print_summary(report)
    return EXIT_CODES[report['verdict']]


if __name__ == "__main__":
    sys.exit(main())
