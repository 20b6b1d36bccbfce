"""
End-to-end tests of the run_gsys command line.

Run with pytest, or directly: python test_cli.py
"""
import json
import subprocess
import sys
from pathlib import Path

import pytest

import run_gsys
from run_gsys import ENGINE_ERROR, USAGE_ERROR, main
from gauge.forms import CartanMismatch

ROOT = Path(__file__).parent


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_verify_heisenberg(capsys):
    code, report = run(['verify', 'fixtures:heisenberg'], capsys)
    assert code == 0
    assert list(report)[0] == 'schema_version'
    assert report['verdict'] == 'pass'
    assert [c['check'] for c in report['checks']] == ['jacobi', 'projectible', 'poisson_vector', 'observable']
    jacobi = report['checks'][0]
    assert jacobi['bracket'] == '2*xs1*xs2*xs3'
    observable = report['checks'][3]['forms']['theta']
    assert observable['contraction'] == '1/2*x^2 + 1/2*y^2'
    assert observable['evolution'] == '0'
    assert report['conventions']['connection'] == 'flat'


def test_verify_contact(capsys):
    code, report = run(['verify', 'fixtures:contact'], capsys)
    assert code == 0
    assert report['checks'][3]['forms']['theta']['contraction'] == '-q1*p1'


def test_verify_triangular_witnesses(capsys):
    _, report = run(['verify', 'fixtures:triangular-3', '--timing'], capsys)
    witnesses = report['checks'][0]
    assert witnesses['check'] == 'witnesses'
    assert witnesses['verdict'] == 'pass'
    assert witnesses['residuals'] == {'(R12,R23)': '0'}
    assert 'parse' in report['timing']


def test_cohomology_heisenberg(capsys):
    code, report = run(['cohomology', 'fixtures:heisenberg', '--k', '0', '--l', '0', '--deg', '2'], capsys)
    assert code == 0
    assert report['dimension'] == 6
    assert report['source_dimension'] == 10
    assert report['operator'] == 'Q'


def test_bracket_schouten(capsys):
    code, report = run(['bracket', 'fixtures:heisenberg', '--op', 'schouten', 'X', 'Y'], capsys)
    assert code == 0
    assert report['value'] == 'xs3'


def test_bracket_reports_conventions(capsys):
    _, report = run(['bracket', 'fixtures:heisenberg', '--op', 'odd', 'X', 'Y'], capsys)
    conventions = report['conventions']
    assert (conventions['bracket'], conventions['connection']) == ('odd', 'flat')
    assert '(xs1, x) = 1' in conventions['pairings']
    assert '(cs1, c1) = 1' in conventions['pairings']
    assert conventions['twisted_entries']['(x*_i, z*_C)'] == '-A^D_{iC} z*_D'
    _, report = run(['bracket', 'fixtures:heisenberg', '--op', 'even', 'x', 'y'], capsys)
    assert report['conventions']['bracket'] == 'even'
    assert '(dxs1, x) = 1' in report['conventions']['pairings']
    assert '(dx, xs1) = -1' in report['conventions']['pairings']


def test_twisted_bracket_convention(tmp_path, capsys):
    path = tmp_path / 'twisted.gsys'
    path.write_text("coords x y;\ngauge R1 = d/dx;\ngauge R2 = d/dy;\nstructure (R1, R2) = 0;\n"
                    "connection (c1, c2, x) = y;\n", encoding='utf-8')
    code, report = run(['bracket', str(path), '--op', 'odd', 'xs1', 'cs2'], capsys)
    assert code == 0
    assert report['value'] == '-y*cs1'
    assert report['conventions']['connection'] == 'twisted'


def test_engine_errors_and_bugs(monkeypatch, capsys):
    def rejected(*args):
        raise CartanMismatch("Lie derivative disagrees with the Cartan formula")

    monkeypatch.setitem(run_gsys.COMMANDS, 'lift', rejected)
    assert main(['lift', 'fixtures:heisenberg']) == ENGINE_ERROR
    assert '[FAIL] lift: Lie derivative disagrees' in capsys.readouterr().err

    def broken(*args):
        raise RuntimeError("index out of range")

    monkeypatch.setitem(run_gsys.COMMANDS, 'lift', broken)
    with pytest.raises(RuntimeError):
        main(['lift', 'fixtures:heisenberg'])


def test_lift(capsys):
    code, report = run(['lift', 'fixtures:heisenberg'], capsys)
    assert code == 0
    assert report['psi_psi'] == '0'
    assert report['qhat']['z'] == 'c1'


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / 'broken.gsys'
    path.write_text("coords x;\nvector X = (y,);\n", encoding='utf-8')
    assert main(['verify', str(path)]) == USAGE_ERROR
    assert 'line 2, column 13' in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(['verify', 'fixtures:sphere']) == USAGE_ERROR
    assert main(['verify', 'no/such/file.gsys']) == USAGE_ERROR
    with pytest.raises(SystemExit) as raised:
        main(['verify'])
    assert raised.value.code == USAGE_ERROR


def test_subprocess_output_file(tmp_path):
    output = tmp_path / 'report.json'
    result = subprocess.run([sys.executable, str(ROOT / 'run_gsys.py'), 'fixtures', 'heisenberg',
                             '--output', str(output)], capture_output=True, text=True, cwd=ROOT)
    assert result.returncode == 0, result.stderr
    report = json.loads(output.read_text(encoding='utf-8'))
    assert report['command'] == 'fixtures'
    assert report['source'].startswith('# Heisenberg')
    assert '[OK] fixtures: pass' in result.stderr
