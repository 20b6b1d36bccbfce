"""
JSON verification reports.

Exact rationals become "p/q" strings and polynomials their canonical text.
Keys keep the order the report was assembled in, except that
"schema_version" always comes first.
"""
import json
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import pandas as pd

sys.path.append(str(Path(__file__).parent.parent))
from gsys_utils import fraction_text
from graded.superpoly import SuperPolynomial
from gauge.system import MasterFunction, MembershipCertificate

SCHEMA_VERSION = '1.0'


def certificate_report(certificate: MembershipCertificate) -> Dict[str, Any]:
    report: Dict[str, Any] = {'verdict': certificate.verdict, 'bound': certificate.degree_bound}
    if certificate.target is not None:
        report['target'] = certificate.target
    if certificate.is_member:
        report['constraint_witnesses'] = list(certificate.constraint_witnesses)
        report['generator_witnesses'] = list(certificate.generator_witnesses)
    if certificate.reason:
        report['reason'] = certificate.reason
    return report


def to_jsonable(value: Any) -> Any:
    if isinstance(value, SuperPolynomial):
        return value.to_text()
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, MembershipCertificate):
        return to_jsonable(certificate_report(value))
    if isinstance(value, MasterFunction):
        return {'value': value.value.to_text(), 'verified': value.verified,
                'verified_degree_bound': value.verified_degree_bound}
    if isinstance(value, pd.DataFrame):
        return [{str(k): to_jsonable(v) for k, v in row.items()} for row in value.to_dict(orient='records')]
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if is_dataclass(value):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
    if hasattr(value, 'item'):
        # numpy scalars coming out of pandas tables
        return to_jsonable(value.item())
    raise TypeError(f"Cannot serialize {type(value).__name__} in a report")


def emit_report(results: Mapping[str, Any], timing: Optional[Mapping[str, float]] = None) -> str:
    report: Dict[str, Any] = {'schema_version': SCHEMA_VERSION}
    report.update({k: v for k, v in results.items() if k != 'schema_version'})
    if timing is not None:
        report['timing'] = {k: round(v, 3) for k, v in timing.items()}
    return json.dumps(to_jsonable(report), indent=2, ensure_ascii=False) + '\n'
