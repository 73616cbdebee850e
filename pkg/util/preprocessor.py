import json
import os
from typing import Any, List, Optional, Union

import numpy as np
import yaml

from model.functions import RIDGE_UNIT_TOL, HoloFunction, MonomialTerm, RidgeTerm


class SpecSchemaError(ValueError):
    """
    Function-spec violation
    Args:
        message: what is wrong
        field: path of the offending field, e.g. terms[2].exponents
        line, column: position of a JSON syntax error
    """
    def __init__(self, message: str, field: str = '', line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        where = []
        if field:
            where.append('field {}'.format(field))
        if line is not None:
            where.append('line {} column {}'.format(line, column))
        super().__init__('{} ({})'.format(message, ', '.join(where)) if where else message)


def read_cfg(cfg_file):
    """
    Read configurations from yaml file
    Args:
        cfg_file (.yaml): path to cfg yaml
    Returns:
        (dict): configuration in dict
    """
    with open(cfg_file, 'r') as rf:
        cfg = yaml.safe_load(rf)
        return cfg or {}


def _complex(value: Any, field: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise SpecSchemaError('expected a complex number as [re, im]', field)
    return complex(float(value[0]), float(value[1]))


def _complex_list(value: Any, field: str) -> List[complex]:
    if not isinstance(value, list):
        raise SpecSchemaError('expected a list of [re, im] pairs', field)
    return [_complex(v, '{}[{}]'.format(field, i)) for i, v in enumerate(value)]


def _monomial(term: dict, dim: int, field: str) -> MonomialTerm:
    exps = term.get('exponents')
    if not isinstance(exps, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in exps):
        raise SpecSchemaError('exponents must be a list of integers', field + '.exponents')
    if len(exps) != dim:
        raise SpecSchemaError('exponents has length {}, dim is {}'.format(len(exps), dim), field + '.exponents')
    if any(e < 0 for e in exps):
        raise SpecSchemaError('exponents must be nonnegative', field + '.exponents')
    coeff = _complex(term.get('coeff'), field + '.coeff')
    try:
        return MonomialTerm(tuple(exps), coeff)
    except ValueError as e:
        raise SpecSchemaError(str(e), field + '.exponents') from None


def _ridge(term: dict, dim: int, field: str) -> RidgeTerm:
    direction = _complex_list(term.get('direction'), field + '.direction')
    if len(direction) != dim:
        raise SpecSchemaError('direction has length {}, dim is {}'.format(len(direction), dim), field + '.direction')
    r = float(np.linalg.norm(np.array(direction, dtype=np.complex128)))
    if abs(r - 1.0) > RIDGE_UNIT_TOL:
        raise SpecSchemaError('direction must be a unit vector, got norm {:.12g}'.format(r), field + '.direction')
    coeffs = _complex_list(term.get('coeffs'), field + '.coeffs')
    try:
        return RidgeTerm(tuple(direction), tuple(coeffs))
    except ValueError as e:
        raise SpecSchemaError(str(e), field + '.coeffs') from None


def parse_function_spec(text: Union[bytes, str]) -> HoloFunction:
    """
    Parse the JSON function spec
        {"dim": n, "terms": [{"type": "monomial", "exponents": [...], "coeff": [re, im]},
                             {"type": "ridge", "direction": [[re, im], ...], "coeffs": [[re, im], ...]}]}
    """
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise SpecSchemaError('spec is not UTF-8: {}'.format(e.reason)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecSchemaError('malformed JSON: {}'.format(e.msg), line=e.lineno, column=e.colno) from None

    if not isinstance(doc, dict):
        raise SpecSchemaError('spec must be a JSON object', '$')
    dim = doc.get('dim')
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecSchemaError('dim must be a positive integer', 'dim')
    terms = doc.get('terms')
    if not isinstance(terms, list):
        raise SpecSchemaError('terms must be a list', 'terms')

    parsed = []
    for i, term in enumerate(terms):
        field = 'terms[{}]'.format(i)
        if not isinstance(term, dict):
            raise SpecSchemaError('term must be an object', field)
        kind = term.get('type')
        if kind == 'monomial':
            parsed.append(_monomial(term, dim, field))
        elif kind == 'ridge':
            parsed.append(_ridge(term, dim, field))
        else:
            raise SpecSchemaError('unknown term type {!r}'.format(kind), field + '.type')
    return HoloFunction(dim, tuple(parsed))


def _pair(c: complex) -> List[float]:
    return [float(c.real), float(c.imag)]


def serialize_function_spec(f: HoloFunction) -> str:
    terms = []
    for t in f.terms:
        if isinstance(t, MonomialTerm):
            terms.append({'type': 'monomial', 'exponents': list(t.exponents), 'coeff': _pair(t.coeff)})
        else:
            terms.append({'type': 'ridge', 'direction': [_pair(c) for c in t.direction],
                          'coeffs': [_pair(c) for c in t.coeffs]})
    return json.dumps({'dim': f.dim, 'terms': terms}, indent=2)


def load_function_spec(path: str) -> HoloFunction:
    """read and parse a function spec file; OSError propagates with the path"""
    with open(path, 'rb') as rf:
        return parse_function_spec(rf.read())


def function_id(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]
