import json
import logging
import math
import os
import tempfile
import time
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from util.harness import CheckResult, Observation
from util.seminorms import SeminormEstimate


logger = logging.getLogger(__name__)

CSV_COLUMNS = ['check_id', 'function_id', 'kind', 'alpha', 'lambda', 'convention', 'value',
               'witness_radius', 'ratio_name', 'ratio_value', 'pass']
FORMATS = ('csv', 'json')


def _row(check_id: str, o: Observation) -> dict:
    return {'check_id': check_id, 'function_id': o.function_id, 'kind': o.kind, 'alpha': o.alpha,
            'lambda': o.lam, 'convention': o.convention, 'value': o.value,
            'witness_radius': o.witness_radius, 'ratio_name': o.ratio_name,
            'ratio_value': o.ratio_value, 'pass': bool(o.passed)}


def results_frame(results: Sequence[CheckResult]) -> pd.DataFrame:
    rows = [_row(r.check_id, o) for r in results for o in r.observed]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def estimates_frame(command: str, estimates: Iterable[Tuple[str, SeminormEstimate]]) -> pd.DataFrame:
    """rows for single seminorm / quotient evaluations, one per (function, estimate)"""
    rows = [_row(command, Observation.of(fid, est)) for fid, est in estimates]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def _clean(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def frame_to_json(frame: pd.DataFrame, checks: Optional[Sequence[CheckResult]] = None) -> str:
    doc = {'rows': [{k: _clean(v) for k, v in row.items()} for row in frame.to_dict(orient='records')]}
    if checks is not None:
        doc['checks'] = [{'check_id': r.check_id, 'pass': bool(r.passed), 'tolerance': _clean(r.tolerance),
                          'plan_fingerprint': r.plan_fingerprint} for r in checks]
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format='%.17g')


def atomic_write(path: str, text: str) -> None:
    """write to a temp file in the target directory, then rename over the target"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as wf:
            wf.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_report(frame: pd.DataFrame, path: str, fmt: str,
                 checks: Optional[Sequence[CheckResult]] = None, fingerprint: str = '') -> None:
    """report file plus a <path>.meta.json sidecar holding the wall-clock time"""
    if fmt not in FORMATS:
        raise ValueError('unknown report format {!r}, expected one of {}'.format(fmt, FORMATS))
    text = frame_to_csv(frame) if fmt == 'csv' else frame_to_json(frame, checks)
    atomic_write(path, text)
    meta = {'created': time.strftime('%Y-%m-%d %H-%M-%S', time.localtime()), 'format': fmt,
            'plan_fingerprint': fingerprint, 'rows': int(len(frame))}
    atomic_write(path + '.meta.json', json.dumps(meta, indent=2, sort_keys=True))
    logger.info('[report]\tpath: {}\trows: {}'.format(path, len(frame)))


def read_report(path: str) -> pd.DataFrame:
    if path.endswith('.json'):
        with open(path, 'r', encoding='utf-8') as rf:
            doc = json.load(rf)
        return pd.DataFrame(doc.get('rows', []), columns=CSV_COLUMNS)
    return pd.read_csv(path)


def summarize(path: str) -> pd.DataFrame:
    """
    Per-check counts of passing and failing rows and the observed ratio range.
    """
    frame = read_report(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError('{} is not a report: missing columns {}'.format(path, ', '.join(missing)))
    passed = frame['pass'].astype(str).str.lower() == 'true'
    frame = frame.assign(passed=passed, failed=~passed)
    summary = frame.groupby('check_id', sort=True).agg(rows=('passed', 'size'), passed=('passed', 'sum'),
                                                      failed=('failed', 'sum'),
                                                      ratio_min=('ratio_value', 'min'),
                                                      ratio_max=('ratio_value', 'max'))
    return summary.reset_index()

