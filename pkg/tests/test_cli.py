import os

from pytest import fixture, mark, raises

import bloch
from util.sampler import SamplingPlan

from .conftest import DATASET


SMALL = ['--radial-levels', '8', '--directions', '6', '--pair-samples', '100', '--refine-steps', '20',
         '--angles', '16']
COORD2 = os.path.join(DATASET, 'coordinate2.json')
LINEAR = os.path.join(DATASET, 'linear.json')


@fixture
def small_config(tmp_path):
    path = tmp_path / 'config.yml'
    path.write_text('plan:\n'
                    '  radial_levels: 6\n'
                    '  directions_per_level: 4\n'
                    '  pair_samples: 50\n'
                    '  refine_steps: 0\n'
                    '  angles: 8\n'
                    '  seed: 42\n'
                    'verify:\n'
                    '  mobius: {dims: [1, 2], pairs: 100}\n')
    return str(path)


def test_seminorm_of_linear_function(capsys):
    code = bloch.main(['seminorm', '--fn', LINEAR, '--kind', '1', '--alpha', '1.0'] + SMALL)
    out = capsys.readouterr().out
    assert code == bloch.EXIT_OK
    assert 'function: linear' in out
    assert 'value: 0.5\t' in out
    assert 'witness_radius: 0\n' in out


def test_seminorm_writes_report(capsys, tmp_path):
    path = str(tmp_path / 'seminorm.json')
    code = bloch.main(['seminorm', '--fn', LINEAR, '--fn', COORD2, '--kind', 'growth', '--output', path,
                       '--format', 'json'] + SMALL)
    assert code == bloch.EXIT_OK
    assert 'Saved report: {}'.format(path) in capsys.readouterr().out
    assert os.path.exists(path) and os.path.exists(path + '.meta.json')


def test_s4_dimension_guard(capsys):
    code = bloch.main(['seminorm', '--kind', '4', '--alpha', '0.5', '--fn', COORD2, '--dim', '1'])
    assert code == bloch.EXIT_INPUT
    assert 'S4' in capsys.readouterr().err


def test_dimension_mismatch(capsys):
    code = bloch.main(['seminorm', '--fn', COORD2, '--dim', '3'] + SMALL)
    assert code == bloch.EXIT_INPUT
    assert 'dimension 2' in capsys.readouterr().err


def test_malformed_spec(capsys, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"dim": 2,\n "terms": [')
    assert bloch.main(['seminorm', '--fn', str(path)] + SMALL) == bloch.EXIT_INPUT
    assert 'line 2' in capsys.readouterr().err


def test_schema_violation(capsys, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"dim": 2, "terms": [{"type": "monomial", "exponents": [1, 0, 0], "coeff": [1, 0]}]}')
    assert bloch.main(['seminorm', '--fn', str(path)] + SMALL) == bloch.EXIT_INPUT
    assert 'terms[0].exponents' in capsys.readouterr().err


def test_missing_file(capsys, tmp_path):
    path = str(tmp_path / 'nowhere.json')
    assert bloch.main(['seminorm', '--fn', path] + SMALL) == bloch.EXIT_INPUT
    assert path in capsys.readouterr().err


def test_eval(capsys):
    code = bloch.main(['eval', '--fn', COORD2, '--point', '0.5', '0.25j', '--point', '0', '0'])
    out = capsys.readouterr().out
    assert code == bloch.EXIT_OK
    assert out.count('[eval]') == 2
    assert '|inv grad|: 1\n' in out


def test_quotient(capsys):
    assert bloch.main(['quotient', '--fn', COORD2, '--alpha', '1.0'] + SMALL) == bloch.EXIT_OK
    assert 'kind: LIP' in capsys.readouterr().out
    assert bloch.main(['quotient', '--fn', COORD2, '--alpha', '1.0', '--lam', '0.5'] + SMALL) == bloch.EXIT_OK
    assert 'kind: SWEIGHTED' in capsys.readouterr().out
    assert bloch.main(['quotient', '--fn', COORD2, '--alpha', '1.5'] + SMALL) == bloch.EXIT_INPUT


def test_verify_is_reproducible(capsys, tmp_path, small_config):
    paths = [str(tmp_path / name) for name in ('a.csv', 'b.csv')]
    for path in paths:
        assert bloch.main(['verify', '--suite', 'mobius', '--config', small_config, '--output', path]) == bloch.EXIT_OK
    with open(paths[0], 'rb') as a, open(paths[1], 'rb') as b:
        assert a.read() == b.read()
    assert 'failed: 0' in capsys.readouterr().out

    assert bloch.main(['report', paths[0], '--config', small_config]) == bloch.EXIT_OK
    assert 'mobius' in capsys.readouterr().out


def test_make_config_overrides_plan(small_config):
    args = bloch.build_parser().parse_args(['verify', '--suite', 'dai', '--seed', '7'])
    cfg = bloch.make_config(args, bloch._load_cfg(small_config))
    assert cfg.plan == SamplingPlan(radial_levels=6, directions_per_level=4, pair_samples=50,
                                    refine_steps=0, angles=8, seed=7)
    assert cfg.output is None
    assert cfg.suite == 'dai'


def test_default_verify_output():
    args = bloch.build_parser().parse_args(['verify', '--suite', 'growth'])
    cfg = bloch.make_config(args, {'output': {'dir': 'exp/output', 'format': 'json'}})
    assert cfg.output == os.path.join(bloch.root_dir, 'exp/output', 'verify_growth_seed42.json')


def test_unknown_suite_is_rejected():
    with raises(SystemExit):
        bloch.main(['verify', '--suite', 'nope'])


@fixture
def reduced_config(tmp_path):
    """default sampling plan, every suite with fewer functions, pairs and parameters"""
    path = tmp_path / 'reduced.yml'
    path.write_text('verify:\n'
                    '  random_poly: {count: 2}\n'
                    '  small_poly: {count: 2}\n'
                    '  mobius: {dims: [1, 2], pairs: 200}\n'
                    '  invariant_gradient: {points: 20}\n'
                    '  integral: {triples: 2}\n'
                    '  equivalence: {alphas: [1.0]}\n'
                    '  schlicht: {curves: 2}\n'
                    '  normal: {bases: 2}\n'
                    '  hardy_littlewood: {alphas: [0.5]}\n'
                    '  growth: {alphas: [1.5]}\n'
                    '  dai: {regions: [[2.0, 0.5], [2.0, 1.5], [1.0, 0.5], [1.0, 0.0]], pairs: 200}\n'
                    '  derivative_growth: {alphas: [0.5]}\n')
    return str(path)


@mark.parametrize('fmt', ('csv', 'json'))
def test_verify_all_is_reproducible(fmt, capsys, tmp_path, reduced_config):
    paths = [str(tmp_path / 'run{}.{}'.format(k, fmt)) for k in range(2)]
    for path in paths:
        code = bloch.main(['verify', '--suite', 'all', '--config', reduced_config, '--output', path,
                           '--format', fmt])
        assert code == bloch.EXIT_OK, capsys.readouterr().out
    with open(paths[0], 'rb') as a, open(paths[1], 'rb') as b:
        assert a.read() == b.read()
    out = capsys.readouterr().out
    assert out.count('checks: ') == 2 and 'failed: 0' in out


def test_verify_rejects_unknown_family_key(capsys, tmp_path):
    path = tmp_path / 'typo.yml'
    path.write_text('verify:\n'
                    '  small_poly: {term: 6}\n')
    assert bloch.main(['verify', '--suite', 'growth', '--config', str(path)]) == bloch.EXIT_INPUT
    assert 'term' in capsys.readouterr().err


def test_config_sections_must_be_mappings(capsys, tmp_path):
    path = tmp_path / 'flat.yml'
    path.write_text('plan: 3\n')
    assert bloch.main(['verify', '--suite', 'mobius', '--config', str(path)]) == bloch.EXIT_INPUT
    assert 'plan' in capsys.readouterr().err
    path.write_text('- mobius\n')
    assert bloch.main(['verify', '--suite', 'mobius', '--config', str(path)]) == bloch.EXIT_INPUT


def test_seminorm_of_padded_ridge(capsys, tmp_path):
    path = tmp_path / 'padded.json'
    path.write_text('{"dim": 2, "terms": [{"type": "ridge", "direction": [[1, 0], [0, 0]],'
                    ' "coeffs": [[0, 0], [1, 0], [0, 0]]}]}')
    code = bloch.main(['seminorm', '--fn', str(path), '--kind', '3', '--alpha', '1.0'] + SMALL)
    assert code == bloch.EXIT_OK
    assert 'kind: S3' in capsys.readouterr().out
