import math

from pytest import mark, raises

from model.families import Family, FamilySpec, axis_curve, random_curves
from model.functions import HoloFunction
from model.geometry import DomainError
from util.harness import (DEFAULT_VERIFY, SUITE_NAMES, WINDOWS, CheckResult, Observation, RegionError,
                          VerifySettingsError, check_dai, check_derivative_growth, check_equivalence,
                          check_growth_equiv, check_hardy_littlewood, check_integral_identity,
                          check_invariant_gradient, check_mobius, check_normal_family,
                          check_pointwise_identities, check_schlicht_pick, check_t_alpha, dai_region,
                          in_window, run_suite, verify_settings)
from util.seminorms import UnsupportedSeminormError


COORDS = FamilySpec(Family.COORDINATE, dim=2)
CONSTANT = ('constant', HoloFunction.constant(2, 0.5))
LINEAR = HoloFunction.ridge([1, 0], [0, 1])
SQUARE = HoloFunction.ridge([1, 0], [0, 0, 1])
CUBE = HoloFunction.ridge([1, 0], [0, 0, 0, 1])
QF_SQUARE = 4.0 / (3.0 * math.sqrt(3.0))


def _failures(result: CheckResult):
    return [o for o in result.observed if not o.passed]


def test_declared_windows():
    assert WINDOWS['ratio'] == (0.125, 8.0)
    assert in_window(1.0) and in_window(8.0)
    assert not in_window(float('nan')) and not in_window(9.0)


def test_check_result_passes_only_when_every_observation_does(plan):
    ok = Observation('f', 'q', 1.0)
    bad = Observation('f', 'q', 2.0, passed=False)
    assert CheckResult.build('c', [ok, ok], 0.1, plan).passed
    result = CheckResult.build('c', [ok, bad], 0.1, plan)
    assert not result.passed
    assert result.plan_fingerprint == plan.fingerprint()
    merged = CheckResult.merge('c', [CheckResult.build('c', [ok], 0.1, None), result])
    assert not merged.passed and len(merged.observed) == 3


def test_mobius(plan):
    result = check_mobius(plan, dims=(1, 2), pairs=200, bases=10)
    assert result.passed, _failures(result)
    kinds = {o.kind for o in result.observed}
    assert {'involution', 'base_point', 'metric_identity', 'contraction_excess', 'disk_formula'} <= kinds


def test_invariant_gradient(plan):
    family = FamilySpec(Family.RANDOM_POLY, dim=2, degree=4, terms=6, count=3)
    result = check_invariant_gradient(family, plan, points=20)
    assert result.passed, _failures(result)


def test_pointwise_identities(plan):
    extra = [('log', HoloFunction.ridge([0, 1], [0, 1, 0.5, 1 / 3])), CONSTANT]
    result = check_pointwise_identities(COORDS, plan, extra)
    assert result.passed, _failures(result)
    assert any(o.kind == 'decomposition_identity' for o in result.observed)


def test_integral_identity():
    f = HoloFunction.monomial((2, 1), 0.3j) + HoloFunction.ridge([0.6, 0.8j], [0, 1, -0.5, 0.25])
    result = check_integral_identity(f, [1, 0], [0.6, 0.8], 0.7)
    assert result.passed
    assert result.plan_fingerprint == ''
    with raises(DomainError):
        check_integral_identity(f, [1, 0], [0, 1], 1.0)


@mark.parametrize('alpha', (0.5, 1.0, 2.0))
def test_equivalence_on_coordinates(alpha, plan):
    result = check_equivalence(COORDS, alpha, plan)
    assert result.passed, _failures(result)
    ratios = [o.ratio_value for o in result.observed if o.ratio_name == 'S1/S2']
    expected = (1 + alpha) ** (1 + alpha) / alpha ** alpha
    assert all(abs(rho - expected) <= 1e-3 * expected for rho in ratios)


def test_equivalence_needs_positive_alpha(plan):
    with raises(UnsupportedSeminormError):
        check_equivalence(COORDS, 0.0, plan)


@mark.parametrize('alpha', (0.25, 0.5, 1.0))
def test_t_alpha(alpha, plan):
    result = check_t_alpha(alpha, plan, COORDS)
    assert result.passed, _failures(result)


def test_t_alpha_blow_up_value(plan):
    result = check_t_alpha(0.25, plan, COORDS)
    (point,) = [o for o in result.observed if o.kind == 'S4_pointwise']
    assert point.value >= 13.0


def test_t_alpha_needs_two_dimensions(plan):
    with raises(UnsupportedSeminormError):
        check_t_alpha(0.5, plan, dim=1)


def test_schlicht_pick(plan):
    curves = [axis_curve(2)] + random_curves(3, 2, seed=42)
    for f, qf in ((LINEAR, 1.0), (SQUARE, QF_SQUARE)):
        result = check_schlicht_pick(f, qf, curves, plan, attaining=0)
        assert result.passed, _failures(result)
    assert check_schlicht_pick(CONSTANT[1], 0.0, curves, plan).passed


def test_normal_family(plan):
    for f, qf in ((LINEAR, 1.0), (SQUARE, QF_SQUARE)):
        result = check_normal_family(f, qf, plan, bases=3)
        assert result.passed, _failures(result)
        assert len(result.observed) == 4


@mark.parametrize('alpha', (0.5, 1.0))
def test_hardy_littlewood(alpha, plan):
    result = check_hardy_littlewood(COORDS, alpha, plan, [CONSTANT])
    assert result.passed, _failures(result)


def test_hardy_littlewood_range(plan):
    with raises(UnsupportedSeminormError):
        check_hardy_littlewood(COORDS, 1.5, plan)


@mark.parametrize('alpha, ratio', ((1.5, 2.6), (2.0, 4.0)))
def test_growth_equivalence(alpha, ratio, plan):
    result = check_growth_equiv(COORDS, alpha, plan, [CONSTANT])
    assert result.passed, _failures(result)
    ratios = [o.ratio_value for o in result.observed
              if o.ratio_name == 'S1/GROWTH(a-1)' and o.function_id != 'constant']
    assert all(abs(rho - ratio) <= 0.01 * ratio for rho in ratios)
    with raises(UnsupportedSeminormError):
        check_growth_equiv(COORDS, 1.0, plan)


@mark.parametrize('alpha, lam, region', ((2.0, 0.5, 'i'), (2.0, 1.5, 'ii'), (3.0, 1.5, 'i'), (3.0, 2.0, 'ii'),
                                         (1.5, 0.25, 'i'), (1.5, 1.25, 'ii'), (0.5, 0.25, 'zhao'),
                                         (1.0, 0.5, 'zhao'), (1.5, 0.75, 'zhao'), (1.0, 0.0, 'iii'),
                                         (2.0, 2.0, 'iii')))
def test_dai_region(alpha, lam, region):
    assert dai_region(alpha, lam) == region


@mark.parametrize('alpha, lam', ((0.5, 0.75), (-1.0, 0.0)))
def test_dai_region_outside(alpha, lam):
    with raises(RegionError):
        dai_region(alpha, lam)


@mark.parametrize('alpha, lam', ((1.0, 0.5), (2.0, 0.5), (2.0, 1.5)))
def test_dai_quotient_regions(alpha, lam, plan):
    result = check_dai(COORDS, alpha, lam, plan, [CONSTANT])
    assert result.passed, _failures(result)


def test_dai_bounded_region(plan):
    result = check_dai(COORDS, 1.0, 0.0, plan, [('cube', CUBE)], pairs=200)
    assert result.passed, _failures(result)
    assert any(o.kind == 'pair_bound_excess' for o in result.observed)


def test_derivative_growth(plan):
    result = check_derivative_growth(COORDS, 0.5, plan, [CONSTANT])
    assert result.passed, _failures(result)
    names = {o.kind for o in result.observed}
    assert {'profile_tangential', 'profile_radial_from_tangential', 'profile_radial'} <= names


def test_derivative_growth_needs_two_dimensions(plan):
    with raises(UnsupportedSeminormError):
        check_derivative_growth(FamilySpec(Family.COORDINATE, dim=1), 0.5, plan)


def test_verify_settings_overlay():
    settings = verify_settings({'mobius': {'pairs': 10}, 'growth': {'alphas': [3.0]}})
    assert settings['mobius'] == {'dims': [1, 2, 8], 'pairs': 10}
    assert settings['growth']['alphas'] == [3.0]
    assert DEFAULT_VERIFY['mobius']['pairs'] == 10000
    assert verify_settings(None) == DEFAULT_VERIFY


@mark.parametrize('cfg', ({'small_poly': {'term': 6}}, {'small_poly': {'terms': '6'}},
                          {'smal_poly': {'terms': 6}}, {'mobius': [1, 2]}, {'mobius': {'pairs': 0}},
                          {'mobius': {'dims': [0]}}, {'growth': {'alphas': []}},
                          {'t_alpha': {'alphas': [float('inf')]}}, {'dai': {'regions': [[2.0]]}},
                          {'dai': {'regions': [[0.5, 2.0]]}}, {'random_poly': {'degree': 40}}, [1]))
def test_verify_settings_rejects_bad_config(cfg):
    with raises(ValueError):
        verify_settings(cfg)


def test_verify_settings_names_the_bad_key():
    with raises(VerifySettingsError, match='term'):
        verify_settings({'small_poly': {'term': 6}})


def test_run_suite(plan):
    results = run_suite('mobius', plan, {'mobius': {'dims': [1, 2], 'pairs': 200}})
    assert len(results) == 1
    assert results[0].check_id == 'mobius' and results[0].passed
    assert 'all' in SUITE_NAMES
    with raises(ValueError):
        run_suite('nope', plan)
