import math

import numpy as np
from hypothesis import given
from hypothesis.strategies import floats
from pytest import mark, raises

from model.functions import DiskSeries, HoloFunction
from model.geometry import as_point, norm
from util.sampler import SamplingPlan
from util.seminorms import (Convention, Kind, SupMeter, UnsupportedSeminormError, bloch_norm,
                            disk_bloch_norm, estimate, estimate_seminorm, invariant_gradient_fd,
                            invariant_gradient_norm, invariant_gradient_norm_algebraic,
                            invariant_gradient_oracle, lipschitz_quotient, point_diff,
                            pointwise_quantity, quotient_pairs, validate_request,
                            weight_exponent, weighted_quotient)


QF_SQUARE = 4.0 / (3.0 * math.sqrt(3.0))


def _square(dim=2):
    """<x, e_1>^2"""
    return HoloFunction.ridge(np.eye(dim)[0], [0, 0, 1])


def _poly():
    return (HoloFunction.monomial((1, 1), 0.5 - 0.2j) + HoloFunction.monomial((0, 3), 0.3)
            + HoloFunction.monomial((2, 0), -0.4j) + HoloFunction.coordinate(2, 0, 0.7))


@mark.parametrize('token, kind', (('1', Kind.S1), (4, Kind.S4), ('growth', Kind.GROWTH),
                                  ('disk-bloch', Kind.DISK_BLOCH), (Kind.QF, Kind.QF)))
def test_kind_parse(token, kind):
    assert Kind.parse(token) is kind


def test_kind_parse_rejects_unknown():
    with raises(UnsupportedSeminormError):
        Kind.parse('S5')


def test_weight_conventions():
    r = np.array([0.0, 0.5])
    assert np.array_equal(Convention.ONE_MINUS_NORM.weight(r), [1.0, 0.5])
    assert np.array_equal(Convention.ONE_MINUS_NORM_SQ.weight(r), [1.0, 0.75])
    assert weight_exponent(Kind.S4, 0.5) == -0.5
    assert weight_exponent(Kind.QF, 3.0) == 0.0


def test_sup_meter_keeps_first_witness_on_ties():
    meter = SupMeter()
    meter.update([1.0, 3.0, 3.0], lambda i: (i,))
    meter.update([3.0], lambda i: ('later',))
    assert meter.val == 3.0
    assert meter.witness == (1,)
    assert meter.count == 4


def test_point_diff():
    f = HoloFunction.monomial((1, 1))
    d = point_diff(f, [0.5, 0.2])
    assert math.isclose(d.value.real, 0.1)
    assert math.isclose(d.radial.real, 0.2)
    assert math.isclose(d.grad_norm, math.sqrt(0.29))
    assert not d.grad.flags.writeable


@given(floats(min_value=0.0, max_value=0.95), floats(min_value=0.0, max_value=2 * math.pi))
def test_invariant_gradient_forms_agree(r, theta):
    f = _poly()
    x = as_point([r * math.cos(theta), 1j * r * math.sin(theta)])
    closed = float(invariant_gradient_norm(f, x))
    assert abs(closed - float(invariant_gradient_norm_algebraic(f, x))) <= 1e-9 * max(1.0, closed)
    assert abs(closed - invariant_gradient_fd(f, x)) <= 1e-5


def test_invariant_gradient_oracle(plan):
    f = _poly()
    for x in ([0.0, 0.0], [0.3, -0.5j], [0.9, 0.1]):
        closed = float(invariant_gradient_norm(f, x))
        oracle = invariant_gradient_oracle(f, x, plan)
        assert oracle <= closed + 1e-12 * max(1.0, closed)
        assert oracle >= closed - 1e-9 * max(1.0, closed)


def test_invariant_gradient_of_coordinate():
    # |grad~ x_2|^2 = (1 - |x|^2)(1 - |x_2|^2)
    f = HoloFunction.coordinate(2, 1)
    x = as_point([0.6, 0.0])
    assert math.isclose(invariant_gradient_norm(f, x), 0.8)
    assert invariant_gradient_norm(f, np.zeros(2)) == 1.0


def test_invariant_gradient_batch():
    f = _poly()
    xs = np.array([[0.1, 0.2j], [0.5, 0.0], [0.0, 0.0]])
    batch = invariant_gradient_norm(f, xs)
    assert batch.shape == (3,)
    for x, v in zip(xs, batch):
        assert math.isclose(invariant_gradient_norm(f, x), v)


def test_fd_step_range():
    with raises(ValueError):
        invariant_gradient_fd(_poly(), [0.1, 0.1], h=1e-3)


@mark.parametrize('alpha', (0.5, 1.0, 2.0))
def test_s1_of_linear_function(alpha, plan):
    a = np.array([0.3, -0.4j])
    est = estimate_seminorm(HoloFunction.linear(a), Kind.S1, alpha, plan)
    assert abs(est.value - 0.5) <= 1e-6
    assert est.witness_radius == 0.0
    assert est.convention is Convention.ONE_MINUS_NORM


def test_s1_of_ridge_square(plan):
    est = estimate_seminorm(_square(), Kind.S1, 1.0, plan)
    assert abs(est.value - 0.5) <= 1e-3
    assert abs(est.witness_radius - 0.5) < 1e-6


def test_growth_of_ridge_linear(plan):
    est = estimate_seminorm(HoloFunction.ridge([1, 0], [0, 1]), Kind.GROWTH, 1.0, plan)
    assert abs(est.value - 0.25) <= 1e-3


def test_disk_bloch_of_square(plan):
    assert abs(disk_bloch_norm(DiskSeries((0, 0, 1)), 1.0, plan) - QF_SQUARE) <= 1e-3
    one_dim = estimate_seminorm(HoloFunction.monomial((2,)), Kind.DISK_BLOCH, 1.0, plan)
    assert abs(one_dim.value - QF_SQUARE) <= 1e-3


def test_s3_of_ridge_square(plan):
    est = estimate_seminorm(_square(), Kind.S3, 1.0, plan)
    assert abs(est.value - QF_SQUARE) <= 1e-3
    direction, z = est.witness
    assert np.allclose(direction, [1, 0])
    assert abs(abs(z) - 1 / math.sqrt(3)) < 1e-3


def test_s3_of_ridge_with_trailing_zero_coefficients(plan):
    padded = estimate_seminorm(HoloFunction.ridge([1, 0], [0, 1, 0]), Kind.S3, 1.0, plan)
    linear = estimate_seminorm(HoloFunction.ridge([1, 0], [0, 1]), Kind.S3, 1.0, plan)
    assert math.isclose(padded.value, linear.value)
    assert abs(padded.value - 1.0) <= 1e-3


def test_qf_closed_forms(plan):
    assert abs(estimate_seminorm(HoloFunction.ridge([1, 0], [0, 1]), Kind.QF, 1.0, plan).value - 1.0) <= 1e-9
    assert abs(estimate_seminorm(_square(), Kind.QF, 1.0, plan).value - QF_SQUARE) <= 1e-3


def test_s1_s2_ratio_for_coordinate(plan):
    f = HoloFunction.coordinate(2, 1)
    s1 = estimate_seminorm(f, Kind.S1, 1.0, plan).value
    s2 = estimate_seminorm(f, Kind.S2, 1.0, plan).value
    assert math.isclose(s1 / s2, 4.0, rel_tol=1e-6)


def test_s4_half_is_one(plan):
    est = estimate_seminorm(HoloFunction.coordinate(2, 1), Kind.S4, 0.5, plan)
    assert 0.999 <= est.value <= 1.0 + 1e-9


def test_s4_blows_up_below_half():
    f = HoloFunction.coordinate(2, 1)
    r = 1.0 - 2.0 ** -16
    value = float(pointwise_quantity(f, Kind.S4, 0.25, [r, 0.0], Convention.ONE_MINUS_NORM_SQ))
    assert value >= 13.0
    assert math.isclose(value, ((1 - r) * (1 + r)) ** -0.25, rel_tol=1e-9)


def test_constant_has_zero_seminorms(plan):
    c = HoloFunction.constant(2, 0.7)
    for kind in (Kind.S1, Kind.S2, Kind.S3, Kind.S4):
        assert estimate_seminorm(c, kind, 1.0, plan).value == 0.0
    assert lipschitz_quotient(c, 0.5, plan).value == 0.0
    assert bloch_norm(c, 1.0, plan) == 0.7


@mark.parametrize('kind, alpha, dim', ((Kind.S4, 0.5, 1), (Kind.S2, 0.0, 2), (Kind.S3, 0.0, 2),
                                       (Kind.S1, -1.0, 2), (Kind.S1, math.inf, 2), (Kind.DISK_BLOCH, 1.0, 2),
                                       (Kind.LIP, 1.5, 2), (Kind.LIP, 0.0, 2)))
def test_guards(kind, alpha, dim):
    with raises(UnsupportedSeminormError):
        validate_request(kind, alpha, dim)


def test_s4_guard_in_dimension_one(plan):
    with raises(UnsupportedSeminormError, match='S4'):
        estimate_seminorm(HoloFunction.coordinate(1, 0), Kind.S4, 0.5, plan)


def test_s1_allows_alpha_zero(plan):
    est = estimate_seminorm(HoloFunction.coordinate(2, 0), Kind.S1, 0.0, plan)
    assert est.value == 1.0


@mark.parametrize('kind', (Kind.S1, Kind.S2, Kind.S3, Kind.S4))
def test_convention_bracketing(kind, grid_plan):
    f = _poly()
    alpha = 1.5
    omn = estimate_seminorm(f, kind, alpha, grid_plan, Convention.ONE_MINUS_NORM).value
    sq = estimate_seminorm(f, kind, alpha, grid_plan, Convention.ONE_MINUS_NORM_SQ).value
    e = weight_exponent(kind, alpha)
    low, high = min(1.0, 2.0 ** e), max(1.0, 2.0 ** e)
    assert low * omn * (1 - 1e-12) <= sq <= high * omn * (1 + 1e-12)


@mark.parametrize('kind', (Kind.S1, Kind.S2, Kind.S3, Kind.GROWTH))
def test_refining_the_grid_never_lowers_the_estimate(kind):
    coarse = SamplingPlan(radial_levels=6, directions_per_level=5, refine_steps=0, angles=16)
    fine = SamplingPlan(radial_levels=9, directions_per_level=5, refine_steps=0, angles=16)
    f = _poly()
    assert estimate_seminorm(f, kind, 1.0, fine).value >= estimate_seminorm(f, kind, 1.0, coarse).value


def test_estimates_are_deterministic(plan):
    f = _poly()
    a = estimate_seminorm(f, Kind.S1, 1.0, plan)
    b = estimate_seminorm(f, Kind.S1, 1.0, plan)
    assert a.value == b.value
    assert np.array_equal(a.witness[0], b.witness[0])


def test_quotient_pairs_are_symmetric_and_distinct(grid_plan):
    x, y = quotient_pairs(_poly(), grid_plan)
    assert x.shape == y.shape
    assert np.all(norm(x - y) > 0)
    assert np.all(norm(x) < 1) and np.all(norm(y) < 1)
    half = len(x) // 2
    assert np.array_equal(x[:half], y[half:])


def test_lipschitz_quotient_of_coordinate(plan):
    f = HoloFunction.coordinate(2, 0)
    lip1 = lipschitz_quotient(f, 1.0, plan)
    assert 1.0 - 1e-6 <= lip1.value <= 1.0 + 1e-12
    lip_half = lipschitz_quotient(f, 0.5, plan)
    assert lip_half.value <= math.sqrt(2.0) + 1e-12
    assert lip_half.value >= 1.4
    x, y = lip_half.witness
    assert norm(x - y) > 0


def test_lipschitz_quotient_of_square(plan):
    # sup |x1^2 - y1^2| / |x - y| over the ball is 2, approached near the boundary
    lip = lipschitz_quotient(HoloFunction.monomial((2, 0)), 1.0, plan)
    assert 1.9 <= lip.value <= 2.0 + 1e-12


def test_weighted_quotient(plan):
    f = HoloFunction.coordinate(2, 0)
    est = weighted_quotient(f, 1.0, 0.5, plan)
    assert est.kind is Kind.SWEIGHTED and est.lam == 0.5
    assert 0.99 <= est.value <= 1.0
    with raises(UnsupportedSeminormError):
        weighted_quotient(f, 1.0, 1.5, plan)


def test_estimate_dispatch(plan):
    f = HoloFunction.coordinate(2, 0)
    assert estimate(f, 'LIP', 1.0, plan).kind is Kind.LIP
    assert estimate(f, 'sweighted', 1.0, plan, lam=0.25).lam == 0.25
    assert estimate(f, 2, 1.0, plan).kind is Kind.S2
    with raises(UnsupportedSeminormError):
        estimate_seminorm(f, Kind.LIP, 1.0, plan)
