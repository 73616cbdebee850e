import copy
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from model.families import (Family, FamilySpec, FamilySpecError, axis_curve,
                            labelled_family, random_curves)
from model.functions import DiskSeries, HoloFunction
from model.geometry import (DomainError, MobiusMap, as_point, decompose, inner,
                            norm, norm_sq, one_minus_norm_sq, quadratic_denominator,
                            require_unit)
from util.quadrature import integrate
from util.sampler import STREAM_AUX, SamplingPlan, random_unit_vectors
from util.seminorms import (Convention, Kind, SeminormEstimate, UnsupportedSeminormError,
                            estimate_disk_bloch, estimate_seminorm,
                            invariant_gradient_fd, invariant_gradient_norm,
                            invariant_gradient_norm_algebraic, invariant_gradient_oracle,
                            lipschitz_quotient, pointwise_quantity, weighted_quotient)


logger = logging.getLogger(__name__)

NAN = float('nan')

# declared thresholds, pinned by tests
WINDOWS = {
    'ratio': (1.0 / 8.0, 8.0),
    'equivalence_envelope': 32.0,
    'ratio_stability': 0.05,
    'profile_stability': 0.10,
}
IDENTITY_TOL = 1e-10
EXACT_TOL = 1e-12
MOBIUS_TOL = 1e-10
ALGEBRAIC_TOL = 1e-9
FD_TOL = 1e-5
FD_STEP = 1e-5
PICK_TOL = 1e-6
ATTAIN_TOL = 1e-3
ZERO_TOL = 1e-9
HALF_WINDOW = (0.999, 1.0 + 1e-9)
T_ALPHA_RADIUS = 1.0 - 2.0 ** -16
PAIR_BOUND = 2.0


class RegionError(ValueError):
    """Raised when (alpha, lambda) lies outside every declared region."""


@dataclass(frozen=True)
class Observation:
    """One row of a check: a named quantity, optionally a ratio, and its verdict."""
    function_id: str
    kind: str
    value: float
    alpha: float = NAN
    lam: float = NAN
    convention: str = ''
    witness_radius: float = NAN
    ratio_name: str = ''
    ratio_value: float = NAN
    passed: bool = True

    @classmethod
    def of(cls, function_id: str, est: SeminormEstimate, **kwargs) -> 'Observation':
        return cls(function_id=function_id, kind=est.kind.value, value=est.value, alpha=est.alpha,
                   lam=NAN if est.lam is None else est.lam,
                   convention=est.convention.value if est.convention is not None else '',
                   witness_radius=est.witness_radius, **kwargs)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    observed: Tuple[Observation, ...]
    tolerance: float
    plan_fingerprint: str

    @classmethod
    def build(cls, check_id: str, observed: Iterable[Observation], tolerance: float,
              plan: Optional[SamplingPlan]) -> 'CheckResult':
        observed = tuple(observed)
        result = cls(check_id=check_id, passed=all(o.passed for o in observed), observed=observed,
                     tolerance=tolerance, plan_fingerprint=plan.fingerprint() if plan is not None else '')
        logger.info('[verify]\tcheck: {}\tobservations: {}\tpass: {}'.format(check_id, len(observed), result.passed))
        return result

    @classmethod
    def merge(cls, check_id: str, results: Sequence['CheckResult']) -> 'CheckResult':
        observed = tuple(o for r in results for o in r.observed)
        return cls(check_id=check_id, passed=all(r.passed for r in results), observed=observed,
                   tolerance=max((r.tolerance for r in results), default=0.0),
                   plan_fingerprint=results[0].plan_fingerprint if results else '')


def in_window(value: float, window: Tuple[float, float] = WINDOWS['ratio']) -> bool:
    return math.isfinite(value) and window[0] <= value <= window[1]


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else NAN


def _stable(current: float, previous: float, tol: float) -> bool:
    return math.isfinite(current) and math.isfinite(previous) and abs(current - previous) <= tol * abs(current)


def _nonconstant(spec: FamilySpec) -> List[Tuple[str, HoloFunction]]:
    return [(fid, f) for fid, f in labelled_family(spec) if not f.is_constant()]


# geometry and invariant-gradient agreement

def check_mobius(plan: SamplingPlan, dims: Sequence[int] = (1, 2, 8), pairs: int = 10000,
                 radius: float = 0.95, bases: int = 100) -> CheckResult:
    """
    Involution, phi_a(0) = a, the metric identity and the contraction bound
    on seeded pairs (a, x) with |a|, |x| <= radius.
    """
    per_base = max(1, pairs // bases)
    observed = []
    for n in dims:
        pts = radius * plan.ball_points(bases * (per_base + 1), n, STREAM_AUX)
        worst = dict(involution=0.0, origin=0.0, metric=0.0, contraction=-np.inf, disk=0.0)
        for k in range(bases):
            a = pts[k]
            x = pts[bases + k * per_base: bases + (k + 1) * per_base]
            m = MobiusMap(a)
            y = m.apply(x)
            d = 1.0 - inner(x, a)
            worst['involution'] = max(worst['involution'], float(np.max(norm(m.apply(y) - x))))
            worst['origin'] = max(worst['origin'], float(norm(m.apply(np.zeros(n)) - a)))
            lhs = one_minus_norm_sq(y) * np.abs(d) ** 2
            worst['metric'] = max(worst['metric'], float(np.max(np.abs(lhs - one_minus_norm_sq(a) * one_minus_norm_sq(x)))))
            worst['contraction'] = max(worst['contraction'], float(np.max(norm(y) - norm(a - x) / np.abs(d))))
            if n == 1:
                disk = (a[0] - x[:, 0]) / (1.0 - x[:, 0] * np.conj(a[0]))
                worst['disk'] = max(worst['disk'], float(np.max(np.abs(y[:, 0] - disk))))
        fid = 'n={}'.format(n)
        observed += [Observation(fid, 'involution', worst['involution'], passed=worst['involution'] <= MOBIUS_TOL),
                     Observation(fid, 'base_point', worst['origin'], passed=worst['origin'] <= MOBIUS_TOL),
                     Observation(fid, 'metric_identity', worst['metric'], passed=worst['metric'] <= MOBIUS_TOL),
                     Observation(fid, 'contraction_excess', worst['contraction'],
                                 passed=worst['contraction'] <= EXACT_TOL)]
        if n == 1:
            observed.append(Observation(fid, 'disk_formula', worst['disk'], passed=worst['disk'] <= EXACT_TOL))
    return CheckResult.build('mobius', observed, MOBIUS_TOL, plan)


def check_invariant_gradient(family: FamilySpec, plan: SamplingPlan, points: int = 1000,
                             radius: float = 0.95) -> CheckResult:
    """closed form vs algebraic form, Mobius finite differences and the sampled oracle"""
    funcs = labelled_family(family)
    xs = radius * plan.ball_points(points, family.dim, STREAM_AUX)
    worst = dict(algebraic=0.0, fd=0.0, excess=-np.inf, deficit=-np.inf)
    for k, x in enumerate(xs):
        _, f = funcs[k % len(funcs)]
        closed = float(invariant_gradient_norm(f, x))
        scale = max(1.0, closed)
        worst['algebraic'] = max(worst['algebraic'], abs(closed - float(invariant_gradient_norm_algebraic(f, x))) / scale)
        worst['fd'] = max(worst['fd'], abs(closed - invariant_gradient_fd(f, x, FD_STEP)))
        oracle = invariant_gradient_oracle(f, x, plan)
        worst['excess'] = max(worst['excess'], (oracle - closed) / scale)
        worst['deficit'] = max(worst['deficit'], (closed - oracle) / scale)
    fid = family.name.value
    observed = [Observation(fid, 'algebraic_form', worst['algebraic'], passed=worst['algebraic'] <= ALGEBRAIC_TOL),
                Observation(fid, 'finite_difference', worst['fd'], passed=worst['fd'] <= FD_TOL),
                Observation(fid, 'oracle_excess', worst['excess'], passed=worst['excess'] <= EXACT_TOL),
                Observation(fid, 'oracle_deficit', worst['deficit'], passed=worst['deficit'] <= ALGEBRAIC_TOL)]
    return CheckResult.build('invariant-gradient', observed, ALGEBRAIC_TOL, plan)


# pointwise identities and the integral identity

def _identity_observations(fid: str, f: HoloFunction, plan: SamplingPlan) -> List[Observation]:
    x, _, _ = plan.points(f.dim)
    z, _, _ = plan.disk_points()

    slice_res = 0.0
    for y in plan.directions(f.dim):
        dF = f.slice_series(y).derivative()
        rhs = f.radial_derivative(z[:, None] * y)
        slice_res = max(slice_res, float(np.max(np.abs(z * dF(z) - rhs) / (1.0 + np.abs(rhs)))))

    euler_res = 0.0
    total = np.zeros(len(x), dtype=np.complex128)
    for k, part in enumerate(f.homogeneous_parts()):
        pv = part.evaluate(x)
        total = total + pv
        euler_res = max(euler_res, float(np.max(np.abs(part.radial_derivative(x) - k * pv) / (1.0 + k * np.abs(pv)))))
    fx = f.evaluate(x)
    recon_res = float(np.max(np.abs(total - fx) / (1.0 + np.abs(fx))))

    gn = norm(f.gradient(x))
    excess = float(np.max(np.abs(f.radial_derivative(x)) - norm(x) * gn))
    return [Observation(fid, 'slice_identity', slice_res, passed=slice_res <= IDENTITY_TOL),
            Observation(fid, 'euler_identity', euler_res, passed=euler_res <= IDENTITY_TOL),
            Observation(fid, 'homogeneous_reconstruction', recon_res, passed=recon_res <= IDENTITY_TOL),
            Observation(fid, 'radial_bound_excess', excess, passed=excess <= EXACT_TOL * (1.0 + float(np.max(gn))))]


def _decomposition_observation(dim: int, plan: SamplingPlan) -> Observation:
    x, _, _ = plan.points(dim)
    x = x[norm(x) > 0]
    w = random_unit_vectors(plan.rng(STREAM_AUX), len(x), dim)
    worst = 0.0
    for xi, wi in zip(x, w):
        par, perp = decompose(wi, xi)
        z = complex(inner(par, xi)) / float(norm_sq(xi))
        expected = abs(z) ** 2 * float(norm_sq(xi)) + float(one_minus_norm_sq(xi)) * float(norm_sq(perp))
        q = float(quadratic_denominator(xi, wi))
        worst = max(worst, abs(q - expected) / max(q, 1e-300))
    return Observation('n={}'.format(dim), 'decomposition_identity', worst, passed=worst <= EXACT_TOL)


def check_pointwise_identities(family: FamilySpec, plan: SamplingPlan,
                               extra: Sequence[Tuple[str, HoloFunction]] = ()) -> CheckResult:
    """slice, Euler, reconstruction, radial-bound and decomposition identities at plan samples"""
    observed = []
    for fid, f in list(labelled_family(family)) + list(extra):
        observed += _identity_observations(fid, f, plan)
    observed.append(_decomposition_observation(family.dim, plan))
    return CheckResult.build('identities', observed, IDENTITY_TOL, plan)


def check_integral_identity(f: HoloFunction, x_dir, y, r: float, function_id: str = 'f') -> CheckResult:
    """r Df(r x')(y) against the Gauss-Legendre integral of t -> DRf(t x')(y) over [0, r]"""
    x_dir, y = as_point(x_dir), as_point(y)
    require_unit(x_dir)
    if not 0.0 <= r < 1.0:
        raise DomainError('radius must lie in [0, 1), got {}'.format(r))
    lhs = r * complex(f.directional_derivative(r * x_dir, y))
    rf = f.radial_derivative_function()
    rhs = integrate(lambda t: rf.directional_derivative(t[:, None] * x_dir, y), r, f.max_degree)
    err = abs(lhs - rhs)
    bound = EXACT_TOL * (1.0 + abs(lhs))
    obs = Observation(function_id, 'integral_identity', err, ratio_name='r', ratio_value=r, passed=err <= bound)
    return CheckResult.build('integral', [obs], EXACT_TOL, None)


# seminorm equivalences

def _exact_direction_observations(fid: str, f: HoloFunction, alpha: float, plan: SamplingPlan) -> List[Observation]:
    """pointwise S2 <= S1, S2 <= S3 and S3(sq) <= 2^alpha S1 on shared slice samples z*y"""
    z, _, _ = plan.disk_points()
    w1 = Convention.ONE_MINUS_NORM.weight(np.abs(z)) ** alpha
    w2 = Convention.ONE_MINUS_NORM_SQ.weight(np.abs(z)) ** alpha
    e21 = e23 = e31 = -np.inf
    scale = 1.0
    for y in plan.directions(f.dim):
        pts = z[:, None] * y
        d3 = np.abs(f.slice_series(y).derivative()(z))
        q1 = w1 * norm(f.gradient(pts))
        q2 = w1 * np.abs(f.radial_derivative(pts))
        q3 = w1 * d3
        e21 = max(e21, float(np.max(q2 - q1)))
        e23 = max(e23, float(np.max(q2 - q3)))
        e31 = max(e31, float(np.max(w2 * d3 - 2.0 ** alpha * q1)))
        scale = max(scale, float(np.max(q1)), float(np.max(q3)))
    tol = EXACT_TOL * scale
    return [Observation(fid, 'S2<=S1', e21, alpha=alpha, passed=e21 <= tol),
            Observation(fid, 'S2<=S3', e23, alpha=alpha, passed=e23 <= tol),
            Observation(fid, 'S3<=2^a*S1', e31, alpha=alpha, passed=e31 <= tol)]


def check_equivalence(family: FamilySpec, alpha: float, plan: SamplingPlan) -> CheckResult:
    """
    Exact one-directional inequalities plus the empirical ratios S1/S2 and S3/S2,
    which must be finite, within the envelope and stable under refinement.
    """
    if not alpha > 0:
        raise UnsupportedSeminormError('equivalence check needs alpha > 0, got {}'.format(alpha))
    funcs = _nonconstant(family)
    if not funcs:
        raise FamilySpecError('family {} has only constant functions'.format(family.name.value))
    coarse = plan.coarsened()
    envelope, stab = WINDOWS['equivalence_envelope'], WINDOWS['ratio_stability']
    observed = []
    for fid, f in funcs:
        observed += _exact_direction_observations(fid, f, alpha, plan)
        fine = {k: estimate_seminorm(f, k, alpha, plan) for k in (Kind.S1, Kind.S2, Kind.S3)}
        prev = {k: estimate_seminorm(f, k, alpha, coarse) for k in (Kind.S1, Kind.S3, Kind.S2)}
        observed += [Observation.of(fid, est) for est in fine.values()]
        for k in (Kind.S1, Kind.S3):
            rho = _ratio(fine[k].value, fine[Kind.S2].value)
            rho_prev = _ratio(prev[k].value, prev[Kind.S2].value)
            ok = math.isfinite(rho) and rho <= envelope and _stable(rho, rho_prev, stab)
            observed.append(Observation(fid, 'ratio', fine[k].value, alpha=alpha,
                                        ratio_name='{}/S2'.format(k.value), ratio_value=rho, passed=ok))
        observed.append(Observation(fid, 'proof_constant', 2.0 * (4.0 / 3.0) ** alpha, alpha=alpha,
                                    ratio_name='2(4/3)^alpha', ratio_value=2.0 * (4.0 / 3.0) ** alpha))
    return CheckResult.build('equivalence', observed, stab, plan)


def check_t_alpha(alpha: float, plan: SamplingPlan, family: Optional[FamilySpec] = None,
                  dim: int = 2) -> CheckResult:
    """
    f = x_2 on the ball of C^n: blow-up of the invariant quantity along e_1 for
    alpha < 1/2, sup exactly 1 for alpha = 1/2, bounded ratio S4/S1 above.
    """
    if dim < 2:
        raise UnsupportedSeminormError('the T_alpha trichotomy needs n >= 2, got {}'.format(dim))
    f = HoloFunction.coordinate(dim, 1)
    const = HoloFunction.constant(dim, 1.0)
    sq = Convention.ONE_MINUS_NORM_SQ
    zero = estimate_seminorm(const, Kind.S4, alpha, plan)
    observed = [Observation.of('constant', zero, passed=zero.value == 0.0)]

    if alpha < 0.5 and not math.isclose(alpha, 0.5):
        x = as_point(T_ALPHA_RADIUS * np.eye(dim)[0])
        weight = float(sq.weight(norm(x))) ** (alpha - 1.0)
        value = float(pointwise_quantity(f, Kind.S4, alpha, x, sq))
        expected = float(one_minus_norm_sq(x)) ** (alpha - 0.5)
        oracle = weight * invariant_gradient_oracle(f, x, plan)
        observed += [Observation('x2', 'S4_pointwise', value, alpha=alpha, convention=sq.value,
                                 witness_radius=T_ALPHA_RADIUS, ratio_name='closed_form',
                                 ratio_value=expected, passed=expected > 1.0 and value >= 0.99 * expected),
                     Observation('x2', 'S4_oracle', oracle, alpha=alpha, convention=sq.value,
                                 witness_radius=T_ALPHA_RADIUS, ratio_name='oracle/pointwise',
                                 ratio_value=_ratio(oracle, value),
                                 passed=abs(oracle - value) <= ALGEBRAIC_TOL * max(1.0, value))]
    elif math.isclose(alpha, 0.5):
        fine = estimate_seminorm(f, Kind.S4, alpha, plan)
        prev = estimate_seminorm(f, Kind.S4, alpha, plan.coarsened())
        ok = HALF_WINDOW[0] <= fine.value <= HALF_WINDOW[1] and _stable(fine.value, prev.value, WINDOWS['ratio_stability'])
        observed.append(Observation.of('x2', fine, ratio_name='coarse', ratio_value=prev.value, passed=ok))
    else:
        family = family or FamilySpec(Family.RANDOM_POLY, dim=dim, degree=4, count=10, seed=plan.seed)
        for fid, g in [('x2', f)] + _nonconstant(family):
            s4 = estimate_seminorm(g, Kind.S4, alpha, plan)
            s1 = estimate_seminorm(g, Kind.S1, alpha, plan)
            rho = _ratio(s4.value, s1.value)
            observed.append(Observation.of(fid, s4, ratio_name='S4/S1', ratio_value=rho, passed=in_window(rho)))
    return CheckResult.build('t-alpha', observed, ALGEBRAIC_TOL, plan)


# Bloch-type characterisations through the invariant gradient

def check_schlicht_pick(f: HoloFunction, qf_true: float, curves: Sequence[Tuple[DiskSeries, ...]],
                        plan: SamplingPlan, attaining: Optional[int] = None,
                        function_id: str = 'f') -> CheckResult:
    """
    For every curve g into the ball, the disk Bloch quantity of f o g stays
    below Q_f; the curve at index `attaining` must reach Q_f.
    """
    observed = []
    for k, g in enumerate(curves):
        est = estimate_disk_bloch(f.compose_curve(g), 1.0, plan)
        ok = est.value <= qf_true + PICK_TOL
        if k == attaining:
            ok = ok and abs(est.value - qf_true) <= ATTAIN_TOL
        observed.append(Observation.of('{}@curve{}'.format(function_id, k), est, ratio_name='pick/Q_f',
                                       ratio_value=_ratio(est.value, qf_true), passed=ok))
    return CheckResult.build('schlicht', observed, PICK_TOL, plan)


def check_normal_family(f: HoloFunction, qf_true: float, plan: SamplingPlan, bases: int = 8,
                        radius: float = 0.9, function_id: str = 'f') -> CheckResult:
    """
    h = f o phi_a - f(a) has Lehto quantity at most Q_f; Dh comes from the
    chain rule through the Mobius Jacobian.
    """
    own = estimate_seminorm(f, Kind.NORMAL, 1.0, plan)
    observed = [Observation.of(function_id, own, ratio_name='M_f/Q_f', ratio_value=_ratio(own.value, qf_true),
                               passed=own.value <= qf_true + PICK_TOL)]
    x, _, _ = plan.points(f.dim)
    weight = Convention.ONE_MINUS_NORM_SQ.weight(norm(x))
    for k, a in enumerate(radius * plan.ball_points(bases, f.dim, STREAM_AUX)):
        m = MobiusMap(a)
        y = m.apply(x)
        h = f.evaluate(y) - f.evaluate(a)
        gy = f.gradient(y)
        dh = np.stack([m.jacobian(xi).T @ gi for xi, gi in zip(x, gy)])
        q = weight * norm(dh) / (1.0 + np.abs(h) ** 2)
        i = int(np.argmax(q))
        observed.append(Observation('{}@phi{}'.format(function_id, k), Kind.NORMAL.value, float(q[i]), alpha=1.0,
                                    convention=Convention.ONE_MINUS_NORM_SQ.value,
                                    witness_radius=float(norm(x[i])), ratio_name='M_h/Q_f',
                                    ratio_value=_ratio(float(q[i]), qf_true),
                                    passed=float(q[i]) <= qf_true + PICK_TOL))
    return CheckResult.build('normal', observed, PICK_TOL, plan)


# Lipschitz, growth and weighted-quotient characterisations

def _paired_ratio(fid: str, f: HoloFunction, num: SeminormEstimate, den: SeminormEstimate,
                  name: str) -> Observation:
    if f.is_constant():
        ok = num.value < ZERO_TOL and den.value < ZERO_TOL
        return Observation.of(fid, num, ratio_name=name, passed=ok)
    rho = _ratio(num.value, den.value)
    both_small = num.value < ZERO_TOL and den.value < ZERO_TOL
    return Observation.of(fid, num, ratio_name=name, ratio_value=rho, passed=in_window(rho) and not both_small)


def check_hardy_littlewood(family: FamilySpec, alpha: float, plan: SamplingPlan,
                           extra: Sequence[Tuple[str, HoloFunction]] = ()) -> CheckResult:
    """Lip-alpha quotient against S1 at exponent 1 - alpha"""
    if not 0.0 < alpha <= 1.0:
        raise UnsupportedSeminormError('Hardy-Littlewood check needs 0 < alpha <= 1, got {}'.format(alpha))
    observed = []
    for fid, f in list(labelled_family(family)) + list(extra):
        lip = lipschitz_quotient(f, alpha, plan)
        s1 = estimate_seminorm(f, Kind.S1, 1.0 - alpha, plan)
        observed += [_paired_ratio(fid, f, lip, s1, 'LIP/S1(1-a)'), Observation.of(fid, s1)]
    return CheckResult.build('hardy-littlewood', observed, ZERO_TOL, plan)


def check_growth_equiv(family: FamilySpec, alpha: float, plan: SamplingPlan,
                       extra: Sequence[Tuple[str, HoloFunction]] = ()) -> CheckResult:
    """S1 at alpha against the growth norm of f - f(0) at alpha - 1"""
    if not alpha > 1.0:
        raise UnsupportedSeminormError('growth equivalence needs alpha > 1, got {}'.format(alpha))
    observed = []
    for fid, f in list(labelled_family(family)) + list(extra):
        s1 = estimate_seminorm(f, Kind.S1, alpha, plan)
        growth = estimate_seminorm(f.centered(), Kind.GROWTH, alpha - 1.0, plan)
        observed += [_paired_ratio(fid, f, s1, growth, 'S1/GROWTH(a-1)'), Observation.of(fid, growth)]
    return CheckResult.build('growth', observed, ZERO_TOL, plan)


def dai_region(alpha: float, lam: float) -> str:
    """
    Region of (alpha, lambda) where the weighted quotient space is identified:
    'i' -> B^(lambda+1), 'ii' -> B^(alpha-lambda+1), 'iii' -> H^inf, 'zhao' -> B^alpha.
    """
    if alpha >= 1.0 and (lam == 0.0 or math.isclose(lam, alpha)):
        return 'iii'
    if 1.0 < alpha <= 2.0:
        if 0.0 < lam < alpha - 1.0:
            return 'i'
        if 1.0 < lam < alpha:
            return 'ii'
    if alpha > 2.0:
        if 0.0 < lam <= alpha / 2.0:
            return 'i'
        if alpha / 2.0 < lam <= alpha:
            return 'ii'
    if 0.0 < alpha < 1.0 and 0.0 <= lam <= alpha:
        return 'zhao'
    if alpha == 1.0 and 0.0 < lam < 1.0:
        return 'zhao'
    if 1.0 < alpha <= 2.0 and alpha - 1.0 <= lam <= 1.0:
        return 'zhao'
    raise RegionError('(alpha, lambda) = ({}, {}) lies outside every declared region'.format(alpha, lam))


def _pair_bound_observation(fid: str, f: HoloFunction, plan: SamplingPlan, pairs: int) -> Observation:
    bound = f.coefficient_bound()
    g = f.scaled(1.0 / bound) if bound > 1.0 else f
    pts = plan.ball_points(2 * pairs, f.dim, STREAM_AUX)
    x, a = pts[:pairs], pts[pairs:]
    lhs = (1.0 - norm(x)) * np.abs(g.evaluate(x) - g.evaluate(a))
    excess = float(np.max(lhs - PAIR_BOUND * norm(x - a)))
    return Observation(fid, 'pair_bound_excess', excess, ratio_name='sup_bound', ratio_value=max(bound, 1.0),
                       passed=excess <= EXACT_TOL)


def check_dai(family: FamilySpec, alpha: float, lam: float, plan: SamplingPlan,
              extra: Sequence[Tuple[str, HoloFunction]] = (), pairs: int = 10000) -> CheckResult:
    region = dai_region(alpha, lam)
    observed = []
    for fid, f in list(labelled_family(family)) + list(extra):
        if region == 'iii':
            observed.append(_pair_bound_observation(fid, f, plan, pairs))
            bound = f.coefficient_bound()
            g = f.scaled(1.0 / bound) if bound > 1.0 else f
            wq = weighted_quotient(g, alpha, lam, plan)
            observed.append(Observation.of(fid, wq, ratio_name='S/2', ratio_value=wq.value / PAIR_BOUND,
                                           passed=wq.value <= PAIR_BOUND + EXACT_TOL))
            continue
        exponent = {'i': lam + 1.0, 'ii': alpha - lam + 1.0, 'zhao': alpha}[region]
        wq = weighted_quotient(f, alpha, lam, plan)
        s1 = estimate_seminorm(f, Kind.S1, exponent, plan)
        observed += [_paired_ratio(fid, f, wq, s1, 'S/S1({:g})'.format(exponent)), Observation.of(fid, s1)]
        if region == 'ii':
            mirror = weighted_quotient(f, alpha, alpha - lam, plan)
            gap = abs(wq.value - mirror.value)
            observed.append(Observation(fid, 'mirror_gap', gap, alpha=alpha, lam=lam,
                                        passed=gap <= ZERO_TOL * (1.0 + wq.value)))
    logger.info('[verify]\tdai alpha: {:g}\tlambda: {:g}\tregion: {}'.format(alpha, lam, region))
    return CheckResult.build('dai', observed, EXACT_TOL, plan)


def check_derivative_growth(family: FamilySpec, alpha: float, plan: SamplingPlan,
                            extra: Sequence[Tuple[str, HoloFunction]] = ()) -> CheckResult:
    """
    Running-sup profiles over radial levels for f normalised to unit growth norm:
    tangential |Df(x)(y)|(1-|x|^2)^(a+1/2), radial |Rf|(1-|x|^2)^(a+1/2) scaled by
    the tangential growth constant, and |Rf|(1-|x|^2)^(a+1).
    """
    if alpha < 0:
        raise UnsupportedSeminormError('derivative growth needs alpha >= 0, got {}'.format(alpha))
    if family.dim < 2:
        raise UnsupportedSeminormError('derivative growth needs n >= 2 for orthogonal directions')
    x, levels, _ = plan.points(family.dim)
    r = norm(x)
    omr = Convention.ONE_MINUS_NORM_SQ.weight(r)
    unit = np.divide(x, r[:, None], out=np.zeros_like(x), where=r[:, None] > 0)
    tol = WINDOWS['profile_stability']
    observed = []
    for fid, f in list(labelled_family(family)) + list(extra):
        growth = estimate_seminorm(f, Kind.GROWTH, alpha, plan, Convention.ONE_MINUS_NORM_SQ)
        if growth.value == 0.0:
            observed.append(Observation.of(fid, growth))
            continue
        g = f.scaled(1.0 / growth.value)
        c = np.conj(g.gradient(x))
        rf = np.abs(g.radial_derivative(x))
        tangential = norm(c - np.sum(c * np.conj(unit), axis=-1)[:, None] * unit)
        t_const = float(np.max(tangential * omr ** alpha))
        profiles = {
            'tangential': tangential * omr ** (alpha + 0.5),
            'radial_from_tangential': rf * omr ** (alpha + 0.5) / t_const if t_const > 0 else np.zeros_like(rf),
            'radial': rf * omr ** (alpha + 1.0),
        }
        for name, values in profiles.items():
            per_level = np.array([np.max(values[levels == j]) for j in range(plan.radial_levels + 1)])
            running = np.maximum.accumulate(per_level)
            last, before = float(running[-1]), float(running[-2])
            ok = last == 0.0 or (last - before) <= tol * last
            observed.append(Observation(fid, 'profile_' + name, last, alpha=alpha,
                                        convention=Convention.ONE_MINUS_NORM_SQ.value,
                                        ratio_name='previous_level', ratio_value=before, passed=ok))
    return CheckResult.build('derivative-growth', observed, tol, plan)


# suite registry

DEFAULT_VERIFY = {
    'random_poly': {'dim': 3, 'degree': 6, 'terms': 8, 'count': 20},
    'small_poly': {'dim': 2, 'degree': 4, 'terms': 6, 'count': 10},
    'mobius': {'dims': [1, 2, 8], 'pairs': 10000},
    'invariant_gradient': {'points': 1000},
    'integral': {'triples': 10},
    'equivalence': {'alphas': [0.5, 1.0, 2.0]},
    't_alpha': {'alphas': [0.25, 0.5, 1.0]},
    'schlicht': {'curves': 10},
    'normal': {'bases': 8},
    'hardy_littlewood': {'alphas': [0.25, 0.5, 0.75, 1.0]},
    'growth': {'alphas': [1.5, 2.0]},
    'dai': {'regions': [[2.0, 0.5], [2.0, 1.5], [3.0, 1.5], [1.5, 0.25], [1.5, 1.25],
                        [0.5, 0.25], [1.0, 0.5], [1.5, 0.75], [1.0, 0.0], [2.0, 2.0]],
            'pairs': 10000},
    'derivative_growth': {'alphas': [0.5, 1.0]},
}


FAMILY_SECTIONS = ('random_poly', 'small_poly')
COUNT_KEYS = (('mobius', 'pairs'), ('invariant_gradient', 'points'), ('integral', 'triples'),
              ('schlicht', 'curves'), ('normal', 'bases'), ('dai', 'pairs'))


class VerifySettingsError(ValueError):
    """Raised for an invalid `verify` config section."""


def _positive_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise VerifySettingsError('{} must be a positive integer, got {!r}'.format(where, value))
    return value


def _finite_list(value, where: str) -> List[float]:
    if not isinstance(value, list) or not value:
        raise VerifySettingsError('{} must be a nonempty list, got {!r}'.format(where, value))
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise VerifySettingsError('{} entries must be finite numbers, got {!r}'.format(where, v))
    return [float(v) for v in value]


def _check_settings(settings: dict) -> None:
    for key, section in settings.items():
        if key not in DEFAULT_VERIFY:
            raise VerifySettingsError('unknown verify section {!r}, expected one of {}'.format(
                key, ', '.join(DEFAULT_VERIFY)))
        if not isinstance(section, dict):
            raise VerifySettingsError('verify.{} must be a mapping, got {!r}'.format(key, section))
        unknown = sorted(str(k) for k in set(section) - set(DEFAULT_VERIFY[key]))
        if unknown:
            raise VerifySettingsError('unknown keys in verify.{}: {}'.format(key, ', '.join(unknown)))
    for key in FAMILY_SECTIONS:
        for name, value in settings[key].items():
            _positive_int(value, 'verify.{}.{}'.format(key, name))
        FamilySpec.from_cfg(dict(settings[key], name=Family.RANDOM_POLY))
    for key, name in COUNT_KEYS:
        _positive_int(settings[key][name], 'verify.{}.{}'.format(key, name))
    if not isinstance(settings['mobius']['dims'], list) or not settings['mobius']['dims']:
        raise VerifySettingsError('verify.mobius.dims must be a nonempty list')
    for n in settings['mobius']['dims']:
        _positive_int(n, 'verify.mobius.dims')
    for key, section in settings.items():
        if 'alphas' in section:
            _finite_list(section['alphas'], 'verify.{}.alphas'.format(key))
    regions = settings['dai']['regions']
    if not isinstance(regions, list) or not regions:
        raise VerifySettingsError('verify.dai.regions must be a nonempty list of [alpha, lambda] pairs')
    for pair in regions:
        if not isinstance(pair, list) or len(pair) != 2:
            raise VerifySettingsError('verify.dai.regions entries must be [alpha, lambda], got {!r}'.format(pair))
        dai_region(*_finite_list(pair, 'verify.dai.regions'))


def verify_settings(cfg: Optional[dict]) -> dict:
    """defaults overlaid section by section with the `verify` config, then validated"""
    if cfg is not None and not isinstance(cfg, dict):
        raise VerifySettingsError('verify config must be a mapping, got {!r}'.format(cfg))
    settings = copy.deepcopy(DEFAULT_VERIFY)
    for key, value in (cfg or {}).items():
        if isinstance(value, dict) and isinstance(settings.get(key), dict):
            settings[key].update(value)
        else:
            settings[key] = value
    _check_settings(settings)
    return settings


def _poly(settings: dict, key: str, plan: SamplingPlan) -> FamilySpec:
    return FamilySpec.from_cfg(dict(settings[key], name=Family.RANDOM_POLY, seed=plan.seed))


def _ridge(name: Family, dim: int = 2, **kwargs) -> FamilySpec:
    return FamilySpec(name, dim=dim, **kwargs)


def _power(dim: int, k: int) -> Tuple[str, HoloFunction]:
    """<x,e_1>^k"""
    return '<x,u>^{}'.format(k), HoloFunction.ridge(np.eye(dim)[0], [0.0] * k + [1.0])


def _constant(dim: int) -> Tuple[str, HoloFunction]:
    return 'constant', HoloFunction.constant(dim, 0.5)


def _suite_mobius(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    return [check_mobius(plan, s['mobius']['dims'], s['mobius']['pairs'])]


def _suite_invariant_gradient(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    return [check_invariant_gradient(_poly(s, 'random_poly', plan), plan, s['invariant_gradient']['points'])]


def _suite_identities(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    poly = _poly(s, 'random_poly', plan)
    coords = labelled_family(FamilySpec(Family.COORDINATE, dim=poly.dim))
    logs = labelled_family(_ridge(Family.RIDGE_LOG, dim=poly.dim))
    return [check_pointwise_identities(poly, plan, coords + logs + [_constant(poly.dim)])]


def _suite_integral(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    poly = _poly(s, 'random_poly', plan)
    rng = plan.rng(STREAM_AUX)
    results = []
    for fid, f in labelled_family(poly):
        dirs = random_unit_vectors(rng, 2 * s['integral']['triples'], poly.dim)
        radii = rng.uniform(0.0, 0.99, s['integral']['triples'])
        for k, r in enumerate(radii):
            results.append(check_integral_identity(f, dirs[2 * k], dirs[2 * k + 1], float(r), fid))
    return [CheckResult.merge('integral', results)]


def _suite_equivalence(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    results = []
    for alpha in s['equivalence']['alphas']:
        results.append(check_equivalence(_poly(s, 'random_poly', plan), alpha, plan))
        results.append(check_equivalence(FamilySpec(Family.COORDINATE, dim=2), alpha, plan))
        results.append(check_equivalence(_ridge(Family.RIDGE_POWER, degree=2), alpha, plan))
    return results


def _suite_t_alpha(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    return [check_t_alpha(alpha, plan, _poly(s, 'small_poly', plan)) for alpha in s['t_alpha']['alphas']]


def _suite_schlicht(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    curves = [axis_curve(2)] + random_curves(s['schlicht']['curves'], 2, plan.seed)
    return [check_schlicht_pick(_power(2, 1)[1], 1.0, curves, plan, attaining=0, function_id='<x,u>'),
            check_schlicht_pick(_power(2, 2)[1], 4.0 / (3.0 * math.sqrt(3.0)), curves, plan, attaining=0,
                                function_id='<x,u>^2'),
            check_schlicht_pick(_constant(2)[1], 0.0, curves, plan, function_id='constant')]


def _suite_normal(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    bases = s['normal']['bases']
    return [check_normal_family(_power(2, 1)[1], 1.0, plan, bases, function_id='<x,u>'),
            check_normal_family(_power(2, 2)[1], 4.0 / (3.0 * math.sqrt(3.0)), plan, bases, function_id='<x,u>^2')]


def _suite_hardy_littlewood(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    results = []
    for alpha in s['hardy_littlewood']['alphas']:
        extra = (labelled_family(_ridge(Family.RIDGE_POWERBETA, beta=-alpha))
                 + labelled_family(_ridge(Family.RIDGE_LOG))
                 + labelled_family(FamilySpec(Family.COORDINATE, dim=2)) + [_constant(2)])
        results.append(check_hardy_littlewood(_poly(s, 'small_poly', plan), alpha, plan, extra))
    return results


def _suite_growth(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    results = []
    for alpha in s['growth']['alphas']:
        extra = (labelled_family(_ridge(Family.RIDGE_POWERBETA, beta=alpha - 1.0))
                 + labelled_family(_ridge(Family.RIDGE_LOG))
                 + labelled_family(FamilySpec(Family.COORDINATE, dim=2)) + [_constant(2)])
        results.append(check_growth_equiv(_poly(s, 'small_poly', plan), alpha, plan, extra))
    return results


def _suite_dai(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    results = []
    for alpha, lam in s['dai']['regions']:
        extra = labelled_family(FamilySpec(Family.COORDINATE, dim=2)) + [_power(2, 3), _constant(2)]
        results.append(check_dai(_poly(s, 'small_poly', plan), float(alpha), float(lam), plan, extra,
                                 s['dai']['pairs']))
    return results


def _suite_derivative_growth(plan: SamplingPlan, s: dict) -> List[CheckResult]:
    results = []
    for alpha in s['derivative_growth']['alphas']:
        extra = (labelled_family(_ridge(Family.RIDGE_POWERBETA, beta=alpha))
                 + labelled_family(FamilySpec(Family.COORDINATE, dim=2)) + [_constant(2)])
        results.append(check_derivative_growth(_poly(s, 'small_poly', plan), alpha, plan, extra))
    return results


SUITES: Dict[str, Callable[[SamplingPlan, dict], List[CheckResult]]] = {
    'mobius': _suite_mobius,
    'invariant-gradient': _suite_invariant_gradient,
    'identities': _suite_identities,
    'integral': _suite_integral,
    'equivalence': _suite_equivalence,
    't-alpha': _suite_t_alpha,
    'schlicht': _suite_schlicht,
    'normal': _suite_normal,
    'hardy-littlewood': _suite_hardy_littlewood,
    'growth': _suite_growth,
    'dai': _suite_dai,
    'derivative-growth': _suite_derivative_growth,
}
SUITE_NAMES = tuple(SUITES) + ('all',)


def run_suite(name: str, plan: SamplingPlan, cfg: Optional[dict] = None) -> List[CheckResult]:
    if name not in SUITE_NAMES:
        raise ValueError('unknown suite {!r}, expected one of {}'.format(name, ', '.join(SUITE_NAMES)))
    settings = verify_settings(cfg)
    names = list(SUITES) if name == 'all' else [name]
    results = []
    for suite in names:
        logger.info('[verify]\tsuite: {}\tplan: {}'.format(suite, plan.fingerprint()))
        results += SUITES[suite](plan, settings)
    return results
