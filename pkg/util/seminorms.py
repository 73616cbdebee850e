import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from model.functions import DiskSeries, HoloFunction
from model.geometry import (ArrayLike, MobiusMap, as_point, decompose, inner, norm,
                            norm_sq, one_minus_norm_sq, quadratic_denominator,
                            require_interior)
from util.sampler import (NEAR_DIAGONAL_STEPS, STREAM_ORACLE, SamplingPlan,
                          golden_max, random_unit_vectors)


logger = logging.getLogger(__name__)


class UnsupportedSeminormError(ValueError):
    """Raised for a (kind, alpha) combination the estimators do not define."""


class Kind(str, Enum):
    S1 = 'S1'                   # (1-|x|)^a ||Df(x)||
    S2 = 'S2'                   # (1-|x|)^a |Rf(x)|
    S3 = 'S3'                   # sup over slices of the disk Bloch norm
    S4 = 'S4'                   # (1-|x|^2)^(a-1) ||invariant gradient||
    GROWTH = 'GROWTH'           # (1-|x|)^a |f(x)|
    LIP = 'LIP'
    SWEIGHTED = 'SWEIGHTED'
    NORMAL = 'NORMAL'           # (1-|x|^2) ||Df(x)|| / (1 + |f(x)|^2)
    QF = 'QF'                   # ||invariant gradient||
    DISK_BLOCH = 'DISK_BLOCH'

    @classmethod
    def parse(cls, token: Union[str, int, 'Kind']) -> 'Kind':
        """accepts 1..4 for S1..S4 as well as member names in any case"""
        if isinstance(token, Kind):
            return token
        text = str(token).strip().upper().replace('-', '_')
        if text in ('1', '2', '3', '4'):
            text = 'S' + text
        try:
            return cls(text)
        except ValueError:
            raise UnsupportedSeminormError('unknown seminorm kind {!r}'.format(token)) from None


class Convention(str, Enum):
    ONE_MINUS_NORM = 'ONE_MINUS_NORM'
    ONE_MINUS_NORM_SQ = 'ONE_MINUS_NORM_SQ'

    def weight(self, r):
        r = np.asarray(r, dtype=np.float64)
        if self is Convention.ONE_MINUS_NORM:
            return 1.0 - r
        return (1.0 - r) * (1.0 + r)


DEFAULT_CONVENTION = {
    Kind.S1: Convention.ONE_MINUS_NORM,
    Kind.S2: Convention.ONE_MINUS_NORM,
    Kind.GROWTH: Convention.ONE_MINUS_NORM,
    Kind.LIP: Convention.ONE_MINUS_NORM,
    Kind.SWEIGHTED: Convention.ONE_MINUS_NORM,
    Kind.S3: Convention.ONE_MINUS_NORM_SQ,
    Kind.S4: Convention.ONE_MINUS_NORM_SQ,
    Kind.NORMAL: Convention.ONE_MINUS_NORM_SQ,
    Kind.QF: Convention.ONE_MINUS_NORM_SQ,
    Kind.DISK_BLOCH: Convention.ONE_MINUS_NORM_SQ,
}


def weight_exponent(kind: Kind, alpha: float) -> float:
    if kind is Kind.S4:
        return alpha - 1.0
    if kind is Kind.NORMAL:
        return 1.0
    if kind is Kind.QF:
        return 0.0
    return alpha


@dataclass(frozen=True)
class PointDiff:
    value: complex
    grad: np.ndarray
    grad_norm: float
    radial: complex
    invgrad_norm: float


@dataclass(frozen=True)
class SeminormEstimate:
    """
    Maximum of a weighted quantity over a finite deterministic sample set,
    hence a lower bound of the true supremum.
    witness is (point,) for pointwise kinds, (x, y) for quotients and
    (direction, z) or (z,) for disk kinds.
    """
    kind: Kind
    alpha: float
    value: float
    witness: Tuple
    plan: SamplingPlan
    convention: Optional[Convention] = None
    lam: Optional[float] = None
    witness_radius: float = 0.0
    samples: int = 0


class SupMeter(object):
    """
    Computes and stores the running supremum and its first witness
    """
    def __init__(self):
        self.reset()

    def reset(self):
        self.val = 0.0
        self.witness = None
        self.count = 0

    def update(self, values, witness: Callable[[int], Tuple]):
        values = np.asarray(values, dtype=np.float64).ravel()
        if len(values) == 0:
            return
        self.count += len(values)
        i = int(np.argmax(values))
        # strict comparison keeps the earliest sample on ties
        if self.witness is None or values[i] > self.val:
            self.val = float(values[i])
            self.witness = witness(i)


# pointwise quantities

def invariant_gradient_norm(f: HoloFunction, x: ArrayLike):
    """
    Closed form of sup_w |Df(x)w|(1-|x|^2)/sqrt((1-|x|^2)|w|^2 + |<w,x>|^2):
    sqrt((1-r^2)^2 |c_par|^2 + (1-r^2)|c_perp|^2) with c = conj(grad f(x)).
    Broadcasts over a batch of points.
    """
    x = np.asarray(x, dtype=np.complex128)
    require_interior(x)
    c = np.conj(f.gradient(x))
    r = norm(x)
    omr = one_minus_norm_sq(x)
    # component of c along the unit radial direction
    unit = np.divide(x, np.asarray(r)[..., None], out=np.zeros_like(x), where=np.asarray(r)[..., None] > 0)
    par = np.asarray(inner(c, unit))[..., None] * unit
    perp = c - par
    return np.sqrt(omr ** 2 * norm_sq(par) + omr * norm_sq(perp))[()]


def invariant_gradient_norm_algebraic(f: HoloFunction, x: ArrayLike):
    """sqrt((1-|x|^2)(||Df(x)||^2 - |Rf(x)|^2))"""
    x = np.asarray(x, dtype=np.complex128)
    require_interior(x)
    g = f.gradient(x)
    rf = np.sum(g * x, axis=-1)
    val = one_minus_norm_sq(x) * (norm_sq(g) - np.abs(rf) ** 2)
    return np.sqrt(np.maximum(val, 0.0))[()]


def invariant_gradient_oracle(f: HoloFunction, x: ArrayLike, plan: SamplingPlan) -> float:
    """
    Sampled supremum over seeded unit w, the axes, the radial and tangential
    parts of c and the exact maximiser c_par + c_perp/(1-|x|^2).
    """
    x = as_point(x)
    require_interior(x)
    g = f.gradient(x)
    c = np.conj(g)
    if float(norm(c)) == 0.0:
        return 0.0
    n = len(x)
    omr = float(one_minus_norm_sq(x))
    candidates = [np.eye(n, dtype=np.complex128),
                  random_unit_vectors(plan.rng(STREAM_ORACLE), plan.pair_samples, n)]
    if float(norm_sq(x)) > 0.0:
        par, perp = decompose(c, x)
        analytic = np.stack([par, perp, par + perp / omr])
    else:
        analytic = c[None, :]
    analytic = analytic[norm(analytic) > 0]
    w = np.concatenate(candidates + [analytic])
    ratio = np.abs(w @ g) * omr / np.sqrt(quadratic_denominator(x, w))
    return float(np.max(ratio))


def invariant_gradient_fd(f: HoloFunction, x: ArrayLike, h: float = 1e-5) -> float:
    """||D(f o phi_x)(0)|| by central differences along each coordinate axis"""
    if not 0.0 < h <= 1e-4:
        raise ValueError('finite-difference step must lie in (0, 1e-4], got {}'.format(h))
    m = MobiusMap(as_point(x))
    steps = h * np.eye(m.dim, dtype=np.complex128)
    diff = f.evaluate(m.apply(steps)) - f.evaluate(m.apply(-steps))
    return float(norm(diff / (2.0 * h)))


def point_diff(f: HoloFunction, x: ArrayLike) -> PointDiff:
    x = as_point(x)
    require_interior(x)
    g = f.gradient(x)
    g.flags.writeable = False
    return PointDiff(value=complex(f.evaluate(x)),
                     grad=g,
                     grad_norm=float(norm(g)),
                     radial=complex(np.sum(g * x)),
                     invgrad_norm=float(invariant_gradient_norm(f, x)))


def pointwise_quantity(f: HoloFunction, kind: Kind, alpha: float, x: ArrayLike, convention: Convention):
    """weighted quantity whose supremum over the ball defines `kind`"""
    x = np.asarray(x, dtype=np.complex128)
    if kind is Kind.S1:
        q = norm(f.gradient(x))
    elif kind is Kind.S2:
        q = np.abs(f.radial_derivative(x))
    elif kind in (Kind.S4, Kind.QF):
        q = invariant_gradient_norm(f, x)
    elif kind is Kind.GROWTH:
        q = np.abs(f.evaluate(x))
    elif kind is Kind.NORMAL:
        q = norm(f.gradient(x)) / (1.0 + np.abs(f.evaluate(x)) ** 2)
    else:
        raise UnsupportedSeminormError('{} has no pointwise quantity'.format(kind.value))
    return convention.weight(norm(x)) ** weight_exponent(kind, alpha) * q


def _validate(kind: Kind, alpha: float, dim: int) -> None:
    if kind in (Kind.LIP, Kind.SWEIGHTED):
        raise UnsupportedSeminormError('{} is a pair quotient, use lipschitz_quotient / weighted_quotient'.format(kind.value))
    if not math.isfinite(alpha) or alpha < 0:
        raise UnsupportedSeminormError('alpha must be finite and nonnegative, got {}'.format(alpha))
    if kind in (Kind.S2, Kind.S3, Kind.S4, Kind.DISK_BLOCH) and alpha <= 0:
        raise UnsupportedSeminormError('{} needs alpha > 0, got {}'.format(kind.value, alpha))
    if kind is Kind.S4 and dim == 1:
        raise UnsupportedSeminormError('S4 needs dimension n >= 2 (for n = 1 it coincides with S1)')
    if kind is Kind.DISK_BLOCH and dim != 1:
        raise UnsupportedSeminormError('DISK_BLOCH applies to functions of one variable, got n = {}'.format(dim))


def validate_request(kind, alpha: float, dim: int, lam: Optional[float] = None) -> Kind:
    """precondition check for any kind, pair quotients included, without touching a function"""
    kind = Kind.parse(kind)
    alpha = float(alpha)
    if kind is Kind.LIP:
        if not 0.0 < alpha <= 1.0:
            raise UnsupportedSeminormError('Lipschitz exponent must lie in (0, 1], got {}'.format(alpha))
    elif kind is Kind.SWEIGHTED:
        lam = 0.0 if lam is None else float(lam)
        if not (math.isfinite(alpha) and 0.0 <= lam <= alpha):
            raise UnsupportedSeminormError('weighted quotient needs 0 <= lambda <= alpha, got alpha={} lambda={}'.format(alpha, lam))
    else:
        _validate(kind, alpha, dim)
    return kind


# supremum estimators

def estimate_seminorm(f: HoloFunction, kind, alpha: float, plan: SamplingPlan,
                      convention: Optional[Convention] = None) -> SeminormEstimate:
    """
    Grid maximum (level-major, direction-minor) followed by golden-section
    refinement along the best direction on [r_{j-1}, r_{j+1}].
    """
    kind = Kind.parse(kind)
    alpha = float(alpha)
    _validate(kind, alpha, f.dim)
    convention = Convention(convention) if convention is not None else DEFAULT_CONVENTION[kind]

    if kind is Kind.S3:
        est = _estimate_slices(f, alpha, plan, convention)
    elif kind is Kind.DISK_BLOCH:
        est = estimate_disk_bloch(f.slice_series(np.ones(1)), alpha, plan, convention)
    else:
        x, levels, idx = plan.points(f.dim)
        values = pointwise_quantity(f, kind, alpha, x, convention)
        meter = SupMeter()
        meter.update(values, lambda i: (as_point(x[i]),))
        if plan.refine_steps > 0:
            best = int(np.argmax(values))
            d = plan.directions(f.dim)[idx[best]]
            lo, hi = plan.bracket(int(levels[best]))
            t, v = golden_max(lambda s: float(pointwise_quantity(f, kind, alpha, s * d, convention)),
                              lo, hi, plan.refine_steps)
            meter.update([v], lambda _: (as_point(t * d),))
        est = SeminormEstimate(kind=kind, alpha=alpha, value=meter.val, witness=meter.witness, plan=plan,
                               convention=convention, witness_radius=float(norm(meter.witness[0])),
                               samples=meter.count)
    logger.debug('[seminorm]\tkind: {}\talpha: {:.4f}\tconvention: {}\tvalue: {:.9f}\tradius: {:.9f}'.format(
        kind.value, alpha, est.convention.value, est.value, est.witness_radius))
    return est


def _disk_values(dF: DiskSeries, alpha: float, z: np.ndarray, convention: Convention) -> np.ndarray:
    return convention.weight(np.abs(z)) ** alpha * np.abs(dF(z))


def _refine_disk(dF: DiskSeries, alpha: float, plan: SamplingPlan, convention: Convention,
                 level: int, theta: float) -> Tuple[complex, float]:
    rot = np.exp(1j * theta)
    lo, hi = plan.bracket(level)
    t, v = golden_max(lambda s: float(_disk_values(dF, alpha, s * rot, convention)), lo, hi, plan.refine_steps)
    return complex(t * rot), v


def estimate_disk_bloch(F: DiskSeries, alpha: float, plan: SamplingPlan,
                        convention: Convention = Convention.ONE_MINUS_NORM_SQ) -> SeminormEstimate:
    """sup over the disk of (1-|z|^2)^alpha |F'(z)| on radius grid x angles, refined"""
    if not alpha > 0:
        raise UnsupportedSeminormError('disk Bloch norm needs alpha > 0, got {}'.format(alpha))
    convention = Convention(convention)
    z, levels, idx = plan.disk_points()
    dF = F.derivative()
    values = _disk_values(dF, alpha, z, convention)
    meter = SupMeter()
    meter.update(values, lambda i: (complex(z[i]),))
    if plan.refine_steps > 0:
        best = int(np.argmax(values))
        zt, v = _refine_disk(dF, alpha, plan, convention, int(levels[best]), float(np.angle(z[best])))
        meter.update([v], lambda _: (zt,))
    return SeminormEstimate(kind=Kind.DISK_BLOCH, alpha=float(alpha), value=meter.val, witness=meter.witness,
                            plan=plan, convention=convention, witness_radius=abs(meter.witness[0]),
                            samples=meter.count)


def disk_bloch_norm(F: DiskSeries, alpha: float, plan: SamplingPlan) -> float:
    return estimate_disk_bloch(F, alpha, plan).value


def _estimate_slices(f: HoloFunction, alpha: float, plan: SamplingPlan, convention: Convention) -> SeminormEstimate:
    z, levels, idx = plan.disk_points()
    weights = convention.weight(np.abs(z)) ** alpha
    dirs = plan.directions(f.dim)
    meter = SupMeter()
    best = None
    for k, y in enumerate(dirs):
        dF = f.slice_series(y).derivative()
        values = weights * np.abs(dF(z))
        i = int(np.argmax(values))
        if best is None or values[i] > meter.val:
            best = (k, i, dF)
        meter.update(values, lambda i, y=y: (as_point(y), complex(z[i])))
    if plan.refine_steps > 0:
        k, i, dF = best
        zt, v = _refine_disk(dF, alpha, plan, convention, int(levels[i]), float(np.angle(z[i])))
        meter.update([v], lambda _: (as_point(dirs[k]), zt))
    return SeminormEstimate(kind=Kind.S3, alpha=alpha, value=meter.val, witness=meter.witness, plan=plan,
                            convention=convention, witness_radius=abs(meter.witness[1]), samples=meter.count)


def bloch_norm(f: HoloFunction, alpha: float, plan: SamplingPlan) -> float:
    """|f(0)| + S1, the norm of the Bloch-type space"""
    return abs(complex(f.evaluate(np.zeros(f.dim)))) + estimate_seminorm(f, Kind.S1, alpha, plan).value


# pair quotients

def _partners(anchors: np.ndarray, dirs: np.ndarray, valid: np.ndarray) -> Tuple[list, list]:
    """near-diagonal partners x +- t*d that stay inside the ball"""
    xs, ys = [], []
    for t in NEAR_DIAGONAL_STEPS:
        fwd = anchors + t * dirs
        back = anchors - t * dirs
        partner = np.where((norm(fwd) < 1.0)[:, None], fwd, back)
        keep = valid & (norm(partner) < 1.0)
        xs.append(anchors[keep])
        ys.append(partner[keep])
    return xs, ys


def quotient_pairs(f: HoloFunction, plan: SamplingPlan) -> Tuple[np.ndarray, np.ndarray]:
    """
    Deterministic pair set for the quotient estimators, every pair present in
    both orders.
    Returns:
        x [m, n], y [m, n] with x != y
    """
    n = f.dim
    anchors, _, _ = plan.points(n)
    r = norm(anchors)
    inside = r > 0
    xs = [anchors[inside], anchors[inside]]
    ys = [np.zeros_like(anchors[inside]), -anchors[inside]]

    g = np.conj(f.gradient(anchors))
    gn = norm(g)
    steepest = np.divide(g, gn[:, None], out=np.zeros_like(g), where=gn[:, None] > 0)
    radial = np.divide(anchors, r[:, None], out=np.zeros_like(anchors), where=r[:, None] > 0)
    for dirs, valid in ((steepest, gn > 0), (radial, inside)):
        px, py = _partners(anchors, dirs, valid)
        xs += px
        ys += py
    for axis in np.eye(n, dtype=np.complex128):
        px, py = _partners(anchors, np.broadcast_to(axis, anchors.shape), np.ones(len(anchors), dtype=bool))
        xs += px
        ys += py

    radii = plan.radii()
    i, j = np.triu_indices(len(radii), k=1)
    for d in plan.directions(n):
        xs.append(radii[i][:, None] * d)
        ys.append(radii[j][:, None] * d)

    rand = plan.ball_points(2 * plan.pair_samples, n)
    xs.append(rand[:plan.pair_samples])
    ys.append(rand[plan.pair_samples:])

    x, y = np.concatenate(xs), np.concatenate(ys)
    distinct = norm(x - y) > 0
    x, y = x[distinct], y[distinct]
    return np.concatenate([x, y]), np.concatenate([y, x])


def _quotient_estimate(kind: Kind, alpha: float, lam: Optional[float], values: np.ndarray,
                       x: np.ndarray, y: np.ndarray, plan: SamplingPlan) -> SeminormEstimate:
    meter = SupMeter()
    meter.update(values, lambda i: (as_point(x[i]), as_point(y[i])))
    return SeminormEstimate(kind=kind, alpha=alpha, value=meter.val, witness=meter.witness, plan=plan,
                            convention=Convention.ONE_MINUS_NORM if kind is Kind.SWEIGHTED else None,
                            lam=lam, witness_radius=float(norm(meter.witness[0])), samples=meter.count)


def lipschitz_quotient(f: HoloFunction, alpha: float, plan: SamplingPlan) -> SeminormEstimate:
    """max over pairs of |f(x)-f(y)| / |x-y|^alpha"""
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise UnsupportedSeminormError('Lipschitz exponent must lie in (0, 1], got {}'.format(alpha))
    x, y = quotient_pairs(f, plan)
    values = np.abs(f.evaluate(x) - f.evaluate(y)) / norm(x - y) ** alpha
    return _quotient_estimate(Kind.LIP, alpha, None, values, x, y, plan)


def weighted_quotient(f: HoloFunction, alpha: float, lam: float, plan: SamplingPlan) -> SeminormEstimate:
    """max over pairs of (1-|x|)^lam (1-|y|)^(alpha-lam) |f(x)-f(y)| / |x-y|"""
    alpha, lam = float(alpha), float(lam)
    if not (math.isfinite(alpha) and 0.0 <= lam <= alpha):
        raise UnsupportedSeminormError('weighted quotient needs 0 <= lambda <= alpha, got alpha={} lambda={}'.format(alpha, lam))
    x, y = quotient_pairs(f, plan)
    wx = (1.0 - norm(x)) ** lam
    wy = (1.0 - norm(y)) ** (alpha - lam)
    values = wx * wy * np.abs(f.evaluate(x) - f.evaluate(y)) / norm(x - y)
    return _quotient_estimate(Kind.SWEIGHTED, alpha, lam, values, x, y, plan)


def estimate(f: HoloFunction, kind, alpha: float, plan: SamplingPlan,
             convention: Optional[Convention] = None, lam: Optional[float] = None) -> SeminormEstimate:
    """dispatch over every kind, pair quotients included"""
    kind = Kind.parse(kind)
    if kind is Kind.LIP:
        return lipschitz_quotient(f, alpha, plan)
    if kind is Kind.SWEIGHTED:
        return weighted_quotient(f, alpha, 0.0 if lam is None else lam, plan)
    return estimate_seminorm(f, kind, alpha, plan, convention)
