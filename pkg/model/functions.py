import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import (ArrayLike, DimensionError, DomainError, as_point, inner,
                       norm, require_unit)


logger = logging.getLogger(__name__)

MAX_MONOMIAL_DEGREE = 16
MAX_RIDGE_TERMS = 64
MAX_SERIES_COEFFS = 4096
CURVE_SAMPLES = 4096
CURVE_TOL = 1e-9
RIDGE_UNIT_TOL = 1e-9


class TruncationError(ValueError):
    """Raised when a degree, ridge truncation or series length exceeds its cap."""


class CurveRangeError(ValueError):
    """Raised when a disk curve leaves the closed unit ball."""


def _cap(coeffs: np.ndarray) -> np.ndarray:
    if len(coeffs) > MAX_SERIES_COEFFS:
        raise TruncationError('series needs {} coefficients, cap is {}'.format(len(coeffs), MAX_SERIES_COEFFS))
    return coeffs


@dataclass(frozen=True)
class DiskSeries:
    """
    Truncated power series F(z) = sum_k a_k z^k on the unit disk.
    """
    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(a) for a in self.coeffs) or (0j,)
        if len(c) > MAX_SERIES_COEFFS:
            raise TruncationError('series has {} coefficients, cap is {}'.format(len(c), MAX_SERIES_COEFFS))
        object.__setattr__(self, 'coeffs', c)

    @classmethod
    def from_array(cls, coeffs: ArrayLike) -> 'DiskSeries':
        return cls(tuple(np.asarray(coeffs, dtype=np.complex128).ravel()))

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.coeffs, dtype=np.complex128)
        a.flags.writeable = False
        return a

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.array)
        return int(nz[-1]) if len(nz) else 0

    def evaluate(self, z):
        return npoly.polyval(np.asarray(z, dtype=np.complex128), self.array)

    def derivative(self) -> 'DiskSeries':
        if len(self.coeffs) == 1:
            return DiskSeries((0j,))
        return DiskSeries.from_array(npoly.polyder(self.array))

    def __call__(self, z):
        return self.evaluate(z)


@dataclass(frozen=True)
class MonomialTerm:
    """coeff * x_1^{e_1} ... x_n^{e_n}"""
    exponents: Tuple[int, ...]
    coeff: complex

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValueError('monomial exponents must be nonnegative, got {}'.format(exps))
        if sum(exps) > MAX_MONOMIAL_DEGREE:
            raise TruncationError('monomial degree {} exceeds {}'.format(sum(exps), MAX_MONOMIAL_DEGREE))
        object.__setattr__(self, 'exponents', exps)
        object.__setattr__(self, 'coeff', complex(self.coeff))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @staticmethod
    def _power_product(x: np.ndarray, exps: Sequence[int]) -> np.ndarray:
        out = np.ones(x.shape[:-1], dtype=np.complex128)
        for j, e in enumerate(exps):
            if e > 0:
                out = out * x[..., j] ** e
        return out

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.coeff * self._power_product(x, self.exponents)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(x.shape, dtype=np.complex128)
        for j, e in enumerate(self.exponents):
            if e == 0:
                continue
            lowered = list(self.exponents)
            lowered[j] -= 1
            g[..., j] = self.coeff * e * self._power_product(x, lowered)
        return g

    def compose(self, curve: Sequence[DiskSeries]) -> np.ndarray:
        out = np.array([self.coeff], dtype=np.complex128)
        for g, e in zip(curve, self.exponents):
            if e > 0:
                out = _cap(npoly.polymul(out, npoly.polypow(g.array, e, maxpower=MAX_MONOMIAL_DEGREE)))
        return out


@dataclass(frozen=True)
class RidgeTerm:
    """F(<x,u>) with F(t) = sum_k c_k t^k and unit direction u."""
    direction: Tuple[complex, ...]
    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        u = np.array(self.direction, dtype=np.complex128)
        r = float(norm(u))
        if abs(r - 1.0) > RIDGE_UNIT_TOL:
            raise DomainError('ridge direction must be a unit vector, got norm {:.12g}'.format(r))
        c = tuple(complex(a) for a in self.coeffs) or (0j,)
        if len(c) - 1 > MAX_RIDGE_TERMS:
            raise TruncationError('ridge truncation {} exceeds {}'.format(len(c) - 1, MAX_RIDGE_TERMS))
        object.__setattr__(self, 'direction', tuple(complex(a) for a in u / r))
        object.__setattr__(self, 'coeffs', c)

    @cached_property
    def u(self) -> np.ndarray:
        return as_point(self.direction)

    @cached_property
    def c(self) -> np.ndarray:
        a = np.array(self.coeffs, dtype=np.complex128)
        a.flags.writeable = False
        return a

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.c)
        return int(nz[-1]) if len(nz) else 0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return npoly.polyval(inner(x, self.u), self.c)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        dF = npoly.polyval(inner(x, self.u), npoly.polyder(self.c)) if len(self.c) > 1 \
            else np.zeros(x.shape[:-1], dtype=np.complex128)
        return np.asarray(dF)[..., None] * np.conj(self.u)

    def compose(self, curve: Sequence[DiskSeries]) -> np.ndarray:
        t = np.zeros(1, dtype=np.complex128)
        for g, uj in zip(curve, self.u):
            t = npoly.polyadd(t, np.conj(uj) * g.array)
        # Horner in the series ring
        acc = np.array([self.c[-1]])
        for ck in self.c[-2::-1]:
            acc = _cap(npoly.polyadd(npoly.polymul(acc, t), [ck]))
        return acc


Term = Union[MonomialTerm, RidgeTerm]


@dataclass(frozen=True)
class HoloFunction:
    """
    Holomorphic test function on the unit ball of C^n: a finite sum of
    sparse monomials and ridge power series. Closed under radial
    differentiation, homogeneous extraction, slicing and curve composition.
    """
    dim: int
    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionError('dimension must be >= 1, got {}'.format(self.dim))
        terms = tuple(self.terms)
        for t in terms:
            if t.dim != self.dim:
                raise DimensionError('term of dimension {} in a function of dimension {}'.format(t.dim, self.dim))
        object.__setattr__(self, 'dim', int(self.dim))
        object.__setattr__(self, 'terms', terms)

    # constructors
    @classmethod
    def zero(cls, dim: int) -> 'HoloFunction':
        return cls(dim, ())

    @classmethod
    def constant(cls, dim: int, value: complex) -> 'HoloFunction':
        return cls(dim, (MonomialTerm((0,) * dim, value),))

    @classmethod
    def coordinate(cls, dim: int, j: int, coeff: complex = 1.0) -> 'HoloFunction':
        exps = [0] * dim
        exps[j] = 1
        return cls(dim, (MonomialTerm(tuple(exps), coeff),))

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: complex = 1.0) -> 'HoloFunction':
        return cls(len(exponents), (MonomialTerm(tuple(exponents), coeff),))

    @classmethod
    def ridge(cls, direction: ArrayLike, coeffs: Sequence[complex]) -> 'HoloFunction':
        u = tuple(np.asarray(direction, dtype=np.complex128).ravel())
        return cls(len(u), (RidgeTerm(u, tuple(coeffs)),))

    @classmethod
    def linear(cls, a: ArrayLike) -> 'HoloFunction':
        """x -> sum_j a_j x_j"""
        a = np.asarray(a, dtype=np.complex128).ravel()
        n = len(a)
        terms = []
        for j in range(n):
            if a[j] != 0:
                exps = [0] * n
                exps[j] = 1
                terms.append(MonomialTerm(tuple(exps), a[j]))
        return cls(n, tuple(terms))

    def __add__(self, other: 'HoloFunction') -> 'HoloFunction':
        if other.dim != self.dim:
            raise DimensionError('cannot add functions of dimension {} and {}'.format(self.dim, other.dim))
        return HoloFunction(self.dim, self.terms + other.terms)

    def scaled(self, factor: complex) -> 'HoloFunction':
        terms = []
        for t in self.terms:
            if isinstance(t, MonomialTerm):
                terms.append(MonomialTerm(t.exponents, factor * t.coeff))
            else:
                terms.append(RidgeTerm(t.direction, tuple(factor * c for c in t.coeffs)))
        return HoloFunction(self.dim, tuple(terms))

    @property
    def max_degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    def coefficient_bound(self) -> float:
        """sum of |coefficients|; an upper bound of sup |f| over the closed ball"""
        total = 0.0
        for t in self.terms:
            total += abs(t.coeff) if isinstance(t, MonomialTerm) else float(np.sum(np.abs(t.c)))
        return total

    def is_constant(self) -> bool:
        return self.centered().coefficient_bound() == 0.0

    def _points(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise DimensionError('expected points of dimension {}, got shape {}'.format(self.dim, x.shape))
        return x

    # pointwise calculus
    def evaluate(self, x: ArrayLike):
        x = self._points(x)
        out = np.zeros(x.shape[:-1], dtype=np.complex128)
        for t in self.terms:
            out = out + t.evaluate(x)
        return out[()]

    def gradient(self, x: ArrayLike) -> np.ndarray:
        """
        Coefficient vector g with Df(x)(w) = sum_j g_j w_j, so ||Df(x)|| = ||g||.
        """
        x = self._points(x)
        g = np.zeros(x.shape, dtype=np.complex128)
        for t in self.terms:
            g = g + t.gradient(x)
        return g

    def directional_derivative(self, x: ArrayLike, w: ArrayLike):
        x = self._points(x)
        w = self._points(w)
        return np.sum(self.gradient(x) * w, axis=-1)[()]

    def radial_derivative(self, x: ArrayLike):
        """Rf(x) = Df(x)(x)"""
        return self.directional_derivative(x, x)

    def mixed_radial_derivative(self, x: ArrayLike, y: ArrayLike):
        """DRf(x)(y)"""
        return self.radial_derivative_function().directional_derivative(x, y)

    # function-level calculus
    def radial_derivative_function(self) -> 'HoloFunction':
        terms = []
        for t in self.terms:
            if isinstance(t, MonomialTerm):
                if t.degree > 0:
                    terms.append(MonomialTerm(t.exponents, t.degree * t.coeff))
            else:
                terms.append(RidgeTerm(t.direction, tuple(k * c for k, c in enumerate(t.coeffs))))
        return HoloFunction(self.dim, tuple(terms))

    def homogeneous_part(self, k: int) -> 'HoloFunction':
        """P_k, the k-homogeneous part of f"""
        if k < 0:
            raise ValueError('homogeneous degree must be nonnegative, got {}'.format(k))
        terms = []
        for t in self.terms:
            if isinstance(t, MonomialTerm):
                if t.degree == k:
                    terms.append(t)
            elif k < len(t.coeffs) and t.coeffs[k] != 0:
                terms.append(RidgeTerm(t.direction, (0j,) * k + (t.coeffs[k],)))
        return HoloFunction(self.dim, tuple(terms))

    def homogeneous_parts(self) -> List['HoloFunction']:
        return [self.homogeneous_part(k) for k in range(self.max_degree + 1)]

    def centered(self) -> 'HoloFunction':
        """f - f(0)"""
        terms = []
        for t in self.terms:
            if isinstance(t, MonomialTerm):
                if t.degree > 0:
                    terms.append(t)
            else:
                terms.append(RidgeTerm(t.direction, (0j,) + t.coeffs[1:]))
        return HoloFunction(self.dim, tuple(terms))

    def slice_series(self, y: ArrayLike) -> DiskSeries:
        """f_y(z) = f(zy) as a series in z; y must be a unit vector."""
        y = as_point(self._points(y))
        require_unit(y)
        a = np.zeros(self.max_degree + 1, dtype=np.complex128)
        for t in self.terms:
            if isinstance(t, MonomialTerm):
                a[t.degree] += t.evaluate(y)
            else:
                s = complex(inner(y, t.u))
                powers = np.cumprod(np.r_[1.0 + 0j, np.full(len(t.c) - 1, s)])
                # trailing zero coefficients may run past max_degree
                n = min(len(t.c), len(a))
                a[:n] += (t.c * powers)[:n]
        return DiskSeries.from_array(a)

    def compose_curve(self, curve: Sequence[DiskSeries]) -> DiskSeries:
        """f o g for a polynomial curve g = (g_1, ..., g_n) into the closed ball."""
        curve = tuple(curve)
        if len(curve) != self.dim:
            raise DimensionError('curve has {} components, function dimension is {}'.format(len(curve), self.dim))
        check_curve_range(curve)
        out = np.zeros(1, dtype=np.complex128)
        for t in self.terms:
            out = _cap(npoly.polyadd(out, t.compose(curve)))
        return DiskSeries.from_array(out)


def curve_values(curve: Sequence[DiskSeries], z) -> np.ndarray:
    """stack g_j(z) along the last axis"""
    return np.stack([g.evaluate(z) for g in curve], axis=-1)


def check_curve_range(curve: Sequence[DiskSeries], samples: int = CURVE_SAMPLES, tol: float = CURVE_TOL) -> float:
    """
    Largest sampled ||g(z)|| on |z| = 1; raises when the curve leaves the closed ball.
    """
    z = np.exp(2j * math.pi * np.arange(samples) / samples)
    top = float(np.max(norm(curve_values(curve, z))))
    if top > 1.0 + tol:
        raise CurveRangeError('curve reaches norm {:.12g} on the unit circle'.format(top))
    return top


def ridge_coefficients_log(truncation: int) -> List[complex]:
    """log(1/(1-t)) = sum_{k>=1} t^k / k"""
    return [0j] + [1.0 / k for k in range(1, truncation + 1)]


def ridge_coefficients_power(beta: float, truncation: int) -> List[complex]:
    """(1-t)^{-beta} = sum_k (beta)_k / k! t^k"""
    coeffs = [1.0]
    for k in range(1, truncation + 1):
        coeffs.append(coeffs[-1] * (beta + k - 1) / k)
    return [complex(c) for c in coeffs]

