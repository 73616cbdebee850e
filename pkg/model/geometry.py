import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np


logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[complex]]

UNIT_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when two vectors (or a vector and a function) disagree on n."""


class DomainError(ValueError):
    """Raised when a point violates the open-ball / unit-sphere precondition."""


def as_point(coords: ArrayLike) -> np.ndarray:
    """
    Validated read-only complex vector of the truncated Hilbert space.
    Args:
        coords: length-n sequence of complex numbers (or an (..., n) array of them)
    Returns:
        complex128 array, not writeable
    """
    x = np.array(coords, dtype=np.complex128)
    if x.ndim == 0 or x.shape[-1] < 1:
        raise DimensionError('point must have dimension n >= 1, got shape {}'.format(x.shape))
    x.flags.writeable = False
    return x


def _check_dims(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise DimensionError('dimension mismatch: {} vs {}'.format(x.shape[-1], y.shape[-1]))


def inner(x: ArrayLike, y: ArrayLike):
    """
    Hermitian inner product <x,y> = sum_j x_j conj(y_j), linear in x.
    Broadcasts over leading axes.
    """
    x, y = np.asarray(x, dtype=np.complex128), np.asarray(y, dtype=np.complex128)
    _check_dims(x, y)
    return np.sum(x * np.conj(y), axis=-1)


def norm_sq(x: ArrayLike):
    x = np.asarray(x, dtype=np.complex128)
    return np.sum(x.real ** 2 + x.imag ** 2, axis=-1)


def norm(x: ArrayLike):
    return np.sqrt(norm_sq(x))


def one_minus_norm_sq(x: ArrayLike):
    """1-||x||^2 computed as (1-r)(1+r) so that r close to 1 keeps its digits."""
    r = norm(x)
    return (1.0 - r) * (1.0 + r)


def require_interior(x: np.ndarray) -> None:
    r = np.max(norm(x)) if np.ndim(x) > 1 else norm(x)
    if not r < 1.0:
        raise DomainError('point must lie in the open unit ball, got norm {:.17g}'.format(float(r)))


def require_unit(y: np.ndarray, tol: float = UNIT_TOL) -> None:
    r = float(norm(y))
    if abs(r - 1.0) > tol:
        raise DomainError('direction must be a unit vector within {:g}, got norm {:.17g}'.format(tol, r))


def decompose(c: ArrayLike, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Projection-theorem split c = z*x + y with <y,x> = 0.
    Returns:
        (parallel, orthogonal)
    """
    c, x = as_point(c), as_point(x)
    _check_dims(c, x)
    xx = float(norm_sq(x))
    if xx == 0.0:
        raise DomainError('cannot decompose along the zero vector')
    parallel = (inner(c, x) / xx) * x
    return as_point(parallel), as_point(c - parallel)


def quadratic_denominator(x: ArrayLike, w: ArrayLike):
    """
    (1-||x||^2)||w||^2 + |<w,x>|^2, the square of the denominator in the
    invariant-gradient supremum. Broadcasts over leading axes of w.
    """
    x, w = np.asarray(x, dtype=np.complex128), np.asarray(w, dtype=np.complex128)
    _check_dims(x, w)
    require_interior(x)
    return one_minus_norm_sq(x) * norm_sq(w) + np.abs(inner(w, x)) ** 2


@dataclass(frozen=True)
class MobiusMap:
    """
    Involutive ball automorphism swapping 0 and base:
        phi_a(x) = (a - P_a x - s_a Q_a x) / (1 - <x,a>)
    with P_a the projection onto span(a), Q_a = I - P_a, s_a = sqrt(1-||a||^2).
    """
    base: np.ndarray
    s: float = field(init=False)
    base_norm_sq: float = field(init=False)

    def __post_init__(self):
        a = as_point(self.base)
        require_interior(a)
        object.__setattr__(self, 'base', a)
        aa = float(norm_sq(a))
        object.__setattr__(self, 'base_norm_sq', aa)
        object.__setattr__(self, 's', math.sqrt((1.0 - math.sqrt(aa)) * (1.0 + math.sqrt(aa))))

    @property
    def dim(self) -> int:
        return self.base.shape[-1]

    def _project(self, x: np.ndarray) -> np.ndarray:
        # P_a x for a batch of points
        return np.asarray(inner(x, self.base) / self.base_norm_sq)[..., None] * self.base

    def apply(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        _check_dims(x, self.base)
        require_interior(x)
        if self.base_norm_sq == 0.0:
            return as_point(-x)
        px = self._project(x)
        denom = 1.0 - inner(x, self.base)
        if np.any(denom == 0):
            raise DomainError('1 - <x,a> vanished')
        numer = self.base - px - self.s * (x - px)
        return as_point(numer / denom[..., None] if numer.ndim > 1 else numer / denom)

    def jacobian(self, x: ArrayLike) -> np.ndarray:
        """
        Complex n x n matrix J with D(phi_a)(x)(w) = J @ w.
        """
        x = as_point(x)
        _check_dims(x, self.base)
        require_interior(x)
        n = self.dim
        if self.base_norm_sq == 0.0:
            return -np.eye(n, dtype=np.complex128)
        a = self.base
        p = np.outer(a, np.conj(a)) / self.base_norm_sq
        lin = -p - self.s * (np.eye(n) - p)
        denom = 1.0 - inner(x, a)
        numer = a + lin @ x
        # d/dw of 1/(1-<w,a>) brings in conj(a)
        return lin / denom + np.outer(numer, np.conj(a)) / denom ** 2


def mobius_apply(m: MobiusMap, x: ArrayLike) -> np.ndarray:
    return m.apply(x)


def mobius_jacobian(m: MobiusMap, x: ArrayLike) -> np.ndarray:
    return m.jacobian(x)
