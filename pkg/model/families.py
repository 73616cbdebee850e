import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from .functions import (MAX_MONOMIAL_DEGREE, MAX_RIDGE_TERMS, DiskSeries, HoloFunction,
                        MonomialTerm, check_curve_range, ridge_coefficients_log,
                        ridge_coefficients_power)


logger = logging.getLogger(__name__)

CURVE_RANGE = 0.99


class FamilySpecError(ValueError):
    """Raised for invalid family parameters."""


class Family(str, Enum):
    RANDOM_POLY = 'RANDOM_POLY'
    COORDINATE = 'COORDINATE'
    RIDGE_POWER = 'RIDGE_POWER'
    RIDGE_LOG = 'RIDGE_LOG'
    RIDGE_POWERBETA = 'RIDGE_POWERBETA'


@dataclass(frozen=True)
class FamilySpec:
    """
    Deterministic test-function family.
    Args:
        name: family kind
        dim: n
        degree: max total degree (RANDOM_POLY) or the power k of <x,u>^k (RIDGE_POWER)
        terms: monomials per RANDOM_POLY function
        truncation: ridge series truncation N
        beta: exponent of (1-t)^-beta for RIDGE_POWERBETA
        count: number of functions (COORDINATE always yields n)
        seed: 64-bit seed
    """
    name: Family
    dim: int = 2
    degree: int = 6
    terms: int = 8
    truncation: int = MAX_RIDGE_TERMS
    beta: float = 0.5
    count: int = 1
    seed: int = 42

    def __post_init__(self):
        try:
            name = self.name if isinstance(self.name, Family) else Family(str(self.name).upper())
            object.__setattr__(self, 'name', name)
        except ValueError:
            raise FamilySpecError('unknown family {!r}'.format(self.name)) from None
        if self.dim < 1:
            raise FamilySpecError('dim must be >= 1, got {}'.format(self.dim))
        if not 1 <= self.degree <= MAX_MONOMIAL_DEGREE:
            raise FamilySpecError('degree must lie in [1, {}], got {}'.format(MAX_MONOMIAL_DEGREE, self.degree))
        if not 1 <= self.truncation <= MAX_RIDGE_TERMS:
            raise FamilySpecError('truncation must lie in [1, {}], got {}'.format(MAX_RIDGE_TERMS, self.truncation))
        if self.terms < 1 or self.count < 1:
            raise FamilySpecError('terms and count must be positive, got {} and {}'.format(self.terms, self.count))
        if not math.isfinite(self.beta):
            raise FamilySpecError('beta must be finite, got {}'.format(self.beta))
        if not 0 <= self.seed < 2 ** 64:
            raise FamilySpecError('seed must be a 64-bit unsigned integer, got {}'.format(self.seed))

    @classmethod
    def from_cfg(cls, cfg: dict) -> 'FamilySpec':
        unknown = sorted(str(k) for k in set(cfg) - set(cls.__dataclass_fields__))
        if unknown:
            raise FamilySpecError('unknown family keys: {}'.format(', '.join(unknown)))
        try:
            return cls(**cfg)
        except TypeError as e:
            raise FamilySpecError('invalid family parameters {}: {}'.format(cfg, e)) from None

    def label(self, index: int) -> str:
        if self.name is Family.RIDGE_POWERBETA:
            return '{}(beta={:g})#{}'.format(self.name.value, self.beta, index)
        return '{}#{}'.format(self.name.value, index)


def _disk_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """complex numbers uniform on the unit disk"""
    radius = np.sqrt(rng.uniform(0.0, 1.0, size))
    return radius * np.exp(2j * math.pi * rng.uniform(0.0, 1.0, size))


def _random_poly(spec: FamilySpec, rng: np.random.Generator) -> HoloFunction:
    terms = []
    for k in range(spec.terms):
        # first term nonconstant so the family has no constants
        degree = int(rng.integers(1 if k == 0 else 0, spec.degree + 1))
        exps = rng.multinomial(degree, [1.0 / spec.dim] * spec.dim)
        terms.append(MonomialTerm(tuple(int(e) for e in exps), complex(_disk_uniform(rng, None))))
    return HoloFunction(spec.dim, tuple(terms))


def _ridge_coeffs(spec: FamilySpec) -> List[complex]:
    if spec.name is Family.RIDGE_POWER:
        return [0j] * spec.degree + [1.0 + 0j]
    if spec.name is Family.RIDGE_LOG:
        return ridge_coefficients_log(spec.truncation)
    return ridge_coefficients_power(spec.beta, spec.truncation)


def generate_family(spec: FamilySpec) -> List[HoloFunction]:
    """
    Returns:
        functions in a deterministic order; ridge directions cycle through the axes
    """
    if spec.name is Family.COORDINATE:
        return [HoloFunction.coordinate(spec.dim, j) for j in range(spec.dim)]
    if spec.name is Family.RANDOM_POLY:
        rng = np.random.default_rng([spec.seed, 0])
        return [_random_poly(spec, rng) for _ in range(spec.count)]
    coeffs = _ridge_coeffs(spec)
    axes = np.eye(spec.dim, dtype=np.complex128)
    return [HoloFunction.ridge(axes[i % spec.dim], coeffs) for i in range(spec.count)]


def labelled_family(spec: FamilySpec) -> List[Tuple[str, HoloFunction]]:
    return [(spec.label(i), f) for i, f in enumerate(generate_family(spec))]


def axis_curve(dim: int, j: int = 0) -> Tuple[DiskSeries, ...]:
    """g(z) = z e_j"""
    return tuple(DiskSeries((0j, 1.0 + 0j)) if k == j else DiskSeries((0j,)) for k in range(dim))


def random_curves(count: int, dim: int, seed: int, degree: int = 3,
                  radius: float = CURVE_RANGE) -> List[Tuple[DiskSeries, ...]]:
    """
    Seeded polynomial curves of the disk into the ball, rescaled so that the
    sampled maximum of ||g|| on the unit circle equals `radius`.
    """
    rng = np.random.default_rng([seed, 1])
    curves = []
    for _ in range(count):
        coeffs = _disk_uniform(rng, (dim, degree + 1))
        curve = tuple(DiskSeries.from_array(c) for c in coeffs)
        top = check_curve_range(curve, tol=np.inf)
        curves.append(tuple(DiskSeries.from_array(g.array * (radius / top)) for g in curve))
    return curves
