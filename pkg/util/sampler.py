import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Callable, Tuple

import numpy as np


MAX_RADIAL_LEVELS = 40
NEAR_DIAGONAL_STEPS = (1e-2, 1e-4, 1e-6)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

# independent random streams drawn from one plan seed
STREAM_DIRECTIONS = 0
STREAM_PAIRS = 1
STREAM_ORACLE = 2
STREAM_AUX = 3


class PlanError(ValueError):
    """Raised for an invalid sampling plan."""


@dataclass(frozen=True)
class SamplingPlan:
    """
    Deterministic supremum-search configuration.
    Args:
        radial_levels: J, radii r_j = 1 - 2^-j for j = 0..J
        directions_per_level: D, coordinate axes first, then seeded random unit vectors
        pair_samples: random pairs for the quotient estimators
        refine_steps: golden-section iterations around the best sample (0 = grid only)
        angles: angular samples per disk radius
        seed: 64-bit seed
    """
    radial_levels: int = 24
    directions_per_level: int = 16
    pair_samples: int = 2000
    refine_steps: int = 40
    angles: int = 64
    seed: int = 42

    def __post_init__(self):
        if not 1 <= self.radial_levels <= MAX_RADIAL_LEVELS:
            raise PlanError('radial_levels must be in [1, {}], got {}'.format(MAX_RADIAL_LEVELS, self.radial_levels))
        for name in ('directions_per_level', 'pair_samples', 'angles'):
            if getattr(self, name) < 1:
                raise PlanError('{} must be positive, got {}'.format(name, getattr(self, name)))
        if self.refine_steps < 0:
            raise PlanError('refine_steps must be nonnegative, got {}'.format(self.refine_steps))
        if not 0 <= self.seed < 2 ** 64:
            raise PlanError('seed must be a 64-bit unsigned integer, got {}'.format(self.seed))

    @classmethod
    def from_cfg(cls, cfg: dict, **overrides) -> 'SamplingPlan':
        fields = {k: v for k, v in (cfg or {}).items() if k in cls.__dataclass_fields__}
        fields.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**{k: int(v) for k, v in fields.items()})
        except TypeError:
            raise PlanError('plan values must be integers, got {}'.format(fields)) from None

    def coarsened(self) -> 'SamplingPlan':
        """same plan one radial level shallower"""
        return replace(self, radial_levels=max(1, self.radial_levels - 1))

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode('utf-8')
        return hashlib.sha256(blob).hexdigest()[:16]

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def radii(self) -> np.ndarray:
        return 1.0 - 2.0 ** -np.arange(self.radial_levels + 1, dtype=np.float64)

    def directions(self, dim: int) -> np.ndarray:
        """(max(D, n), n) unit vectors: axes, then random ones (prefix-stable in D)"""
        axes = np.eye(dim, dtype=np.complex128)
        extra = self.directions_per_level - dim
        if extra <= 0:
            return axes
        return np.concatenate([axes, random_unit_vectors(self.rng(STREAM_DIRECTIONS), extra, dim)])

    def points(self, dim: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Grid points enumerated level-major, direction-minor.
        Returns:
            points [L*D, n], level index [L*D], direction index [L*D]
        """
        radii, dirs = self.radii(), self.directions(dim)
        levels = np.repeat(np.arange(len(radii)), len(dirs))
        idx = np.tile(np.arange(len(dirs)), len(radii))
        return radii[levels][:, None] * dirs[idx], levels, idx

    def disk_points(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Disk samples z = r_j exp(i theta_k), level-major.
        Returns:
            z [L*A], level index, angle index
        """
        radii = self.radii()
        theta = 2.0 * math.pi * np.arange(self.angles) / self.angles
        levels = np.repeat(np.arange(len(radii)), self.angles)
        idx = np.tile(np.arange(self.angles), len(radii))
        return radii[levels] * np.exp(1j * theta[idx]), levels, idx

    def bracket(self, level: int) -> Tuple[float, float]:
        """radial interval [r_{j-1}, r_{j+1}] around level j, clipped to the grid"""
        radii = self.radii()
        return float(radii[max(level - 1, 0)]), float(radii[min(level + 1, len(radii) - 1)])

    def ball_points(self, count: int, dim: int, stream: int = STREAM_PAIRS) -> np.ndarray:
        """
        Seeded points of the open ball: random directions, radii half dyadic, half uniform.
        """
        rng = self.rng(stream)
        dirs = random_unit_vectors(rng, count, dim)
        dyadic = self.radii()[rng.integers(0, self.radial_levels + 1, size=count)]
        uniform = rng.uniform(0.0, 1.0, size=count)
        use_dyadic = rng.random(count) < 0.5
        return np.where(use_dyadic, dyadic, uniform)[:, None] * dirs


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    raw = rng.standard_normal((count, dim, 2))
    z = raw[..., 0] + 1j * raw[..., 1]
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def golden_max(func: Callable[[float], float], a: float, b: float, steps: int) -> Tuple[float, float]:
    """
    Golden-section search for a maximum of func on [a, b].
    Returns the best evaluated (t, func(t)), so the result is an attained sample.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if steps <= 0 or h <= 0.0:
        return a, func(a)

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = func(c)
    yd = func(d)
    best = (c, yc) if yc >= yd else (d, yd)

    for _ in range(steps - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
            if yc > best[1]:
                best = (c, yc)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)
            if yd > best[1]:
                best = (d, yd)
    return best
