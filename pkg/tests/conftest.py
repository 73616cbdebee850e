import os

from pytest import fixture

from util.sampler import SamplingPlan


ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATASET = os.path.join(ROOT, 'dataset')


@fixture
def plan():
    return SamplingPlan(radial_levels=12, directions_per_level=6, pair_samples=200,
                        refine_steps=40, angles=32, seed=42)


@fixture
def grid_plan():
    """grid only, no golden-section refinement"""
    return SamplingPlan(radial_levels=10, directions_per_level=6, pair_samples=100,
                        refine_steps=0, angles=16, seed=42)
