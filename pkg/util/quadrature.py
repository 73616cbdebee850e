import math
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre


def node_count(degree: int) -> int:
    """Gauss-Legendre nodes that integrate a degree-`degree` polynomial exactly"""
    return math.ceil(max(degree, 0) / 2) + 1


def gauss_legendre(count: int, upper: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights on [0, upper].
    Exact for polynomials of degree <= 2*count - 1.
    """
    if count < 1:
        raise ValueError('quadrature needs at least one node, got {}'.format(count))
    nodes, weights = legendre.leggauss(count)
    half = 0.5 * upper
    return half * (nodes + 1.0), half * weights


def integrate(func, upper: float, degree: int) -> complex:
    """integral of a vectorised polynomial integrand of known degree over [0, upper]"""
    nodes, weights = gauss_legendre(node_count(degree), upper)
    return complex(np.sum(weights * func(nodes)))
