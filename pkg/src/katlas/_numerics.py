"""Grid quadrature and finite-difference helpers for radial profiles."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N (2 for N=1, counting both half-lines)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def radial_integral(r: np.ndarray, g: np.ndarray, N: int) -> float:
    """sigma_N * int g(r) r^(N-1) dr by composite Simpson on the stored grid."""
    return sphere_area(N) * float(simpson(g * r ** (N - 1), x=r))
