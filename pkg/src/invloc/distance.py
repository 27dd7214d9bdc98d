"""L_p distances, their gradients, and the distance-gap rows behind each cut."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Instance, Norm, Point


class SingularPointError(ValueError):
    """Raised when a distance gradient is requested at (or next to) the site itself."""


def lp_distance(a: Point, b: Point, norm: Norm) -> float:
    ax = abs(a[0] - b[0])
    ay = abs(a[1] - b[1])
    p = norm.p
    if p == 1.0:
        return ax + ay
    if math.isinf(p):
        return max(ax, ay)
    m = max(ax, ay)
    if m == 0.0:
        return 0.0
    # scale by the larger gap so |d|^p cannot overflow for large p
    return m * ((ax / m) ** p + (ay / m) ** p) ** (1.0 / p)


def distances(x: Point, coords: np.ndarray, norm: Norm) -> np.ndarray:
    """Distances from ``x`` to every row of ``coords``."""
    coords = np.ascontiguousarray(coords, dtype=float)
    return _kernels.get("dist_many")(coords, float(x[0]), float(x[1]), norm.p)


def lp_distance_gradient(x: Point, a: Point, norm: Norm) -> np.ndarray:
    """Gradient of ``d(x, a)`` with respect to ``x``.

    Its dual (L_q) norm is 1. For p = 1 and p = inf the result is the gradient
    on the open region where it exists; ties at kinks pick the first axis.
    """
    dx = x[0] - a[0]
    dy = x[1] - a[1]
    d = lp_distance(x, a, norm)
    if d < 1e-12:
        raise SingularPointError(f"gradient undefined at distance {d:g} from the site")
    p = norm.p
    if p == 1.0:
        return np.array([math.copysign(1.0, dx) if dx else 0.0,
                         math.copysign(1.0, dy) if dy else 0.0])
    if math.isinf(p):
        if abs(dx) >= abs(dy):
            return np.array([math.copysign(1.0, dx), 0.0])
        return np.array([0.0, math.copysign(1.0, dy)])
    return np.array([
        math.copysign((abs(dx) / d) ** (p - 1.0), dx),
        math.copysign((abs(dy) / d) ** (p - 1.0), dy),
    ])


@dataclass(frozen=True, eq=False)
class DistGapRow:
    """``delta[i] = d(x_bar, A_i) - d(x_k, A_i)`` for the cut generated at ``x_k``."""

    k: int
    delta: np.ndarray


def gap_row(inst: Instance, x_bar: Point, x_k: Point, k: int = 0) -> DistGapRow:
    delta = distances(x_bar, inst.coords, inst.norm) - distances(x_k, inst.coords, inst.norm)
    delta.setflags(write=False)
    return DistGapRow(k, delta)
