"""Forward single-facility problems: weighted minisum (Fermat-Weber) and minimax.

Sites with zero weight are dropped and sites sharing a location are merged
before solving. For p = 2 the minisum solver runs the Weiszfeld iteration;
every other case minimises a smoothed surrogate by damped Newton steps with
Armijo backtracking, tightening the smoothing over a few continuation stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distance import distances
from .model import Instance, Objective, Point

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000

_MINISUM_DELTAS = (1e-2, 1e-4, 1e-6, 1e-8)
# (relative smoothing width, dimensionless log-sum-exp sharpness)
_MINIMAX_STAGES = ((1e-2, 1e1), (1e-4, 1e2), (1e-6, 1e3), (1e-8, 1e4), (1e-8, 1e5), (1e-8, 1e6))
_ARMIJO = 1e-4


@dataclass(frozen=True)
class ForwardResult:
    x_star: Point
    objective_value: float
    iterations: int
    converged: bool
    degenerate: bool = False
    history: tuple = ()


def _check_weights(inst: Instance, w) -> np.ndarray:
    w = np.asarray(inst.w if w is None else w, dtype=float)
    if w.shape != (inst.n,):
        raise ValueError(f"weight vector has shape {w.shape}, expected ({inst.n},)")
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise ValueError("weights must be finite and nonnegative")
    return w


def eval_minisum(x: Point, w, inst: Instance) -> float:
    w = _check_weights(inst, w)
    return float(w @ distances(x, inst.coords, inst.norm))


def eval_minimax(x: Point, w, inst: Instance) -> float:
    w = _check_weights(inst, w)
    if inst.n == 0:
        return 0.0
    return float(np.max(w * distances(x, inst.coords, inst.norm)))


def evaluate(inst: Instance, x: Point, w=None) -> float:
    """Objective of ``inst`` (minisum or minimax) at ``x``."""
    if inst.objective is Objective.MINIMAX:
        return eval_minimax(x, w, inst)
    return eval_minisum(x, w, inst)


def _active_sites(inst: Instance, w: np.ndarray):
    keep = w > 0.0
    coords = inst.coords[keep]
    wa = w[keep]
    # merge coincident sites, keeping first-occurrence order
    uniq, first, inverse = np.unique(coords, axis=0, return_index=True, return_inverse=True)
    if len(uniq) == len(coords):
        return np.ascontiguousarray(coords), np.ascontiguousarray(wa)
    merged = np.zeros(len(uniq))
    np.add.at(merged, inverse.ravel(), wa)
    order = np.argsort(first, kind="stable")
    return np.ascontiguousarray(uniq[order]), np.ascontiguousarray(merged[order])


def _extent(coords: np.ndarray) -> float:
    span = float(np.max(np.ptp(coords, axis=0))) if len(coords) else 0.0
    return span if span > 0.0 else 1.0


def _trivial(inst, w, objective):
    """Handle zero total weight and a single active location; None otherwise."""
    if not np.any(w > 0.0):
        x = Point(*map(float, inst.coords[0]))
        return ForwardResult(x, 0.0, 0, True, degenerate=True)
    coords, wa = _active_sites(inst, w)
    if len(coords) == 1:
        x = Point(float(coords[0, 0]), float(coords[0, 1]))
        return ForwardResult(x, objective(x, w, inst), 0, True)
    return None


def _newton(ev, x, y, gtol, max_iter):
    """Damped Newton with Armijo backtracking on a smooth convex 2-D function."""
    f, gx, gy, hxx, hxy, hyy = ev(x, y)
    for it in range(max_iter):
        gn = math.hypot(gx, gy)
        if gn <= gtol:
            return x, y, it, True
        ridge = 1e-12 * (abs(hxx) + abs(hyy)) + 1e-300
        a, b, c = hxx + ridge, hxy, hyy + ridge
        det = a * c - b * b
        dx = dy = 0.0
        slope = 0.0
        if a > 0.0 and det > 0.0:
            dx = -(c * gx - b * gy) / det
            dy = -(a * gy - b * gx) / det
            slope = gx * dx + gy * dy
        if not slope < 0.0:
            scale = 1.0 / max(a + c, 1e-300)
            dx, dy = -gx * scale, -gy * scale
            slope = -gn * gn * scale
        step = 1.0
        while True:
            xn = x + step * dx
            yn = y + step * dy
            fn, gxn, gyn, hxxn, hxyn, hyyn = ev(xn, yn)
            if fn <= f + _ARMIJO * step * slope:
                break
            step *= 0.5
            if step < 1e-20:
                # no representable decrease left
                return x, y, it, abs(slope) <= 1e-10 * max(abs(f), 1e-300)
        x, y = xn, yn
        f, gx, gy, hxx, hxy, hyy = fn, gxn, gyn, hxxn, hxyn, hyyn
    return x, y, max_iter, False


def _centroid(coords, w):
    return float(w @ coords[:, 0] / w.sum()), float(w @ coords[:, 1] / w.sum())


def _finite_p(inst):
    p = inst.norm.p
    if math.isinf(p):
        raise ValueError("forward solvers need a finite norm exponent p")
    return p


def solve_minisum(
    inst: Instance,
    w=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "auto",
    record: bool = False,
) -> ForwardResult:
    """Minimise ``sum_i w_i d(x, A_i)``.

    ``method`` is ``"weiszfeld"`` (p = 2 only), ``"smooth"`` or ``"auto"``
    (Weiszfeld for p = 2). ``tol`` bounds the gradient norm relative to the
    total weight and the final step length relative to the site extent.
    With ``record=True`` the Weiszfeld objective after every step is kept
    in ``history``.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    w = _check_weights(inst, w)
    p = _finite_p(inst)
    trivial = _trivial(inst, w, eval_minisum)
    if trivial is not None:
        return trivial
    coords, wa = _active_sites(inst, w)
    scale = _extent(coords)
    x0, y0 = _centroid(coords, wa)
    if method == "auto":
        method = "weiszfeld" if p == 2.0 else "smooth"

    if method == "weiszfeld":
        if p != 2.0:
            raise ValueError("the Weiszfeld iteration is only implemented for p = 2")
        hist = np.empty(max_iter + 1)
        x, y, iters, converged, nh = _kernels.get("weiszfeld")(
            coords, wa, x0, y0, tol * scale, max_iter, 1e-12 * scale, hist
        )
        history = tuple(float(v) for v in hist[:nh]) if record else ()
    elif method == "smooth":
        ev_kernel = _kernels.get("minisum_smooth")
        gtol = tol * float(wa.sum())
        x, y = x0, y0
        iters = 0
        converged = False
        for rel in _MINISUM_DELTAS:
            delta = rel * scale
            x, y, k, converged = _newton(
                lambda a, b: ev_kernel(coords, wa, a, b, p, delta), x, y, gtol, max_iter
            )
            iters += k
        history = ()
    else:
        raise ValueError(f"unknown method {method!r}")

    x_star = Point(float(x), float(y))
    return ForwardResult(x_star, eval_minisum(x_star, w, inst), int(iters), bool(converged),
                         history=history)


def solve_minimax(
    inst: Instance,
    w=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ForwardResult:
    """Minimise ``max_i w_i d(x, A_i)`` through log-sum-exp smoothing."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    w = _check_weights(inst, w)
    p = _finite_p(inst)
    trivial = _trivial(inst, w, eval_minimax)
    if trivial is not None:
        return trivial
    coords, wa = _active_sites(inst, w)
    scale = _extent(coords)
    x, y = _centroid(coords, wa)
    f_scale = float(np.max(wa * _kernels.get("dist_many")(coords, x, y, p)))
    ev_kernel = _kernels.get("minimax_smooth")
    gtol = tol * float(wa.sum())
    iters = 0
    converged = False
    for rel, sharp in _MINIMAX_STAGES:
        delta = rel * scale
        t = sharp / f_scale
        x, y, k, converged = _newton(
            lambda a, b: ev_kernel(coords, wa, a, b, p, delta, t), x, y, gtol, max_iter
        )
        iters += k
    x_star = Point(float(x), float(y))
    return ForwardResult(x_star, eval_minimax(x_star, w, inst), int(iters), bool(converged))


def solve_forward(inst: Instance, w=None, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> ForwardResult:
    """Dispatch on the instance objective."""
    if inst.objective is Objective.MINIMAX:
        return solve_minimax(inst, w, tol, max_iter)
    return solve_minisum(inst, w, tol, max_iter)
