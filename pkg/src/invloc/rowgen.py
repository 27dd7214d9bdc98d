"""Row-generation driver for the inverse location problem with variable weights.

Each round solves the restricted master over the current cuts, re-solves the
forward problem with the new weights, and turns the forward optimum into the
next cut. The run stops when successive weight vectors agree within ``eps``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .forward import DEFAULT_TOL, evaluate, solve_forward
from .master import CutPool, solve_master
from .model import (
    Instance,
    IterationRecord,
    ModificationPlan,
    Objective,
    Outcome,
    Point,
    RunTrace,
    validate_instance,
)

DEFAULT_EPS = 0.01
DEFAULT_MAX_OUTER = 200
DUPLICATE_TOL = 1e-9
HULL_TOL = 1e-9
CERT_RTOL = 1e-9


class HullStatus(str, enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    NOT_APPLICABLE = "not_applicable"


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[tuple[float, float]]:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segment_distance(p, a, b):
    ax, ay = b[0] - a[0], b[1] - a[1]
    L2 = ax * ax + ay * ay
    if L2 == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = min(1.0, max(0.0, ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / L2))
    return math.hypot(p[0] - a[0] - t * ax, p[1] - a[1] - t * ay)


def point_in_hull(hull, p, tol: float = HULL_TOL) -> bool:
    """Boundary points (within ``tol``) count as inside."""
    if len(hull) == 0:
        return False
    if len(hull) <= 2:
        return _segment_distance(p, hull[0], hull[-1]) <= tol
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        edge = math.hypot(b[0] - a[0], b[1] - a[1])
        if _cross(a, b, p) < -tol * edge:
            return False
    return True


def hull_precheck(inst: Instance, x_bar: Point) -> HullStatus:
    """Locate ``x_bar`` against the hull of the sites (Euclidean minisum only)."""
    if inst.objective is not Objective.MINISUM or inst.norm.p != 2.0:
        return HullStatus.NOT_APPLICABLE
    hull = convex_hull(inst.coords)
    return HullStatus.INSIDE if point_in_hull(hull, x_bar) else HullStatus.OUTSIDE


def _record(k, x_k, w_k, cost, delta_w, stalled=False):
    w_k = np.array(w_k, dtype=float)
    w_k.setflags(write=False)
    return IterationRecord(k, Point(float(x_k[0]), float(x_k[1])), w_k, float(cost),
                           float(delta_w), stalled)


def _certified(inst, x_bar, w, f_forward) -> bool:
    """``x_bar`` is as good as the forward optimum, up to roundoff."""
    f_bar = evaluate(inst, x_bar, w)
    return f_bar - f_forward <= CERT_RTOL * max(1.0, abs(f_bar))


def solve_inverse(
    inst: Instance,
    x_bar: Point,
    eps: float = DEFAULT_EPS,
    max_outer: int = DEFAULT_MAX_OUTER,
    forward_tol: float = DEFAULT_TOL,
) -> RunTrace:
    """Find the cheapest weight change that makes ``x_bar`` optimal.

    ``records[0]`` holds the forward optimum for the original weights;
    ``records[k]`` holds the master weights of round k, their cost, the
    forward optimum under them and the Euclidean weight change from round
    k-1. ``pool`` on the returned trace keeps every generated cut.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    x_bar = Point(float(x_bar[0]), float(x_bar[1]))
    trace = RunTrace()
    pool = CutPool(x_bar)
    trace.pool = pool

    w_prev = np.asarray(inst.w, dtype=float)
    fwd = solve_forward(inst, w_prev, tol=forward_tol)
    trace.records.append(_record(0, fwd.x_star, w_prev, 0.0, 0.0))

    if _certified(inst, x_bar, w_prev, fwd.objective_value):
        trace.outcome = Outcome.CONVERGED
        trace.final_plan = ModificationPlan.identity(inst)
        trace.stop_reason = "x_bar already optimal for the original weights"
        return trace

    if hull_precheck(inst, x_bar) is HullStatus.OUTSIDE and np.any(inst.w > inst.u_minus):
        # outside the hull only the all-zero weight vector could work
        trace.outcome = Outcome.INFEASIBLE
        trace.stop_reason = "x_bar lies outside the convex hull of the sites"
        return trace

    pool.add(inst, fwd.x_star)
    for k in range(1, max_outer + 1):
        plan = solve_master(inst, pool)
        if plan is None:
            trace.outcome = Outcome.INFEASIBLE
            trace.stop_reason = f"restricted master infeasible at round {k}"
            return trace
        w_k = plan.w_hat
        delta_w = float(np.linalg.norm(w_k - w_prev))
        fwd = solve_forward(inst, w_k, tol=forward_tol)
        x_k = fwd.x_star
        stalled = any(math.hypot(x_k[0] - g[0], x_k[1] - g[1]) <= DUPLICATE_TOL
                      for g in pool.generated_points)
        trace.records.append(_record(k, x_k, w_k, plan.cost, delta_w, stalled))
        trace.final_plan = plan
        pool.add(inst, x_k)

        if delta_w <= eps:
            trace.outcome = Outcome.CONVERGED
            trace.stop_reason = "weights unchanged within eps"
            return trace
        if stalled:
            # a repeated cut leaves the master unchanged
            if _certified(inst, x_bar, w_k, fwd.objective_value):
                trace.outcome = Outcome.CONVERGED
                trace.stop_reason = "repeated cut point and x_bar optimal for current weights"
            else:
                trace.outcome = Outcome.ITERATION_LIMIT
                trace.stop_reason = "forward optimum repeats an earlier cut point"
            return trace
        w_prev = w_k

    trace.outcome = Outcome.ITERATION_LIMIT
    trace.stop_reason = f"no convergence after {max_outer} rounds"
    return trace


@dataclass(frozen=True)
class VerificationReport:
    gap: float
    x_forward: Point
    distance: float
    f_x_bar: float
    f_forward: float
    passed: bool


def verify_plan(inst: Instance, x_bar: Point, plan: ModificationPlan, tol: float,
                forward_tol: float = DEFAULT_TOL) -> VerificationReport:
    """Re-solve the forward problem with the plan's weights and compare with ``x_bar``."""
    if plan.n != inst.n:
        raise ValueError(f"plan has {plan.n} weights, instance has {inst.n} sites")
    fwd = solve_forward(inst, plan.w_hat, tol=forward_tol)
    f_bar = evaluate(inst, x_bar, plan.w_hat)
    gap = f_bar - fwd.objective_value
    dist = math.hypot(x_bar[0] - fwd.x_star[0], x_bar[1] - fwd.x_star[1])
    return VerificationReport(float(gap), fwd.x_star, float(dist), float(f_bar),
                              float(fwd.objective_value), bool(gap <= tol))
