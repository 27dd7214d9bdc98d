"""Restricted inverse problems over the cuts generated so far.

Variables are stacked as ``[w_hat (n), p (n), q (n)]``; the objective is the
modification cost and ``w_hat - p + q = w`` ties them together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distance import DistGapRow, gap_row
from .model import Instance, ModificationPlan, Objective, Point
from .simplex import LpProblem, LpStatus, solve_lp

GAP_TOL = 1e-9


@dataclass(eq=False)
class CutPool:
    """Generated points and their gap rows; row ``j`` comes from ``generated_points[j]``."""

    x_bar: Point
    rows: list[DistGapRow] = field(default_factory=list)
    generated_points: list[Point] = field(default_factory=list)

    def add(self, inst: Instance, x_k: Point) -> DistGapRow:
        row = gap_row(inst, self.x_bar, x_k, k=len(self.rows))
        self.rows.append(row)
        self.generated_points.append(Point(float(x_k[0]), float(x_k[1])))
        return row

    def __len__(self) -> int:
        return len(self.rows)

    def deltas(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, 0))
        return np.vstack([r.delta for r in self.rows])


def _base_problem(inst: Instance, A_le, b_le, w_hat_upper) -> LpProblem:
    n = inst.n
    eye = np.eye(n)
    return LpProblem(
        c=np.concatenate([np.zeros(n), inst.c_plus, inst.c_minus]),
        A_eq=np.hstack([eye, -eye, eye]),
        b_eq=np.asarray(inst.w, dtype=float),
        A_le=A_le,
        b_le=b_le,
        lower=np.zeros(3 * n),
        upper=np.concatenate([w_hat_upper, inst.u_plus, inst.u_minus]),
    )


def build_minisum_master(inst: Instance, pool: CutPool) -> LpProblem:
    """One linear cut ``sum_i delta_i w_hat_i <= 0`` per pooled point."""
    if len(pool) == 0:
        raise ValueError("cut pool is empty")
    n = inst.n
    deltas = pool.deltas()
    # rows shrink as cut points approach x_bar; the rhs is 0, so rescaling is exact
    scale = np.max(np.abs(deltas), axis=1, keepdims=True)
    deltas = deltas / np.where(scale > 0.0, scale, 1.0)
    A_le = np.hstack([deltas, np.zeros((len(deltas), 2 * n))])
    return _base_problem(inst, A_le, np.zeros(len(deltas)), np.full(n, np.inf))


def forced_zero(pool: CutPool) -> np.ndarray:
    """Indices that a ``max_i w_hat_i delta_i <= 0`` cut pins to zero weight."""
    return np.flatnonzero(np.any(pool.deltas() > GAP_TOL, axis=0))


def build_minimax_master(inst: Instance, pool: CutPool) -> LpProblem:
    """Each max-cut splits into ``w_hat_i <= 0`` for every positive gap.

    The fixings go into the upper bounds of ``w_hat``; no inequality rows
    remain. This is stronger than requiring the weighted maximum at ``x_bar``
    not to exceed the one at the generated point, so the plans found are
    feasible but need not be the cheapest ones.
    """
    if len(pool) == 0:
        raise ValueError("cut pool is empty")
    n = inst.n
    upper = np.full(n, np.inf)
    upper[forced_zero(pool)] = 0.0
    return _base_problem(inst, np.zeros((0, 3 * n)), np.zeros(0), upper)


def build_master(inst: Instance, pool: CutPool) -> LpProblem:
    if inst.objective is Objective.MINIMAX:
        return build_minimax_master(inst, pool)
    return build_minisum_master(inst, pool)


def solve_master(inst: Instance, pool: CutPool) -> Optional[ModificationPlan]:
    """Cheapest plan satisfying every pooled cut, or ``None`` when none exists.

    An infeasible restricted problem means the full inverse problem is
    infeasible as well, since it only has more constraints.
    """
    prob = build_master(inst, pool)
    sol = solve_lp(prob)
    if sol.status is LpStatus.INFEASIBLE:
        return None
    if sol.status is not LpStatus.OPTIMAL:
        raise AssertionError("master LP reported unbounded although its cost is bounded below")
    n = inst.n
    return ModificationPlan.from_changes(inst, sol.x[n:2 * n], sol.x[2 * n:])
