"""Dense two-phase primal simplex with explicit variable bounds.

Solves ``min c'x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  lower <= x <= upper``
with finite lower bounds and possibly infinite upper bounds. Nonbasic
variables rest at either bound, so box constraints never become rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels

FEAS_TOL = 1e-8
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
REINVERT_EVERY = 50


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _matrix(a, ncols):
    a = np.asarray(a if a is not None else np.zeros((0, ncols)), dtype=float)
    if a.size == 0:
        return np.zeros((0, ncols))
    return np.atleast_2d(a)


@dataclass(frozen=True, eq=False)
class LpProblem:
    c: np.ndarray
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    A_le: np.ndarray = None
    b_le: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = len(c)
        A_eq = _matrix(self.A_eq, n)
        A_le = _matrix(self.A_le, n)
        b_eq = np.asarray(self.b_eq if self.b_eq is not None else [], dtype=float).ravel()
        b_le = np.asarray(self.b_le if self.b_le is not None else [], dtype=float).ravel()
        lower = (np.zeros(n) if self.lower is None
                 else np.broadcast_to(np.asarray(self.lower, dtype=float), (n,)).copy())
        upper = (np.full(n, np.inf) if self.upper is None
                 else np.broadcast_to(np.asarray(self.upper, dtype=float), (n,)).copy())
        for name, val in (("c", c), ("A_eq", A_eq), ("b_eq", b_eq), ("A_le", A_le),
                          ("b_le", b_le), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, val)
        problems = self.violations()
        if problems:
            raise ValueError("invalid LpProblem: " + "; ".join(problems))

    def violations(self) -> list[str]:
        n = len(self.c)
        out = []
        if self.A_eq.shape[1] != n:
            out.append(f"A_eq has {self.A_eq.shape[1]} columns, expected {n}")
        if self.A_le.shape[1] != n:
            out.append(f"A_le has {self.A_le.shape[1]} columns, expected {n}")
        if len(self.b_eq) != self.A_eq.shape[0]:
            out.append(f"b_eq has length {len(self.b_eq)}, A_eq has {self.A_eq.shape[0]} rows")
        if len(self.b_le) != self.A_le.shape[0]:
            out.append(f"b_le has length {len(self.b_le)}, A_le has {self.A_le.shape[0]} rows")
        if not np.all(np.isfinite(self.lower)):
            out.append("lower bounds must be finite")
        if np.any(self.lower > self.upper):
            out.append("lower > upper for some variable")
        for name in ("c", "A_eq", "b_eq", "A_le", "b_le"):
            if not np.all(np.isfinite(getattr(self, name))):
                out.append(f"{name} has non-finite entries")
        return out

    @property
    def n_vars(self) -> int:
        return len(self.c)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray] = None
    objective: float = float("nan")
    dual_eq: Optional[np.ndarray] = None
    dual_le: Optional[np.ndarray] = None
    pivots: int = 0

    def reduced_costs(self, prob: LpProblem) -> np.ndarray:
        return prob.c - prob.A_eq.T @ self.dual_eq - prob.A_le.T @ self.dual_le

    def dual_objective(self, prob: LpProblem) -> float:
        """Lagrangian dual value ``b'y + sum(bound * reduced cost)``.

        ``dual_le <= 0`` and reduced costs are paired with the lower bound
        when positive and the upper bound when negative.
        """
        r = self.reduced_costs(prob)
        # basic variables carry roundoff-sized reduced costs; treat those as zero
        r = np.where(np.abs(r) <= OPT_TOL * (1.0 + np.abs(prob.c)), 0.0, r)
        bound = np.where(r < 0.0, prob.upper, prob.lower)
        bound_term = np.where(r == 0.0, 0.0, bound * r)
        return float(prob.b_eq @ self.dual_eq + prob.b_le @ self.dual_le + bound_term.sum())


class _Tableau:
    """Working state of one solve: ``T = B^-1 A`` over all columns plus basic values."""

    def __init__(self, prob: LpProblem):
        n = prob.n_vars
        m_eq, m_le = prob.A_eq.shape[0], prob.A_le.shape[0]
        m = m_eq + m_le
        lower = prob.lower
        A = np.zeros((m, n + m_le))
        A[:m_eq, :n] = prob.A_eq
        A[m_eq:, :n] = prob.A_le
        A[m_eq:, n:] = np.eye(m_le)
        b = np.concatenate([prob.b_eq - prob.A_eq @ lower, prob.b_le - prob.A_le @ lower])
        sign = np.where(b < 0.0, -1.0, 1.0)
        A *= sign[:, None]
        b = b * sign
        ub = np.concatenate([prob.upper - lower, np.full(m_le, np.inf)])

        # rows whose slack is a ready +1 unit column start with it basic
        basis = np.full(m, -1, dtype=np.int64)
        for r in range(m_eq, m):
            if sign[r] > 0.0:
                basis[r] = n + (r - m_eq)
        need = np.flatnonzero(basis < 0)
        n_art = len(need)
        art = np.zeros((m, n_art))
        for k, r in enumerate(need):
            art[r, k] = 1.0
            basis[r] = n + m_le + k

        self.n, self.m, self.m_le, self.n_art = n, m, m_le, n_art
        self.A0 = np.ascontiguousarray(np.hstack([A, art]))
        self.T = self.A0.copy()
        self.b = b
        self.sign = sign
        self.ub = np.concatenate([ub, np.full(n_art, np.inf)])
        self.basis = basis
        self.init_cols = basis.copy()
        self.at_upper = np.zeros(self.T.shape[1], dtype=bool)
        self.beta = b.copy()
        self.pivots = 0

    @property
    def art_cols(self):
        start = self.n + self.m_le
        return np.arange(start, start + self.n_art)

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.ub, 0.0)
        x[self.basis] = self.beta
        return x

    def refresh_beta(self):
        binv = self.T[:, self.init_cols]
        upper_cols = np.flatnonzero(self.at_upper)
        nb_ub = self.ub[upper_cols]
        self.beta = binv @ self.b
        if len(upper_cols):
            # T = B^-1 A, so B^-1 (A_N x_N) is a column sum of T
            self.beta -= self.T[:, upper_cols] @ nb_ub

    def reinvert(self):
        """Rebuild ``B^-1 A`` from the original columns to shed accumulated roundoff."""
        B = self.A0[:, self.basis]
        self.T = np.ascontiguousarray(np.linalg.solve(B, self.A0))
        self.T[:, self.basis] = np.eye(self.m)
        self.refresh_beta()

    def run(self, cost: np.ndarray, max_pivots: int) -> str:
        """Primal simplex on the current basis; returns 'optimal' or 'unbounded'."""
        m, ncol = self.T.shape
        pivot = _kernels.get("pivot")
        is_basic = np.zeros(ncol, dtype=bool)
        is_basic[self.basis] = True
        movable = self.ub > PIVOT_TOL
        bland = False
        stall = 0
        stall_limit = 3 * (m + ncol)
        best = float(cost @ self.values())
        fresh = False
        while True:
            if self.pivots >= max_pivots:
                raise RuntimeError(f"simplex exceeded {max_pivots} pivots")
            T = self.T
            d = cost - cost[self.basis] @ T
            improving = ~is_basic & movable & np.where(self.at_upper, d > OPT_TOL, d < -OPT_TOL)
            cand = np.flatnonzero(improving)
            if len(cand) == 0:
                if fresh or m == 0:
                    return "optimal"
                # confirm optimality on a freshly inverted basis
                self.reinvert()
                fresh = True
                continue
            if bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            direction = -1.0 if self.at_upper[j] else 1.0
            alpha = direction * T[:, j]

            ub_b = self.ub[self.basis]
            beta = self.beta
            lims = np.full(m, np.inf)
            dec = alpha > PIVOT_TOL
            inc = (alpha < -PIVOT_TOL) & np.isfinite(ub_b)
            lims[dec] = np.maximum(beta[dec], 0.0) / alpha[dec]
            lims[inc] = np.maximum(ub_b[inc] - beta[inc], 0.0) / -alpha[inc]
            theta = self.ub[j]
            leave = -1
            row_min = float(lims.min()) if m else np.inf
            if row_min < theta:
                theta = row_min
                ties = np.flatnonzero(lims == row_min)
                if bland:
                    leave = int(ties[np.argmin(self.basis[ties])])
                else:
                    leave = int(ties[np.argmax(np.abs(alpha[ties]))])
            leave_to_upper = leave >= 0 and bool(inc[leave])
            if not np.isfinite(theta):
                return "unbounded"

            self.beta = beta - theta * alpha
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
            else:
                entering_value = (self.ub[j] if self.at_upper[j] else 0.0) + direction * theta
                out = self.basis[leave]
                pivot(T, leave, j)
                self.pivots += 1
                self.basis[leave] = j
                self.beta[leave] = entering_value
                is_basic[out] = False
                is_basic[j] = True
                self.at_upper[out] = leave_to_upper
                self.at_upper[j] = False
                fresh = False
                if self.pivots % REINVERT_EVERY == 0:
                    self.reinvert()
                    fresh = True

            obj = float(cost @ self.values())
            if obj < best - 1e-12 * max(1.0, abs(best)):
                best = obj
                stall = 0
            else:
                stall += 1
                if stall > stall_limit:
                    bland = True


def solve_lp(prob: LpProblem, max_pivots: int = 50_000) -> LpSolution:
    tab = _Tableau(prob)
    ncol = tab.T.shape[1]

    if tab.n_art:
        phase1 = np.zeros(ncol)
        phase1[tab.art_cols] = 1.0
        tab.run(phase1, max_pivots)
        tab.refresh_beta()
        infeas = float(tab.values()[tab.art_cols].sum())
        if infeas > FEAS_TOL * (1.0 + float(np.max(np.abs(tab.b), initial=0.0))):
            return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
        # artificials stay at zero for the rest of the solve
        tab.ub[tab.art_cols] = 0.0
        tab.at_upper[tab.art_cols] = False

    cost = np.zeros(ncol)
    cost[: tab.n] = prob.c
    status = tab.run(cost, max_pivots)
    if status == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, pivots=tab.pivots)
    tab.refresh_beta()

    xs = tab.values()
    x = prob.lower + xs[: tab.n]
    x = np.minimum(np.maximum(x, prob.lower), prob.upper)
    binv = tab.T[:, tab.init_cols]
    y = (cost[tab.basis] @ binv) * tab.sign
    m_eq = prob.A_eq.shape[0]
    return LpSolution(
        LpStatus.OPTIMAL,
        x=x,
        objective=float(prob.c @ x),
        dual_eq=y[:m_eq],
        dual_le=y[m_eq:],
        pivots=tab.pivots,
    )
