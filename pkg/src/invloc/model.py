"""Domain types: sites, instances, modification plans and run traces."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import numpy as np


class Point(NamedTuple):
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Norm:
    """L_p norm exponent; ``p = inf`` gives the Chebyshev norm."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"L_p norm needs p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)


class Objective(str, enum.Enum):
    MINISUM = "minisum"
    MINIMAX = "minimax"


@dataclass(frozen=True)
class ClientSite:
    location: Point
    w: float
    u_minus: float = 0.0
    u_plus: float = 0.0
    c_minus: float = 0.0
    c_plus: float = 0.0


@dataclass(frozen=True)
class Instance:
    """Ordered client sites plus the norm and objective of the location problem.

    Sites are stored in order; user-facing indices are 1-based. Column views
    (``coords``, ``w`` ...) are read-only numpy arrays built on first access.
    """

    sites: tuple[ClientSite, ...]
    norm: Norm = Norm(2.0)
    objective: Objective = Objective.MINISUM

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "objective", Objective(self.objective))

    @classmethod
    def from_arrays(
        cls,
        coords,
        w,
        u_minus,
        u_plus,
        c_minus,
        c_plus,
        p: float = 2.0,
        objective: Objective | str = Objective.MINISUM,
    ) -> "Instance":
        coords = np.asarray(coords, dtype=float).reshape(-1, 2)
        cols = [np.broadcast_to(np.asarray(v, dtype=float), (len(coords),))
                for v in (w, u_minus, u_plus, c_minus, c_plus)]
        sites = tuple(
            ClientSite(Point(float(a), float(b)), *(float(col[i]) for col in cols))
            for i, (a, b) in enumerate(coords)
        )
        return cls(sites, Norm(p), Objective(objective))

    def with_weights(self, w: Sequence[float]) -> "Instance":
        sites = tuple(
            ClientSite(s.location, float(wi), s.u_minus, s.u_plus, s.c_minus, s.c_plus)
            for s, wi in zip(self.sites, w)
        )
        return Instance(sites, self.norm, self.objective)

    @property
    def n(self) -> int:
        return len(self.sites)

    def _column(self, getter) -> np.ndarray:
        arr = np.array([getter(s) for s in self.sites], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def coords(self) -> np.ndarray:
        arr = np.array([[s.location.x, s.location.y] for s in self.sites], dtype=float)
        arr = arr.reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def w(self) -> np.ndarray:
        return self._column(lambda s: s.w)

    @cached_property
    def u_minus(self) -> np.ndarray:
        return self._column(lambda s: s.u_minus)

    @cached_property
    def u_plus(self) -> np.ndarray:
        return self._column(lambda s: s.u_plus)

    @cached_property
    def c_minus(self) -> np.ndarray:
        return self._column(lambda s: s.c_minus)

    @cached_property
    def c_plus(self) -> np.ndarray:
        return self._column(lambda s: s.c_plus)


@dataclass(frozen=True, eq=False)
class ModificationPlan:
    """New weights ``w_hat = w + p_plus - q_minus`` and the cost of getting there."""

    w_hat: np.ndarray
    p_plus: np.ndarray
    q_minus: np.ndarray
    cost: float

    @classmethod
    def from_changes(cls, inst: Instance, p_plus, q_minus) -> "ModificationPlan":
        """Build a canonical plan: clip to bounds and cancel ``min(p, q)`` per site."""
        p = np.clip(np.asarray(p_plus, dtype=float), 0.0, inst.u_plus)
        q = np.clip(np.asarray(q_minus, dtype=float), 0.0, inst.u_minus)
        common = np.minimum(p, q)
        p = p - common
        q = q - common
        w_hat = np.asarray(inst.w) + p - q
        # roundoff from the LP can leave -1e-16 weights
        w_hat = np.where((w_hat < 0.0) & (w_hat > -1e-9), 0.0, w_hat)
        cost = float(inst.c_plus @ p + inst.c_minus @ q)
        for arr in (w_hat, p, q):
            arr.setflags(write=False)
        return cls(w_hat, p, q, cost)

    @classmethod
    def identity(cls, inst: Instance) -> "ModificationPlan":
        zeros = np.zeros(inst.n)
        return cls.from_changes(inst, zeros, zeros)

    @property
    def n(self) -> int:
        return len(self.w_hat)


@dataclass(frozen=True, eq=False)
class IterationRecord:
    k: int
    x_k: Point
    w_k: np.ndarray
    cost_k: float
    delta_w: float
    stalled: bool = False


class Outcome(str, enum.Enum):
    CONVERGED = "converged"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(eq=False)
class RunTrace:
    records: list[IterationRecord] = field(default_factory=list)
    outcome: Outcome = Outcome.ITERATION_LIMIT
    final_plan: Optional[ModificationPlan] = None
    stop_reason: str = ""
    pool: Optional[object] = None

    @property
    def iterations(self) -> int:
        """Number of master/sub-problem loop iterations (t)."""
        return max(len(self.records) - 1, 0)

    @property
    def final_record(self) -> Optional[IterationRecord]:
        return self.records[-1] if self.records else None


def _finite(v) -> bool:
    try:
        return math.isfinite(float(v))
    except (TypeError, ValueError):
        return False


def validate_instance(inst: Instance) -> list[str]:
    """Describe every violated invariant; an empty list means the instance is valid."""
    problems = []
    p = getattr(inst.norm, "p", None)
    if p is None or math.isnan(float(p)) or float(p) < 1.0:
        problems.append(f"norm: p must be >= 1 (got {p!r})")
    if len(inst.sites) < 1:
        problems.append("sites: need at least one site")
    for i, s in enumerate(inst.sites, start=1):
        if not (_finite(s.location.x) and _finite(s.location.y)):
            problems.append(f"site {i}: location must be finite (got {tuple(s.location)})")
        for name in ("w", "u_minus", "u_plus", "c_minus", "c_plus"):
            v = getattr(s, name)
            if not _finite(v):
                problems.append(f"site {i}: field {name} must be finite (got {v!r})")
            elif float(v) < 0.0:
                problems.append(f"site {i}: field {name} must be >= 0 (got {v!r})")
    return problems


def plan_violations(inst: Instance, plan: ModificationPlan, tol: float = 1e-9) -> list[str]:
    """Check bounds, weight linkage, complementarity and the cost formula of a plan."""
    out = []
    if plan.n != inst.n:
        return [f"plan has {plan.n} entries, instance has {inst.n} sites"]
    w, p, q = inst.w, plan.p_plus, plan.q_minus
    if np.any(p < -tol) or np.any(p > inst.u_plus + tol):
        out.append("p_plus outside [0, u_plus]")
    if np.any(q < -tol) or np.any(q > inst.u_minus + tol):
        out.append("q_minus outside [0, u_minus]")
    if np.any(plan.w_hat < -tol):
        out.append("w_hat has negative entries")
    if np.max(np.abs(plan.w_hat - (w + p - q)), initial=0.0) > tol:
        out.append("w_hat != w + p_plus - q_minus")
    if np.any(p * q > tol):
        out.append("p_plus and q_minus both positive at some site")
    cost = float(inst.c_plus @ p + inst.c_minus @ q)
    if abs(cost - plan.cost) > tol * max(1.0, abs(cost)):
        out.append(f"cost {plan.cost} differs from recomputed {cost}")
    return out
