"""Inverse continuous single-facility location with variable weights.

Given client sites, their weights and per-unit costs and bounds for changing
them, find the cheapest weight change that makes a chosen point an optimal
facility location. Minisum and minimax objectives under L_p distances are
supported; the inverse problem is solved by row generation.
"""

from .distance import distances, gap_row, lp_distance, lp_distance_gradient
from .forward import ForwardResult, evaluate, solve_forward, solve_minimax, solve_minisum
from .ingest import (
    GeneratorConfig,
    InstanceFormatError,
    ingest_coordinates,
    parse_instance,
    parse_plan,
    read_instance,
    write_instance,
    write_plan,
)
from .master import CutPool, solve_master
from .model import (
    ClientSite,
    Instance,
    ModificationPlan,
    Norm,
    Objective,
    Outcome,
    Point,
    RunTrace,
    validate_instance,
)
from .rowgen import hull_precheck, solve_inverse, verify_plan
from .simplex import LpProblem, LpSolution, LpStatus, solve_lp

__version__ = "0.1.0"

__all__ = [
    "ClientSite",
    "CutPool",
    "ForwardResult",
    "GeneratorConfig",
    "Instance",
    "InstanceFormatError",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "ModificationPlan",
    "Norm",
    "Objective",
    "Outcome",
    "Point",
    "RunTrace",
    "distances",
    "evaluate",
    "gap_row",
    "hull_precheck",
    "ingest_coordinates",
    "lp_distance",
    "lp_distance_gradient",
    "parse_instance",
    "parse_plan",
    "read_instance",
    "solve_forward",
    "solve_inverse",
    "solve_lp",
    "solve_master",
    "solve_minimax",
    "solve_minisum",
    "validate_instance",
    "verify_plan",
    "write_instance",
    "write_plan",
]
