"""Instance files, plan files, coordinate lists and seeded parameter generation.

Canonical instance format::

    INVLOC 1
    <minisum|minimax> <n> <p>
    <a> <b> <w> <u_minus> <u_plus> <c_minus> <c_plus>     # n site lines

``#`` starts a comment and blank lines are ignored. Plan files carry
``INVLOC-PLAN 1 <n> <cost>`` followed by ``w_hat p_plus q_minus`` per site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import ClientSite, Instance, ModificationPlan, Norm, Objective, Point, validate_instance

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class InstanceFormatError(ValueError):
    """Malformed text. ``line``/``column`` are 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    low: float = 1.0
    high: float = 10.0

    def __post_init__(self):
        if not 0 <= int(self.seed) <= MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not self.low < self.high:
            raise ValueError("need low < high")


def next_uniform(state: int) -> tuple[float, int]:
    """One SplitMix64 step: a double in [0, 1) and the advanced state."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return (z >> 11) / 9007199254740992.0, state


def uniform_stream(seed: int) -> Iterator[float]:
    state = seed & MASK64
    while True:
        u, state = next_uniform(state)
        yield u


# --- tokenising ----------------------------------------------------------------


def _lines(text: str):
    """Yield (line_no, [(column, token), ...]) for every non-blank, comment-stripped line."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = []
        col = 0
        for piece in body.split():
            col = body.index(piece, col)
            toks.append((col + 1, piece))
            col += len(piece)
        if toks:
            yield no, toks


def _number(tok, line, what) -> float:
    col, text = tok
    try:
        v = float(text)
    except ValueError:
        raise InstanceFormatError(f"expected a number for {what}, got {text!r}", line, col) from None
    if math.isnan(v):
        raise InstanceFormatError(f"{what} is NaN", line, col)
    return v


def _fmt(v: float) -> str:
    """Shortest text that reads back to the same double."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


# --- instances -----------------------------------------------------------------


def parse_instance(text: str) -> Instance:
    lines = list(_lines(text))
    if not lines:
        raise InstanceFormatError("empty input; expected header 'INVLOC 1'")
    no, toks = lines[0]
    if [t for _, t in toks] != ["INVLOC", "1"]:
        raise InstanceFormatError("expected header 'INVLOC 1'", no, toks[0][0])
    if len(lines) < 2:
        raise InstanceFormatError("missing '<objective> <n> <p>' line")
    no, toks = lines[1]
    if len(toks) != 3:
        raise InstanceFormatError(f"expected '<objective> <n> <p>', got {len(toks)} fields", no,
                                  toks[0][0])
    kind = toks[0][1].lower()
    if kind not in (o.value for o in Objective):
        raise InstanceFormatError(f"objective must be minisum or minimax, got {toks[0][1]!r}",
                                  no, toks[0][0])
    try:
        n = int(toks[1][1])
    except ValueError:
        raise InstanceFormatError(f"site count must be an integer, got {toks[1][1]!r}", no,
                                  toks[1][0]) from None
    if n < 1:
        raise InstanceFormatError(f"site count must be >= 1, got {n}", no, toks[1][0])
    p = _number(toks[2], no, "p")
    if p < 1.0:
        raise InstanceFormatError(f"norm exponent p must be >= 1, got {p:g}", no, toks[2][0])

    site_lines = lines[2:]
    if len(site_lines) != n:
        raise InstanceFormatError(f"header declares n={n} sites but {len(site_lines)} site lines follow")
    names = ("a", "b", "w", "u_minus", "u_plus", "c_minus", "c_plus")
    sites = []
    for idx, (no, toks) in enumerate(site_lines, start=1):
        if len(toks) != 7:
            raise InstanceFormatError(f"site {idx}: expected 7 numbers, got {len(toks)}", no,
                                      toks[0][0])
        vals = [_number(t, no, f"site {idx} {name}") for t, name in zip(toks, names)]
        for (col, _), name, v in zip(toks, names, vals):
            if not math.isfinite(v):
                raise InstanceFormatError(f"site {idx}: {name} must be finite", no, col)
            if name not in ("a", "b") and v < 0.0:
                raise InstanceFormatError(f"site {idx}: {name} must be >= 0, got {v:g}", no, col)
        a, b, *rest = vals
        sites.append(ClientSite(Point(a, b), *rest))
    inst = Instance(tuple(sites), Norm(p), Objective(kind))
    problems = validate_instance(inst)
    if problems:
        raise InstanceFormatError("; ".join(problems))
    return inst


def write_instance(inst: Instance) -> str:
    out = ["INVLOC 1", f"{inst.objective.value} {inst.n} {_fmt(inst.norm.p)}"]
    for s in inst.sites:
        vals = (s.location.x, s.location.y, s.w, s.u_minus, s.u_plus, s.c_minus, s.c_plus)
        out.append(" ".join(_fmt(v) for v in vals))
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# --- coordinate lists ------------------------------------------------------------


def parse_coordinates(text: str) -> np.ndarray:
    """One ``x y`` pair per line, optionally preceded by an index token."""
    rows = []
    for no, toks in _lines(text):
        if len(toks) == 3:
            toks = toks[1:]
        if len(toks) != 2:
            raise InstanceFormatError(f"expected 'x y' or 'index x y', got {len(toks)} fields",
                                      no, toks[0][0])
        rows.append([_number(t, no, "coordinate") for t in toks])
    return np.array(rows, dtype=float).reshape(-1, 2)


def ingest_coordinates(text: str, cfg: GeneratorConfig = GeneratorConfig(),
                       norm: Norm = Norm(2.0),
                       objective: Objective | str = Objective.MINISUM) -> Instance:
    """Sites at the listed coordinates with parameters drawn uniformly from [low, high).

    Draw order is site by site, fields (w, u_minus, u_plus, c_minus, c_plus);
    ``u_minus`` is then capped at ``w`` so zero weight stays reachable.
    """
    coords = parse_coordinates(text)
    if len(coords) == 0:
        raise InstanceFormatError("no coordinates found")
    stream = uniform_stream(int(cfg.seed))
    span = cfg.high - cfg.low
    sites = []
    for a, b in coords:
        w, um, up, cm, cp = (cfg.low + span * next(stream) for _ in range(5))
        sites.append(ClientSite(Point(float(a), float(b)), w, min(um, w), up, cm, cp))
    return Instance(tuple(sites), norm, Objective(objective))


# --- plans ---------------------------------------------------------------------


def write_plan(plan: ModificationPlan) -> str:
    out = [f"INVLOC-PLAN 1 {plan.n} {plan.cost!r}"]
    for w, p, q in zip(plan.w_hat, plan.p_plus, plan.q_minus):
        out.append(f"{float(w)!r} {float(p)!r} {float(q)!r}")
    return "\n".join(out) + "\n"


def parse_plan(text: str) -> ModificationPlan:
    lines = list(_lines(text))
    if not lines:
        raise InstanceFormatError("empty input; expected header 'INVLOC-PLAN 1 <n> <cost>'")
    no, toks = lines[0]
    if len(toks) != 4 or toks[0][1] != "INVLOC-PLAN" or toks[1][1] != "1":
        raise InstanceFormatError("expected header 'INVLOC-PLAN 1 <n> <cost>'", no, toks[0][0])
    try:
        n = int(toks[2][1])
    except ValueError:
        raise InstanceFormatError("plan size must be an integer", no, toks[2][0]) from None
    cost = _number(toks[3], no, "cost")
    body = lines[1:]
    if len(body) != n:
        raise InstanceFormatError(f"header declares n={n} but {len(body)} plan lines follow")
    rows = []
    for idx, (no, toks) in enumerate(body, start=1):
        if len(toks) != 3:
            raise InstanceFormatError(f"plan line {idx}: expected 'w_hat p_plus q_minus'", no,
                                      toks[0][0])
        rows.append([_number(t, no, f"plan line {idx}") for t in toks])
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return ModificationPlan(arr[:, 0], arr[:, 1], arr[:, 2], cost)


def plan_from_weights(inst: Instance, w_hat) -> ModificationPlan:
    """The canonical plan that moves ``inst.w`` to ``w_hat`` (bounds are not enforced)."""
    w_hat = np.asarray(w_hat, dtype=float)
    diff = w_hat - inst.w
    p = np.maximum(diff, 0.0)
    q = np.maximum(-diff, 0.0)
    cost = float(inst.c_plus @ p + inst.c_minus @ q)
    return ModificationPlan(w_hat, p, q, cost)
