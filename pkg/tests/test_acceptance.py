"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from invloc import (
    CutPool,
    GeneratorConfig,
    Instance,
    Norm,
    Outcome,
    Point,
    evaluate,
    ingest_coordinates,
    lp_distance,
    lp_distance_gradient,
    solve_inverse,
    solve_lp,
    solve_master,
    solve_minimax,
    solve_minisum,
    verify_plan,
)
from invloc.cli import main, trace_csv
from invloc.distance import DistGapRow
from invloc.simplex import LpStatus
from oracles import grid_minimize, minimax_oracle, minisum_oracle, vertex_enumeration
from test_simplex import random_feasible_lp

EPS = 0.01
X18 = {(3, 5): (71.0, 74.0), (2, 2): (99.0, 102.5), (7, 7): (56.5, 59.5)}
RUSPINI_P = (2.0, 3.0, 5.0, 8.0)
RUSPINI_SEEDS = (1, 2, 3)


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def ruspini_instance(text, seed, p):
    return ingest_coordinates(text, GeneratorConfig(seed), Norm(p))


@pytest.fixture(scope="module")
def runs(circle4, points18, ruspini_text):
    """Every run of criteria 1-3 with its wall time, keyed by a label."""
    out = {"circle4": timed(solve_inverse, circle4, (0, 0), eps=EPS)}
    for xb in X18:
        out[f"p18 {xb}"] = timed(solve_inverse, points18, xb, eps=EPS)
    for seed in RUSPINI_SEEDS:
        for p in RUSPINI_P:
            inst = ruspini_instance(ruspini_text, seed, p)
            out[f"ruspini s={seed} p={p:g}"] = timed(solve_inverse, inst, (50, 50), eps=EPS)
    return out


def test_c1_circle4(runs, report):
    trace, secs = runs["circle4"]
    plan, last = trace.final_plan, trace.final_record
    w_err = np.max(np.abs(plan.w_hat - [0, 5, 5, 10 / math.sqrt(2)]))
    x_err = math.hypot(*last.x_k)
    ok = (trace.outcome is Outcome.CONVERGED and 39.5 <= plan.cost <= 40.05
          and w_err <= 0.05 and x_err <= 0.05 and secs < 1.0)
    report(1, ok, f"C*={plan.cost:.4f} t={trace.iterations} max|w-w*|={w_err:.4f} "
                  f"|x(t)|={x_err:.4f} time={secs:.2f}s")


def test_c2_points18(runs, report):
    parts, ok = [], True
    for xb, (lo, hi) in X18.items():
        trace, secs = runs[f"p18 {xb}"]
        cost = trace.final_plan.cost
        dx = math.hypot(trace.final_record.x_k.x - xb[0], trace.final_record.x_k.y - xb[1])
        ok &= (trace.outcome is Outcome.CONVERGED and lo <= cost <= hi and dx <= 0.05
               and secs < 5.0)
        parts.append(f"{xb}: C*={cost:.4f} in [{lo},{hi}] |x-xbar|={dx:.4f} {secs:.2f}s")
    report(2, ok, "; ".join(parts))


def test_c3_ruspini(runs, ruspini_text, report):
    bad, worst_t, worst_time = [], 0, 0.0
    for seed in RUSPINI_SEEDS:
        for p in RUSPINI_P:
            trace, secs = runs[f"ruspini s={seed} p={p:g}"]
            inst = ruspini_instance(ruspini_text, seed, p)
            plan = trace.final_plan
            good = (trace.outcome is Outcome.CONVERGED and trace.iterations <= 60
                    and trace.final_record.delta_w <= EPS and secs < 60)
            if good:
                tol = 10 * EPS * max(1.0, evaluate(inst, (50, 50), plan.w_hat))
                good = verify_plan(inst, (50, 50), plan, tol).passed
            if not good:
                bad.append(f"seed {seed} p {p:g}: {trace.outcome.value} t={trace.iterations}")
            worst_t = max(worst_t, trace.iterations)
            worst_time = max(worst_time, secs)
    report(3, not bad, f"12 runs, max t={worst_t}, max time={worst_time:.2f}s"
                       + (f"; failures: {bad}" if bad else ""))


def test_c4_monotone_cost(runs, report):
    drops = []
    for label, (trace, _) in runs.items():
        costs = np.array([r.cost_k for r in trace.records[1:]])
        step = np.diff(costs).min(initial=0.0)
        if step < -1e-9:
            drops.append(f"{label}: {step:.3g}")
    report(4, not drops, f"{len(runs)} runs checked" + (f"; drops: {drops}" if drops else ""))


def test_c5_lp_oracle(report):
    rng = np.random.default_rng(2024)
    worst_obj = worst_dual = 0.0
    for _ in range(200):
        prob = random_feasible_lp(rng)
        sol = solve_lp(prob)
        assert sol.status is LpStatus.OPTIMAL
        ref = vertex_enumeration(prob.c, prob.A_eq, prob.b_eq, prob.A_le, prob.b_le,
                                 prob.lower, prob.upper)
        scale = max(1.0, abs(ref))
        worst_obj = max(worst_obj, abs(sol.objective - ref) / scale)
        worst_dual = max(worst_dual, abs(sol.dual_objective(prob) - sol.objective) / scale)
    report(5, worst_obj <= 1e-7 and worst_dual <= 1e-7,
           f"200 LPs, max rel objective error {worst_obj:.2e}, max duality gap {worst_dual:.2e}")


def test_c6_forward(report):
    rng = np.random.default_rng(77)
    # (a) Weiszfeld descent
    rises = 0
    for _ in range(50):
        n = int(rng.integers(3, 30))
        inst = Instance.from_arrays(rng.uniform(0, 10, (n, 2)), rng.uniform(1, 10, n), 0, 0, 0, 0)
        h = np.array(solve_minisum(inst, method="weiszfeld", record=True).history)
        rises += int(np.sum(np.diff(h) > 1e-12 * np.abs(h[:-1])))
    # (b) gradients against central differences
    worst_grad, count, step = 0.0, 0, 1e-6
    while count < 1000:
        p = float(rng.choice(RUSPINI_P))
        norm = Norm(p)
        x, a = rng.uniform(-5, 5, 2), rng.uniform(-5, 5, 2)
        if lp_distance(tuple(x), tuple(a), norm) < 0.1:
            continue
        g = lp_distance_gradient(tuple(x), tuple(a), norm)
        fd = [(lp_distance(tuple(x + e), tuple(a), norm) - lp_distance(tuple(x - e), tuple(a), norm))
              / (2 * step) for e in (np.array([step, 0]), np.array([0, step]))]
        worst_grad = max(worst_grad, np.linalg.norm(g - fd) / np.linalg.norm(g))
        count += 1
    # (c) brute-force oracle on 20 random 5-site instances per p
    worst_sum = worst_max = 0.0
    for p in RUSPINI_P:
        for _ in range(20):
            coords, w = rng.uniform(0, 10, (5, 2)), rng.uniform(1, 10, 5)
            lo, hi = coords.min(0), coords.max(0)
            inst = Instance.from_arrays(coords, w, 0, 0, 0, 0, p=p)
            _, ref, _ = grid_minimize(minisum_oracle(coords, w, p), lo, hi, 1e-6)
            worst_sum = max(worst_sum, abs(solve_minisum(inst).objective_value - ref))
            inst = Instance.from_arrays(coords, w, 0, 0, 0, 0, p=p, objective="minimax")
            _, ref, _ = grid_minimize(minimax_oracle(coords, w, p), lo, hi, 1e-6)
            worst_max = max(worst_max, abs(solve_minimax(inst).objective_value - ref))
    ok = rises == 0 and worst_grad <= 1e-5 and worst_sum <= 1e-2 and worst_max <= 1e-3
    report(6, ok, f"(a) Weiszfeld increases: {rises}; (b) max rel grad error {worst_grad:.2e}; "
                  f"(c) max |minisum-oracle|={worst_sum:.2e}, |minimax-oracle|={worst_max:.2e}")


def test_c7_minimax_master(report):
    rng = np.random.default_rng(7)
    wrong = []
    for case in range(50):
        n = int(rng.integers(2, 7))
        w = rng.uniform(1, 10, n)
        u_minus = np.where(rng.random(n) < 0.5, w, rng.uniform(0, 1, n) * w)
        inst = Instance.from_arrays(rng.uniform(0, 10, (n, 2)), w, u_minus,
                                    rng.uniform(1, 10, n), rng.uniform(1, 10, n),
                                    rng.uniform(1, 10, n), objective="minimax")
        pool = CutPool(Point(0.0, 0.0))
        for k in range(int(rng.integers(1, 4))):
            delta = rng.normal(size=n)
            delta[rng.random(n) < 0.2] = 0.0
            pool.rows.append(DistGapRow(k, delta))
            pool.generated_points.append(Point(float(k), 0.0))
        forced = np.any(pool.deltas() > 1e-9, axis=0)
        expect_infeasible = bool(np.any(w[forced] - u_minus[forced] > 0))
        plan = solve_master(inst, pool)
        if (plan is None) != expect_infeasible:
            wrong.append(f"case {case}: infeasibility mismatch")
        elif plan is not None and np.any(plan.w_hat[forced] > 1e-9):
            wrong.append(f"case {case}: forced weight left positive")
    report(7, not wrong, "50 synthetic minimax masters" + (f"; {wrong}" if wrong else ""))


def test_c8_infeasibility(circle4, tmp_path, capsys, report):
    square = tmp_path / "square.inst"
    square.write_text("INVLOC 1\nminisum 4 2\n" + "".join(
        f"{a} {b} 1 0.5 2 1 1\n" for a, b in ((0, 0), (1, 0), (1, 1), (0, 1))))
    code = main(["inverse", str(square), "--xbar", "2", "2"])
    capsys.readouterr()
    frozen = Instance.from_arrays(circle4.coords, circle4.w, circle4.u_minus, 0,
                                  circle4.c_minus, circle4.c_plus)
    outcome = solve_inverse(frozen, (0, 0)).outcome
    report(8, code == 4 and outcome is Outcome.INFEASIBLE,
           f"unit square x_bar=(2,2) exit code {code}; circle4 with u+=0: {outcome.value}")


def test_c9_determinism(runs, circle4, points18, ruspini_text, report):
    differ = []
    for label, (trace, _) in runs.items():
        if label == "circle4":
            again = solve_inverse(circle4, (0, 0), eps=EPS)
        elif label.startswith("p18"):
            xb = next(xb for xb in X18 if f"p18 {xb}" == label)
            again = solve_inverse(points18, xb, eps=EPS)
        else:
            seed = int(label.split("s=")[1].split()[0])
            p = float(label.split("p=")[1])
            again = solve_inverse(ruspini_instance(ruspini_text, seed, p), (50, 50), eps=EPS)
        if trace_csv(again).encode() != trace_csv(trace).encode():
            differ.append(label)
    report(9, not differ, f"{len(runs)} reruns byte-identical" if not differ else str(differ))
