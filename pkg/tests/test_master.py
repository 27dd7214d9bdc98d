import numpy as np
import pytest

from invloc import CutPool, Instance, Point, solve_master
from invloc.distance import DistGapRow
from invloc.master import build_minimax_master, build_minisum_master, forced_zero
from invloc.model import plan_violations


def synthetic_pool(rows):
    pool = CutPool(Point(0.0, 0.0))
    for k, delta in enumerate(rows):
        pool.rows.append(DistGapRow(k, np.asarray(delta, dtype=float)))
        pool.generated_points.append(Point(float(k), 0.0))
    return pool


def test_circle4_first_master(circle4):
    pool = CutPool(Point(0, 0))
    pool.add(circle4, (0, -1))
    prob = build_minisum_master(circle4, pool)
    assert prob.A_le.shape == (1, 12)
    # the cut row is stored scaled, so compare directions
    row = prob.A_le[0, :4] / prob.A_le[0, 3]
    np.testing.assert_allclose(row, [-0.414214, -0.847759, -0.847759, 1.0], atol=1e-6)
    plan = solve_master(circle4, pool)
    np.testing.assert_allclose(plan.p_plus, [5, 0.898, 5, 0], atol=1e-3)
    assert plan.cost == pytest.approx(18.357, abs=1e-3)
    assert plan.w_hat[3] == pytest.approx(10 / np.sqrt(2))
    assert plan_violations(circle4, plan) == []


def test_duplicate_cut_changes_nothing(circle4):
    pool = CutPool(Point(0, 0))
    pool.add(circle4, (0, -1))
    once = solve_master(circle4, pool)
    pool.add(circle4, (0, -1))
    twice = solve_master(circle4, pool)
    assert twice.cost == pytest.approx(once.cost, rel=1e-12)


def test_no_budget_and_violated_cut_is_infeasible(circle4):
    frozen = Instance.from_arrays(circle4.coords, circle4.w, 0, 0, 1, 1)
    pool = CutPool(Point(0, 0))
    pool.add(frozen, (0, -1))
    assert solve_master(frozen, pool) is None


def test_satisfied_cuts_give_zero_plan(circle4):
    pool = synthetic_pool([[-1, -1, -1, -1]])
    plan = solve_master(circle4, pool)
    assert plan.cost == 0.0
    np.testing.assert_array_equal(plan.w_hat, circle4.w)


def test_empty_pool_rejected(circle4):
    with pytest.raises(ValueError):
        build_minisum_master(circle4, CutPool(Point(0, 0)))


def test_minimax_two_site_fixing():
    def inst(u1):
        return Instance.from_arrays([[0, 0], [1, 0]], [2, 2], [u1, 0], 1, 1, 1,
                                    objective="minimax")

    pool = synthetic_pool([[0.5, -0.5]])
    assert list(forced_zero(pool)) == [0]
    prob = build_minimax_master(inst(2.0), pool)
    assert prob.A_le.shape[0] == 0 and prob.upper[0] == 0.0
    plan = solve_master(inst(2.0), pool)
    assert plan.w_hat[0] == 0.0 and plan.cost == pytest.approx(2.0)
    assert solve_master(inst(1.5), pool) is None


def test_minimax_no_positive_gap_is_free():
    inst = Instance.from_arrays([[0, 0], [1, 0]], [2, 2], 1, 1, 1, 1, objective="minimax")
    plan = solve_master(inst, synthetic_pool([[-0.5, 0.0]]))
    assert plan.cost == 0.0


def test_minimax_three_site_infeasible():
    inst = Instance.from_arrays([[0, 0], [1, 0], [0, 1]], 1, [1, 0, 1], 1, 1, 1,
                                objective="minimax")
    assert solve_master(inst, synthetic_pool([[1, 1, -1]])) is None


def test_cost_grows_with_nested_pools(rng):
    for _ in range(20):
        n = int(rng.integers(3, 9))
        inst = Instance.from_arrays(rng.uniform(0, 10, (n, 2)), rng.uniform(1, 10, n),
                                    rng.uniform(0, 1, n) * 10, rng.uniform(1, 10, n),
                                    rng.uniform(1, 10, n), rng.uniform(1, 10, n))
        pool = CutPool(Point(5.0, 5.0))
        prev = 0.0
        for _ in range(6):
            pool.add(inst, tuple(rng.uniform(0, 10, 2)))
            plan = solve_master(inst, pool)
            if plan is None:
                break
            assert plan.cost >= prev - 1e-9
            assert np.all(pool.deltas() @ plan.w_hat <= 1e-7)
            assert plan_violations(inst, plan) == []
            prev = plan.cost
