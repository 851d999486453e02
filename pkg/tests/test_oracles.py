import json

import numpy as np
import pytest

from invopt import (
    LpInstance,
    PointSetInstance,
    SchedulingInstance,
    SizeLimitError,
    forward_argmax,
    lp_argmax,
    lp_vertex_enumeration,
    outcome_set,
    schedule_argmax,
    schedule_eval_order,
)
from invopt.harness import gen_lp_instance
from invopt.oracles import instance_from_dict, instance_to_dict, load_instance


class TestLpArgmax:
    def test_axis_aligned(self, triangle):
        assert np.allclose(lp_argmax(triangle, np.array([1.0, 0.0])), [1, 0])

    def test_box_corner(self, box):
        assert np.allclose(lp_argmax(box, np.array([0.5, 0.5])), [1, 1])

    def test_matches_vertex_enumeration(self, rng):
        for _ in range(25):
            inst = gen_lp_instance(3, 5, 10.0, rng)
            w = rng.uniform(0, 1, 3)
            w /= w.sum()
            value = float(w @ lp_argmax(inst, w))
            best = max(float(w @ v) for v in lp_vertex_enumeration(inst))
            assert value == pytest.approx(best, abs=1e-9)

    def test_optimal_among_all_vertices(self, rng):
        inst = gen_lp_instance(4, 8, 10.0, rng)
        vertices = lp_vertex_enumeration(inst)
        for _ in range(20):
            w = rng.uniform(0, 1, 4)
            w /= w.sum()
            value = float(w @ lp_argmax(inst, w))
            assert np.all(vertices @ w <= value + 1e-9)

    def test_deterministic_bytes(self, rng):
        inst = gen_lp_instance(4, 10, 10.0, rng)
        w = np.array([0.1, 0.2, 0.3, 0.4])
        assert lp_argmax(inst, w).tobytes() == lp_argmax(inst, w).tobytes()

    def test_dimension_mismatch(self, triangle):
        with pytest.raises(ValueError):
            lp_argmax(triangle, np.array([1.0, 0.0, 0.0]))


class TestVertexEnumeration:
    def test_unit_triangle(self, triangle):
        got = lp_vertex_enumeration(triangle)
        assert got.tolist() == [[0, 0], [0, 1], [1, 0]]

    def test_unit_box(self, box):
        assert len(lp_vertex_enumeration(box)) == 4

    def test_all_feasible(self, rng):
        inst = gen_lp_instance(3, 4, 10.0, rng)
        S = inst.constraint_matrix
        for v in lp_vertex_enumeration(inst):
            assert np.all(S @ v <= 1 + 1e-9)
            assert np.all(v >= -1e-9)

    def test_size_guard(self):
        big = LpInstance(r=np.ones(7), B=np.ones((3, 7)))
        with pytest.raises(SizeLimitError):
            lp_vertex_enumeration(big)


class TestScheduleEvalOrder:
    def test_hand_simulated(self, sched2):
        assert schedule_eval_order(sched2, [0, 1]).tolist() == [2, 3]
        assert schedule_eval_order(sched2, [1, 0]).tolist() == [3, 1]

    def test_single_job_rounds_release_up(self):
        inst = SchedulingInstance(r=[0.5], p=[1.0])
        assert schedule_eval_order(inst, [0]).tolist() == [2]

    def test_rejects_non_permutation(self, sched2):
        with pytest.raises(ValueError):
            schedule_eval_order(sched2, [0, 0])

    def test_schedule_constraints_hold(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 7))
            inst = SchedulingInstance(r=rng.uniform(0, 10, d), p=rng.uniform(1, 5, d))
            order = rng.permutation(d)
            C = schedule_eval_order(inst, order)
            starts = C - inst.p
            assert np.all(starts >= inst.r - 1e-9)  # release dates
            assert np.abs(starts - np.round(starts)).max() < 1e-9  # integer starts
            starts = np.round(starts)
            for a, b in zip(order[:-1], order[1:]):  # no overlap along the order
                assert starts[b] >= starts[a] + inst.p[a] - 1e-9

    def test_greedy_starts_are_minimal(self, rng):
        # reducing any single start by one breaks a release or overlap constraint
        for _ in range(20):
            d = int(rng.integers(2, 6))
            inst = SchedulingInstance(r=rng.uniform(0, 10, d), p=rng.uniform(1, 5, d))
            order = list(rng.permutation(d))
            starts = np.round(schedule_eval_order(inst, order) - inst.p)
            for pos, j in enumerate(order):
                lowered = starts[j] - 1
                release_ok = lowered >= inst.r[j]
                overlap_ok = pos == 0 or lowered >= starts[order[pos - 1]] + inst.p[order[pos - 1]]
                assert not (release_ok and overlap_ok)


class TestScheduleArgmax:
    def test_balanced_weights_pick_short_job_first(self, sched2):
        # 0.5*2 + 0.5*3 = 2.5  vs  0.5*3 + 0.5*1 = 2.0
        assert schedule_argmax(sched2, np.array([0.5, 0.5])).tolist() == [-3, -1]

    def test_near_unit_weight_prefers_job_one(self, sched2):
        delta = 1e-3
        got = schedule_argmax(sched2, np.array([1 - delta, delta]))
        assert got.tolist() == [-2, -3]

    def test_single_job(self):
        inst = SchedulingInstance(r=[0.0], p=[2.0])
        assert schedule_argmax(inst, np.array([0.3])).tolist() == [-2]

    def test_optimal_over_outcome_set(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 6))
            inst = SchedulingInstance(r=rng.uniform(0, 10, d), p=rng.uniform(1, 5, d))
            w = rng.uniform(0, 1, d)
            best = schedule_argmax(inst, w)
            for y in outcome_set(inst):
                assert float(w @ best) >= float(w @ y) - 1e-12

    def test_tie_breaks_to_lexicographic_minimum(self):
        inst = PointSetInstance([[1.0, 0.0], [0.0, 1.0]])
        got = forward_argmax(inst, np.array([0.5, 0.5]))
        assert got.tolist() == [0.0, 1.0]

    def test_size_guard(self):
        inst = SchedulingInstance(r=np.zeros(11), p=np.ones(11))
        with pytest.raises(SizeLimitError):
            schedule_argmax(inst, np.ones(11))


class TestOutcomeSet:
    def test_two_job_outcomes(self, sched2):
        assert outcome_set(sched2).tolist() == [[-3, -1], [-2, -3]]

    def test_triangle_matches_vertices(self, triangle):
        assert outcome_set(triangle).tolist() == lp_vertex_enumeration(triangle).tolist()

    def test_three_jobs_reproducible_by_orders(self, rng):
        inst = SchedulingInstance(r=rng.uniform(0, 10, 3), p=rng.uniform(1, 5, 3))
        outcomes = outcome_set(inst)
        assert len(outcomes) <= 6
        from itertools import permutations

        by_orders = {tuple(-schedule_eval_order(inst, o)) for o in permutations(range(3))}
        assert {tuple(y) for y in outcomes} == by_orders


class TestSerialization:
    def test_round_trip(self, triangle, sched2, tmp_path):
        pts = PointSetInstance([[1.0, 0.0], [0.0, 1.0]])
        for inst in (triangle, sched2, pts):
            data = instance_to_dict(inst)
            back = instance_from_dict(json.loads(json.dumps(data)))
            assert instance_to_dict(back) == data
        path = tmp_path / "inst.json"
        path.write_text(json.dumps(instance_to_dict(sched2)))
        loaded = load_instance(path)
        assert np.array_equal(loaded.r, sched2.r) and np.array_equal(loaded.p, sched2.p)

    def test_declared_dimension_checked(self):
        with pytest.raises(ValueError):
            instance_from_dict({"family": "scheduling", "d": 3, "r": [0.0], "p": [1.0]})

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            instance_from_dict({"family": "qp"})
