import numpy as np
import pytest

import bandgapopt as bg
from bandgapopt.problem import LinearConstraint, PhysicalBox, ProblemDefinition


def free_problem(d):
    box = PhysicalBox(np.zeros(d), np.ones(d))
    return ProblemDefinition(d, box, lambda u: 0.0)


class TestHaltonPoint:
    def test_first_point(self):
        assert bg.halton_point(1, 2) == pytest.approx([0.5, 1.0 / 3.0])

    def test_second_point(self):
        assert bg.halton_point(2, 2) == pytest.approx([0.25, 2.0 / 3.0])

    def test_binary_reversal(self):
        assert bg.halton_point(4, 1) == pytest.approx([0.125])

    def test_index_starts_at_one(self):
        with pytest.raises(ValueError):
            bg.halton_point(0, 2)

    def test_dimension_bound(self):
        with pytest.raises(ValueError):
            bg.halton_point(1, 26)
        assert bg.halton_point(1, 25).shape == (25,)


class TestGenerateAdmissible:
    def test_unconstrained_keeps_first_indices(self):
        ts = bg.generate_admissible(free_problem(2), 3)
        assert list(ts.source_indices) == [1, 2, 3]
        for i, idx in enumerate(ts.source_indices):
            assert np.allclose(ts.points[i], bg.halton_point(idx, 2))

    def test_rejection_advances_index(self):
        box = PhysicalBox(np.zeros(1), np.ones(1))
        c = LinearConstraint(np.array([1.0]), 0.3)
        prob = ProblemDefinition(1, box, lambda u: 0.0, constraints=[c])
        ts = bg.generate_admissible(prob, 1)
        assert ts.source_indices[0] == 2  # index 1 is 0.5, rejected
        assert ts.points[0] == pytest.approx([0.25])

    def test_infeasible_raises_with_count(self):
        box = PhysicalBox(np.zeros(1), np.ones(1))
        c = LinearConstraint(np.array([1.0]), -1.0)
        prob = ProblemDefinition(1, box, lambda u: 0.0, constraints=[c])
        with pytest.raises(RuntimeError, match="0 admissible"):
            bg.generate_admissible(prob, 1, max_scan=200)

    def test_prefix_consistency(self):
        prob = bg.make_chain_problem()
        small = bg.generate_admissible(prob, 10)
        big = bg.generate_admissible(prob, 100)
        assert np.array_equal(small.points, big.points[:10])
        assert np.array_equal(small.source_indices, big.source_indices[:10])

    def test_determinism_and_admissibility(self):
        prob = bg.make_chain_problem()
        a = bg.generate_admissible(prob, 30)
        b = bg.generate_admissible(prob, 30)
        assert np.array_equal(a.points, b.points)
        for u in a.points:
            assert bg.is_admissible(prob, u)

    def test_points_pairwise_distinct(self):
        ts = bg.generate_admissible(free_problem(3), 50)
        assert len({tuple(p) for p in ts.points}) == 50
