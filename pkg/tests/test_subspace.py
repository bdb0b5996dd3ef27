import numpy as np
import pytest

import bandgapopt as bg
from bandgapopt.pca import PrincipalSubspace
from bandgapopt.subspace import SubspaceBasis


def subspace_with(mean, directions, d=None):
    directions = np.asarray(directions, dtype=float)
    d = d or directions.shape[0]
    lam = np.linspace(2, 1, d)
    msre = np.linspace(100, 0, d + 1)
    return PrincipalSubspace(np.asarray(mean, dtype=float), lam, directions,
                             msre, 10)


class TestBuildBasis:
    def test_mean_orthogonalized_last(self):
        mean = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
        sub = subspace_with(mean, np.eye(3))
        basis = bg.build_basis(sub, 1)
        assert basis.q == 2
        assert basis.includes_mean
        assert np.allclose(basis.vectors[0], [1, 0, 0])
        expected = np.array([0.0, 1.0, 0.0])
        assert np.allclose(np.abs(basis.vectors[1]), expected, atol=1e-12)

    def test_dependent_mean_dropped(self):
        sub = subspace_with([2.0, 0.0, 0.0], np.eye(3))
        basis = bg.build_basis(sub, 1)
        assert basis.q == 1
        assert not basis.includes_mean

    def test_full_dimension(self):
        rng = np.random.default_rng(0)
        Q = np.linalg.qr(rng.standard_normal((5, 5)))[0]
        basis = bg.build_basis(subspace_with(rng.standard_normal(5), Q), 5)
        assert basis.q == 5
        P = basis.vectors.T @ basis.vectors
        assert np.max(np.abs(P - np.eye(5))) <= 1e-10

    def test_span_matches_projector(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            Q = np.linalg.qr(rng.standard_normal((6, 6)))[0]
            mean = rng.standard_normal(6)
            p = int(rng.integers(1, 5))
            basis = bg.build_basis(subspace_with(mean, Q), p)
            raw = np.column_stack([Q[:, :p], mean])
            G = np.linalg.qr(raw)[0][:, :np.linalg.matrix_rank(raw)]
            P_ref = G @ G.T
            P = basis.vectors.T @ basis.vectors
            assert np.max(np.abs(P - P_ref)) <= 1e-10

    def test_orthonormal(self):
        rng = np.random.default_rng(2)
        Q = np.linalg.qr(rng.standard_normal((7, 7)))[0]
        basis = bg.build_basis(subspace_with(rng.standard_normal(7), Q), 3)
        G = basis.vectors @ basis.vectors.T
        assert np.max(np.abs(G - np.eye(basis.q))) <= 1e-10

    def test_empty_subspace_error(self):
        sub = subspace_with(np.zeros(3), np.eye(3))
        with pytest.raises(ValueError):
            bg.build_basis(sub, 0)


class TestProject:
    def test_coordinate_projection(self):
        basis = SubspaceBasis(np.array([[1.0, 0.0]]), False, 1)
        assert bg.project(np.array([3.0, 4.0]), basis) == pytest.approx([3, 0])

    def test_idempotent_on_span(self):
        rng = np.random.default_rng(3)
        B = np.linalg.qr(rng.standard_normal((5, 2)))[0].T
        basis = SubspaceBasis(B, False, 2)
        v = 1.3 * B[0] - 0.7 * B[1]
        assert np.max(np.abs(bg.project(v, basis) - v)) <= 1e-12

    def test_orthogonal_complement_to_zero(self):
        basis = SubspaceBasis(np.array([[1.0, 0.0, 0.0]]), False, 1)
        assert np.allclose(bg.project(np.array([0.0, 2.0, -1.0]), basis), 0.0)

    def test_self_adjoint(self):
        rng = np.random.default_rng(4)
        B = np.linalg.qr(rng.standard_normal((6, 3)))[0].T
        basis = SubspaceBasis(B, False, 3)
        for _ in range(10):
            a, b = rng.standard_normal(6), rng.standard_normal(6)
            lhs = bg.project(a, basis) @ b
            rhs = a @ bg.project(b, basis)
            assert abs(lhs - rhs) <= 1e-12

    def test_norm_non_expanding(self):
        rng = np.random.default_rng(5)
        B = np.linalg.qr(rng.standard_normal((6, 2)))[0].T
        basis = SubspaceBasis(B, False, 2)
        for _ in range(10):
            v = rng.standard_normal(6)
            assert np.linalg.norm(bg.project(v, basis)) <= np.linalg.norm(v) + 1e-12


def quadratic_problem(d, seed=0):
    rng = np.random.default_rng(seed)
    target = rng.uniform(0.3, 0.7, d)
    box = bg.PhysicalBox(np.zeros(d), np.ones(d))
    return bg.ProblemDefinition(
        d, box,
        lambda u: -float(np.sum((u - target) ** 2)),
        lambda u: -2.0 * (u - target))


class TestApproxGradient:
    def test_ridge_gradient_recovered(self):
        A = bg.random_orthonormal_directions(6, 1, seed=6)
        prob = bg.make_ridge_problem(6, A)
        basis = SubspaceBasis(A, False, 1)
        u = np.full(6, 0.4)
        g, evals = bg.approx_gradient(prob, basis, u, "central", 1e-5)
        assert np.max(np.abs(g - prob.analytic_gradient(u))) <= 1e-6
        assert evals == 2

    def test_flat_direction_gives_zero(self):
        box = bg.PhysicalBox(np.zeros(2), np.ones(2))
        prob = bg.ProblemDefinition(2, box, lambda u: float(u[0] ** 2))
        basis = SubspaceBasis(np.array([[0.0, 1.0]]), False, 1)
        g, _ = bg.approx_gradient(prob, basis, np.array([0.3, 0.5]))
        assert np.max(np.abs(g)) <= 1e-9

    def test_quarter_cost_accounting(self):
        prob = quadratic_problem(8)
        B = np.linalg.qr(np.random.default_rng(7).standard_normal((8, 2)))[0].T
        basis = SubspaceBasis(B, True, 1)
        u = np.full(8, 0.5)
        _, evals = bg.approx_gradient(prob, basis, u, "central")
        _, evals_full = bg.approx_gradient(
            prob, SubspaceBasis(np.eye(8), False, 8), u, "central")
        assert evals == 4 and evals_full == 16
        assert evals / evals_full == 0.25

    def test_forward_eval_count(self):
        prob = quadratic_problem(8)
        B = np.linalg.qr(np.random.default_rng(8).standard_normal((8, 3)))[0].T
        basis = SubspaceBasis(B, False, 3)
        _, evals = bg.approx_gradient(prob, basis, np.full(8, 0.5), "forward")
        assert evals == 3 + 1

    def test_central_matches_projected_analytic(self):
        prob = quadratic_problem(7, seed=1)
        rng = np.random.default_rng(9)
        B = np.linalg.qr(rng.standard_normal((7, 3)))[0].T
        basis = SubspaceBasis(B, False, 3)
        for _ in range(20):
            u = rng.uniform(0.2, 0.8, 7)
            g, _ = bg.approx_gradient(prob, basis, u, "central", 1e-5)
            ref = bg.project(prob.analytic_gradient(u), basis)
            assert np.max(np.abs(g - ref)) <= 1e-6

    def test_analytic_mode_projects(self):
        prob = quadratic_problem(5, seed=2)
        B = np.linalg.qr(np.random.default_rng(10).standard_normal((5, 2)))[0].T
        basis = SubspaceBasis(B, False, 2)
        u = np.full(5, 0.4)
        g, evals = bg.approx_gradient(prob, basis, u, "analytic")
        assert evals == 0
        assert np.allclose(g, bg.project(prob.analytic_gradient(u), basis))

    def test_full_basis_matches_full_fd(self):
        prob = quadratic_problem(6, seed=3)
        rng = np.random.default_rng(11)
        u = rng.uniform(0.2, 0.8, 6)
        h = 1e-5
        basis = SubspaceBasis(np.eye(6), False, 6)
        g, _ = bg.approx_gradient(prob, basis, u, "central", h)
        fd = np.empty(6)
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            fd[i] = (prob.objective(u + e) - prob.objective(u - e)) / (2 * h)
        assert np.max(np.abs(g - fd)) <= 1e-9

    def test_rotated_full_basis_matches_at_interior(self):
        prob = quadratic_problem(6, seed=4)
        rng = np.random.default_rng(12)
        Q = np.linalg.qr(rng.standard_normal((6, 6)))[0].T
        basis = SubspaceBasis(Q, False, 6)
        for _ in range(10):
            u = rng.uniform(0.2, 0.8, 6)
            g, _ = bg.approx_gradient(prob, basis, u, "central", 1e-5)
            assert np.max(np.abs(g - prob.analytic_gradient(u))) <= 1e-9

    def test_boundary_probe_shrinks(self):
        prob = quadratic_problem(3, seed=5)
        basis = SubspaceBasis(np.eye(3), False, 3)
        u = np.array([0.0, 1.0, 0.5])  # two coordinates on the boundary
        g, _ = bg.approx_gradient(prob, basis, u, "central", 1e-5)
        # one-sided fallbacks keep the estimate close to the true gradient
        assert np.max(np.abs(g - prob.analytic_gradient(u))) <= 1e-4
