import numpy as np
import pytest

import bandgapopt as bg
from bandgapopt.problem import LinearConstraint, PhysicalBox, ProblemDefinition


def unit_box(d):
    return PhysicalBox(np.zeros(d), np.ones(d))


def linear_problem(c):
    c = np.asarray(c, dtype=float)
    return ProblemDefinition(c.size, unit_box(c.size),
                             lambda u: float(c @ u), lambda u: c.copy())


def quadratic_problem(d, target):
    target = np.asarray(target, dtype=float)
    return ProblemDefinition(d, unit_box(d),
                             lambda u: -float(np.sum((u - target) ** 2)),
                             lambda u: -2.0 * (u - target))


def exact_provider(prob):
    return lambda u: (prob.analytic_gradient(u), 0)


class TestSlpStep:
    def test_zero_gradient_returns_zero_step(self):
        prob = linear_problem([1.0, 1.0])
        sol = bg.slp_step(prob, np.full(2, 0.5), np.zeros(2), 0.1)
        assert np.array_equal(sol.step, np.zeros(2))

    def test_interior_step_is_signed_delta(self):
        prob = linear_problem([1.0, -2.0, 3.0])
        g = np.array([2.0, -1.0, 0.5])
        sol = bg.slp_step(prob, np.full(3, 0.5), g, 0.05)
        assert sol.step == pytest.approx(0.05 * np.sign(g), abs=1e-10)

    def test_budget_boundary_respected(self):
        c = LinearConstraint(np.array([1.0, 1.0]), 1.0)
        prob = ProblemDefinition(2, unit_box(2), lambda u: float(u[0] + u[1]),
                                 constraints=[c])
        u = np.array([0.5, 0.5])  # on the budget boundary
        g = np.array([1.0, 1.0])  # points outward
        sol = bg.slp_step(prob, u, g, 0.2)
        assert c.coefficients @ sol.step <= 1e-9

    def test_step_stays_in_hypercube(self):
        prob = linear_problem([1.0, 1.0])
        sol = bg.slp_step(prob, np.array([0.95, 0.5]), np.array([1.0, 1.0]), 0.2)
        u_new = np.array([0.95, 0.5]) + sol.step
        assert np.all(u_new <= 1.0 + 1e-9)
        assert sol.step == pytest.approx([0.05, 0.2], abs=1e-9)


class TestSlpRun:
    def test_linear_objective_reaches_vertex(self):
        prob = linear_problem([1.0, -1.0, 2.0])
        tr = bg.TrustRegionConfig(accept_mode="greedy")
        trace = bg.slp_run(prob, exact_provider(prob), np.full(3, 0.5), 200, tr)
        assert trace.stop_reason == "stationary"
        assert trace.best_point == pytest.approx([1.0, 0.0, 1.0], abs=1e-9)
        fs = [r.f for r in trace.records]
        assert all(b >= a - 1e-12 for a, b in zip(fs, fs[1:]))

    def test_quadratic_converges(self):
        prob = quadratic_problem(8, np.full(8, 0.37))
        trace = bg.slp_run(prob, exact_provider(prob), np.full(8, 0.9), 200,
                           bg.TrustRegionConfig(delta0=0.1))
        assert trace.best_value >= -1e-3

    def test_always_move_can_decrease(self):
        prob = bg.make_chain_problem()
        ts = bg.generate_admissible(prob, 5)
        trace = bg.slp_run(prob, exact_provider(prob), ts.points[0], 60)
        fs = [r.f for r in trace.records]
        assert trace.best_value == max(fs)

    def test_iterates_admissible_and_step_bounded(self):
        prob = bg.make_chain_problem()
        ts = bg.generate_admissible(prob, 3)
        for u0 in ts.points:
            trace = bg.slp_run(prob, exact_provider(prob), u0, 40)
            for rec in trace.records:
                assert bg.is_admissible(prob, rec.u, tol=1e-9)
                assert rec.step_norm <= rec.delta + 1e-12

    def test_delta_floor_stop(self):
        # provider pointing downhill: every step worsens, greedy rejects
        prob = quadratic_problem(3, np.full(3, 0.5))
        lying = lambda u: (2.0 * (u - 0.5) + 0.01, 0)
        tr = bg.TrustRegionConfig(delta_min=1e-3, accept_mode="greedy")
        trace = bg.slp_run(prob, lying, np.full(3, 0.3), 200, tr)
        assert trace.stop_reason == "delta_floor"

    def test_determinism(self):
        prob = bg.make_chain_problem()
        ts = bg.generate_admissible(prob, 1)
        t1 = bg.slp_run(prob, exact_provider(prob), ts.points[0], 30)
        t2 = bg.slp_run(prob, exact_provider(prob), ts.points[0], 30)
        assert len(t1.records) == len(t2.records)
        for a, b in zip(t1.records, t2.records):
            assert np.array_equal(a.u, b.u) and a.f == b.f

    def test_inadmissible_start_rejected(self):
        prob = bg.make_chain_problem()
        with pytest.raises(ValueError):
            bg.slp_run(prob, exact_provider(prob), np.full(8, 2.0), 10)


class TestMultiStart:
    def test_identical_starts(self):
        prob = quadratic_problem(4, np.full(4, 0.4))
        starts = bg.TrainingSet(np.tile(np.full(4, 0.8), (3, 1)), [1, 2, 3])
        res = bg.multi_start(prob, lambda i: exact_provider(prob), starts, 50)
        single = bg.slp_run(prob, exact_provider(prob), np.full(4, 0.8), 50)
        assert res.best_value == single.best_value

    def test_best_at_least_initials(self):
        prob = bg.make_chain_problem()
        starts = bg.generate_admissible(prob, 5)
        res = bg.multi_start(prob, lambda i: exact_provider(prob), starts, 20)
        assert res.best_value >= max(prob.objective(u) for u in starts.points)

    def test_failures_recorded_without_abort(self):
        prob = quadratic_problem(2, np.full(2, 0.5))

        def factory(i):
            if i == 1:
                return lambda u: (_ for _ in ()).throw(RuntimeError("bad run"))
            return exact_provider(prob)

        starts = bg.TrainingSet(np.array([[0.1, 0.1], [0.2, 0.2], [0.3, 0.3]]),
                                [1, 2, 3])
        res = bg.multi_start(prob, factory, starts, 20)
        assert len(res.failures) == 1 and res.failures[0][0] == 1
        assert res.traces[0] is not None and res.traces[2] is not None

    def test_threaded_matches_serial(self):
        prob = bg.make_chain_problem()
        starts = bg.generate_admissible(prob, 4)
        serial = bg.multi_start(prob, lambda i: exact_provider(prob), starts, 20)
        threaded = bg.multi_start(prob, lambda i: exact_provider(prob), starts,
                                  20, threads=4)
        assert serial.best_value == threaded.best_value
        for a, b in zip(serial.traces, threaded.traces):
            for ra, rb in zip(a.records, b.records):
                assert np.array_equal(ra.u, rb.u)
