"""Sequential linear programming with an adaptive box trust region.

Each iteration maximizes the linearized objective inside the
intersection of the trust-region box, the unit hypercube, and the
problem's linear constraints; because everything is linear the new
iterate is exactly admissible.  A multi-start driver runs the method
from every training point and keeps the best value seen anywhere.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .problem import ProblemDefinition, evaluate_constraints, is_admissible
from .sampling import TrainingSet
from .simplex import LpSolution, solve_lp

GradientProvider = Callable[[np.ndarray], Tuple[np.ndarray, int]]

RHO_FLOOR = 1e-14
STATIONARY_TOL = 1e-12


@dataclass(frozen=True)
class TrustRegionConfig:
    delta0: float = 0.1
    delta_min: float = 1e-8
    delta_max: float = 0.5
    expand: float = 2.0
    shrink: float = 0.5
    eta_good: float = 0.75
    eta_bad: float = 0.25
    accept_mode: str = "always_move"  # or "greedy"

    def __post_init__(self):
        if not 0 < self.delta_min <= self.delta0 <= self.delta_max:
            raise ValueError("need 0 < delta_min <= delta0 <= delta_max")
        if not (self.expand > 1 and 0 < self.shrink < 1):
            raise ValueError("need expand > 1 and 0 < shrink < 1")
        if not 0 <= self.eta_bad < self.eta_good <= 1:
            raise ValueError("need 0 <= eta_bad < eta_good <= 1")
        if self.accept_mode not in ("always_move", "greedy"):
            raise ValueError("accept_mode must be always_move or greedy")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    u: np.ndarray
    f: float
    delta: float
    step_norm: float
    predicted: float
    actual: float
    evals_cum: int


@dataclass(frozen=True)
class OptimizationTrace:
    records: List[IterationRecord]
    best_value: float
    best_point: np.ndarray
    stop_reason: str  # max_iters | delta_floor | stationary


@dataclass(frozen=True)
class MultiStartResult:
    best_value: float
    best_point: np.ndarray
    traces: List[Optional[OptimizationTrace]]
    failures: List[Tuple[int, str]] = field(default_factory=list)


def slp_step(problem: ProblemDefinition, u_k: np.ndarray, g_k: np.ndarray,
             delta_k: float) -> LpSolution:
    """One linearized trust-region subproblem at ``u_k``.

    Maximizes g_k . s over the problem constraints shifted to ``u_k``,
    the hypercube, and |s|_inf <= delta_k.  A zero gradient returns the
    zero step by convention.
    """
    if not np.any(g_k):
        return LpSolution(np.zeros(problem.dimension), 0.0, "optimal")
    rows_a = np.array([c.coefficients for c in problem.constraints],
                      dtype=float).reshape(-1, problem.dimension)
    rows_b = np.array([c.offset - c.coefficients @ u_k
                       for c in problem.constraints], dtype=float)
    box_lo = np.maximum(-delta_k, -u_k)
    box_hi = np.minimum(delta_k, 1.0 - u_k)
    sol = solve_lp(g_k, rows_a, rows_b, box_lo, box_hi)
    if sol.status != "optimal":
        raise RuntimeError("LP subproblem infeasible at an admissible iterate")
    return sol


def slp_run(problem: ProblemDefinition, gradient_provider: GradientProvider,
            u0: np.ndarray, max_iters: int,
            tr: TrustRegionConfig = TrustRegionConfig()) -> OptimizationTrace:
    """Run SLP from ``u0`` for at most ``max_iters`` recorded iterations.

    Iteration k records the incumbent before stepping, so the first
    record is the start point; no step is taken on the final record.
    """
    u = np.asarray(u0, dtype=float)
    if not is_admissible(problem, u, tol=1e-9):
        raise ValueError("start point is not admissible")
    evals = 0

    def f(point):
        nonlocal evals
        evals += 1
        return problem.objective(point)

    f_u = f(u)
    delta = tr.delta0
    records: List[IterationRecord] = []
    floor_strikes = 0
    stop_reason = "max_iters"
    for k in range(1, max_iters + 1):
        if k == max_iters:
            records.append(IterationRecord(k, u.copy(), f_u, delta,
                                           0.0, 0.0, 0.0, evals))
            break
        g, g_evals = gradient_provider(u)
        evals += g_evals
        sol = slp_step(problem, u, g, delta)
        s = sol.step
        step_norm = float(np.max(np.abs(s))) if s.size else 0.0
        predicted = float(g @ s)
        if predicted <= STATIONARY_TOL:
            records.append(IterationRecord(k, u.copy(), f_u, delta,
                                           step_norm, predicted, 0.0, evals))
            stop_reason = "stationary"
            break
        f_trial = f(u + s)
        actual = f_trial - f_u
        records.append(IterationRecord(k, u.copy(), f_u, delta, step_norm,
                                       predicted, actual, evals))
        rho = actual / predicted if predicted > RHO_FLOOR else -np.inf
        if rho >= tr.eta_good:
            delta = min(tr.expand * delta, tr.delta_max)
        elif rho < tr.eta_bad:
            delta = max(tr.shrink * delta, tr.delta_min)
        rejected = tr.accept_mode == "greedy" and actual < 0
        if not rejected:
            u = u + s
            f_u = f_trial
        if delta <= tr.delta_min and (rejected or step_norm == 0.0):
            floor_strikes += 1
            if floor_strikes >= 2:
                stop_reason = "delta_floor"
                break
        else:
            floor_strikes = 0
    best = max(records, key=lambda r: r.f)
    return OptimizationTrace(records=records, best_value=best.f,
                             best_point=best.u, stop_reason=stop_reason)


def multi_start(problem: ProblemDefinition,
                gradient_provider_factory: Callable[[int], GradientProvider],
                starts: TrainingSet, max_iters: int,
                tr: TrustRegionConfig = TrustRegionConfig(),
                threads: Optional[int] = None) -> MultiStartResult:
    """Run :func:`slp_run` from every start; best over all iterations.

    Individual run failures are recorded and do not abort the rest.
    """
    if len(starts) == 0:
        raise ValueError("no start points given")

    def one(i: int) -> OptimizationTrace:
        return slp_run(problem, gradient_provider_factory(i),
                       starts.points[i], max_iters, tr)

    n = len(starts)
    traces: List[Optional[OptimizationTrace]] = [None] * n
    failures: List[Tuple[int, str]] = []
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(one, i) for i in range(n)]
        for i, fut in enumerate(futures):
            try:
                traces[i] = fut.result()
            except Exception as exc:
                failures.append((i, str(exc)))
    else:
        for i in range(n):
            try:
                traces[i] = one(i)
            except Exception as exc:
                failures.append((i, str(exc)))
    best_value = -np.inf
    best_point = starts.points[0]
    for trace in traces:
        if trace is not None and trace.best_value > best_value:
            best_value = trace.best_value
            best_point = trace.best_point
    return MultiStartResult(best_value=float(best_value), best_point=best_point,
                            traces=traces, failures=failures)
