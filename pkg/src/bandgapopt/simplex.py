"""Small dense two-phase simplex for the SLP trust-region subproblems.

Maximizes c.s over a.s <= b rows intersected with a box; sizes are tiny
(d <= 25 variables, a few dozen rows), so a dense tableau with Bland's
rule is enough and keeps the solver dependency-free and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-8


@dataclass(frozen=True)
class LpSolution:
    step: np.ndarray
    objective: float
    status: str  # "optimal" or "infeasible"


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _simplex(T: np.ndarray, basis: list, n_cols: int) -> None:
    """Minimize the last tableau row over columns [0, n_cols) with Bland's rule."""
    m = T.shape[0] - 1
    while True:
        col = -1
        for j in range(n_cols):
            if T[-1, j] < -_PIVOT_TOL:
                col = j
                break
        if col < 0:
            return
        row, best = -1, np.inf
        for i in range(m):
            if T[i, col] > _PIVOT_TOL:
                ratio = T[i, -1] / T[i, col]
                if ratio < best - 1e-12 or (abs(ratio - best) <= 1e-12
                                            and (row < 0 or basis[i] < basis[row])):
                    best, row = ratio, i
        if row < 0:
            raise RuntimeError("LP unbounded (box constraints should prevent this)")
        _pivot(T, row, col)
        basis[row] = col


def solve_lp(c: np.ndarray, rows_a: np.ndarray, rows_b: np.ndarray,
             box_lo: np.ndarray, box_hi: np.ndarray) -> LpSolution:
    """Maximize c.s subject to rows_a @ s <= rows_b and box_lo <= s <= box_hi."""
    c = np.asarray(c, dtype=float)
    box_lo = np.asarray(box_lo, dtype=float)
    box_hi = np.asarray(box_hi, dtype=float)
    d = c.size
    if np.any(box_lo > box_hi + 1e-15):
        return LpSolution(np.zeros(d), 0.0, "infeasible")
    rows_a = np.asarray(rows_a, dtype=float).reshape(-1, d)
    rows_b = np.asarray(rows_b, dtype=float).reshape(-1)

    # Shift to t = s - lo >= 0; upper bounds become ordinary rows.
    A = np.vstack([rows_a, np.eye(d)])
    b = np.concatenate([rows_b - rows_a @ box_lo, box_hi - box_lo])
    m = A.shape[0]
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    n_art = int(np.count_nonzero(neg))

    # Columns: d structural | m slack/surplus | n_art artificial | rhs.
    n_cols = d + m + n_art
    T = np.zeros((m + 1, n_cols + 1))
    T[:m, :d] = A
    basis = [0] * m
    art_col = d + m
    for i in range(m):
        T[i, d + i] = -1.0 if neg[i] else 1.0
        if neg[i]:
            T[i, art_col] = 1.0
            basis[i] = art_col
            art_col += 1
        else:
            basis[i] = d + i
        T[i, -1] = b[i]

    if n_art:
        # Phase 1: minimize the sum of artificials.
        T[-1, d + m:d + m + n_art] = 1.0
        for i in range(m):
            if basis[i] >= d + m:
                T[-1] -= T[i]
        _simplex(T, basis, n_cols)
        if T[-1, -1] < -_FEAS_TOL:
            return LpSolution(np.zeros(d), 0.0, "infeasible")
        # Pivot any artificial still in the basis out to a structural/slack column.
        for i in range(m):
            if basis[i] >= d + m:
                for j in range(d + m):
                    if abs(T[i, j]) > _PIVOT_TOL:
                        _pivot(T, i, j)
                        basis[i] = j
                        break
        T[:, d + m:d + m + n_art] = 0.0

    # Phase 2: minimize -c.t.
    T[-1, :] = 0.0
    T[-1, :d] = -c
    for i in range(m):
        if basis[i] < d and T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    _simplex(T, basis, d + m)

    t = np.zeros(d)
    for i in range(m):
        if basis[i] < d:
            t[basis[i]] = T[i, -1]
    s = t + box_lo
    return LpSolution(step=s, objective=float(c @ s), status="optimal")
