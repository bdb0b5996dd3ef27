"""Reduced gradient estimates from directional derivatives in a subspace.

The basis spans the kept principal directions plus the empirical mean
gradient; approximating the gradient there needs only 2q (central) or
q+1 (forward) objective evaluations instead of 2d or d+1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .pca import PrincipalSubspace
from .problem import ProblemDefinition

DROP_TOL = 1e-8
DEFAULT_H = 1e-5
H_MIN = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal spanning set: p kept directions, optionally the mean."""

    vectors: np.ndarray  # q x d, orthonormal rows
    includes_mean: bool
    p_kept: int

    @property
    def q(self) -> int:
        return self.vectors.shape[0]


def build_basis(subspace: PrincipalSubspace, p_keep: int,
                drop_tol: float = DROP_TOL) -> SubspaceBasis:
    """Orthonormalize [u_1 .. u_p, mean], dropping a dependent mean.

    The kept principal directions are preserved verbatim; only the mean
    is reduced by Gram-Schmidt.
    """
    d = subspace.directions.shape[0]
    if not 0 <= p_keep <= d:
        raise ValueError("p_keep must be in 0..d")
    mean = subspace.mean
    mean_norm = float(np.linalg.norm(mean))
    if p_keep == 0 and mean_norm <= drop_tol:
        raise ValueError("empty subspace: p=0 and the mean gradient vanishes")
    kept = subspace.directions[:, :p_keep].T  # p x d rows
    residual = mean - kept.T @ (kept @ mean) if p_keep else mean.copy()
    res_norm = float(np.linalg.norm(residual))
    if mean_norm > 0 and res_norm > drop_tol * mean_norm:
        vectors = np.vstack([kept, residual / res_norm])
        return SubspaceBasis(vectors=vectors, includes_mean=True, p_kept=p_keep)
    return SubspaceBasis(vectors=kept, includes_mean=False, p_kept=p_keep)


def project(v: np.ndarray, basis: SubspaceBasis) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the basis span."""
    B = basis.vectors
    return B.T @ (B @ v)


def _max_step(u: np.ndarray, direction: np.ndarray) -> float:
    """Largest t >= 0 with u + t*direction still inside [0,1]^d."""
    t = np.inf
    for ui, wi in zip(u, direction):
        if wi > 0:
            t = min(t, (1.0 - ui) / wi)
        elif wi < 0:
            t = min(t, -ui / wi)
    return max(t, 0.0)


def approx_gradient(problem: ProblemDefinition, basis: SubspaceBasis,
                    u: np.ndarray, fd_mode: str = "central",
                    h: float = DEFAULT_H,
                    h_min: float = H_MIN) -> Tuple[np.ndarray, int]:
    """Gradient estimate from directional derivatives along the basis.

    Probe steps that would leave the hypercube are shrunk (down to
    ``h_min``, then a one-sided difference is used).  Returns the
    estimate and the number of objective evaluations spent.
    """
    u = np.asarray(u, dtype=float)
    f = problem.objective
    evals = 0
    if fd_mode == "analytic":
        if problem.analytic_gradient is None:
            raise ValueError("problem has no analytic gradient")
        return project(problem.analytic_gradient(u), basis), 0
    if fd_mode not in ("central", "forward"):
        raise ValueError("fd_mode must be central, forward, or analytic")

    f0 = None

    def base_value():
        nonlocal f0, evals
        if f0 is None:
            f0 = f(u)
            evals += 1
        return f0

    if fd_mode == "forward":
        base_value()

    derivs = np.zeros(basis.q)
    for idx, b in enumerate(basis.vectors):
        t_plus = _max_step(u, b)
        t_minus = _max_step(u, -b)
        if fd_mode == "central":
            hc = min(h, t_plus, t_minus)
            if hc >= h_min:
                derivs[idx] = (f(u + hc * b) - f(u - hc * b)) / (2.0 * hc)
                evals += 2
                continue
        else:
            hf = min(h, t_plus)
            if hf >= h_min:
                derivs[idx] = (f(u + hf * b) - base_value()) / hf
                evals += 1
                continue
        # One-sided fallback along whichever side has room.
        if t_plus >= t_minus:
            hs, sign = min(h, t_plus), 1.0
        else:
            hs, sign = min(h, t_minus), -1.0
        if hs >= h_min:
            derivs[idx] = sign * (f(u + sign * hs * b) - base_value()) / hs
            evals += 1
        # else: no room in either direction; derivative treated as 0
    return basis.vectors.T @ derivs, evals
