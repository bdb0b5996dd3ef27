"""Sampled gradient fields, centered PCA, and the sample-size rule.

MSRE(p) is the mean squared norm of the reconstruction error after
keeping p principal components, as a percentage of the centered field's
mean squared norm; spectrally it is the trailing eigenvalue mass of the
covariance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .problem import ProblemDefinition
from .sampling import TrainingSet

EVAL_MODES = ("analytic", "central_fd", "forward_fd")


@dataclass(frozen=True)
class GradientField:
    """Gradients of the objective at every training point (unit coords)."""

    gradients: np.ndarray  # N x d
    points: TrainingSet
    eval_mode: str
    objective_eval_count: int

    def __post_init__(self):
        g = np.asarray(self.gradients, dtype=float)
        if g.shape[0] != len(self.points):
            raise ValueError("gradient row count != training set size")
        if not np.all(np.isfinite(g)):
            raise ValueError("gradient field contains non-finite entries")
        object.__setattr__(self, "gradients", g)

    def prefix(self, n: int) -> "GradientField":
        share = self.objective_eval_count * n // max(len(self.points), 1)
        return GradientField(self.gradients[:n], self.points.prefix(n),
                             self.eval_mode, share)


@dataclass(frozen=True)
class PrincipalSubspace:
    """Centered-PCA decomposition of a gradient field."""

    mean: np.ndarray          # empirical mean gradient
    eigenvalues: np.ndarray   # descending, >= 0
    directions: np.ndarray    # d x d, orthonormal columns
    msre_percent: np.ndarray  # length d+1, index p = components kept
    sample_size: int


def compute_gradient_field(problem: ProblemDefinition, training_set: TrainingSet,
                           eval_mode: str = "analytic",
                           h: float = 1e-6) -> GradientField:
    """Evaluate the objective gradient at every training point."""
    if eval_mode not in EVAL_MODES:
        raise ValueError(f"eval_mode must be one of {EVAL_MODES}")
    if len(training_set) == 0:
        raise ValueError("training set is empty")
    if eval_mode == "analytic" and problem.analytic_gradient is None:
        raise ValueError("problem has no analytic gradient")
    d = problem.dimension
    rows = np.empty((len(training_set), d))
    evals = 0
    for n, u in enumerate(training_set.points):
        try:
            if eval_mode == "analytic":
                rows[n] = problem.analytic_gradient(u)
            elif eval_mode == "central_fd":
                for i in range(d):
                    e = np.zeros(d)
                    e[i] = h
                    rows[n, i] = (problem.objective(u + e)
                                  - problem.objective(u - e)) / (2.0 * h)
                evals += 2 * d
            else:  # forward_fd
                f0 = problem.objective(u)
                evals += 1
                for i in range(d):
                    e = np.zeros(d)
                    e[i] = h
                    rows[n, i] = (problem.objective(u + e) - f0) / h
                    evals += 1
        except Exception as exc:
            raise RuntimeError(
                f"gradient evaluation failed at training point {n}: {exc}"
            ) from exc
    return GradientField(rows, training_set, eval_mode, evals)


def fit_pca(field: GradientField) -> PrincipalSubspace:
    """Centered PCA of the gradient field (covariance normalized by 1/N)."""
    g = field.gradients
    n_samples, d = g.shape
    if n_samples < 2:
        raise ValueError("PCA needs at least 2 samples")
    mean = g.mean(axis=0)
    centered = g - mean
    cov = centered.T @ centered / n_samples
    lam, vecs = np.linalg.eigh(cov)
    order = np.argsort(lam)[::-1]
    lam = np.maximum(lam[order], 0.0)
    vecs = vecs[:, order]
    # Fix arbitrary eigenvector signs: largest-magnitude entry nonnegative.
    for i in range(d):
        lead = np.argmax(np.abs(vecs[:, i]))
        if vecs[lead, i] < 0:
            vecs[:, i] = -vecs[:, i]
    total = lam.sum()
    if total <= 1e-300:
        msre = np.zeros(d + 1)
    else:
        trailing = np.concatenate([[total], total - np.cumsum(lam)])
        msre = 100.0 * np.maximum(trailing, 0.0) / total
        msre[-1] = 0.0
    return PrincipalSubspace(mean=mean, eigenvalues=lam, directions=vecs,
                             msre_percent=msre, sample_size=n_samples)


def msre_by_reconstruction(field: GradientField, subspace: PrincipalSubspace,
                           p: int) -> float:
    """MSRE(p) by explicit projection; oracle for the spectral formula."""
    d = field.gradients.shape[1]
    if not 0 <= p <= d:
        raise ValueError("p must be in 0..d")
    centered = field.gradients - subspace.mean
    basis = subspace.directions[:, :p]
    residual = centered - (centered @ basis) @ basis.T
    denom = np.mean(np.sum(centered ** 2, axis=1))
    if denom <= 1e-300:
        return 0.0
    return 100.0 * np.mean(np.sum(residual ** 2, axis=1)) / denom


def select_p(subspace: PrincipalSubspace, r: float) -> int:
    """Minimal number of components with MSRE(p) <= r percent."""
    if r <= 0:
        raise ValueError("r must be positive")
    for p, value in enumerate(subspace.msre_percent):
        if value <= r:
            return p
    return subspace.msre_percent.size - 1  # unreachable: MSRE(d) = 0


def stable_sample_size(curves: Dict[int, np.ndarray], schedule: Sequence[int],
                       overlap_tol: float) -> tuple:
    """Smallest schedule N whose curve overlaps every larger one.

    Returns (n_star, warned); warned means no entry was stable and the
    last one was taken.
    """
    schedule = list(schedule)
    # The last entry has no larger curve to compare against, so it can
    # only be chosen as the warned fallback.
    for i, n in enumerate(schedule[:-1]):
        if all(np.max(np.abs(curves[m] - curves[n])) <= overlap_tol
               for m in schedule[i + 1:]):
            return n, False
    return schedule[-1], True


@dataclass(frozen=True)
class SampleSizeResult:
    """Outcome of the training-sample-size stability rule."""

    n_star: int
    curves: Dict[int, np.ndarray]  # schedule N -> msre_percent
    warned: bool
    training_set: TrainingSet      # at the largest schedule entry
    field: GradientField


def select_sample_size(problem: ProblemDefinition, schedule: Sequence[int],
                       overlap_tol: float = 1.0,
                       eval_mode: str = "analytic", h: float = 1e-6,
                       max_scan: int = 100_000) -> SampleSizeResult:
    """Smallest schedule N whose MSRE curve is stable under enlargement.

    Gradient evaluations are shared across schedule entries via the Halton
    prefix property.  If no entry is stable, the last one is returned with
    ``warned`` set.
    """
    schedule = list(schedule)
    if len(schedule) < 2 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing, length >= 2")
    from .sampling import generate_admissible
    training = generate_admissible(problem, schedule[-1], max_scan)
    field = compute_gradient_field(problem, training, eval_mode, h)
    curves = {n: fit_pca(field.prefix(n)).msre_percent for n in schedule}
    n_star, warned = stable_sample_size(curves, schedule, overlap_tol)
    return SampleSizeResult(n_star=n_star, curves=curves, warned=warned,
                           training_set=training, field=field)
