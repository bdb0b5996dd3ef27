"""Deterministic Halton quasi-Monte Carlo sampling of admissible points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ProblemDefinition, is_admissible

# First 25 primes; caps the supported dimension.
_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
           53, 59, 61, 67, 71, 73, 79, 83, 89, 97)

DEFAULT_MAX_SCAN = 100_000


@dataclass(frozen=True)
class TrainingSet:
    """Admissible Halton points, in sequence order."""

    points: np.ndarray          # N x d
    source_indices: np.ndarray  # Halton index that produced each point
    problem_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "source_indices",
                          np.asarray(self.source_indices, dtype=int))
        if self.points.shape[0] != self.source_indices.shape[0]:
            raise ValueError("points and source_indices length mismatch")

    def __len__(self) -> int:
        return self.points.shape[0]

    def prefix(self, n: int) -> "TrainingSet":
        return TrainingSet(self.points[:n], self.source_indices[:n],
                           self.problem_label)


def _radical_inverse(n: int, base: int) -> float:
    inv = 0.0
    f = 1.0
    while n > 0:
        f /= base
        inv += f * (n % base)
        n //= base
    return inv


def halton_point(index: int, d: int) -> np.ndarray:
    """The ``index``-th Halton point in [0,1)^d (index starts at 1)."""
    if index < 1:
        raise ValueError("Halton index must be >= 1")
    if d < 1 or d > len(_PRIMES):
        raise ValueError(f"dimension must be in 1..{len(_PRIMES)}")
    return np.array([_radical_inverse(index, b) for b in _PRIMES[:d]])


def generate_admissible(problem: ProblemDefinition, n_points: int,
                        max_scan: int = DEFAULT_MAX_SCAN) -> TrainingSet:
    """First ``n_points`` admissible Halton points, by increasing index.

    Prefix-consistent: the first n1 points for any n1 <= n_points are
    independent of n_points.  Raises if fewer than ``n_points`` admissible
    points occur within ``max_scan`` sequence indices.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    points = []
    indices = []
    for index in range(1, max_scan + 1):
        u = halton_point(index, problem.dimension)
        if is_admissible(problem, u):
            points.append(u)
            indices.append(index)
            if len(points) == n_points:
                break
    if len(points) < n_points:
        raise RuntimeError(
            f"only {len(points)} admissible points found in the first "
            f"{max_scan} Halton indices (requested {n_points})")
    return TrainingSet(np.array(points), np.array(indices), problem.label)
