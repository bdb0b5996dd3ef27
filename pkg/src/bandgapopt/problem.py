"""Constrained maximization problems in unit-cube coordinates.

All sampling, PCA, and optimization work on the d-dimensional unit
hypercube; physical parameter values appear only when a model is
assembled.  Linear inequality constraints are stored in unit-cube form
``a . u - b <= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

ADMISSIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalBox:
    """Per-coordinate bounds of the physical parameter box."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("box requires lower[i] < upper[i] for all i")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class LinearConstraint:
    """Inequality ``coefficients . u - offset <= 0`` in unit coordinates."""

    coefficients: np.ndarray
    offset: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or not np.any(coeffs != 0.0):
            raise ValueError("constraint needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "offset", float(self.offset))

    def value(self, u: np.ndarray) -> float:
        return float(self.coefficients @ u - self.offset)


@dataclass(frozen=True)
class ProblemDefinition:
    """Maximization problem: objective, optional gradient, linear constraints.

    ``objective`` maps a unit-cube point to a scalar and must be pure and
    deterministic.  ``analytic_gradient``, when given, returns the
    unit-cube-coordinate gradient.
    """

    dimension: int
    box: PhysicalBox
    objective: Callable[[np.ndarray], float]
    analytic_gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    constraints: Sequence[LinearConstraint] = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.box.dimension != self.dimension:
            raise ValueError("box dimension does not match problem dimension")
        object.__setattr__(self, "constraints", tuple(self.constraints))


def _check_dim(v: np.ndarray, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (d,):
        raise ValueError(f"expected a vector of length {d}, got shape {v.shape}")
    return v


def to_unit_cube(x_phys: np.ndarray, box: PhysicalBox) -> np.ndarray:
    """Map a physical-coordinate point onto the unit hypercube."""
    x = _check_dim(x_phys, box.dimension)
    return (x - box.lower) / box.widths


def from_unit_cube(u: np.ndarray, box: PhysicalBox) -> np.ndarray:
    """Inverse of :func:`to_unit_cube`."""
    u = _check_dim(u, box.dimension)
    return box.lower + u * box.widths


def evaluate_constraints(problem: ProblemDefinition, u: np.ndarray) -> np.ndarray:
    """Values of every linear constraint at ``u`` (admissible iff all <= 0)."""
    u = _check_dim(u, problem.dimension)
    return np.array([c.value(u) for c in problem.constraints], dtype=float)


def is_admissible(problem: ProblemDefinition, u: np.ndarray,
                  tol: float = ADMISSIBILITY_TOL) -> bool:
    """True iff ``u`` lies in the hypercube and satisfies every constraint."""
    u = _check_dim(u, problem.dimension)
    if np.any(u < -tol) or np.any(u > 1.0 + tol):
        return False
    return all(c.value(u) <= tol for c in problem.constraints)


def physical_linear_constraint(coeffs_phys: np.ndarray, bound: float,
                               box: PhysicalBox) -> LinearConstraint:
    """Translate ``a . x_phys <= bound`` into unit-cube form."""
    a = _check_dim(coeffs_phys, box.dimension)
    return LinearConstraint(coefficients=a * box.widths,
                            offset=bound - float(a @ box.lower))
