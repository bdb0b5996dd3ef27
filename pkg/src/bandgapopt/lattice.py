"""Band-gap objective for a 1D cyclic mass-spring chain, plus ridge oracles.

The unit cell has ``n_dof`` masses connected in a ring of
nearest-neighbor springs; Bloch reduction gives a Hermitian stiffness
matrix K(kappa) and a diagonal mass matrix.  The objective is the signed
gap between two adjacent dispersion bands.

With nearest-neighbor springs only, K(kappa) is a periodic Jacobi
operator and adjacent bands can touch but never overlap, so the gap is
always >= 0.  An optional second ring of next-nearest-neighbor springs
breaks that structure and makes genuinely negative (overlapping) gaps
reachable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .problem import (PhysicalBox, ProblemDefinition, from_unit_cube,
                      physical_linear_constraint)

DEFAULT_N_KAPPA = 129
DEGENERACY_TOL = 1e-8


class DegeneracyError(RuntimeError):
    """Raised when a band-edge eigenvalue is (nearly) degenerate."""

    def __init__(self, message: str, kappa: float):
        super().__init__(message)
        self.kappa = kappa


@dataclass(frozen=True)
class ChainParams:
    """Masses and spring stiffnesses of one unit cell.

    ``stiffnesses_nnn``, when given, adds a ring of springs from each
    mass to its second neighbor.
    """

    masses: np.ndarray
    stiffnesses: np.ndarray
    stiffnesses_nnn: Optional[np.ndarray] = None

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        k = np.asarray(self.stiffnesses, dtype=float)
        if m.ndim != 1 or k.shape != m.shape:
            raise ValueError("masses and stiffnesses must be 1-d, same length")
        if np.any(m <= 0) or np.any(k <= 0):
            raise ValueError("masses and stiffnesses must be strictly positive")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "stiffnesses", k)
        if self.stiffnesses_nnn is not None:
            c = np.asarray(self.stiffnesses_nnn, dtype=float)
            if c.shape != m.shape or np.any(c <= 0):
                raise ValueError("NNN stiffnesses must be positive, length n_dof")
            if m.size < 3:
                raise ValueError("NNN springs need n_dof >= 3")
            object.__setattr__(self, "stiffnesses_nnn", c)

    @property
    def n_dof(self) -> int:
        return self.masses.size

    @property
    def n_params(self) -> int:
        return (3 if self.stiffnesses_nnn is not None else 2) * self.n_dof


def _springs(params: ChainParams) -> List[Tuple[int, int, int, float]]:
    """Springs as (site_a, site_b, cell_shift, stiffness).

    A shifted spring connects site_a of one cell to site_b of the next,
    contributing the Bloch phase exp(+i kappa) at K[a, b].
    """
    n = params.n_dof
    springs = []
    for i, k in enumerate(params.stiffnesses):
        springs.append((i, (i + 1) % n, 1 if i == n - 1 else 0, float(k)))
    if params.stiffnesses_nnn is not None:
        for i, c in enumerate(params.stiffnesses_nnn):
            springs.append((i, (i + 2) % n, 1 if i + 2 >= n else 0, float(c)))
    return springs


@dataclass(frozen=True)
class DispersionResult:
    """Angular frequencies over a wavenumber grid, rows sorted ascending."""

    kappa_grid: np.ndarray
    bands: np.ndarray  # n_kappa x n_dof


@dataclass(frozen=True)
class BandGapValue:
    """Signed gap between bands j and j+1, with the grid extremizers."""

    gap: float
    upper_min: float
    lower_max: float
    kappa_upper: float
    kappa_lower: float
    band_index_j: int


def default_kappa_grid(n_kappa: int = DEFAULT_N_KAPPA) -> np.ndarray:
    return np.linspace(0.0, np.pi, n_kappa)


def assemble_bloch_matrices(params: ChainParams, kappa: float):
    """Bloch-reduced stiffness K(kappa) (Hermitian) and mass matrix (diagonal)."""
    n = params.n_dof
    K = np.zeros((n, n), dtype=complex)
    for a, b, shift, k in _springs(params):
        phase = np.exp(1j * kappa) if shift else 1.0
        K[a, a] += k
        K[b, b] += k
        K[a, b] += -k * phase
        K[b, a] += -k * np.conj(phase)
    M = np.diag(params.masses)
    return K, M


def _bloch_stack(params: ChainParams, kappa_grid: np.ndarray) -> np.ndarray:
    """Mass-normalized Hermitian matrices D^-1/2 K(kappa) D^-1/2, stacked."""
    n = params.n_dof
    A = np.zeros((kappa_grid.size, n, n), dtype=complex)
    phase = np.exp(1j * kappa_grid)
    for a, b, shift, k in _springs(params):
        ph = phase if shift else 1.0
        A[:, a, a] += k
        A[:, b, b] += k
        A[:, a, b] += -k * ph
        A[:, b, a] += -k * np.conj(ph)
    inv_sqrt_m = 1.0 / np.sqrt(params.masses)
    return A * np.outer(inv_sqrt_m, inv_sqrt_m)


def _check_grid(kappa_grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(kappa_grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("kappa grid must be nonempty and strictly increasing")
    if grid[0] != 0.0 or abs(grid[-1] - np.pi) > 1e-12:
        raise ValueError("kappa grid must span [0, pi] including endpoints")
    return grid


def dispersion_bands(params: ChainParams,
                     kappa_grid: Optional[np.ndarray] = None) -> DispersionResult:
    """Floquet-Bloch dispersion bands omega_j(kappa), sorted per wavenumber."""
    grid = default_kappa_grid() if kappa_grid is None else _check_grid(kappa_grid)
    lam = np.linalg.eigvalsh(_bloch_stack(params, grid))
    return DispersionResult(grid, np.sqrt(np.maximum(lam, 0.0)))


def band_gap(params: ChainParams, j: int,
             kappa_grid: Optional[np.ndarray] = None) -> BandGapValue:
    """Signed gap between bands j+1 and j (1-based), over the grid."""
    if not 1 <= j <= params.n_dof - 1:
        raise ValueError(f"band index must be in 1..{params.n_dof - 1}")
    disp = dispersion_bands(params, kappa_grid)
    upper = disp.bands[:, j]       # band j+1, 0-based column j
    lower = disp.bands[:, j - 1]
    i_up = int(np.argmin(upper))
    i_lo = int(np.argmax(lower))
    return BandGapValue(gap=float(upper[i_up] - lower[i_lo]),
                        upper_min=float(upper[i_up]),
                        lower_max=float(lower[i_lo]),
                        kappa_upper=float(disp.kappa_grid[i_up]),
                        kappa_lower=float(disp.kappa_grid[i_lo]),
                        band_index_j=j)


def _eigenpair(params: ChainParams, kappa: float, band: int):
    """Eigenvalue and mass-normalized eigenvector of band ``band``
    (0-based) at ``kappa``; raises on near-degeneracy."""
    A = _bloch_stack(params, np.array([kappa]))[0]
    lam, W = np.linalg.eigh(A)
    lam_b = lam[band]
    others = np.delete(lam, band)
    scale = max(abs(lam_b), float(np.max(np.abs(lam))), 1e-30)
    if np.min(np.abs(others - lam_b)) / scale <= DEGENERACY_TOL:
        raise DegeneracyError(
            f"degenerate eigenvalue at kappa={kappa:.6g}, band {band + 1}",
            kappa)
    v = W[:, band] / np.sqrt(params.masses)  # v^H M v = 1
    return float(lam_b), v


def _omega_sensitivity(params: ChainParams, kappa: float, band: int) -> np.ndarray:
    """d omega / d(params) at one (kappa, band) from the eigenvector of a
    simple eigenvalue, without differentiating the eigenvector."""
    lam, v = _eigenpair(params, kappa, band)
    omega = np.sqrt(max(lam, 0.0))
    if omega == 0.0:
        raise DegeneracyError(
            f"zero frequency at kappa={kappa:.6g}, band {band + 1}", kappa)
    n = params.n_dof
    av = np.abs(v) ** 2
    dlam = np.empty(params.n_params)
    dlam[:n] = -lam * av
    for s, (a, b, shift, _k) in enumerate(_springs(params)):
        phase = np.exp(1j * kappa) if shift else 1.0
        dlam[n + s] = av[a] + av[b] - 2.0 * np.real(np.conj(v[a]) * v[b] * phase)
    return dlam / (2.0 * omega)


def band_gap_gradient(params: ChainParams, j: int,
                      kappa_grid: Optional[np.ndarray] = None) -> np.ndarray:
    """Gradient of the signed gap w.r.t. (masses, stiffnesses[, NNN]).

    Differentiates the band-edge eigenvalues at the grid extremizers;
    requires both edge eigenvalues to be simple and nonzero.
    """
    edges = band_gap(params, j, kappa_grid)
    sens_up = _omega_sensitivity(params, edges.kappa_upper, j)
    sens_lo = _omega_sensitivity(params, edges.kappa_lower, j - 1)
    return sens_up - sens_lo


def make_chain_problem(n_dof: int = 4,
                       box_lower: float = 0.5,
                       box_upper: float = 5.0,
                       mass_budget: float = 12.0,
                       j: int = 2,
                       n_kappa: int = DEFAULT_N_KAPPA,
                       nnn: bool = False) -> ProblemDefinition:
    """Band-gap maximization problem for the chain, in unit-cube coordinates.

    Parameters are (m_1..m_n, k_1..k_n) and, with ``nnn``, also the
    next-nearest-neighbor stiffnesses (c_1..c_n); each is boxed to
    [box_lower, box_upper] and total mass is budgeted by one linear
    constraint.
    """
    if n_dof < 2:
        raise ValueError("n_dof must be >= 2")
    d = (3 if nnn else 2) * n_dof
    box = PhysicalBox(np.full(d, box_lower), np.full(d, box_upper))
    grid = default_kappa_grid(n_kappa)
    mass_coeffs = np.concatenate([np.ones(n_dof), np.zeros(d - n_dof)])
    budget = physical_linear_constraint(mass_coeffs, mass_budget, box)

    def _params(u: np.ndarray) -> ChainParams:
        x = from_unit_cube(u, box)
        return ChainParams(x[:n_dof], x[n_dof:2 * n_dof],
                           x[2 * n_dof:] if nnn else None)

    def objective(u: np.ndarray) -> float:
        return band_gap(_params(u), j, grid).gap

    def gradient(u: np.ndarray) -> np.ndarray:
        return band_gap_gradient(_params(u), j, grid) * box.widths

    return ProblemDefinition(dimension=d, box=box, objective=objective,
                             analytic_gradient=gradient,
                             constraints=(budget,),
                             label=f"chain{n_dof}{'nnn' if nnn else ''}_j{j}")


def _default_ridge_shape(p: int):
    """Concave quadratic in the projected coordinates, with a linear tilt."""
    def shape(t: np.ndarray) -> float:
        return float(-np.sum(t ** 2) + np.sum(t))

    def shape_grad(t: np.ndarray) -> np.ndarray:
        return -2.0 * t + 1.0

    return shape, shape_grad


def make_ridge_problem(d: int, directions: np.ndarray,
                       shape: Optional[Callable[[np.ndarray], float]] = None,
                       shape_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                       label: str = "") -> ProblemDefinition:
    """Objective depending only on p orthonormal directions.

    Its gradient field lies exactly in span{directions}, so the rank
    recovered by PCA is known in advance.
    """
    A = np.asarray(directions, dtype=float)
    if A.ndim != 2 or A.shape[1] != d:
        raise ValueError("directions must be a p x d array")
    if np.max(np.abs(A @ A.T - np.eye(A.shape[0]))) > 1e-10:
        raise ValueError("directions must be orthonormal")
    if shape is None:
        shape, shape_grad = _default_ridge_shape(A.shape[0])
    if shape_grad is None:
        raise ValueError("shape_grad is required when shape is given")
    box = PhysicalBox(np.zeros(d), np.ones(d))

    def objective(u: np.ndarray) -> float:
        return float(shape(A @ u))

    def gradient(u: np.ndarray) -> np.ndarray:
        return A.T @ shape_grad(A @ u)

    return ProblemDefinition(dimension=d, box=box, objective=objective,
                             analytic_gradient=gradient,
                             label=label or f"ridge_p{A.shape[0]}")


def random_orthonormal_directions(d: int, p: int, seed: int = 0) -> np.ndarray:
    """p orthonormal d-vectors from a seeded QR factorization."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, p)))
    return Q.T
