"""PCA-accelerated gradient-based band-gap optimization.

Samples admissible metamaterial parameters with a Halton sequence,
fits centered PCA to the sampled gradient field, and runs multi-start
sequential linear programming whose gradients come from cheap
directional derivatives in the identified low-dimensional subspace.
"""
from .problem import (ADMISSIBILITY_TOL, LinearConstraint, PhysicalBox,
                      ProblemDefinition, evaluate_constraints, from_unit_cube,
                      is_admissible, physical_linear_constraint, to_unit_cube)
from .sampling import TrainingSet, generate_admissible, halton_point
from .lattice import (BandGapValue, ChainParams, DegeneracyError,
                      DispersionResult, assemble_bloch_matrices, band_gap,
                      band_gap_gradient, default_kappa_grid, dispersion_bands,
                      make_chain_problem, make_ridge_problem,
                      random_orthonormal_directions)
from .pca import (GradientField, PrincipalSubspace, SampleSizeResult,
                  compute_gradient_field, fit_pca, msre_by_reconstruction,
                  select_p, select_sample_size, stable_sample_size)
from .subspace import SubspaceBasis, approx_gradient, build_basis, project
from .simplex import LpSolution, solve_lp
from .slp import (IterationRecord, MultiStartResult, OptimizationTrace,
                  TrustRegionConfig, multi_start, slp_run, slp_step)
from .pipeline import (PipelineConfig, build_problem, config_from_dict,
                       load_config, run_pipeline)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
