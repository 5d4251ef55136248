"""Numerical toolkit for densities, quantitative strata, and covering bounds
of p-subharmonic scalar fields."""

from .covering import (DecompositionTrace, StratumReport, decomposition_cover,
                       minkowski_bound_check, tube_volume, vitali_cover)
from .density import DensityEstimate, HighDensitySet, density, high_density_set
from .energy import (FRigidityReport, GBoundReport, GEnergyEstimate, GrassmannianFamily,
                     GRigidityReport, f_energy_profile, f_rigidity_probe, g_energy,
                     g_energy_bound_check, g_energy_profile, g_rigidity_probe,
                     normalize_for_monotonicity)
from .errors import (ConfigError, DomainError, InsufficientDataError,
                     InsufficientSamplingError, MemoryGuardError, ProfileRangeError,
                     ResolutionError, RieszStratError, ScaleError,
                     UnsupportedCharacteristicError)
from .examples import (grid_sample, harmonic_plus_kernel, log_modulus, plane_kernel,
                       riesz_sum)
from .fields import (Ball, PlaneFrame, ScalarField, available_radius, evaluate,
                     from_grid, grid_from_csv, grid_to_csv, l1_distance, l1_norm,
                     p_flow, restrict, span, zero_field)
from .grassmann import complex_line_frames, complex_structure, haar_frames, sobol_frames
from .homogeneity import (ConeSplittingReport, HomogeneityReport, HomogeneousModel,
                          bulk_defect_bounds, bulk_zero_upper, cone_splitting_check,
                          homogeneity_defect, stratum_set)
from .kernels import (RadialProfile, kp_convexity_defect, kp_quotient, riesz_kernel,
                      riesz_kernel_derivative)
from .means import (laplacian_mass, left_quotient, profile, spherical_max,
                    spherical_mean, volume_mean)
from .quadrature import ball_nodes, sphere_nodes, unit_ball_volume

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
