"""ghostkin: kinetic toolkit for temperature-driven slow flows.

Subpackages follow the pipeline: velocity-space discretization, linearized
collision operator algebra, half-space boundary layers, the ghost-effect
fluid solver on a periodic channel, expansion assembly with boundary
matching, boundary-chart geometry, and remainder diagnostics.
"""

from .velocity import (ConfigurationError, DomainError, HermiteBasis,
                       HydroCoefficients, MaxwellianParams, Poly,
                       VelocityFunction, VelocityGrid, build_grid, inner,
                       maxwellian_eval, moment, project_null,
                       wall_maxwellian_params)
from .collision import (CollisionModel, GammaTensor, HardSphere,
                        LinearizedBGK, OperatorMatrix, SpecialSolutions,
                        assemble_operator, bgk_kappa, bgk_lambda, build_gamma,
                        collision_frequency, compute_k1, compute_k2,
                        gamma_apply, quasi_inverse, special_solutions,
                        verify_identities)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
