"""padelab: arbitrary-precision rational approximation with free poles.

Core surface: precision-aware polynomial/series arithmetic (numkernel),
model functions with fixed branches (functions), Pade and Hermite-Pade
solvers (pade, hermite), Chebyshev rational approximants and bridge
identities (chebpade), root extraction and measure comparison (roots),
logarithmic equilibrium problems (equilibrium), and the experiment CLI
(expcli).
"""

from .numkernel import (BigPolynomial, LaurentTail, PrecisionCtx,
                        cheb_product, contour_integrate, convert_basis,
                        default_ctx, laurent_mul, nullspace_vector)
from .functions import (ClassL, DomainError, FunctionSpec, InvSqrt,
                        MarkovArcsine, NikishinSecond, Shifted, cheb_coeffs,
                        evaluate, laurent_coeffs, spec_from_dict,
                        spec_from_json)
from .pade import (InterpolationTable, PadePair, check_contour_orthogonality,
                   check_power_orthogonality, multipoint_pade,
                   pade_at_infinity)
from .hermite import HPTriple, hp_remainder_coeffs, hp_type1
from .chebpade import (BridgeReport, ChebApproximant, bridge_classL,
                       bridge_prop1, frobenius_pade, weighted_chebpade)
from .roots import (DiscreteMeasure, SegmentZeros, ZeroSet, counting_measure,
                    find_roots, potential_discrepancy, probe_circle,
                    trimmed_hausdorff, zeros_on_segment)
from .equilibrium import (EquilibriumProblem, EquilibriumSolution,
                          energy_and_potentials, solve_scalar, solve_vector)

__version__ = "0.1.0"
