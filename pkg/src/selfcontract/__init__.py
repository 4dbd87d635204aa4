"""Self-contracted curves: predicates, length bounds, proximal traces and foliation orbits."""

from .curves import (DiscreteCurve, PredicateVerdict, ToleranceConfig, arc_length_reparam,
                     check_halfspace_property, is_self_contracted, is_self_expanded, length,
                     reverse, secant_cone_check, tail_width_profile)
from .errors import InputError, PreconditionError, SolverError
from .foliation import (ApproximationResult, FoliationOrbit, decreasing_level_check,
                        gradient_flow_curve, polygonal_approximation, sublevel_projection_orbit)
from .geomcore import (Ball, Box, PointCloud, SphereSampler, SupportOracle, cap_fraction,
                       diameter, directional_width, hausdorff, mean_width, support)
from .prox import (ConvexFunction, ProxSchedule, ProxTrace, max_affine, norm_scaled,
                   paper_piecewise, prox_step, quadratic, run_prox, verify_convergence_bound,
                   verify_monotone_distances, verify_trace)
from .spherelemmas import (bound_constants, greedy_saturated_family, hemisphere_construction,
                           hemisphere_direction, verify_length_bound, verify_width_monotonicity)

__version__ = "0.1.0"
