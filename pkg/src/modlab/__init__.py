"""Numerical hyperbolic geometry, discrete moduli of curve families and dilatation checks."""

from .curves import (Curve, LengthFunction, derivative_check, hyp_length, integration_matrix,
                     length_function, line_integral, normal_representation,
                     transfer_length_function)
from .exceptions import (DegenerateError, DomainError, GroupMismatchError,
                         InadmissibleDensityError, NeighborhoodError, OutOfRegionError)
from .fields import DensityField, ScalarField
from .hyperbolic import (GridRegion, HyperbolicBall, comparison_constant, hyp_area,
                         hyp_distance, lower_bound_check, pseudo_distance)
from .mapping import (DilatationField, MapSample, PoletskyReport, dilatation, fmo_statistic,
                      map_from_config, poletsky_rhs, poletsky_verify)
from .mobius import (GroupPresentation, MobiusTransform, Orbit, apply, bisector_half_plane_contains,
                     compose, enumerate_orbit, inverse)
from .modulus import (CurveFamily, ModulusResult, admissibility_check, annulus_extremal_density,
                      annulus_radial_family, annulus_region, modulus, rectangle_family,
                      ring_modulus, solve_dual, upper_bound_via_density)
from .quotient import (DirichletPolygon, SurfacePoint, dirichlet_contains, min_orbit_separation,
                       normal_neighborhood_radius, project, quotient_distance,
                       quotient_distance_info)

__version__ = "0.1.0"
