"""Spherical centroid bodies computed through the gnomonic chart."""
from .errors import *  # noqa: F401,F403
from .sphere import (Rotation, SphericalCap, as_unit, axis_rotation, random_rotation, reflect,
                     rotate, spherical_distance, spherical_hausdorff)
from .gnomonic import TangentFrame, WeightedDensity, project, radial_primitive, unproject
from .convex import Ball, DirectionGrid, EuclidBody, HalfSpace, convex_hull, polar, radial, support
from .centroids import c_f_discrete, c_mu_region, c_s_discrete, c_s_region
from .bodies import (SphericalBody, cap_body, gamma_f_discrete, gamma_mu_body, gamma_mu_support,
                     gamma_s, gamma_se_discrete, gamma_tilde_se, spherical_polar)
from .measures import (MatchedBall, MatchedCap, match_ball, match_cap, measure_chart_body,
                       sigma_body, tau_body)

__version__ = "0.1.0"
