"""Numerical cross-verification of trace formulas on the circle, the
sphere, hyperbolic cylinders and compact genus-2 hyperbolic surfaces."""

from .geom import HPoint, Isometry, IsometryClass, apply_isometry, classify, compose, distance, invert, length_of
from .greens import (green, identity_term, identity_term_from_g, legendre_q,
                     point_pair_k, regularized_green_diagonal,
                     selberg_transform_check)
from .group import (ConjugacyClass, GroupSpec, LengthSpectrum, Word,
                    enumerate_classes, enumerate_classes_by_words, load_group,
                    length_spectrum, primitive_decomposition)
from .quadrature import QuadratureConfig
from .testfn import (TestFunctionPair, TransformProfile, counting_family,
                     fourier_transform, gaussian_family, phi_from_q, q_from_g,
                     q_from_phi, resolvent_family, smooth_bump,
                     verify_hypotheses)
from .trace import (CountingResult, SurfaceModel, TraceReport, WeylReport,
                    circle_check, cot_identity_check, cylinder_check,
                    geodesic_counting_check, heat_weyl_report, sphere_check,
                    surface_geometric_side, surface_model)
from .zeta import (ScatteringPole, ZetaValue, log_derivative_check, n_cylinder,
                   n_cylinder_series, n_gamma, scattering_poles,
                   scattering_residue_contour, zeta_euler_product)

__version__ = "0.1.0"
