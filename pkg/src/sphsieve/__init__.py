"""Concentration and large-sieve estimates for band-limited spherical
harmonics expansions: special-function primitives, the extremal constants
of the sphere concentration problem, a verified large sieve inequality for
separated point sets, and an alternating-projections recovery demo.
"""

from .errors import (
    BoundViolationError,
    ConvergenceError,
    OverlapError,
    ResolutionError,
    SeparationError,
)
from .specfun import (
    BesselConstants,
    LegendreSequence,
    all_zeros,
    assoc_legendre,
    bessel_constants,
    bessel_j0,
    bessel_j1,
    largest_zero,
    legendre_all,
    legendre_deriv,
    mehler_heine_gap,
)
from .quadrature import QuadratureRule, gauss_rule, integrate_tail, pl_cross_tail, pl_squared_tail
from .sphharm import (
    NORTH_POLE,
    HarmonicExpansion,
    SphereGrid,
    UnitVector,
    addition_theorem_residual,
    analyze,
    parseval_norm,
    sph_harm_matrix,
    synthesize,
    synthesize_grid,
    ylm,
)
from .zonal import (
    ZonalFilter,
    convolve,
    convolve_direct,
    extremal_objective_p2,
    filter_norm2_sq,
    g_delta,
    zonal_coeff,
    zonal_coeffs,
)
from .domains import CapUnionDomain, SphericalCap, fibonacci_lattice, lens_area
from .concentration import (
    ConcentrationReport,
    b_constant,
    concentration_matrix,
    lp_bound,
    max_rayleigh_quotient,
    nyquist_density,
    sample_lp_ratio,
    top_eigenvalue,
    verify_bound,
)
from .sieve import (
    SeparatedPointSet,
    SieveReport,
    cap_count_bound,
    generate_separated,
    rmax_lower_bound,
    sieve_check,
    sieve_constant,
    tightness_ratio_theta,
)
from .recovery import RecoveryRun, inpaint, mask

__version__ = "0.1.0"
