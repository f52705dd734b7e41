"""Numerical laboratory for O(m)xO(n)-invariant minimal hypersurfaces.

The package studies hypersurfaces asymptotic to the Lawson cone
C_{m,n} = {(n-1)|x|^2 = (m-1)|y|^2} in R^m x R^n.  It computes the
spectrum of the link Jacobi operator and the indicial roots at infinity
(:mod:`cjlab.spectra`), integrates the arc-length profile curve of the
invariant hypersurface together with its geometric Jacobi fields
(:mod:`cjlab.profile`), solves the reduced Jacobi equation
psi'' + alpha psi' + beta psi = f through a log-radial change of
variables and variation of parameters (:mod:`cjlab.jacobi`), evaluates
the explicit radial exterior minimal graph (:mod:`cjlab.plateau`), and
estimates decay exponents of the computed fields (:mod:`cjlab.decay`).
"""

from cjlab.spectra import (
    ConeSpec,
    SpectralData,
    SolvabilityWindow,
    link_radii,
    link_eigenvalues,
    indicial_data,
    predicted_nu_bar,
    solvability_window,
)
from cjlab.profile import (
    ShootingConfig,
    ProfileCurve,
    GeometryTrace,
    IntegrationFailure,
    integrate_profile,
    geometry_trace,
    cone_ray,
    jacobi_field_dilation,
    jacobi_field_translation,
    jacobi_field_rotation,
    cone_crossings,
)
from cjlab.jacobi import (
    EmdenFowlerData,
    FundamentalPair,
    JacobiSolution,
    emden_fowler_transform,
    left_fundamental_pair,
    solve_jacobi,
    near_origin_behavior,
    decay_diagnostics,
    weighted_sup_norm,
)
from cjlab.plateau import (
    RadialGraph,
    plateau_profile,
    alpha_of_R,
    plateau_zeta0,
    minimal_graph_residual,
)
from cjlab.decay import DecayFit, fit_power_law, classify_against_indicial

__version__ = "0.1.0"

__all__ = [
    "ConeSpec",
    "SpectralData",
    "SolvabilityWindow",
    "link_radii",
    "link_eigenvalues",
    "indicial_data",
    "predicted_nu_bar",
    "solvability_window",
    "ShootingConfig",
    "ProfileCurve",
    "GeometryTrace",
    "IntegrationFailure",
    "integrate_profile",
    "geometry_trace",
    "cone_ray",
    "jacobi_field_dilation",
    "jacobi_field_translation",
    "jacobi_field_rotation",
    "cone_crossings",
    "EmdenFowlerData",
    "FundamentalPair",
    "JacobiSolution",
    "emden_fowler_transform",
    "left_fundamental_pair",
    "solve_jacobi",
    "near_origin_behavior",
    "decay_diagnostics",
    "weighted_sup_norm",
    "RadialGraph",
    "plateau_profile",
    "alpha_of_R",
    "plateau_zeta0",
    "minimal_graph_residual",
    "DecayFit",
    "fit_power_law",
    "classify_against_indicial",
    "__version__",
]
