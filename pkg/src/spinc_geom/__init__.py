"""Numerical verification of spin^c characterizations of surfaces in E(kappa, tau)
and of real hypersurfaces in complex space forms."""

__version__ = "0.1.0"

from .catalog import ParametricChart, builtin, builtin_catalog, load_catalog
from .clifford import CliffordRep, clifford_mul, clifford_rep, conjugate, two_form_action, volume_action
from .correspondence import SisterParams, solve_sister, verify_sister
from .errors import (
    ChartError,
    InfeasibleSisterError,
    PreconditionError,
    SpincGeomError,
    StencilError,
    ValidationError,
)
from .expr import ParseError, evaluate, parse_expr
from .hypersurfaces_mc2 import (
    commutator_coefficients,
    gauss_codazzi_residuals_csf,
    gauss_iff_codazzi_probe,
    restrict_parallel_residual,
    sasaki_instance,
    sasaki_shape,
)
from .models import ModelSpec, canonical_frame, chart_frame
from .spin_connection import verify_killing
from .spinor_restriction import restricted_spinor_field
from .surfaces_ekt import Grid, check_compatibility_ekt, induce_surface_data
