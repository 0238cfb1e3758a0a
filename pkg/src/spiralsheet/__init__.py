"""Self-similar logarithmic spiral vortex sheets.

Closed-form velocity fields and potentials for one sheet and for finite
families of sheets, the conformal strip coordinates they live in, the
matching conditions fixing the self-similarity exponent and sheet
strengths, and a battery of numerical residual checks.
"""

from . import _kernels
from .conformal import (
    Membership,
    StripPoint,
    map_to_exterior,
    map_to_strip,
    reflect_shift,
    reflect_shift_iter,
    strip_membership,
    strip_width,
)
from .errors import (
    OnCutLine,
    OnSpiral,
    OriginError,
    ProbeTooClose,
    ResonantParameter,
    SingularSystem,
    SpiralSheetError,
)
from .family import (
    CouplingMatrix,
    FamilySolution,
    StripCoefficients,
    boundary_residuals,
    coupling_matrix,
    family_matching_residual,
    family_potential,
    family_strip_potential,
    family_strip_velocity,
    family_velocity,
    solve_family_matching,
    strip_coefficients,
)
from .geometry import (
    PolarPoint,
    SpiralFamily,
    SpiralParams,
    circulation,
    sheet_density,
    sheet_distance,
    spiral_point,
    tangent_normal,
    winding_number,
    winding_number_offset,
)
from .single_spiral import (
    complex_potential,
    h_function,
    matching_residual,
    pressure_matching_residual,
    profile_velocity,
    resonance_constant,
    self_similar_velocity,
    solve_matching,
    spectral_constant,
    strip_potential,
    strip_velocity,
)
from .verify import (
    JumpProbe,
    ResidualReport,
    TelescopeResult,
    decay_check,
    default_suite,
    fd_derivative,
    jump_probe,
    perturbation_demo,
    telescoping_check,
)

__version__ = "0.1.0"


def kernel_backend():
    """Name of the active kernel backend: "c" or "python"."""
    return _kernels.BACKEND
