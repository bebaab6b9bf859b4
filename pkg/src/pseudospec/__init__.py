"""Spectral computations for flat tori and AdS^3 quotients.

Flat side: eigenvalues of the Laplacian on deformed tori, their
(in)stability under deformation and the integer/irrational dichotomy of the
underlying quadratic form. Anti-de Sitter side: Cartan projections,
properness, sharpness constants and the stable eigenvalue formula.
"""

__version__ = "0.1.0"

import types as _types

from .errors import (
    BudgetError,
    DimensionError,
    InputError,
    NoDataError,
    PseudospecError,
    SamplingError,
    SingularityError,
    WindowTooSmallError,
)
from .quadform import (
    QuadraticForm,
    Signature,
    deformed_form,
    evaluate,
    integer_proportionality,
    signature,
    standard_form,
)
from .flat_spectra import (
    Density,
    DeformationParameter,
    SpectrumWindow,
    density_diagnostics,
    eigenvalue_of,
    enumerate_spectrum,
    stability_scan,
    verify_eigenfunction,
)
from .cartan import (
    AmbientGroup,
    CartanVector,
    ConeSubset,
    Verdict,
    cartan_projection,
    distance_to_cone,
    estimate_sharpness,
    properness_check,
)
from .ads3 import (
    GroupPresentation,
    enumerate_ball,
    orbit_count,
    poincare_partial_sums,
    stability_experiment,
    stable_spectrum,
    standard_presentation,
)

__all__ = [n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _types.ModuleType)]
