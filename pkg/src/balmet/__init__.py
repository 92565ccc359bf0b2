"""Balanced metrics on holomorphic vector bundles over P1 and P2.

The package builds quadrature schemes for the Fubini-Study volume, evaluates
global-section bases of a family of built-in bundles, and iterates the
averaging map on Gram matrices whose fixed points are the balanced metrics,
together with the energy functionals, diagnostics, and stability checks that
make the iteration's behavior verifiable.
"""

__version__ = "0.1.0"

from .core import (
    FiberMetricField,
    GeodesicSpec,
    HermitianForm,
    bergman,
    energy_i,
    fs,
    geodesic,
    geodesic_spec,
    hilb,
    normalize,
    t_operator,
    trace_identity_residual,
    z_functional,
    z_tilde,
)
from .errors import (
    BalmetError,
    ConditioningError,
    ConstructionError,
    DegenerateDensityError,
    InvalidInputError,
    NumericalDomainError,
)
from .geometry import QuadratureScheme, build_quadrature, integrate
from .gieseker import GiesekerPoint, gieseker_point, kempf_ness_profile, wedge_power_matrix
from .iteration import (
    Classification,
    IterationTrace,
    RunResult,
    bergman_sup_residual,
    boundedness_radius,
    classify,
    random_gram,
    run,
)
from .oracle import (
    MomentTable,
    balanced_gram_line_p1,
    balanced_gram_line_p2,
    load_moment_corpus,
    monomial_moment_p1,
    monomial_moment_p2,
)
from .sections import SectionBasis, background_metric, build_sections, parse_bundle_id

__all__ = [
    "__version__",
    "BalmetError",
    "InvalidInputError",
    "NumericalDomainError",
    "ConditioningError",
    "DegenerateDensityError",
    "ConstructionError",
    "QuadratureScheme",
    "build_quadrature",
    "integrate",
    "SectionBasis",
    "build_sections",
    "background_metric",
    "parse_bundle_id",
    "HermitianForm",
    "FiberMetricField",
    "GeodesicSpec",
    "fs",
    "hilb",
    "t_operator",
    "bergman",
    "energy_i",
    "z_functional",
    "z_tilde",
    "normalize",
    "geodesic",
    "geodesic_spec",
    "trace_identity_residual",
    "Classification",
    "IterationTrace",
    "RunResult",
    "run",
    "classify",
    "boundedness_radius",
    "bergman_sup_residual",
    "random_gram",
    "GiesekerPoint",
    "gieseker_point",
    "kempf_ness_profile",
    "wedge_power_matrix",
    "MomentTable",
    "monomial_moment_p1",
    "monomial_moment_p2",
    "balanced_gram_line_p1",
    "balanced_gram_line_p2",
    "load_moment_corpus",
]
