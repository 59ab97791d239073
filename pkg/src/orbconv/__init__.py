"""Convolutions of orbital measures on rank-one symmetric spaces of noncompact type.

The package evaluates spherical functions and the Plancherel weight, decides
whether the density of ``nu_{a_1} * ... * nu_{a_r}`` is square integrable,
inverts the spherical transform to obtain the density and its derivatives,
and checks all of it against Monte Carlo sampling in explicit matrix groups.
"""

from .cartan import (
    FAMILIES,
    RestrictedRoot,
    SpaceDescriptor,
    build_space,
    rho,
    root_separation_constant,
    weyl_group_order,
)
from .errors import (
    InvariantViolation,
    OrbconvError,
    QuadratureBudgetError,
    RealizationError,
    SingularPointError,
    ThresholdError,
    UnsupportedSpaceError,
)
from .groups import (
    CompactElement,
    GroupElement,
    Realization,
    cartan,
    cartan_radial,
    iwasawa,
    iwasawa_H,
    radial_element,
    radial_of_product,
    realization_for,
    sample_K,
)
from .montecarlo import RadialHistogram, compare, empirical_transform, histogram, sample_convolution
from .products import (
    ProductConvolution,
    ProductSpace,
    product_density_at,
    product_l2,
    product_profile,
    product_regularity_report,
)
from .spherical import (
    DEFAULT_CONFIG,
    PlancherelWeight,
    QuadratureConfig,
    SphericalValue,
    c_function,
    decay_envelope,
    phi_values,
    plancherel_weight,
    plancherel_weights,
    radial_jacobian,
    spherical_derivative,
    spherical_fn,
    spherical_values,
)
from .transform import (
    ConvergenceReport,
    DensityProfile,
    OrbitalConvolution,
    RegularityReport,
    density_at,
    density_derivative,
    density_profile,
    l2_norm_sq,
    real_space_l2,
    regularity_report,
    transform_of_convolution,
)

__version__ = "0.1.0"
