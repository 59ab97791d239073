"""Products of rank-one symmetric spaces.

On ``G_1/K_1 x ... x G_s/K_s`` an orbital convolution with generators
``a_i = (a_i^1, ..., a_i^s)`` is the tensor product of the factor
convolutions, so its density, mass and ``L^2`` norm factor over the
components.  Thresholds use the largest factor dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cartan import SpaceDescriptor
from .errors import ThresholdError
from .spherical import DEFAULT_CONFIG, QuadratureConfig
from .transform import (
    DensityProfile,
    OrbitalConvolution,
    density_at,
    density_profile,
    l2_norm_sq,
)

__all__ = [
    "ProductSpace",
    "ProductConvolution",
    "product_density_at",
    "product_profile",
    "product_l2",
    "product_regularity_report",
]


@dataclass(frozen=True)
class ProductSpace:
    """Finite product of irreducible rank-one factors."""

    factors: tuple[SpaceDescriptor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a product needs at least one factor")
        for f in self.factors:
            if f.rank != 1:
                raise ValueError(f"factor {f.name} is not rank one")

    @property
    def s(self) -> int:
        return len(self.factors)

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def max_dim(self) -> int:
        return max(f.dim for f in self.factors)


@dataclass(frozen=True)
class ProductConvolution:
    """Generators ``a_i = (t_i^1, ..., t_i^s)`` for ``i = 1..r``.

    ``generators[i][j]`` is the radial coordinate of ``a_i`` in factor ``j``;
    every entry must be strictly positive.
    """

    space: ProductSpace
    generators: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        gens = tuple(tuple(float(x) for x in row) for row in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("need r >= 1 generators")
        for row in gens:
            if len(row) != self.space.s:
                raise ValueError(f"each generator needs {self.space.s} components")
            if any(not np.isfinite(x) or x <= 0 for x in row):
                raise ValueError("every component must lie strictly inside its chamber")

    @property
    def r(self) -> int:
        return len(self.generators)

    def factor(self, j: int) -> OrbitalConvolution:
        """Convolution ``nu_{a_1^j} * ... * nu_{a_r^j}`` on factor ``j``."""
        return OrbitalConvolution(self.space.factors[j], tuple(row[j] for row in self.generators))

    def factors(self) -> list[OrbitalConvolution]:
        return [self.factor(j) for j in range(self.space.s)]


def _check(pconv: ProductConvolution):
    for j, f in enumerate(pconv.space.factors):
        if pconv.r < f.dim + 1:
            raise ThresholdError(
                f"factor {j} ({f.name}) needs r >= {f.dim + 1}, got r = {pconv.r}")


def product_density_at(pconv: ProductConvolution, t_vector,
                       quad: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``prod_j rho^j(t_j)`` at the radial point ``(t_1, ..., t_s)``."""
    _check(pconv)
    t_vector = np.ravel(np.asarray(t_vector, dtype=float))
    if t_vector.size != pconv.space.s:
        raise ValueError(f"need {pconv.space.s} radial coordinates")
    out = 1.0
    for conv, t in zip(pconv.factors(), t_vector):
        out *= density_at(conv, float(t), quad)
    return float(out)


def product_profile(pconv: ProductConvolution, quad: QuadratureConfig = DEFAULT_CONFIG,
                    **kwargs) -> dict:
    """Per-factor profiles with the product mass.

    The joint density on the product grid is the outer product of the factor
    values; the mass of the product is the product of factor masses.
    """
    _check(pconv)
    profiles: list[DensityProfile] = [density_profile(c, quad, **kwargs) for c in pconv.factors()]
    return {"factors": profiles, "mass": _joint_sum(profiles, power=1)}


def _joint_sum(profiles: Sequence[DensityProfile], power: int) -> float:
    """``sum over the tensor grid of w J (prod_j rho^j)^power``."""
    joint = np.ones(1)
    for p in profiles:
        term = p.weights * p.jacobian * p.values ** power
        joint = np.multiply.outer(joint, term).ravel()
    return float(joint.sum())


def product_l2(pconv: ProductConvolution, quad: QuadratureConfig = DEFAULT_CONFIG,
               profiles: Sequence[DensityProfile] | None = None) -> dict:
    """Spectral and real-space ``L^2`` norms of the product density.

    The real-space value integrates the joint density ``prod_j rho^j`` squared
    over the tensor grid of the factor profiles; the spectral value is the
    product of the factor Plancherel norms.
    """
    _check(pconv)
    reports = [l2_norm_sq(c, quad) for c in pconv.factors()]
    if profiles is None:
        profiles = [density_profile(c, quad) for c in pconv.factors()]
    joint = _joint_sum(profiles, power=2)
    spectral = None
    if all(rep.verdict == "finite" for rep in reports):
        spectral = float(np.prod([rep.value for rep in reports]))
    return {"spectral": spectral, "real_space": joint,
            "factor_reports": reports,
            "factor_real_space": [p.l2_norm_sq() for p in profiles]}


def product_regularity_report(pconv: ProductConvolution) -> dict:
    """Thresholds with ``max_j dim_j`` in place of ``dim``.

    ``l2_threshold_met`` and ``ck_max`` follow ``r >= max dim + k + 1``.  The
    weaker condition ``r >= max dim`` (absolute continuity) is reported
    separately as ``absolutely_continuous``.
    """
    d = pconv.space.max_dim
    r = pconv.r
    return {"l2_threshold_met": r >= d + 1, "ck_max": max(-1, r - d - 1),
            "absolutely_continuous": r >= d, "max_dim": d}
