"""Spherical transform side of orbital convolutions ``nu_1 * ... * nu_r``.

The transform of the convolution is the product of the spherical functions at
the generators.  From it come the ``L^2`` norm (Plancherel), the density and
its radial derivatives (inversion formula), and the regularity thresholds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from numpy.polynomial import legendre as L

from .cartan import SpaceDescriptor
from .errors import QuadratureBudgetError, SingularPointError, ThresholdError
from .spherical import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    phi_values,
    plancherel_weights,
    radial_jacobian,
    spherical_values,
    _real_hyperbolic_n,
)
from ._tail import SpectralEngine, gauss_panels

__all__ = [
    "OrbitalConvolution",
    "ConvergenceReport",
    "DensityProfile",
    "RegularityReport",
    "transform_of_convolution",
    "l2_norm_sq",
    "density_at",
    "density_derivative",
    "density_profile",
    "real_space_l2",
    "regularity_report",
    "breakpoints",
    "VERDICT_MARGIN",
]

VERDICT_MARGIN = 0.1


@dataclass(frozen=True)
class OrbitalConvolution:
    """``nu_{a_1} * ... * nu_{a_r}`` on a rank-one space.

    Parameters
    ----------
    space : SpaceDescriptor
    generators : sequence of float
        Radial coordinates ``t_i`` of the ``a_i``.  They must be strictly
        positive unless ``strict=False``, which admits ``t_i = 0`` (the point
        mass at the identity) for transform evaluations.
    """

    space: SpaceDescriptor
    generators: tuple[float, ...]
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        gens = tuple(float(t) for t in np.ravel(self.generators))
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("a convolution needs r >= 1 generators")
        if self.space.rank != 1:
            raise ValueError("orbital convolutions are evaluated in rank one only")
        for t in gens:
            if not math.isfinite(t) or t < 0:
                raise ValueError(f"generator {t} is not a point of the closed chamber")
            if self.strict and t <= 0:
                raise ValueError(
                    "generators must lie strictly inside the chamber (t > 0); "
                    "pass strict=False to allow the identity")

    @property
    def r(self) -> int:
        return len(self.generators)

    @property
    def support_radius(self) -> float:
        return float(sum(self.generators))

    def __hash__(self):
        return hash((self.space.name, self.generators))


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of the Plancherel ``L^2`` computation.

    ``verdict`` is ``"finite"`` when the fitted tail exponent is below
    ``-1 - margin``, ``"divergent"`` when it is at or above that and the fit
    is stable, and ``"marginal"`` when the fit itself cannot be trusted.
    ``value`` is set only for a finite verdict.
    """

    tail_exponent: float
    verdict: str
    value: float | None
    threshold_r: int
    r: int
    n: int
    integral_to_cutoff: float
    tail_completion: float | None
    lambda_max: float
    fit_amplitude: float
    fit_residual: float
    fit_spread: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class RegularityReport:
    l2_threshold_met: bool
    ck_max: int

    def to_dict(self) -> dict:
        return {"l2_threshold_met": self.l2_threshold_met, "ck_max": self.ck_max}


@dataclass(frozen=True, eq=False)
class DensityProfile:
    """Tabulated radial density on composite Gauss-Legendre panels.

    ``grid`` holds the nodes, ``weights`` the matching quadrature weights in
    ``t``, ``values`` the density with respect to Haar measure and
    ``jacobian`` the radial Haar density, so ``mass = sum(weights * values *
    jacobian)``.  ``panel_edges`` delimit the panels; each has ``order``
    nodes.
    """

    grid: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    jacobian: np.ndarray
    panel_edges: np.ndarray
    order: int
    mass: float
    breakpoints: np.ndarray
    space: SpaceDescriptor | None = None

    @cached_property
    def _panel_cdf(self):
        x, _ = np.polynomial.legendre.leggauss(self.order)
        f = (self.values * self.jacobian).reshape(-1, self.order)
        coef = np.array([L.legfit(x, row, self.order - 1) for row in f])
        prim = np.array([L.legint(c, lbnd=-1) for c in coef])
        half = 0.5 * np.diff(self.panel_edges)
        panel_mass = half * np.array([L.legval(1.0, p) for p in prim])
        start = np.concatenate([[0.0], np.cumsum(panel_mass)])
        return prim, half, start

    def cdf(self, t) -> np.ndarray:
        """Mass of ``[0, t]`` from the per-panel Legendre interpolant of ``rho J``."""
        prim, half, start = self._panel_cdf
        t = np.atleast_1d(np.asarray(t, dtype=float))
        edges = self.panel_edges
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(edges) - 2)
        out = np.empty(t.shape)
        for i, (ti, j) in enumerate(zip(t, idx)):
            if ti <= edges[0]:
                out[i] = 0.0
            elif ti >= edges[-1]:
                out[i] = start[-1]
            else:
                x = (2.0 * ti - edges[j] - edges[j + 1]) / (edges[j + 1] - edges[j])
                out[i] = start[j] + half[j] * L.legval(x, prim[j])
        return out

    def l2_norm_sq(self) -> float:
        """Real-space ``int rho^2 J dt`` on the profile's own quadrature."""
        return float(np.sum(self.weights * self.values ** 2 * self.jacobian))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "values": self.values.tolist(),
            "weights": self.weights.tolist(),
            "jacobian": self.jacobian.tolist(),
            "panel_edges": self.panel_edges.tolist(),
            "order": self.order,
            "mass": self.mass,
            "breakpoints": self.breakpoints.tolist(),
        }


def _check_conv(conv: OrbitalConvolution) -> int:
    return _real_hyperbolic_n(conv.space)


def transform_of_convolution(conv: OrbitalConvolution, lam,
                             quad: QuadratureConfig = DEFAULT_CONFIG):
    """``prod_i phi_lambda(a_i^{-1})``; in rank one ``a_i^{-1}`` is ``K``-conjugate to ``a_i``.

    Each factor is computed from the ``K``-integral.  Returns a complex scalar
    for scalar ``lam`` and an array otherwise.
    """
    _check_conv(conv)
    scalar = np.ndim(lam) == 0
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.ones(lam_arr.shape, dtype=complex)
    # a fixed factor order makes the result exactly symmetric in the generators
    for t in sorted(conv.generators):
        out = out * spherical_values(conv.space, lam_arr, t, quad)
    return complex(out[0]) if scalar else out


# --------------------------------------------------------------------------
# L^2 norm
# --------------------------------------------------------------------------

def _bump(z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


def _fit_tail(lam: np.ndarray, wts: np.ndarray, integrand: np.ndarray,
              lam_max: float, windows: int) -> dict:
    """Power-law fit ``A lambda^p`` of an oscillating integrand on its last decade.

    Each window averages the integrand against a smooth bump in ``log lambda``
    (which suppresses oscillating terms); the log of the averages is linear in
    the window centre with slope ``p``.
    """
    s_hi = math.log(lam_max)
    s_lo = s_hi - math.log(10.0)
    half = (s_hi - s_lo) / 4.0
    centres = np.linspace(s_lo + half, s_hi - half, windows)
    s = np.log(np.maximum(lam, 1e-300))
    means = np.empty(windows)
    for j, c in enumerate(centres):
        psi = _bump((s - c) / half)
        means[j] = np.sum(wts * psi * integrand) / np.sum(wts * psi)
    if np.any(means <= 0) or not np.all(np.isfinite(means)):
        return {"ok": False}
    y = np.log(means)
    p, b = np.polyfit(centres, y, 1)
    resid = float(np.max(np.abs(y - (p * centres + b))))
    m = windows // 2 + 1
    p_lo = np.polyfit(centres[:m], y[:m], 1)[0]
    p_hi = np.polyfit(centres[-m:], y[-m:], 1)[0]
    # shape factor: average of lambda^p over a window relative to lambda^p at its centre
    zs = np.linspace(-1.0, 1.0, 2001)[1:-1]
    psi0 = _bump(zs)
    kappa = np.sum(psi0 * np.exp((p + 1.0) * half * zs)) / np.sum(psi0 * np.exp(half * zs))
    return {"ok": True, "p": float(p), "A": float(math.exp(b) / kappa), "resid": resid,
            "spread": float(abs(p_hi - p_lo))}


def l2_norm_sq(conv: OrbitalConvolution, quad: QuadratureConfig = DEFAULT_CONFIG
               ) -> ConvergenceReport:
    """``(1/|W|) int |prod phi_lambda(a_i)|^2 w(lambda) dlambda`` with a tail verdict.

    The integrand is integrated on ``[0, l2_lambda_max]``; its last decade is
    fitted by ``A lambda^p``.  With ``p < -1 - margin`` the norm is finite and
    the analytic completion ``A Lambda^{p+1} / -(p+1)`` is added.  Otherwise
    no value is reported.
    """
    n = _check_conv(conv)
    space = conv.space
    lam_max = float(quad.l2_lambda_max)
    if lam_max < 100.0:
        raise ValueError("l2_lambda_max must be at least 100 to leave a decade for the fit")
    width = min(quad.panel_width, 8.0 * math.pi / max(2.0 * conv.support_radius, 1e-12))
    m = max(1, int(math.ceil(lam_max / width)))
    lam, wts = gauss_panels(np.linspace(0.0, lam_max, m + 1), quad.lambda_points)
    F = np.ones_like(lam)
    for t in conv.generators:
        F = F * phi_values(space, lam, t, quad)
    integrand = plancherel_weights(space, lam) * F ** 2
    if not np.all(np.isfinite(integrand)):
        raise QuadratureBudgetError("non-finite spectral integrand")
    integral = float(np.sum(wts * integrand))
    fit = _fit_tail(lam, wts, integrand, lam_max, quad.fit_windows)
    threshold = n + 1
    if not fit["ok"]:
        return ConvergenceReport(math.nan, "marginal", None, threshold, conv.r, n,
                                 integral, None, lam_max, math.nan, math.inf, math.inf)
    p = fit["p"]
    stable = fit["spread"] <= VERDICT_MARGIN
    if not stable:
        verdict = "marginal"
    elif p < -1.0 - VERDICT_MARGIN:
        verdict = "finite"
    else:
        verdict = "divergent"
    value = completion = None
    if verdict == "finite":
        completion = fit["A"] * lam_max ** (p + 1.0) / (-(p + 1.0))
        value = integral + completion
    return ConvergenceReport(p, verdict, value, threshold, conv.r, n, integral, completion,
                             lam_max, fit["A"], fit["resid"], fit["spread"])


# --------------------------------------------------------------------------
# density
# --------------------------------------------------------------------------

_ENGINES: dict = {}


def _engine(conv: OrbitalConvolution, quad: QuadratureConfig) -> SpectralEngine:
    key = (conv.space.to_json(), conv.generators, quad)
    eng = _ENGINES.get(key)
    if eng is None:
        if len(_ENGINES) > 32:
            _ENGINES.clear()
        eng = _ENGINES[key] = SpectralEngine(conv.space, conv.generators, quad)
    return eng


def _require_threshold(conv: OrbitalConvolution, k: int) -> int:
    n = _check_conv(conv)
    if any(t <= 0 for t in conv.generators):
        raise ValueError("density needs generators strictly inside the chamber")
    need = n + k + 1
    if conv.r < need:
        what = "density" if k == 0 else f"derivative of order {k}"
        raise ThresholdError(
            f"r = {conv.r} is below r >= dim + k + 1 = {need} for the {what} on "
            f"{conv.space.name}: the inversion integral is not absolutely convergent "
            f"at this order")
    return n


def density_at(conv: OrbitalConvolution, t, quad: QuadratureConfig = DEFAULT_CONFIG):
    """Density of ``nu_1 * ... * nu_r`` w.r.t. Haar measure at radius ``t``.

    ``(1/|W|) int prod phi_lambda(a_i) phi_lambda(a_t) w(lambda) dlambda``,
    with the spectral tail past ``lambda_max`` integrated analytically.
    Requires ``r >= dim + 1``.  Returns ``inf`` on a breakpoint where the
    density is unbounded.
    """
    _require_threshold(conv, 0)
    return _evaluate(conv, t, 0, quad)


def density_derivative(conv: OrbitalConvolution, t, k: int = 1,
                       quad: QuadratureConfig = DEFAULT_CONFIG):
    """``d^k/dt^k`` of the radial density, differentiating under the integral.

    Requires ``r >= dim + k + 1``.  At ``t = 0`` odd orders vanish by the Weyl
    symmetry ``t -> -t``; even orders are computed.
    """
    if int(k) != k or k < 0:
        raise ValueError("derivative order must be a nonnegative integer")
    _require_threshold(conv, int(k))
    return _evaluate(conv, t, int(k), quad)


def _evaluate(conv, t, k, quad):
    eng = _engine(conv, quad)
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise ValueError("radial points must be finite and nonnegative")
    out = np.array([eng.evaluate(float(x), k) for x in ts])
    return float(out[0]) if scalar else out


def breakpoints(generators: Sequence[float]) -> np.ndarray:
    """The radii ``|sum s_i t_i|`` where the density may fail to be smooth."""
    gens = np.asarray(generators, dtype=float)
    pts = {0.0, float(gens.sum())}
    for signs in itertools.product((1, -1), repeat=gens.size):
        pts.add(abs(float(np.dot(signs, gens))))
    pts = np.array(sorted(pts))
    # merge values that coincide up to roundoff
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * max(1.0, pts[-1])])
    return pts[keep]


def _graded_edges(a: float, b: float, levels: int, ratio: float, inner: int) -> np.ndarray:
    half = 0.5 * (b - a)
    grade = half * ratio ** np.arange(1, levels + 1)
    edges = np.concatenate([a + grade, b - grade, np.linspace(a, b, inner + 1)])
    return np.unique(edges)


def density_profile(conv: OrbitalConvolution, quad: QuadratureConfig = DEFAULT_CONFIG,
                    order: int = 12, levels: int = 10, ratio: float = 0.25,
                    inner: int = 4) -> DensityProfile:
    """Tabulate the density over its support ``[0, sum t_i]``.

    Panels are split at the breakpoints and graded geometrically toward each
    of them, which keeps the mass and ``L^2`` integrals accurate across the
    integrable singularities there.
    """
    n = _require_threshold(conv, 0)
    bps = breakpoints(conv.generators)
    edges = np.unique(np.concatenate([_graded_edges(a, b, levels, ratio, inner)
                                      for a, b in zip(bps[:-1], bps[1:])]))
    grid, wts = gauss_panels(edges, order)
    vals = density_at(conv, grid, quad)
    jac = radial_jacobian(conv.space, grid)
    mass = float(np.sum(wts * vals * jac))
    return DensityProfile(grid=grid, values=vals, weights=wts, jacobian=jac,
                          panel_edges=edges, order=order, mass=mass, breakpoints=bps,
                          space=conv.space)


def real_space_l2(conv: OrbitalConvolution, quad: QuadratureConfig = DEFAULT_CONFIG,
                  profile: DensityProfile | None = None) -> float:
    """``int rho^2 J dt`` from the tabulated density."""
    profile = density_profile(conv, quad) if profile is None else profile
    return profile.l2_norm_sq()


def regularity_report(conv: OrbitalConvolution) -> RegularityReport:
    """Thresholds ``r >= dim + 1`` (``L^2``) and ``r >= dim + k + 1`` (``C^k``)."""
    n = conv.space.dim
    return RegularityReport(l2_threshold_met=conv.r >= n + 1, ck_max=max(-1, conv.r - n - 1))
