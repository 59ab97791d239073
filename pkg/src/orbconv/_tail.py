"""Spectral integrals ``int_0^oo w(lambda) F(lambda) g(lambda) dlambda`` with
oscillatory factors, for the inversion formula.

``F`` is a product of spherical functions at the generators and ``g`` the
(differentiated) spherical function at the evaluation point.  On ``[0, L]``
the integral is done by Gauss-Legendre panels.  Past ``L`` every factor is
split into Jost terms ``c(+-lambda) Phi_{+-lambda}``; each sign pattern is an
amplitude of power-law size times ``e^{i omega lambda}`` and is integrated on a
contour turned into the half plane where the exponential decays.  Patterns
with ``omega = 0`` are the singular support of the density.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_laguerre

from .cartan import SpaceDescriptor
from .errors import SingularPointError
from .spherical import (
    LT_ASYMPTOTIC,
    T_SERIES,
    QuadratureConfig,
    _k_quadrature,
    c_function,
    jost,
    phi_values,
    plancherel_weights,
)

# smallest oscillation the contour rotation handles; below it, resonance
_OMEGA_EPS = 1e-13
# Laguerre weights below this contribute nothing at double precision
_LAGUERRE_CUT = 1e-30
_LOG_STEP = 0.2


def gauss_panels(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on consecutive ``edges``."""
    x, w = leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return (mid + half * x).ravel(), (half * w).ravel()


def _log_panels(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    if b <= a * (1 + 1e-14):
        return np.zeros(0), np.zeros(0)
    m = max(1, int(math.ceil(math.log(b / a) / _LOG_STEP)))
    return gauss_panels(np.geomspace(a, b, m + 1), order)


@dataclass
class _Pattern:
    signs: tuple[int, ...]
    omega: float


class SpectralEngine:
    """Inversion-formula integrals for one orbital convolution."""

    def __init__(self, space: SpaceDescriptor, generators, quad: QuadratureConfig):
        self.space = space
        self.n = space.dim
        self.rho = 0.5 * (self.n - 1)
        self.gens = np.asarray(generators, dtype=float)
        self.r = self.gens.size
        self.quad = quad
        total = float(self.gens.sum())
        # below T_SERIES a generator's Jost function needs lambda t >= 30
        small = self.gens[self.gens < T_SERIES]
        self.lam_tail = max(quad.lambda_max, *(LT_ASYMPTOTIC / small) if small.size else [0.0])
        # at most ~4 oscillations per panel over the support
        width = min(quad.panel_width, 8.0 * math.pi / max(2.0 * total, 1e-12))
        m = max(1, int(math.ceil(self.lam_tail / width)))
        self.lam_fin, w_fin = gauss_panels(np.linspace(0.0, self.lam_tail, m + 1),
                                           quad.lambda_points)
        F = np.ones_like(self.lam_fin)
        for t in self.gens:
            F = F * phi_values(space, self.lam_fin, t, quad)
        self.base_fin = w_fin * plancherel_weights(space, self.lam_fin) * F
        u, uw = roots_laguerre(quad.contour_nodes)
        keep = uw > _LAGUERRE_CUT
        self.lag_u = u[keep]
        self.lag_w = (uw * np.exp(u))[keep]
        # half the sign patterns; the other half are complex conjugates
        self.patterns = [
            _Pattern(s, float(np.dot(s, self.gens)))
            for s in itertools.product((1, -1), repeat=self.r) if s[0] == 1
        ]

    # amplitudes ---------------------------------------------------------------
    def _gen_amp(self, lam: np.ndarray, signs) -> np.ndarray:
        """``w(lambda) prod_i c(s_i lambda) Phi~_{s_i lambda}(t_i)``."""
        out = plancherel_weights(self.space, lam.astype(complex))
        for s, t in zip(signs, self.gens):
            sl = s * lam
            out = out * c_function(self.space, sl) * jost(self.space, sl, t)
        return out

    def _eval_amp(self, lam: np.ndarray, t: float, k: int, sign: int) -> np.ndarray:
        sl = sign * lam
        return c_function(self.space, sl) * jost(self.space, sl, t, k)

    def power(self, k: int, t_zero: bool) -> float:
        """Exponent of the amplitude's algebraic growth."""
        p = 2.0 * self.rho - self.r * self.rho + k
        return p if t_zero else p - self.rho

    # building blocks ----------------------------------------------------------
    def _contour(self, lam0: float, omega: float, rate: float):
        """Nodes on ``lam0 + i sgn(omega) v / rate`` and the complex Jacobian."""
        sgn = 1.0 if omega > 0 else -1.0
        lam = lam0 + 1j * sgn * self.lag_u / rate
        return lam, self.lag_w * (1j * sgn / rate)

    def _resonant(self, amp, lam0: float, p: float, k: int) -> complex:
        if p >= -1.0:
            if k:
                raise SingularPointError(
                    "the derivative is evaluated at a singular point of the density")
            return complex(np.inf)
        # lambda = lam0 e^{s}, s = v / (-(p + 1)): the integrand decays like e^{-v}
        rate = -(p + 1.0)
        s = self.lag_u / rate
        lam = lam0 * np.exp(s)
        return complex(np.sum(self.lag_w / rate * amp(lam.astype(complex)) * lam))

    def _oscillatory(self, amp, omega: float, lam0: float, p: float, k: int) -> complex:
        """``int_{lam0}^oo amp(lambda) e^{i omega lambda} dlambda``."""
        if abs(omega) < _OMEGA_EPS:
            return self._resonant(amp, lam0, p, k)
        lam_c = max(lam0, 20.0 / abs(omega))
        x, w = _log_panels(lam0, lam_c, self.quad.lambda_points)
        total = 0j
        if x.size:
            total += np.sum(w * amp(x.astype(complex)) * np.exp(1j * omega * x))
        lam, jac = self._contour(lam_c, omega, abs(omega))
        total += np.exp(1j * omega * lam_c) * np.sum(jac * amp(lam) * np.exp(-self.lag_u))
        return complex(total)

    # public -------------------------------------------------------------------
    def finite_part(self, t: float, k: int) -> float:
        g = phi_values(self.space, self.lam_fin, t, self.quad, k=k)
        return float(np.sum(self.base_fin * g))

    def tail(self, t: float, k: int) -> float:
        lam0 = self.lam_tail
        n = self.n
        total = 0j
        for pat in self.patterns:
            amp_g = (lambda lam, s=pat.signs: self._gen_amp(lam, s))
            om = pat.omega
            if t == 0.0 or abs(om) >= 2.0 * t:
                total += self._fast(amp_g, om, t, k, lam0)
            else:
                total += self._slow(amp_g, om, t, k, lam0)
        return float(2.0 * total.real)

    def _fast(self, amp_g, om: float, t: float, k: int, lam0: float) -> complex:
        # evaluation factor kept whole and computed over K; it grows like
        # e^{|Im lambda| t}, so the contour decays at rate |omega| - t
        n, quad = self.n, self.quad
        rate = abs(om) - t
        if rate < _OMEGA_EPS:
            # only reachable at t = 0 with a zero-sum pattern
            p = self.power(k, t_zero=True)
            if k % 2 == 1:
                return 0j
            amp = (lambda lam: amp_g(lam) * _k_quadrature(n, lam, t, quad, k=k))
            return self._resonant(amp, lam0, p, k)
        lam_c = max(lam0, 20.0 / rate)
        total = 0j
        x, w = _log_panels(lam0, lam_c, quad.lambda_points)
        if x.size:
            xc = x.astype(complex)
            g = _k_quadrature(n, xc, t, quad, k=k, phase=1j * om * xc)
            total += np.sum(w * amp_g(xc) * g)
        lam, jac = self._contour(lam_c, om, rate)
        # fold e^{i omega lambda} into the K-sum so that nothing overflows
        g = _k_quadrature(n, lam, t, quad, k=k, phase=1j * om * lam)
        total += np.sum(jac * amp_g(lam) * g)
        return complex(total)

    def _slow(self, amp_g, om: float, t: float, k: int, lam0: float) -> complex:
        n, quad = self.n, self.quad
        lam_s = lam0 if t >= T_SERIES else max(lam0, LT_ASYMPTOTIC / t)
        total = 0j
        if lam_s > lam0:
            x, w = _log_panels(lam0, lam_s, quad.lambda_points)
            xc = x.astype(complex)
            g = _k_quadrature(n, xc, t, quad, k=k, phase=1j * om * xc)
            total += np.sum(w * amp_g(xc) * g)
        p = self.power(k, t_zero=False)
        for sign in (1, -1):
            amp = (lambda lam, s=sign: amp_g(lam) * self._eval_amp(lam, t, k, s))
            total += self._oscillatory(amp, om + sign * t, lam_s, p, k)
        return total

    def evaluate(self, t: float, k: int = 0) -> float:
        return self.finite_part(t, k) + self.tail(t, k)
