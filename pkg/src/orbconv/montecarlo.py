"""Monte Carlo sampling of orbital convolutions and comparison with the density.

A draw of ``nu_{a_1} * ... * nu_{a_r}`` is ``k_0 a_1 k_1 ... a_r k_r`` with
independent Haar-random ``k_i``; only its Cartan radial part is kept.
Sampling runs in fixed-size chunks, chunk ``j`` seeded from
``SeedSequence(seed, spawn_key=(j,))``, so results depend on the seed and the
chunk size only.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .groups import realization_for, sample_product_radii
from .spherical import phi_values, radial_jacobian
from .transform import DensityProfile, OrbitalConvolution

__all__ = [
    "RadialHistogram",
    "sample_convolution",
    "histogram",
    "compare",
    "empirical_transform",
    "CHUNK_SIZE",
]

CHUNK_SIZE = 100_000


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ORBCONV_THREADS", "1")))
    except ValueError:
        return 1


def _chunk(realization, gens, size, seed, index):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    return sample_product_radii(realization, gens, size, rng)


def sample_convolution(conv: OrbitalConvolution, n: int, seed: int = 0,
                       chunk_size: int = CHUNK_SIZE, threads: int | None = None,
                       realization: str | None = None) -> np.ndarray:
    """``n`` independent radial parts of ``k_0 a_1 k_1 ... a_r k_r``.

    Parameters
    ----------
    conv : OrbitalConvolution
    n : int
        Number of draws.
    seed : int
        Master seed (64-bit).
    chunk_size : int
        Draws per independently seeded chunk.
    threads : int, optional
        Worker threads; defaults to ``ORBCONV_THREADS`` or 1.  The output does
        not depend on it.
    realization : str, optional
        ``"sl2"`` or ``"so(n,1)"`` for the hyperbolic plane.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need at least one sample")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    real = realization_for(conv.space, realization)
    gens = conv.generators
    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]
    threads = _default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(sizes) == 1:
        parts = [_chunk(real, gens, s, seed, j) for j, s in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda js: _chunk(real, gens, js[1], seed, js[0]),
                                  enumerate(sizes)))
    out = np.concatenate(parts)
    # triangle inequality: d(o, g o) <= sum t_i
    excess = float(out.max() - conv.support_radius)
    if excess > 1e-9 * max(1.0, conv.support_radius):
        raise InvariantViolation(f"a sample exceeds the support radius by {excess:.3e}")
    return out


@dataclass(frozen=True, eq=False)
class RadialHistogram:
    """Binned radial samples.

    ``density_estimate`` is ``counts / (n_samples * width * J(centre))``, the
    empirical density with respect to Haar measure.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    n_samples: int
    density_estimate: np.ndarray

    @property
    def centres(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def to_dict(self) -> dict:
        return {"bin_edges": self.bin_edges.tolist(), "counts": self.counts.tolist(),
                "n_samples": self.n_samples,
                "density_estimate": self.density_estimate.tolist()}


def histogram(samples, bins=100, space=None, range_=None) -> RadialHistogram:
    """Bin radial samples.

    Parameters
    ----------
    samples : array_like
    bins : int or array_like
        At least 10 bins, or explicit increasing edges.
    space : SpaceDescriptor
        Supplies the radial Jacobian for ``density_estimate``.
    range_ : (float, float), optional
        Defaults to ``[0, max(samples)]``.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("cannot bin an empty sample list")
    if space is None:
        raise ValueError("the radial Jacobian needs the space")
    if np.ndim(bins) == 0:
        if bins < 10:
            raise ValueError("need at least 10 bins")
        lo, hi = (0.0, float(samples.max())) if range_ is None else map(float, range_)
        if hi <= lo:
            hi = lo + 1.0
        edges = np.linspace(lo, hi, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
        if edges.size < 11 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be increasing with at least 10 bins")
    # np.histogram closes the last bin on the right, so the top sample is counted
    counts, edges = np.histogram(samples, bins=edges)
    if counts.sum() != samples.size:
        raise ValueError("samples fall outside the bin range")
    centres = 0.5 * (edges[1:] + edges[:-1])
    jac = radial_jacobian(space, centres)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = counts / (samples.size * np.diff(edges) * jac)
    dens = np.where(np.isfinite(dens), dens, 0.0)
    return RadialHistogram(bin_edges=edges, counts=counts.astype(np.int64),
                           n_samples=int(samples.size), density_estimate=dens)


def compare(hist: RadialHistogram, profile: DensityProfile) -> dict:
    """Distances between a histogram and an analytic density profile.

    * ``l1``: ``sum |counts/N - P_bin|`` with ``P_bin`` the profile's mass in
      each bin (the ``L^1`` distance of the two densities at bin resolution).
    * ``sup``: largest gap between ``density_estimate`` and the bin-averaged
      analytic density.
    * ``ks``: largest CDF gap over the bin edges.
    """
    edges = hist.bin_edges
    lo, hi = profile.panel_edges[0], profile.panel_edges[-1]
    if edges[-1] <= lo or edges[0] >= hi:
        raise ValueError("histogram and profile have disjoint supports")
    cdf = profile.cdf(edges)
    p_bin = np.diff(cdf)
    emp = hist.counts / hist.n_samples
    centres = hist.centres
    widths = np.diff(edges)
    jac = np.asarray(radial_jacobian(profile.space, centres))
    with np.errstate(divide="ignore", invalid="ignore"):
        analytic = np.where(jac > 0, p_bin / (widths * jac), 0.0)
    emp_cdf = np.concatenate([[0.0], np.cumsum(emp)])
    return {
        "l1": float(np.sum(np.abs(emp - p_bin))),
        "sup": float(np.max(np.abs(hist.density_estimate - analytic))),
        "ks": float(np.max(np.abs(emp_cdf - (cdf - cdf[0])))),
        "bins": int(widths.size),
        "n_samples": hist.n_samples,
    }


def empirical_transform(samples, conv: OrbitalConvolution, lam) -> dict:
    """Sample mean of ``phi_lambda(g^{-1})`` and its standard error."""
    samples = np.asarray(samples, dtype=float)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    means, errs = [], []
    uniq, inverse = np.unique(samples, return_inverse=True)
    for l in lam:
        # phi is real for real lambda; evaluate once per distinct radius
        vals = np.array([phi_values(conv.space, [l], t)[0] for t in uniq])[inverse] \
            if uniq.size < 64 else _phi_many(conv, l, samples)
        means.append(float(vals.mean()))
        errs.append(float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0)
    return {"lambda": lam.tolist(), "mean": means, "stderr": errs}


def _phi_many(conv, lam, samples):
    """``phi_lambda`` at many radii, interpolated from a fine Chebyshev table."""
    lo, hi = 0.0, float(samples.max())
    if hi <= lo:
        return np.full(samples.shape, float(phi_values(conv.space, [lam], hi)[0]))
    deg = 96
    nodes = 0.5 * (hi + lo) + 0.5 * (hi - lo) * np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    table = np.array([phi_values(conv.space, [lam], t)[0] for t in nodes])
    cheb = np.polynomial.chebyshev.Chebyshev.fit(nodes, table, deg, domain=[lo, hi])
    return cheb(samples)
