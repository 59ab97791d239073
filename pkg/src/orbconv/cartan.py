"""Restricted-root data for symmetric spaces of noncompact type.

Roots are stored in an orthonormal basis of ``a*`` with the shortest positive
root scaled to unit length.  Every bound elsewhere in the package reads its
dimension, rank and multiplicities from a :class:`SpaceDescriptor`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

__all__ = [
    "RestrictedRoot",
    "SpaceDescriptor",
    "build_space",
    "rho",
    "root_separation_constant",
    "weyl_group_order",
    "FAMILIES",
]

FAMILIES = ("real-hyperbolic", "complex-hyperbolic", "generic-rank-one", "generic")


@dataclass(frozen=True)
class RestrictedRoot:
    """A positive restricted root together with its multiplicity."""

    vector: tuple[float, ...]
    multiplicity: int

    def __post_init__(self):
        vec = tuple(float(v) for v in self.vector)
        object.__setattr__(self, "vector", vec)
        if not vec or not np.any(np.asarray(vec) != 0.0):
            raise ValueError("restricted root must be a nonzero vector")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {self.multiplicity}")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vector)

    def to_dict(self) -> dict:
        return {"vector": list(self.vector), "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class SpaceDescriptor:
    """Structure data of ``G/K``: rank, dimension, positive roots, ``|W|``.

    For rank one the positive roots are ``alpha`` and optionally ``2 alpha``;
    ``m_alpha`` and ``m_2alpha`` expose their multiplicities directly.
    """

    name: str
    rank: int
    dim: int
    positive_roots: tuple[RestrictedRoot, ...]
    weyl_order: int
    family: str = "generic"
    params: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "positive_roots", tuple(self.positive_roots))
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if not self.positive_roots:
            raise ValueError("a noncompact symmetric space has at least one positive root")
        for root in self.positive_roots:
            if len(root.vector) != self.rank:
                raise ValueError(
                    f"root {root.vector} does not live in a {self.rank}-dimensional a*")
        total = self.rank + sum(r.multiplicity for r in self.positive_roots)
        if total != self.dim:
            raise ValueError(
                f"dimension bookkeeping fails: rank + sum of multiplicities = {total}, "
                f"but dim = {self.dim}")
        if self.weyl_order < 1:
            raise ValueError("Weyl group order must be positive")
        if self.rank == 1:
            if self.weyl_order != 2:
                raise ValueError("rank-one Weyl group has order 2")
            if len(self.positive_roots) > 2:
                raise ValueError("rank-one positive roots are a subset of {alpha, 2 alpha}")
            if len(self.positive_roots) == 2:
                a, b = sorted(abs(r.vector[0]) for r in self.positive_roots)
                if not math.isclose(b, 2.0 * a, rel_tol=1e-12):
                    raise ValueError("rank-one roots must be alpha and 2 alpha")

    # rank-one conveniences -------------------------------------------------
    def _rank_one_roots(self) -> tuple[RestrictedRoot, RestrictedRoot | None]:
        if self.rank != 1:
            raise ValueError(f"{self.name} has rank {self.rank}, expected a rank-one space")
        roots = sorted(self.positive_roots, key=lambda r: abs(r.vector[0]))
        short = roots[0]
        double = roots[1] if len(roots) == 2 else None
        return short, double

    @property
    def m_alpha(self) -> int:
        return self._rank_one_roots()[0].multiplicity

    @property
    def m_2alpha(self) -> int:
        double = self._rank_one_roots()[1]
        return 0 if double is None else double.multiplicity

    @property
    def alpha_norm(self) -> float:
        return abs(self._rank_one_roots()[0].vector[0])

    @property
    def rho_scalar(self) -> float:
        """``rho`` in rank one, as a multiple of the short root."""
        return 0.5 * self.m_alpha + self.m_2alpha

    # serialization -----------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rank": self.rank,
            "dim": self.dim,
            "roots": [r.to_dict() for r in self.positive_roots],
            "weyl_order": self.weyl_order,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceDescriptor":
        roots = tuple(RestrictedRoot(tuple(r["vector"]), int(r["multiplicity"]))
                      for r in data["roots"])
        name = data["name"]
        family, params = _parse_name(name)
        return cls(name=name, rank=int(data["rank"]), dim=int(data["dim"]),
                   positive_roots=roots, weyl_order=int(data["weyl_order"]),
                   family=family, params=params)

    @classmethod
    def from_json(cls, text: str) -> "SpaceDescriptor":
        return cls.from_dict(json.loads(text))


def _parse_name(name: str) -> tuple[str, tuple[int, ...]]:
    # names look like "real-hyperbolic(3)"; anything else is generic
    if "(" in name and name.endswith(")"):
        family, _, inner = name[:-1].partition("(")
        if family in FAMILIES[:3]:
            try:
                return family, tuple(int(p) for p in inner.split(",") if p.strip())
            except ValueError:
                pass
    return "generic", ()


def _rank_one(name, family, params, m_alpha, m_2alpha) -> SpaceDescriptor:
    roots = [RestrictedRoot((1.0,), m_alpha)]
    if m_2alpha:
        roots.append(RestrictedRoot((2.0,), m_2alpha))
    return SpaceDescriptor(name=name, rank=1, dim=1 + m_alpha + m_2alpha,
                           positive_roots=tuple(roots), weyl_order=2,
                           family=family, params=tuple(params))


def build_space(family: str, params: Sequence[int] = (), *,
                roots: Iterable[RestrictedRoot] | None = None,
                dim: int | None = None,
                weyl_order: int | None = None) -> SpaceDescriptor:
    """Instantiate the root data of a concrete symmetric space.

    Parameters
    ----------
    family : str
        One of ``real-hyperbolic`` (params ``[n]``, ``H^n = SO_0(n,1)/SO(n)``),
        ``complex-hyperbolic`` (params ``[m]``, ``SU(m,1)/S(U(m)xU(1))``),
        ``generic-rank-one`` (params ``[m_alpha, m_2alpha]``) or ``generic``
        (params ``[l]`` plus explicit ``roots``).
    params : sequence of int
    roots : iterable of RestrictedRoot, optional
        Positive roots for the ``generic`` family.
    dim : int, optional
        Declared dimension for ``generic``; checked against ``l + sum m``.
    weyl_order : int, optional
        ``|W|`` for ``generic``; computed from the roots when omitted.
    """
    params = tuple(int(p) for p in params)
    if family == "real-hyperbolic":
        if len(params) != 1 or params[0] < 2:
            raise ValueError("real-hyperbolic needs a single parameter n >= 2")
        n = params[0]
        return _rank_one(f"real-hyperbolic({n})", family, params, n - 1, 0)
    if family == "complex-hyperbolic":
        if len(params) != 1 or params[0] < 1:
            raise ValueError("complex-hyperbolic needs a single parameter m >= 1")
        m = params[0]
        if m == 1:
            # CH^1 is the hyperbolic plane; alpha drops out and 2 alpha is the short root
            return _rank_one("complex-hyperbolic(1)", family, params, 1, 0)
        return _rank_one(f"complex-hyperbolic({m})", family, params, 2 * (m - 1), 1)
    if family == "generic-rank-one":
        if len(params) != 2 or params[0] < 1 or params[1] < 0:
            raise ValueError("generic-rank-one needs [m_alpha >= 1, m_2alpha >= 0]")
        m_a, m_2a = params
        return _rank_one(f"generic-rank-one({m_a},{m_2a})", family, params, m_a, m_2a)
    if family == "generic":
        if len(params) != 1 or params[0] < 1:
            raise ValueError("generic needs a single parameter l >= 1 (the rank)")
        if roots is None:
            raise ValueError("generic family needs an explicit list of positive roots")
        rank = params[0]
        roots = tuple(roots)
        total = rank + sum(r.multiplicity for r in roots)
        if dim is not None and dim != total:
            raise ValueError(f"declared dim {dim} violates n = l + sum m_alpha = {total}")
        vecs = np.array([r.vector for r in roots])
        if vecs.shape[1] != rank or np.linalg.matrix_rank(vecs) < rank:
            raise ValueError("generic roots must span a*")
        if weyl_order is None:
            weyl_order = weyl_group_order(roots)
        return SpaceDescriptor(name=f"generic(rank {rank})", rank=rank, dim=total,
                               positive_roots=roots, weyl_order=int(weyl_order),
                               family="generic", params=params)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def rho(space: SpaceDescriptor) -> np.ndarray:
    """Half the sum of positive roots counted with multiplicity."""
    out = np.zeros(space.rank)
    for root in space.positive_roots:
        out += 0.5 * root.multiplicity * root.array
    return out


def weyl_group_order(roots: Iterable[RestrictedRoot], max_order: int = 100_000) -> int:
    """Order of the group generated by reflections in ``roots``."""
    vecs = [np.asarray(r.vector if isinstance(r, RestrictedRoot) else r, dtype=float)
            for r in roots]
    dim = len(vecs[0])
    gens = [np.eye(dim) - 2.0 * np.outer(v, v) / (v @ v) for v in vecs]

    def key(m):
        return tuple(np.round(m, 8).ravel() + 0.0)

    seen = {key(np.eye(dim))}
    frontier = [np.eye(dim)]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                p = g @ m
                k = key(p)
                if k not in seen:
                    seen.add(k)
                    nxt.append(p)
                    if len(seen) > max_order:
                        raise ValueError("reflection group looks infinite; roots are not a root system")
        frontier = nxt
    return len(seen)


def _as_root_matrix(basis_roots) -> np.ndarray:
    vecs = [np.asarray(r.vector if isinstance(r, RestrictedRoot) else r, dtype=float)
            for r in basis_roots]
    if not vecs:
        raise ValueError("need at least one root")
    mat = np.atleast_2d(np.array(vecs))
    if np.linalg.matrix_rank(mat) < mat.shape[1]:
        raise ValueError("roots do not span a*")
    return mat


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    # hyperspherical coordinates on S^{l-1}; angles has shape (..., l-1)
    angles = np.atleast_1d(angles)
    l = angles.shape[-1] + 1
    out = np.ones(angles.shape[:-1] + (l,))
    sin_prod = np.ones(angles.shape[:-1])
    for i in range(l - 1):
        out[..., i] = sin_prod * np.cos(angles[..., i])
        sin_prod = sin_prod * np.sin(angles[..., i])
    out[..., l - 1] = sin_prod
    return out


def root_separation_constant(basis_roots, points_per_dim: int = 10_000,
                             tol: float = 1e-3) -> float:
    """``min_{|u|=1} max_i |<u, alpha_i>|`` for a spanning set of roots.

    Rank one is exact.  In rank two the half circle is scanned on a grid of
    ``points_per_dim`` angles and the best cell is refined by a bounded scalar
    search.  Higher rank uses a coarser hyperspherical grid (the full product
    grid is out of reach) followed by Nelder-Mead from the best few cells.
    """
    mat = _as_root_matrix(basis_roots)
    l = mat.shape[1]

    if l == 1:
        return float(np.max(np.abs(mat[:, 0])))

    def objective(angles):
        u = _sphere_point(np.asarray(angles))
        return np.max(np.abs(u @ mat.T), axis=-1)

    if l == 2:
        # u and -u give the same value, so half a circle suffices
        theta = np.linspace(0.0, np.pi, points_per_dim, endpoint=False)
        vals = objective(theta[:, None])
        step = theta[1] - theta[0]
        best = float(vals.min())
        for idx in np.argsort(vals)[:4]:
            res = minimize_scalar(lambda a: float(objective(np.array([a]))),
                                  bounds=(theta[idx] - step, theta[idx] + step),
                                  method="bounded", options={"xatol": 1e-12})
            best = min(best, float(res.fun))
        return best

    per_dim = max(16, int(round((2_000_000) ** (1.0 / (l - 1)))))
    axes = [np.linspace(0.0, np.pi, per_dim, endpoint=False) for _ in range(l - 1)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, l - 1)
    vals = objective(grid)
    best = float(vals.min())
    for idx in np.argsort(vals)[:8]:
        res = minimize(lambda a: float(objective(a)), grid[idx], method="Nelder-Mead",
                       options={"xatol": tol * 1e-3, "fatol": tol * 1e-3, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best
