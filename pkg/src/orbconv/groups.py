"""Matrix realizations of rank-one groups: SL(2,R) and SO_0(n,1).

Both realizations put the radial coordinate ``t`` on the geodesic distance of
the associated hyperbolic space, so ``alpha(H_t) = t`` for the short root.

* ``sl2``: ``K = SO(2)``, ``A = {diag(e^{t/2}, e^{-t/2})}``, ``N`` upper
  unipotent.
* ``so(n,1)``: Lorentz form ``J = diag(1, ..., 1, -1)``, ``K = SO(n)`` in the
  upper-left block and ``A`` the hyperbolic rotations in the ``(1, n+1)``
  plane.  ``N`` fixes the null vector ``xi = e_1 + e_{n+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cartan import SpaceDescriptor
from .errors import RealizationError, UnsupportedSpaceError

__all__ = [
    "Realization",
    "GroupElement",
    "CompactElement",
    "realization_for",
    "radial_element",
    "nilpotent_element",
    "rotation",
    "iwasawa",
    "iwasawa_H",
    "cartan",
    "cartan_radial",
    "sample_K",
    "radial_of_product",
    "sample_product_radii",
    "WALL_SNAP",
]

# radial values this close to the wall are reported as exactly 0
WALL_SNAP = 1e-12
_TOL = 1e-10


@dataclass(frozen=True)
class Realization:
    """Which matrix model to use: ``kind`` is ``"sl2"`` or ``"so(n,1)"``."""

    kind: str
    n: int = 2

    def __post_init__(self):
        if self.kind not in ("sl2", "so(n,1)"):
            raise UnsupportedSpaceError(f"unknown realization {self.kind!r}")
        if self.kind == "sl2" and self.n != 2:
            raise UnsupportedSpaceError("sl2 realizes the hyperbolic plane only (n = 2)")
        if self.n < 2:
            raise UnsupportedSpaceError("so(n,1) needs n >= 2")

    @property
    def size(self) -> int:
        """Matrix size of ``G``."""
        return 2 if self.kind == "sl2" else self.n + 1

    @property
    def k_size(self) -> int:
        """Matrix size of ``K``."""
        return 2 if self.kind == "sl2" else self.n

    @property
    def label(self) -> str:
        return "sl2" if self.kind == "sl2" else f"so({self.n},1)"

    def lorentz(self) -> np.ndarray:
        j = np.eye(self.n + 1)
        j[-1, -1] = -1.0
        return j


def realization_for(space: SpaceDescriptor, prefer: str | None = None) -> Realization:
    """Pick the matrix model of a real-hyperbolic space.

    The hyperbolic plane defaults to ``sl2``; pass ``prefer="so(n,1)"`` to get
    ``SO_0(2,1)`` instead.
    """
    if space.rank != 1 or space.m_2alpha != 0 or space.alpha_norm != 1.0:
        raise UnsupportedSpaceError(
            f"{space.name}: matrix realizations exist only for real-hyperbolic spaces")
    n = space.dim
    if n == 2 and prefer in (None, "sl2"):
        return Realization("sl2", 2)
    if prefer not in (None, "so(n,1)"):
        raise UnsupportedSpaceError(f"realization {prefer!r} unavailable for {space.name}")
    return Realization("so(n,1)", n)


def _lorentz_residual(m: np.ndarray, j: np.ndarray) -> float:
    # entries grow like e^t, so compare relative to |m|^2
    scale = max(1.0, float(np.max(np.abs(m))) ** 2)
    return float(np.max(np.abs(m.T @ j @ m - j))) / scale


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of ``G`` in a fixed realization.

    The realization invariant (``det = 1`` or ``g^T J g = J`` with
    ``g_{n+1,n+1} > 0``) is checked to ``1e-10`` relative to ``|g|^2``.
    """

    matrix: np.ndarray
    realization: Realization

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        size = self.realization.size
        if m.shape != (size, size):
            raise RealizationError(f"expected a {size}x{size} matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise RealizationError("matrix has non-finite entries")
        if self.realization.kind == "sl2":
            scale = max(1.0, float(np.max(np.abs(m))) ** 2)
            if abs(np.linalg.det(m) - 1.0) > _TOL * scale:
                raise RealizationError(f"det = {np.linalg.det(m)!r}, not 1")
        else:
            res = _lorentz_residual(m, self.realization.lorentz())
            if res > _TOL:
                raise RealizationError(f"Lorentz residual {res:.3e} exceeds {_TOL}")
            if m[-1, -1] <= 0 or np.linalg.det(m) <= 0:
                raise RealizationError("element is outside the identity component")

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            other = other.matrix
        elif isinstance(other, CompactElement):
            other = other.embed(self.realization)
        return GroupElement(self.matrix @ other, self.realization)

    def inverse(self) -> "GroupElement":
        if self.realization.kind == "sl2":
            a, b, c, d = self.matrix.ravel()
            return GroupElement(np.array([[d, -b], [-c, a]]), self.realization)
        j = self.realization.lorentz()
        return GroupElement(j @ self.matrix.T @ j, self.realization)


@dataclass(frozen=True, eq=False)
class CompactElement:
    """An element of ``K`` given by its ``k_size x k_size`` rotation matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise RealizationError("compact element must be a square matrix")
        if np.max(np.abs(m.T @ m - np.eye(m.shape[0]))) > _TOL:
            raise RealizationError("matrix is not orthogonal")
        if np.linalg.det(m) < 0:
            raise RealizationError("matrix has determinant -1")

    def embed(self, realization: Realization) -> np.ndarray:
        """Matrix of ``k`` inside ``G``."""
        if realization.kind == "sl2":
            return self.matrix.copy()
        out = np.eye(realization.size)
        out[:-1, :-1] = self.matrix
        return out

    def __matmul__(self, other):
        if isinstance(other, CompactElement):
            return CompactElement(self.matrix @ other.matrix)
        if isinstance(other, GroupElement):
            return GroupElement(self.embed(other.realization) @ other.matrix, other.realization)
        return NotImplemented


def radial_element(realization: Realization, t) -> GroupElement:
    """``a_t = exp(H_t)``."""
    t = float(t)
    if realization.kind == "sl2":
        return GroupElement(np.diag([np.exp(t / 2), np.exp(-t / 2)]), realization)
    m = np.eye(realization.size)
    m[0, 0] = m[-1, -1] = np.cosh(t)
    m[0, -1] = m[-1, 0] = np.sinh(t)
    return GroupElement(m, realization)


def nilpotent_element(realization: Realization, v) -> GroupElement:
    """``exp(X_v)`` in ``N``; ``v`` is a scalar (sl2) or an ``(n-1)``-vector."""
    if realization.kind == "sl2":
        return GroupElement(np.array([[1.0, float(v)], [0.0, 1.0]]), realization)
    n = realization.n
    v = np.asarray(v, dtype=float).reshape(n - 1)
    size = n + 1
    x = _nilpotent_generator(v, n)
    return GroupElement(np.eye(size) + x + 0.5 * x @ x, realization)


def _nilpotent_generator(v: np.ndarray, n: int) -> np.ndarray:
    size = n + 1
    x = np.zeros((size, size))
    # columns: X e_1 = v, X e_{n+1} = -v, X e_j = -v_j (e_1 + e_{n+1})
    x[1:n, 0] = v
    x[1:n, n] = -v
    x[0, 1:n] = -v
    x[n, 1:n] = -v
    return x


def rotation(theta) -> CompactElement:
    """Rotation by ``theta`` in ``SO(2)``."""
    c, s = np.cos(theta), np.sin(theta)
    return CompactElement(np.array([[c, -s], [s, c]]))


def _rotation_to(u: np.ndarray) -> np.ndarray:
    """An element of ``SO(n)`` sending ``e_1`` to the unit vector ``u``."""
    n = u.shape[0]
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = e1 - u
    nw = np.linalg.norm(w)
    if nw < 1e-14:
        return np.eye(n)
    w = w / nw
    house = np.eye(n) - 2.0 * np.outer(w, w)
    # the reflection fixes the sign of det with a flip in a direction orthogonal to e_1
    if n == 1:
        return house
    flip = np.ones(n)
    flip[1] = -1.0
    return house * flip


def iwasawa(g: GroupElement) -> tuple[CompactElement, float, GroupElement]:
    """Factor ``g = k exp(H) n``; returns ``(k, H, n)``."""
    real = g.realization
    m = g.matrix
    if real.kind == "sl2":
        q, r = np.linalg.qr(m)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        q = q * signs
        r = signs[:, None] * r
        h = 2.0 * np.log(r[0, 0])
        a = radial_element(real, h).matrix
        nmat = np.linalg.solve(a, r)
        nmat[1, 0] = 0.0
        nmat[0, 0] = nmat[1, 1] = 1.0
        return CompactElement(q), float(h), GroupElement(nmat, real)
    n = real.n
    gxi = m[:, 0] + m[:, -1]
    eh = gxi[-1]
    h = float(np.log(eh))
    u = gxi[:n] / eh
    u = u / np.linalg.norm(u)
    k0 = _rotation_to(u)
    rest = k0.T @ m[:n, 1:n]
    mblock = np.eye(n)
    mblock[1:, 1:] = rest[1:, :]
    # project the M-part back onto SO(n-1) to shed roundoff
    uu, _, vt = np.linalg.svd(mblock[1:, 1:])
    mblock[1:, 1:] = uu @ vt
    k = k0 @ mblock
    kfull = np.eye(n + 1)
    kfull[:n, :n] = k
    nmat = radial_element(real, -h).matrix @ kfull.T @ m
    return CompactElement(k), h, GroupElement(nmat, real)


def iwasawa_H(g: GroupElement) -> float:
    """Iwasawa projection ``H(g)`` (a scalar in rank one, either sign)."""
    if g.realization.kind == "sl2":
        # |g e_1| = e^{H/2}
        return float(np.log(g.matrix[0, 0] ** 2 + g.matrix[1, 0] ** 2))
    return float(np.log(g.matrix[-1, 0] + g.matrix[-1, -1]))


def _radial_sl2(m: np.ndarray) -> np.ndarray:
    # 2 sinh(t/2) = |(a - d, b + c)|, stable near t = 0
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return 2.0 * np.arcsinh(0.5 * np.hypot(a - d, b + c))


def _radial_lorentz(x: np.ndarray) -> np.ndarray:
    # x = g e_{n+1} restricted to the spatial block; |x| = sinh t
    return np.arcsinh(np.linalg.norm(x, axis=-1))


def _snap(t):
    t = np.asarray(t, dtype=float)
    return np.where(t < WALL_SNAP, 0.0, t)


def cartan(g: GroupElement) -> tuple[CompactElement, float, CompactElement]:
    """Factor ``g = k1 exp(H) k2`` with ``H`` in the closed chamber."""
    real = g.realization
    m = g.matrix
    if real.kind == "sl2":
        t = float(_snap(_radial_sl2(m)))
        u, s, vt = np.linalg.svd(m)
        if np.linalg.det(u) < 0:
            u[:, 1] *= -1.0
            vt[1, :] *= -1.0
        if t == 0.0:
            # g is itself a rotation
            return CompactElement(np.eye(2)), 0.0, CompactElement(_nearest_rotation(m))
        k2 = radial_element(real, -t).matrix @ u.T @ m
        return CompactElement(u), t, CompactElement(_nearest_rotation(k2))
    n = real.n
    x = m[:n, -1]
    t = float(_snap(_radial_lorentz(x)))
    if t == 0.0:
        k1 = np.eye(n)
    else:
        k1 = _rotation_to(x / np.linalg.norm(x))
    k1full = np.eye(n + 1)
    k1full[:n, :n] = k1
    k2full = radial_element(real, -t).matrix @ k1full.T @ m
    return CompactElement(k1), t, CompactElement(_nearest_rotation(k2full[:n, :n]))


def _nearest_rotation(m: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] *= -1.0
        r = u @ vt
    return r


def cartan_radial(g: GroupElement) -> float:
    """Cartan radial part ``t >= 0`` with ``g in K a_t K``."""
    if g.realization.kind == "sl2":
        return float(_snap(_radial_sl2(g.matrix)))
    n = g.realization.n
    return float(_snap(_radial_lorentz(g.matrix[:n, -1])))


def _haar_so(n: int, rng: np.random.Generator, size: int | None) -> np.ndarray:
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape)
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    q = q * d[..., None, :]
    # O(n) -> SO(n): flip the first column of the reflections
    det = np.linalg.det(q)
    q[..., :, 0] *= np.sign(det)[..., None]
    return q


def sample_K(realization: Realization, rng: np.random.Generator, size: int | None = None):
    """Haar-distributed element(s) of ``K``.

    With ``size=None`` a :class:`CompactElement` is returned; otherwise a
    stacked array of shape ``(size, k, k)``.
    """
    if realization.kind == "sl2" or realization.n == 2:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=size)
        c, s = np.cos(theta), np.sin(theta)
        mats = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
        return CompactElement(mats) if size is None else mats
    mats = _haar_so(realization.n, rng, size)
    return CompactElement(mats) if size is None else mats


def radial_of_product(a_list: Sequence[float], k_list: Sequence[CompactElement],
                      realization: Realization) -> float:
    """Cartan radial part of ``k_0 a_1 k_1 ... a_r k_r``."""
    if len(k_list) != len(a_list) + 1:
        raise ValueError(f"need r + 1 = {len(a_list) + 1} compact elements, got {len(k_list)}")
    if not a_list:
        raise ValueError("need at least one radial generator")
    g = GroupElement(k_list[0].embed(realization), realization)
    for t, k in zip(a_list, k_list[1:]):
        g = g @ radial_element(realization, t) @ k
    return cartan_radial(g)


def sample_product_radii(realization: Realization, ts: Sequence[float], size: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Radial parts of ``size`` independent products ``k_0 a_1 k_1 ... a_r k_r``.

    By bi-invariance ``k_0`` and ``k_r`` drop out, so only the ``r - 1`` inner
    rotations are drawn.
    """
    ts = [float(t) for t in ts]
    total = sum(ts)
    if realization.kind == "sl2":
        g = np.broadcast_to(np.diag([np.exp(ts[0] / 2), np.exp(-ts[0] / 2)]), (size, 2, 2)).copy()
        for i, t in enumerate(ts[1:], start=1):
            k = sample_K(realization, rng, size)
            a = np.array([np.exp(t / 2), np.exp(-t / 2)])
            g = np.einsum("nij,njk->nik", g, k) * a[None, None, :]
            if total > 30.0 and i % 4 == 0:
                g /= np.sqrt(np.abs(np.linalg.det(g)))[:, None, None]
        return _snap(_radial_sl2(g))
    # track the orbit point g e_{n+1} on the hyperboloid
    n = realization.n
    t_last = ts[-1]
    x = np.zeros((size, n + 1))
    x[:, 0] = np.sinh(t_last)
    x[:, -1] = np.cosh(t_last)
    for i, t in enumerate(reversed(ts[:-1]), start=1):
        k = sample_K(realization, rng, size)
        spatial = np.einsum("nij,nj->ni", k, x[:, :n])
        ch, sh = np.cosh(t), np.sinh(t)
        x0 = ch * spatial[:, 0] + sh * x[:, -1]
        xl = sh * spatial[:, 0] + ch * x[:, -1]
        x = np.concatenate([x0[:, None], spatial[:, 1:], xl[:, None]], axis=1)
        if total > 30.0 and i % 4 == 0:
            x[:, -1] = np.sqrt(1.0 + np.sum(x[:, :n] ** 2, axis=1))
    return _snap(_radial_lorentz(x[:, :n]))
