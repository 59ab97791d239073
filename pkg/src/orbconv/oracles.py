"""Independent reference computations used to check the main code paths.

None of these share code with the modules they check: the conical function
comes from a different integral representation, root multiplicities from an
eigen-decomposition of ``ad(H)`` on an explicit Lie algebra basis, and the
separation constant from brute force on a fine grid.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "conical_function",
    "lorentz_algebra_basis",
    "unitary_algebra_basis",
    "restricted_root_counts",
    "separation_brute_force",
]


def conical_function(lam, t, order: int = 400) -> np.ndarray:
    """``P_{-1/2 + i lambda}(cosh t)`` from the Mehler-Fock integral

        (sqrt 2 / pi) int_0^t cos(lambda s) / sqrt(cosh t - cosh s) ds.

    The endpoint singularity is removed by ``s = t (1 - v^2)`` and
    ``cosh t - cosh s = 2 sinh((t+s)/2) sinh((t-s)/2)``.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    t = float(t)
    if t == 0.0:
        return np.ones(lam.shape)
    x, w = leggauss(order)
    v = 0.5 * (x + 1.0)
    w = 0.5 * w
    s = t * (1.0 - v * v)
    denom = np.sqrt(2.0 * np.sinh(0.5 * (t + s)) * np.sinh(0.5 * t * v * v))
    # ds = 2 t v dv and sqrt(sinh(t v^2/2)) ~ v sqrt(t/2): the ratio stays smooth
    kernel = 2.0 * t * v / denom
    return (np.sqrt(2.0) / np.pi) * (np.cos(np.outer(lam, s)) @ (w * kernel))


def lorentz_algebra_basis(n: int) -> list[np.ndarray]:
    """Basis of ``so(n,1)``: ``X^T J + J X = 0`` with ``J = diag(1,...,1,-1)``."""
    size = n + 1
    basis = []
    for i in range(size):
        for j in range(i + 1, size):
            e = np.zeros((size, size))
            if j == n:
                # boosts are symmetric
                e[i, j] = e[j, i] = 1.0
            else:
                e[i, j], e[j, i] = 1.0, -1.0
            basis.append(e)
    return basis


def unitary_algebra_basis(m: int) -> list[np.ndarray]:
    """Real basis of ``su(m,1)`` as complex matrices."""
    size = m + 1
    J = np.diag([1.0] * m + [-1.0])
    candidates = []
    for i in range(size):
        for j in range(size):
            for unit in (1.0, 1j):
                e = np.zeros((size, size), dtype=complex)
                e[i, j] = unit
                candidates.append(e)
    # project onto the Lie algebra: X -> (X - J X^* J) / 2, then drop the trace
    vecs = []
    for e in candidates:
        x = 0.5 * (e - J @ e.conj().T @ J)
        x = x - np.trace(x) / size * np.eye(size)
        vecs.append(np.concatenate([x.real.ravel(), x.imag.ravel()]))
    vecs = np.array(vecs)
    u, s, vt = np.linalg.svd(vecs, full_matrices=False)
    rank = int(np.sum(s > 1e-10))
    out = []
    for row in vt[:rank]:
        half = size * size
        out.append((row[:half] + 1j * row[half:]).reshape(size, size))
    return out


def restricted_root_counts(basis: list[np.ndarray], H: np.ndarray, tol: float = 1e-8) -> dict:
    """Eigenvalues of ``ad(H)`` on the span of ``basis`` with multiplicities."""
    flat = np.array([np.concatenate([np.real(b).ravel(), np.imag(b).ravel()]) for b in basis]).T
    cols = []
    for b in basis:
        br = H @ b - b @ H
        target = np.concatenate([np.real(br).ravel(), np.imag(br).ravel()])
        coef, *_ = np.linalg.lstsq(flat, target, rcond=None)
        cols.append(coef)
    ad = np.array(cols).T
    eig = np.linalg.eigvals(ad)
    if np.max(np.abs(eig.imag)) > tol:
        raise ValueError("ad(H) is not diagonalizable over the reals")
    vals = np.round(eig.real / tol) * tol
    uniq, counts = np.unique(np.round(vals, 6), return_counts=True)
    return {float(v): int(c) for v, c in zip(uniq, counts)}


def separation_brute_force(roots, points: int = 1_000_000) -> float:
    """``min_u max_i |<u, alpha_i>|`` over a fine grid of the rank-2 unit circle."""
    roots = np.asarray(roots, dtype=float)
    if roots.shape[1] != 2:
        raise ValueError("brute-force oracle is rank-2 only")
    theta = np.linspace(0.0, np.pi, points, endpoint=False)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return float(np.min(np.max(np.abs(u @ roots.T), axis=1)))
