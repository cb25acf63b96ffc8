"""Slow, independent reference computations used to cross-check the main routines.

Nothing here shares code with the paths it checks.
"""
from __future__ import annotations

import math

import numpy as np


def matmul_loops(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    n, k = a.shape
    m = b.shape[1]
    out = np.zeros((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            acc = 0j
            for t in range(k):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


def _negative_count(h: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Number of eigenvalues of Hermitian ``h`` below each ``lam`` (Sylvester inertia).

    The pivots of unpivoted elimination of ``h - lam I`` are ratios of leading
    principal minors of the characteristic matrix; their signs count the
    eigenvalues below ``lam``.
    """
    n = h.shape[0]
    m = np.repeat(h[None, :, :], lams.size, axis=0).astype(complex)
    m[:, np.arange(n), np.arange(n)] -= lams[:, None]
    count = np.zeros(lams.size, dtype=int)
    tiny = 1e-300
    for k in range(n):
        piv = m[:, k, k].real.copy()
        piv[piv == 0] = -tiny
        count += piv < 0
        if k + 1 < n:
            factor = m[:, k + 1 :, k] / piv[:, None]
            m[:, k + 1 :, k + 1 :] -= factor[:, :, None] * m[:, k, k + 1 :][:, None, :]
    return count


def hermitian_eigenvalues_bisection(h, iters: int = 200) -> np.ndarray:
    """All eigenvalues of a small Hermitian matrix, descending, by bisection on inertia counts."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    radius = max(float(np.max(np.sum(np.abs(h), axis=1))), 1e-300)
    lo = np.full(n, -radius)
    hi = np.full(n, radius)
    target = np.arange(n)  # find the (k+1)-th smallest eigenvalue
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = _negative_count(h, mid)
        go_left = below > target
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * radius):
            break
    return np.sort(0.5 * (lo + hi))[::-1]


def singular_values_charpoly(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    ev = hermitian_eigenvalues_bisection(matmul_loops(a.conj().T, a))
    return np.sqrt(np.clip(ev, 0.0, None))


def power_iteration_norm(a, iters: int = 2000, seed: int = 0) -> float:
    """Largest singular value from power iteration on ``A* A``."""
    a = np.asarray(a, dtype=complex)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=a.shape[1]) + 1j * rng.normal(size=a.shape[1])
    lam = 0.0
    for _ in range(iters):
        y = a.conj().T @ (a @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = y / ny
        lam_new = math.sqrt(ny)
        if abs(lam_new - lam) <= 1e-15 * lam_new:
            break
        lam = lam_new
    return float(np.linalg.norm(a @ x))


def midpoint_quadrature(fn, lo: float, hi: float, n: int = 20000) -> complex:
    h = (hi - lo) / n
    xs = lo + h * (np.arange(n) + 0.5)
    return complex(np.sum(fn(xs)) * h)


def gauss_legendre(fn, lo: float, hi: float, n: int = 64, panels: int = 16) -> complex:
    """Composite Gauss-Legendre quadrature."""
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0j
    for a, b in zip(edges, edges[1:]):
        xs = 0.5 * (b - a) * x + 0.5 * (b + a)
        total += 0.5 * (b - a) * np.sum(w * fn(xs))
    return complex(total)


def overlap_support_measure(space, f) -> float:
    """``mu({f != 0})`` on the diffuse part by pairwise interval overlaps."""
    total = 0.0
    parts = f.diffuse_values or [None] * len(space.diffuse)
    for piece, part in zip(space.diffuse, parts):
        if not part:
            continue
        for (dlo, dhi), d in piece.density:
            for (vlo, vhi), v in part:
                if v == 0 or d == 0:
                    continue
                total += max(0.0, min(dhi, vhi) - max(dlo, vlo)) * d
    return total


def quadrature_mode_integral(k: int, lo: float, hi: float) -> complex:
    if k == 0:
        return complex(hi - lo)
    return gauss_legendre(lambda x: np.exp(2j * np.pi * k * x), lo, hi)
