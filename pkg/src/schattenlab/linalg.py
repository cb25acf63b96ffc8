"""Dense complex matrix kernels.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``; the helpers
here validate shapes and finiteness and provide the one-sided Jacobi SVD used
by every Schatten computation, plus rank-revealing elimination for kernels.
"""
from __future__ import annotations

import numpy as np

MAX_SWEEPS = 60
GRAM_TOL = 1e-26


class LinalgError(ValueError):
    """Raised on shape mismatches, non-finite input or SVD non-convergence."""


def as_matrix(a, *, name: str = "A") -> np.ndarray:
    """Coerce ``a`` to a finite complex 2-D array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise LinalgError(f"{name}: expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError(f"{name}: non-finite entries")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    if a.shape[1] != b.shape[0]:
        raise LinalgError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise LinalgError(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint column pairings covering every pair once per sweep (circle method)."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        left, right = [], []
        for i in range(k // 2):
            a, b = players[i], players[k - 1 - i]
            if a >= 0 and b >= 0:
                left.append(min(a, b))
                right.append(max(a, b))
        rounds.append((np.array(left, dtype=int), np.array(right, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_tall(a: np.ndarray, want_vectors: bool):
    """One-sided Jacobi on a matrix with rows >= cols.

    Returns ``(W, V)`` with ``a @ V = W`` and the columns of ``W`` mutually
    orthogonal; ``V`` is ``None`` when vectors are not requested.
    """
    m, n = a.shape
    w = a.copy()
    v = np.eye(n, dtype=np.complex128) if want_vectors else None
    if n < 2:
        return w, v
    fro2 = float(np.sum(np.abs(w) ** 2))
    if fro2 == 0.0:
        return w, v
    pair_tol = max(m, n) * np.finfo(float).eps
    rounds = _round_robin(n)
    for _ in range(MAX_SWEEPS):
        off_mass = 0.0
        worst = 0.0
        for left, right in rounds:
            if left.size == 0:
                continue
            wi = w[:, left]
            wj = w[:, right]
            alpha = np.sum(np.abs(wi) ** 2, axis=0)
            beta = np.sum(np.abs(wj) ** 2, axis=0)
            gamma = np.sum(wi.conj() * wj, axis=0)
            g = np.abs(gamma)
            off_mass += float(np.sum(g**2))
            scale = np.sqrt(alpha * beta)
            active = (g > 0) & (g > pair_tol * scale)
            if not np.any(active):
                continue
            worst = max(worst, float(np.max(g[active] / scale[active])))
            phase = np.ones_like(gamma)
            phase[active] = gamma[active] / g[active]
            zeta = np.zeros_like(alpha)
            zeta[active] = (beta[active] - alpha[active]) / (2.0 * g[active])
            t = np.zeros_like(alpha)
            sgn = np.where(zeta[active] >= 0, 1.0, -1.0)
            t[active] = sgn / (np.abs(zeta[active]) + np.sqrt(1.0 + zeta[active] ** 2))
            c = 1.0 / np.sqrt(1.0 + t**2)
            s = c * t
            # column j is first rotated by conj(phase) so the pair's inner product is real
            bj = wj * phase.conj()
            w[:, left] = c * wi - s * bj
            w[:, right] = s * wi + c * bj
            if v is not None:
                vi = v[:, left]
                vj = v[:, right] * phase.conj()
                v[:, left] = c * vi - s * vj
                v[:, right] = s * vi + c * vj
        if worst == 0.0 or off_mass <= GRAM_TOL * fro2**2:
            return w, v
    raise LinalgError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")


def _scaled(a: np.ndarray) -> tuple[np.ndarray, float]:
    """``a / max|a_ij|`` so squared column norms neither overflow nor underflow."""
    top = float(np.max(np.abs(a))) if a.size else 0.0
    return (a / top, top) if top > 0 else (a, 1.0)


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``a = U @ diag(s) @ Vh`` with ``s`` non-increasing.

    Columns of ``U`` belonging to zero singular values are zero vectors; callers
    that need them should restrict to the nonzero part.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        u, s, vh = svd(a.conj().T)
        return vh.conj().T, s, u.conj().T
    a, top = _scaled(a)
    w, v = _jacobi_tall(a, want_vectors=True)
    s = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros_like(w)
    nz = s > 0
    u[:, nz] = w[:, nz] / s[nz]
    return u, s * top, v.conj().T


def svd_values(a) -> np.ndarray:
    """All ``min(rows, cols)`` singular values, non-increasing."""
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    if a.size == 0:
        return np.zeros(0)
    a, top = _scaled(a)
    w, _ = _jacobi_tall(a, want_vectors=False)
    s = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    return np.sort(s)[::-1] * top


def operator_norm(a) -> float:
    s = svd_values(a)
    return float(s[0]) if s.size else 0.0


def rref(a, tol: float | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form by Gauss-Jordan elimination with partial pivoting.

    Entries below ``tol`` (default ``1e-10 * max|a|``) count as zero when picking
    pivots. Returns the reduced matrix and the pivot column indices.
    """
    r = as_matrix(a).copy()
    rows, cols = r.shape
    if tol is None:
        tol = 1e-10 * (float(np.max(np.abs(r))) if r.size else 0.0)
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        k = row + int(np.argmax(np.abs(r[row:, col])))
        if abs(r[k, col]) <= tol:
            r[row:, col] = 0
            continue
        if k != row:
            r[[row, k]] = r[[k, row]]
        r[row] = r[row] / r[row, col]
        r[row, col] = 1.0
        others = np.arange(rows) != row
        factors = r[others, col].copy()
        r[others] -= np.outer(factors, r[row])
        r[others, col] = 0.0
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a, tol: float | None = None) -> int:
    a = as_matrix(a)
    if a.size == 0:
        return 0
    return len(rref(a, tol)[1])


def nullspace(a, tol: float | None = None, return_free: bool = False):
    """Basis of ``{x : a @ x = 0}`` as columns, one per free variable.

    Each basis vector has a 1 at its free column and 0 at the other free columns;
    with ``return_free`` the free column indices are returned as well.
    """
    a = as_matrix(a)
    cols = a.shape[1]
    if a.shape[0] == 0:
        basis = np.eye(cols, dtype=np.complex128)
        return (basis, list(range(cols))) if return_free else basis
    r, pivots = rref(a, tol)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.complex128)
    for k, f in enumerate(free):
        basis[f, k] = 1.0
        for i, pc in enumerate(pivots):
            basis[pc, k] = -r[i, f]
    return (basis, free) if return_free else basis
