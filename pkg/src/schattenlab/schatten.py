"""Schatten p-norms, Hilbert-Schmidt pairing, duality witnesses and containment maps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import LinalgError, as_matrix, operator_norm, svd, svd_values, trace

INF = math.inf


def check_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"Schatten exponent must lie in [1, inf], got {p}")
    return p


def parse_exponent(text) -> float:
    """Accepts numbers and the strings ``inf``/``infinity``."""
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    return check_exponent(float(text))


def dual_exponent(p: float) -> float:
    p = check_exponent(p)
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1)


def encode_exponent(p: float):
    return "inf" if p == INF else p


def norm_from_values(s: np.ndarray, p: float) -> float:
    """``(sum s_i^p)^(1/p)``, or ``max s_i`` at ``p = inf``; zero entries contribute 0."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0.0
    if p == INF:
        return float(np.max(s))
    top = float(np.max(s))
    if top == 0.0:
        return 0.0
    # factor out the top value so s^p does not underflow/overflow
    r = s[s > 0] / top
    return top * float(np.sum(r**p)) ** (1.0 / p)


def schatten_norm(a, p: float) -> float:
    p = check_exponent(p)
    return norm_from_values(svd_values(a), p)


@dataclass(frozen=True)
class SchattenReport:
    p: float
    norm: float
    singular_values: tuple[float, ...]
    dual_exponent: float

    @classmethod
    def of(cls, a, p: float) -> "SchattenReport":
        p = check_exponent(p)
        s = svd_values(a)
        return cls(p, norm_from_values(s, p), tuple(float(x) for x in s), dual_exponent(p))

    def recompute(self) -> float:
        return norm_from_values(np.array(self.singular_values), self.p)

    def to_dict(self) -> dict:
        return {
            "p": encode_exponent(self.p),
            "norm": self.norm,
            "singular_values": list(self.singular_values),
            "dual_exponent": encode_exponent(self.dual_exponent),
        }


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt pairing ``Tr(B* A)``."""
    a = as_matrix(a, name="A")
    b = as_matrix(b, name="B")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise LinalgError(f"hs_inner needs equal square shapes, got {a.shape} and {b.shape}")
    return trace(b.conj().T @ a)


def holder_witness(a, p: float) -> tuple[np.ndarray, float]:
    """Unit vector of the dual Schatten class that attains ``||A||_p``.

    Returns ``(B, attained)`` with ``||B||_q = 1`` and ``|Tr(B* A)| = ||A||_p``.
    At ``p = 1`` the witness is the partial isometry of the polar decomposition,
    at ``p = inf`` the top singular pair.
    """
    p = check_exponent(p)
    a = as_matrix(a)
    u, s, vh = svd(a)
    if s.size == 0 or s[0] == 0:
        raise ValueError("holder_witness needs a nonzero matrix")
    r = int(np.sum(s > s[0] * 1e-15))
    u, s, vh = u[:, :r], s[:r], vh[:r]
    if p == INF:
        weights = np.zeros(r)
        weights[0] = 1.0
    elif p == 1:
        weights = np.ones(r)
    else:
        weights = (s / s[0]) ** (p - 1)
        weights /= norm_from_values(weights, dual_exponent(p))
    b = (u * weights) @ vh
    return b, abs(hs_inner(a, b))


def verify_ideal_bound(x, t, y, p: float, tol: float = 1e-9) -> bool:
    """``||X T Y||_p <= ||X||_op ||T||_p ||Y||_op`` (always true; False means a bug)."""
    x, t, y = as_matrix(x, name="X"), as_matrix(t, name="T"), as_matrix(y, name="Y")
    if x.shape[1] != t.shape[0] or t.shape[1] != y.shape[0]:
        raise LinalgError(f"shapes not composable: {x.shape}, {t.shape}, {y.shape}")
    lhs = schatten_norm(x @ t @ y, p)
    rhs = operator_norm(x) * schatten_norm(t, p) * operator_norm(y)
    return lhs <= rhs + tol * max(1.0, rhs)


def containment_map(a, p: float, q: float) -> tuple[SchattenReport, SchattenReport]:
    """The inclusion ``S_p -> S_q`` (identity on matrices) with norm reports at both ends.

    Contractivity of the inclusion is the statement ``pair[1].norm <= pair[0].norm``.
    """
    p, q = check_exponent(p), check_exponent(q)
    if p > q:
        raise ValueError(f"containment runs from smaller to larger exponent, got p={p} > q={q}")
    return SchattenReport.of(a, p), SchattenReport.of(a, q)
