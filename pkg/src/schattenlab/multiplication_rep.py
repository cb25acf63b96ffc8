"""Truncated matrices of the multiplication representation ``pi(f) g = f g`` on ``L^2(X)``.

The basis is the normalized atom indicators followed by, for every integer
cell ``[n, n+1)`` meeting the diffuse part, the modes ``exp(2 pi i m x)``
with ``|m| <= M``. Entries are computed in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .measure_space import (
    MeasureError,
    MeasureSpace,
    SimpleFunction,
    _abs_pow,
    diffuse_cells,
    diffuse_support_measure,
)
from .schatten import norm_from_values, schatten_norm

DEFAULT_MODES = (4, 8, 16, 32, 64)
SLOPE_TOL = 1e-10
CONVERGED_RATIO = 0.5


class Inconclusive(RuntimeError):
    """The numerical diagnostics could not separate convergence from divergence."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class AtomLabel:
    label: str

    def __str__(self):
        return f"Atom({self.label})"


@dataclass(frozen=True)
class GaborLabel:
    n: int
    m: int

    def __str__(self):
        return f"Gabor({self.n},{self.m})"


BasisLabel = Union[AtomLabel, GaborLabel]


@dataclass(frozen=True)
class TruncationSchedule:
    """Finite window onto the basis.

    ``include_atoms``: number of leading atoms, ``None`` for all of them.
    ``n_range``: inclusive range of Gabor cells, ``None`` for every cell meeting
    the diffuse part. ``m_max``: modes ``|m| <= m_max`` per cell.
    """

    m_max: int = 0
    include_atoms: Optional[int] = None
    n_range: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.m_max < 0:
            raise ValueError("m_max must be >= 0")
        if self.include_atoms is not None and self.include_atoms < 0:
            raise ValueError("include_atoms must be >= 0")

    def atoms(self, space: MeasureSpace) -> list[str]:
        labels = space.labels
        return labels if self.include_atoms is None else labels[: self.include_atoms]

    def cells(self, space: MeasureSpace) -> list[int]:
        touched = touched_cells(space)
        if self.n_range is None:
            return touched
        lo, hi = self.n_range
        wanted = list(range(lo, hi + 1))
        stray = [n for n in wanted if n not in touched]
        if stray:
            raise MeasureError(f"cells {stray} do not meet any diffuse piece")
        return wanted

    def with_modes(self, m_max: int) -> "TruncationSchedule":
        return TruncationSchedule(m_max, self.include_atoms, self.n_range)


def touched_cells(space: MeasureSpace) -> list[int]:
    out: set[int] = set()
    for piece in space.diffuse:
        a, b = piece.interval
        out.update(range(math.floor(a), math.ceil(b)))
    return sorted(out)


def mode_integral(k: int, lo: float, hi: float) -> complex:
    """``int_lo^hi exp(2 pi i k x) dx`` in closed form."""
    if k == 0:
        return complex(hi - lo)
    w = 2j * math.pi * k
    return (np.exp(w * hi) - np.exp(w * lo)) / w


def cell_coefficients(space: MeasureSpace, f: SimpleFunction, n: int, m_max: int) -> np.ndarray:
    """``c[k] = int_n^{n+1} f d exp(2 pi i k x) dx`` for ``k = -2M..2M`` (index ``k + 2M``)."""
    ks = range(-2 * m_max, 2 * m_max + 1)
    c = np.zeros(len(ks), dtype=np.complex128)
    for lo, hi, d, v in diffuse_cells(space, f):
        lo, hi = max(lo, n), min(hi, n + 1)
        if hi <= lo or v == 0 or d == 0:
            continue
        c += v * d * np.array([mode_integral(k, lo, hi) for k in ks])
    return c


@dataclass(frozen=True)
class OperatorTruncation:
    matrix: np.ndarray
    labels: tuple[BasisLabel, ...]
    schedule: TruncationSchedule
    space: MeasureSpace = field(repr=False)
    function: SimpleFunction = field(repr=False)

    @property
    def atom_block(self) -> slice:
        k = sum(isinstance(l, AtomLabel) for l in self.labels)
        return slice(0, k)


def build_truncation(space: MeasureSpace, f: SimpleFunction, sched: TruncationSchedule) -> OperatorTruncation:
    """Matrix of ``pi(f)`` on the scheduled basis.

    Atom block: ``diag(f(x))``. Cell ``n`` block: entry ``(m, m')`` is
    ``int_n^{n+1} f d exp(2 pi i (m - m') x) dx``. Cross blocks are zero.
    """
    f.check_on(space)
    atoms = sched.atoms(space)
    cells_ = sched.cells(space)
    M = sched.m_max
    width = 2 * M + 1
    labels: list[BasisLabel] = [AtomLabel(a) for a in atoms]
    labels += [GaborLabel(n, m) for n in cells_ for m in range(-M, M + 1)]
    dim = len(labels)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for i, a in enumerate(atoms):
        mat[i, i] = f.value_at_atom(a)
    ms = np.arange(-M, M + 1)
    diff = ms[:, None] - ms[None, :] + 2 * M
    for j, n in enumerate(cells_):
        c = cell_coefficients(space, f, n, M)
        off = len(atoms) + j * width
        mat[off : off + width, off : off + width] = c[diff]
    return OperatorTruncation(mat, tuple(labels), sched, space, f)


def _cell_abs_power(space: MeasureSpace, f: SimpleFunction, p: float, n: int) -> float:
    total = 0.0
    for lo, hi, d, v in diffuse_cells(space, f):
        lo, hi = max(lo, n), min(hi, n + 1)
        if hi > lo:
            total += _abs_pow(v, p) * d * (hi - lo)
    return total


def trace_power_partial(space: MeasureSpace, f: SimpleFunction, p: float, sched: TruncationSchedule) -> float:
    """Partial trace of ``pi(|f|^p)`` over the scheduled basis vectors.

    Each atom contributes ``|f(x)|^p``; each cell contributes ``(2M+1)`` times
    ``int_n^{n+1} |f|^p dmu``, one copy per mode.
    """
    if not (p >= 1 and math.isfinite(p)):
        raise ValueError(f"exponent must be finite and >= 1, got {p}")
    f.check_on(space)
    total = sum(_abs_pow(f.value_at_atom(a), p) for a in sched.atoms(space))
    diffuse = sum(_cell_abs_power(space, f, p, n) for n in sched.cells(space))
    return total + (2 * sched.m_max + 1) * diffuse


@dataclass(frozen=True)
class Converged:
    limit: float
    tail: float


@dataclass(frozen=True)
class Diverges:
    linear_rate: float


def _ls_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def diagnose_divergence(
    partials: Sequence[tuple[float, float]], slope_tol: Optional[float] = None
) -> Union[Converged, Diverges]:
    """Decide whether monotone partial sums ``(size, value)`` grow without bound.

    The growth rate is the least-squares slope over the last half of the points.
    A slope at or below ``slope_tol`` (default ``1e-10 * (1 + max|value|)``) is
    convergence. Otherwise the last two increments decide: if the increments,
    or their rate per unit size, are not shrinking the sum diverges; if the last
    is at most half the previous one a geometric tail bound gives the limit;
    anything between is ``Inconclusive``.
    """
    if len(partials) < 4:
        raise ValueError("need at least 4 schedule points")
    pts = sorted(partials)
    x = np.array([float(s) for s, _ in pts])
    y = np.array([float(v) for _, v in pts])
    if np.any(np.diff(x) <= 0):
        raise ValueError("schedule sizes must be strictly increasing")
    scale = float(np.max(np.abs(y)))
    if slope_tol is None:
        slope_tol = SLOPE_TOL * (1.0 + scale)
    if np.any(np.diff(y) < -slope_tol):
        raise ValueError("partial sums must be non-decreasing")
    half = max(2, (len(x) + 1) // 2)
    slope = _ls_slope(x[-half:], y[-half:])
    last, prev = y[-1] - y[-2], y[-2] - y[-3]
    if slope <= slope_tol:
        return Converged(float(y[-1]), float(abs(last)))
    # raw increments catch log growth on doubling sizes; per-unit increments
    # catch linear growth on unevenly spaced sizes
    steady = last >= prev * (1.0 - 1e-6)
    steady_rate = last / (x[-1] - x[-2]) >= prev / (x[-2] - x[-3]) * (1.0 - 1e-6)
    if steady or steady_rate:
        return Diverges(slope)
    ratio = last / prev
    if ratio <= CONVERGED_RATIO:
        tail = last * ratio / (1.0 - ratio)
        return Converged(float(y[-1] + tail), float(tail))
    raise Inconclusive(
        f"increments shrink by only {ratio:.3g} per step; cannot separate slow convergence from divergence",
        {"slope": slope, "increment_ratio": ratio},
    )


@dataclass(frozen=True)
class Member:
    norm: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "Member"


@dataclass(frozen=True)
class NotMember:
    reason: str  # "AtomicSupportViolation" | "PSumDiverges"
    diagnostics: dict = field(default_factory=dict, compare=False)

    kind = "NotMember"


MembershipVerdict = Union[Member, NotMember]
ATOMIC_SUPPORT_VIOLATION = "AtomicSupportViolation"
PSUM_DIVERGES = "PSumDiverges"


def classify_exact(space: MeasureSpace, f: SimpleFunction, p: float) -> MembershipVerdict:
    """Membership of ``f`` in the pullback of ``S_p`` from the atomic characterization.

    ``f`` belongs iff it vanishes a.e. on the diffuse part and its atom values
    are p-summable; the norm is then the l^p norm of the atom values.
    """
    f.check_on(space)
    bad = diffuse_support_measure(space, f)
    if bad > 0:
        return NotMember(ATOMIC_SUPPORT_VIOLATION, {"diffuse_support_measure": bad})
    vals = np.array([abs(f.value_at_atom(a)) for a in space.labels])
    return Member(norm_from_values(vals, p))


def default_family(space: MeasureSpace, modes: Iterable[int] = DEFAULT_MODES) -> list[TruncationSchedule]:
    return [TruncationSchedule(m) for m in modes]


def classify_numeric(
    space: MeasureSpace,
    f: SimpleFunction,
    p: float,
    family: Optional[Sequence[TruncationSchedule]] = None,
    slope_tol: Optional[float] = None,
) -> MembershipVerdict:
    """Membership from growth of the trace partials of ``pi(|f|^p)`` along ``family``.

    Raises :class:`Inconclusive` instead of guessing.
    """
    family = list(family) if family is not None else default_family(space)
    partials = [(s.m_max, trace_power_partial(space, f, p, s)) for s in family]
    diag = {"partials": [[m, v] for m, v in partials]}
    try:
        res = diagnose_divergence(partials, slope_tol)
    except Inconclusive as e:
        e.diagnostics.update(diag)
        raise
    if isinstance(res, Diverges):
        diag["slope"] = res.linear_rate
        return NotMember(ATOMIC_SUPPORT_VIOLATION, diag)
    diag["limit"] = res.limit
    diag["tail"] = res.tail
    return Member(res.limit ** (1.0 / p) if res.limit > 0 else 0.0, diag)


def classify_atom_stream(
    term: Callable[[int], complex],
    p: float,
    sizes: Sequence[int] = (64, 128, 256, 512, 1024, 2048),
) -> MembershipVerdict:
    """Summability test for atom values supplied lazily as ``term(k)``, ``k = 0, 1, ...``.

    Used where a description has infinitely many atoms; divergence of the
    p-sum gives ``NotMember(PSumDiverges)``.
    """
    total, k, partials = 0.0, 0, []
    for n in sorted(sizes):
        while k < n:
            total += _abs_pow(complex(term(k)), p)
            k += 1
        partials.append((n, total))
    diag = {"partials": [[n, v] for n, v in partials]}
    res = diagnose_divergence(partials)
    if isinstance(res, Diverges):
        return NotMember(PSUM_DIVERGES, diag)
    return Member(res.limit ** (1.0 / p), diag)


def verify_lemma1(N: int, values: Sequence[complex], p: float, rtol: float = 1e-12) -> bool:
    """Schatten norm of ``pi(f)`` on the counting-measure model of ``{-N..N}`` vs the l^p norm."""
    if len(values) != 2 * N + 1:
        raise ValueError(f"expected {2 * N + 1} values")
    space = MeasureSpace.integers(N)
    f = SimpleFunction({str(k): v for k, v in zip(range(-N, N + 1), values)})
    op = build_truncation(space, f, TruncationSchedule())
    lhs = schatten_norm(op.matrix, p)
    rhs = norm_from_values(np.abs(np.asarray(values, dtype=complex)), p)
    return abs(lhs - rhs) <= rtol * max(rhs, np.finfo(float).tiny)


def verdict_to_dict(v: MembershipVerdict) -> dict:
    if isinstance(v, Member):
        return {"verdict": "Member", "norm": v.norm}
    return {"verdict": "NotMember", "reason": v.reason}
