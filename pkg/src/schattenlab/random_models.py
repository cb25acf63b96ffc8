"""Random spaces, functions, matrices and unitaries for property checks."""
from __future__ import annotations

import numpy as np

from .measure_space import AtomEntry, DiffusePiece, MeasureSpace, SimpleFunction


def complex_matrix(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(complex_matrix(rng, d))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _partition(rng: np.random.Generator, a: float, b: float, max_parts: int = 3) -> list[tuple[float, float]]:
    k = int(rng.integers(1, max_parts + 1))
    cuts = sorted(float(x) for x in rng.uniform(a, b, size=k - 1))
    edges = [a, *cuts, b]
    return [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo]


def _value(rng: np.random.Generator, zero_prob: float) -> complex:
    if rng.random() < zero_prob:
        return 0j
    return complex(rng.normal(), rng.normal())


def mixed_space(rng: np.random.Generator, max_atoms: int = 10, max_pieces: int = 3) -> MeasureSpace:
    """0..max_atoms atoms and 0..max_pieces disjoint diffuse pieces inside [-3, 3)."""
    atoms = tuple(AtomEntry(f"x{i}", float(rng.uniform(0.1, 3.0))) for i in range(int(rng.integers(0, max_atoms + 1))))
    k = int(rng.integers(0, max_pieces + 1))
    edges = sorted(float(x) for x in rng.uniform(-3, 3, size=2 * k))
    pieces = []
    for a, b in zip(edges[::2], edges[1::2]):
        if b - a < 1e-3:
            continue
        dens = [(s, 0.0 if rng.random() < 0.25 else float(rng.uniform(0.2, 2.0))) for s in _partition(rng, a, b)]
        pieces.append(DiffusePiece((a, b), tuple(dens)))
    return MeasureSpace(atoms, tuple(pieces))


def simple_function(rng: np.random.Generator, space: MeasureSpace, diffuse_prob: float = 0.6) -> SimpleFunction:
    av = {lab: _value(rng, 0.2) for lab in space.labels}
    if not space.diffuse or rng.random() > diffuse_prob:
        return SimpleFunction(av)
    dv = tuple(
        tuple((s, _value(rng, 0.4)) for s in _partition(rng, *piece.interval)) for piece in space.diffuse
    )
    return SimpleFunction(av, dv)
