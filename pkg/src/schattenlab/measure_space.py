"""Finite descriptions of sigma-finite measure spaces and simple functions on them.

A space is a list of labelled atoms (point masses) together with diffuse
intervals carrying a piecewise-constant density. Functions are complex simple
functions: a value per atom and a piecewise-constant value on each diffuse
piece. Every integral is evaluated in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

SCHEMA_VERSION = 1

Interval = tuple[float, float]


class MeasureError(ValueError):
    """A space or function violates its invariants, or the two do not match."""


class SchemaError(MeasureError):
    """JSON input does not follow the documented schema; message starts with the path."""


def _check_partition(interval: Interval, subs: Sequence[Interval], where: str) -> None:
    a, b = interval
    if not subs:
        raise MeasureError(f"{where}: empty partition of [{a}, {b})")
    if subs[0][0] != a or subs[-1][1] != b:
        raise MeasureError(f"{where}: partition does not cover [{a}, {b}) exactly")
    for i, (lo, hi) in enumerate(subs):
        if not lo < hi:
            raise MeasureError(f"{where}[{i}]: empty or reversed subinterval [{lo}, {hi})")
        if i and subs[i - 1][1] != lo:
            raise MeasureError(f"{where}[{i}]: subintervals not contiguous at {lo}")


@dataclass(frozen=True)
class AtomEntry:
    label: str
    mass: float

    def __post_init__(self):
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise MeasureError(f"atom {self.label!r}: mass must be positive and finite")


@dataclass(frozen=True)
class DiffusePiece:
    """Interval ``[a, b)`` with density given as ``((lo, hi), value)`` pairs."""

    interval: Interval
    density: tuple[tuple[Interval, float], ...]

    def __post_init__(self):
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise MeasureError(f"diffuse interval [{a}, {b}) is empty or unbounded")
        object.__setattr__(self, "density", tuple((tuple(s), float(v)) for s, v in self.density))
        _check_partition(self.interval, [s for s, _ in self.density], "density")
        for (lo, hi), v in self.density:
            if not (math.isfinite(v) and v >= 0):
                raise MeasureError(f"density on [{lo}, {hi}) must be finite and >= 0")

    @classmethod
    def uniform(cls, a: float, b: float, density: float = 1.0) -> "DiffusePiece":
        return cls((a, b), (((a, b), density),))

    def measure(self) -> float:
        return sum((hi - lo) * d for (lo, hi), d in self.density)


@dataclass(frozen=True)
class MeasureSpace:
    atoms: tuple[AtomEntry, ...] = ()
    diffuse: tuple[DiffusePiece, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "diffuse", tuple(self.diffuse))
        labels = [a.label for a in self.atoms]
        if len(set(labels)) != len(labels):
            raise MeasureError("atom labels must be unique")
        spans = sorted(p.interval for p in self.diffuse)
        for (_, b0), (a1, _) in zip(spans, spans[1:]):
            if a1 < b0:
                raise MeasureError("diffuse intervals overlap")

    @classmethod
    def integers(cls, n: int, mass: float = 1.0) -> "MeasureSpace":
        """Counting-measure model of ``{-n, ..., n}``; labels are the integers as strings."""
        return cls(tuple(AtomEntry(str(k), mass) for k in range(-n, n + 1)))

    @classmethod
    def lebesgue(cls, a: float = 0.0, b: float = 1.0) -> "MeasureSpace":
        return cls(diffuse=(DiffusePiece.uniform(a, b),))

    @property
    def labels(self) -> list[str]:
        return [a.label for a in self.atoms]

    def mass(self, label: str) -> float:
        for a in self.atoms:
            if a.label == label:
                return a.mass
        raise MeasureError(f"unknown atom {label!r}")

    def total_measure(self) -> float:
        return sum(a.mass for a in self.atoms) + sum(p.measure() for p in self.diffuse)


@dataclass(frozen=True)
class SimpleFunction:
    """Complex simple function.

    ``atom_values`` maps labels to values (absent labels are 0). ``diffuse_values``
    has one partition per diffuse piece of the space, in the same order; an empty
    tuple means the function vanishes on every diffuse piece.
    """

    atom_values: dict[str, complex] = field(default_factory=dict)
    diffuse_values: tuple[tuple[tuple[Interval, complex], ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atom_values", {k: complex(v) for k, v in self.atom_values.items()})
        object.__setattr__(
            self,
            "diffuse_values",
            tuple(tuple((tuple(s), complex(v)) for s, v in part) for part in self.diffuse_values),
        )
        for k, v in self.atom_values.items():
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise MeasureError(f"atom value for {k!r} is not finite")

    @classmethod
    def zero(cls) -> "SimpleFunction":
        return cls()

    @classmethod
    def constant_on(cls, space: MeasureSpace, value: complex, atoms: bool = True) -> "SimpleFunction":
        av = {lab: value for lab in space.labels} if atoms else {}
        dv = tuple(((p.interval, value),) for p in space.diffuse)
        return cls(av, dv)

    @classmethod
    def indicator_atom(cls, label: str) -> "SimpleFunction":
        return cls({label: 1.0})

    def value_at_atom(self, label: str) -> complex:
        return self.atom_values.get(label, 0j)

    def check_on(self, space: MeasureSpace) -> None:
        labels = set(space.labels)
        for k in self.atom_values:
            if k not in labels:
                raise MeasureError(f"function references unknown atom {k!r}")
        if self.diffuse_values and len(self.diffuse_values) != len(space.diffuse):
            raise MeasureError(
                f"function has {len(self.diffuse_values)} diffuse partitions, space has {len(space.diffuse)}"
            )
        for i, (piece, part) in enumerate(zip(space.diffuse, self.diffuse_values)):
            _check_partition(piece.interval, [s for s, _ in part], f"diffuse_values[{i}]")
            for (lo, hi), v in part:
                if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                    raise MeasureError(f"diffuse_values[{i}]: non-finite value on [{lo}, {hi})")

    def map(self, fn) -> "SimpleFunction":
        """Pointwise ``fn`` applied to every value (``fn(0)`` should be 0)."""
        return SimpleFunction(
            {k: fn(v) for k, v in self.atom_values.items()},
            tuple(tuple((s, fn(v)) for s, v in part) for part in self.diffuse_values),
        )

    def scale(self, lam: complex) -> "SimpleFunction":
        return self.map(lambda v: lam * v)

    def conj(self) -> "SimpleFunction":
        return self.map(lambda v: v.conjugate())


Cell = tuple[float, float, float, complex]


def cells(piece: DiffusePiece, part: Sequence[tuple[Interval, complex]] | None) -> Iterator[Cell]:
    """Common refinement of a density partition and a value partition.

    Yields ``(lo, hi, density, value)`` over ``piece``; ``part=None`` means the
    function is 0 on the piece.
    """
    if not part:
        for (lo, hi), d in piece.density:
            yield lo, hi, d, 0j
        return
    dens = list(piece.density)
    vals = list(part)
    i = j = 0
    lo = piece.interval[0]
    while i < len(dens) and j < len(vals):
        hi = min(dens[i][0][1], vals[j][0][1])
        if hi > lo:
            yield lo, hi, dens[i][1], vals[j][1]
        lo = hi
        if dens[i][0][1] == hi:
            i += 1
        if vals[j][0][1] == hi:
            j += 1


def diffuse_cells(space: MeasureSpace, f: SimpleFunction) -> Iterator[Cell]:
    parts = f.diffuse_values or (None,) * len(space.diffuse)
    for piece, part in zip(space.diffuse, parts):
        yield from cells(piece, part)


def _abs_pow(v: complex, p: float) -> float:
    a = abs(v)
    return 0.0 if a == 0.0 else a**p


def integrate_abs_power(space: MeasureSpace, f: SimpleFunction, p: float) -> float:
    """Closed-form ``int_X |f|^p dmu``."""
    if not (p >= 1 and math.isfinite(p)):
        raise MeasureError(f"exponent must be finite and >= 1, got {p}")
    f.check_on(space)
    total = sum(_abs_pow(f.value_at_atom(a.label), p) * a.mass for a in space.atoms)
    total += sum(_abs_pow(v, p) * d * (hi - lo) for lo, hi, d, v in diffuse_cells(space, f))
    return total


def ess_sup(space: MeasureSpace, f: SimpleFunction) -> float:
    """Essential supremum of ``|f|``: null sets (zero-density cells) are ignored."""
    f.check_on(space)
    vals = [abs(f.value_at_atom(a.label)) for a in space.atoms]
    vals += [abs(v) for lo, hi, d, v in diffuse_cells(space, f) if d > 0]
    return max(vals, default=0.0)


@dataclass(frozen=True)
class Decomposition:
    """Atom set ``D`` and the positive-density support of the diffuse part ``F``."""

    atoms: tuple[AtomEntry, ...]
    diffuse_support: tuple[tuple[Interval, float], ...]

    def atom_measure(self) -> float:
        return sum(a.mass for a in self.atoms)

    def diffuse_measure(self) -> float:
        return sum((hi - lo) * d for (lo, hi), d in self.diffuse_support)


def decompose(space: MeasureSpace) -> Decomposition:
    support = tuple(
        (s, d) for piece in space.diffuse for s, d in piece.density if d > 0
    )
    return Decomposition(tuple(a for a in space.atoms if a.mass > 0), support)


def is_atomless(space: MeasureSpace) -> bool:
    return not decompose(space).atoms


def diffuse_support_measure(space: MeasureSpace, f: SimpleFunction) -> float:
    """``mu({f != 0} ∩ F)``: the diffuse measure where ``f`` does not vanish."""
    f.check_on(space)
    return sum((hi - lo) * d for lo, hi, d, v in diffuse_cells(space, f) if v != 0)


@dataclass(frozen=True)
class InvariantCounting:
    scale: float


@dataclass(frozen=True)
class NotInvariant:
    pass


def check_group_invariance(group_size: int, masses: Sequence[float]) -> Union[InvariantCounting, NotInvariant]:
    """Decide whether singleton masses on a finite group are translation invariant.

    Translations act transitively on singletons, so invariance means every
    singleton carries the same mass and the measure is that multiple of counting
    measure.
    """
    if group_size < 1:
        raise MeasureError("group must be non-empty")
    if len(masses) != group_size:
        raise MeasureError(f"expected {group_size} masses, got {len(masses)}")
    if any(not (m > 0 and math.isfinite(m)) for m in masses):
        raise MeasureError("singleton masses must be positive and finite")
    if max(masses) == min(masses):
        return InvariantCounting(float(masses[0]))
    return NotInvariant()


# --- JSON -------------------------------------------------------------------


def _num(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {x!r}")
    return float(x)


def _complex(x, path: str) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SchemaError(f"{path}: complex values are [re, im] pairs")
        return complex(_num(x[0], f"{path}[0]"), _num(x[1], f"{path}[1]"))
    return complex(_num(x, path))


def _interval(x, path: str) -> Interval:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise SchemaError(f"{path}: expected [lo, hi]")
    return _num(x[0], f"{path}[0]"), _num(x[1], f"{path}[1]")


def _check_schema(obj, path: str = "$") -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    if obj.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema: unsupported version {obj['schema']!r}")


def _encode_complex(v: complex):
    return v.real if v.imag == 0 else [v.real, v.imag]


def space_to_json(space: MeasureSpace) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "atoms": [{"label": a.label, "mass": a.mass} for a in space.atoms],
        "diffuse": [
            {
                "interval": list(p.interval),
                "density": [{"sub": list(s), "value": v} for s, v in p.density],
            }
            for p in space.diffuse
        ],
    }


def space_from_json(obj) -> MeasureSpace:
    _check_schema(obj)
    atoms = []
    for i, a in enumerate(obj.get("atoms", [])):
        path = f"$.atoms[{i}]"
        if not isinstance(a, dict) or not isinstance(a.get("label"), str):
            raise SchemaError(f"{path}.label: expected a string")
        try:
            atoms.append(AtomEntry(a["label"], _num(a.get("mass"), f"{path}.mass")))
        except SchemaError:
            raise
        except MeasureError as e:
            raise SchemaError(f"{path}.mass: {e}") from None
    pieces = []
    for i, p in enumerate(obj.get("diffuse", [])):
        path = f"$.diffuse[{i}]"
        if not isinstance(p, dict):
            raise SchemaError(f"{path}: expected an object")
        interval = _interval(p.get("interval"), f"{path}.interval")
        dens = p.get("density")
        if dens is None:
            dens = [{"sub": list(interval), "value": 1.0}]
        if not isinstance(dens, list):
            raise SchemaError(f"{path}.density: expected a list")
        parts = []
        for j, d in enumerate(dens):
            if not isinstance(d, dict):
                raise SchemaError(f"{path}.density[{j}]: expected an object")
            parts.append(
                (_interval(d.get("sub"), f"{path}.density[{j}].sub"), _num(d.get("value"), f"{path}.density[{j}].value"))
            )
        try:
            pieces.append(DiffusePiece(interval, tuple(parts)))
        except MeasureError as e:
            raise SchemaError(f"{path}: {e}") from None
    try:
        return MeasureSpace(tuple(atoms), tuple(pieces))
    except MeasureError as e:
        raise SchemaError(f"$: {e}") from None


def function_to_json(f: SimpleFunction) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "atoms": {k: _encode_complex(v) for k, v in f.atom_values.items()},
        "diffuse": [[{"sub": list(s), "value": _encode_complex(v)} for s, v in part] for part in f.diffuse_values],
    }


def function_from_json(obj, space: MeasureSpace | None = None) -> SimpleFunction:
    """Parse a function; when ``space`` is given the result is checked against it."""
    _check_schema(obj)
    atoms = obj.get("atoms", {})
    if not isinstance(atoms, dict):
        raise SchemaError("$.atoms: expected an object keyed by atom label")
    av = {k: _complex(v, f"$.atoms.{k}") for k, v in atoms.items()}
    dv = []
    for i, part in enumerate(obj.get("diffuse", [])):
        if not isinstance(part, list):
            raise SchemaError(f"$.diffuse[{i}]: expected a list")
        cells_ = []
        for j, c in enumerate(part):
            if not isinstance(c, dict):
                raise SchemaError(f"$.diffuse[{i}][{j}]: expected an object")
            cells_.append((_interval(c.get("sub"), f"$.diffuse[{i}][{j}].sub"), _complex(c.get("value"), f"$.diffuse[{i}][{j}].value")))
        dv.append(tuple(cells_))
    f = SimpleFunction(av, tuple(dv))
    if space is not None:
        try:
            f.check_on(space)
        except MeasureError as e:
            raise SchemaError(f"$: {e}") from None
    return f
