"""Finite models of the exact sequences ``0 -> S_p(A) -> S_p(H) -> S_p(H)/pi(S_p(A)) -> 0``.

A *context* fixes a representation of a finite-dimensional algebra: either the
multiplication representation of simple functions on a measure space (cut down
by a truncation schedule) or a unitary group representation extended to the
group algebra. For every exponent ``p`` a :class:`SequenceNode` records

* left space: coordinates of algebra basis elements in the pullback ideal,
  modulo the kernel of ``pi``;
* mid space: all ``D x D`` matrices, flattened row-major;
* connecting map ``C``: columns ``vec(pi(b))`` over the left basis;
* quotient map ``Q``: rows spanning the annihilator of ``im C``.

Exactness and commutation are checked by rank computations; with the
coordinates chosen here the maps have 0/1 entries whenever the images do, so
residuals are exactly zero.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .group_rep import UnitaryRep, is_unitary
from .linalg import as_matrix, nullspace, rank, rref
from .measure_space import MeasureSpace, SimpleFunction
from .multiplication_rep import Member, TruncationSchedule, build_truncation, classify_exact
from .schatten import INF, check_exponent, encode_exponent, schatten_norm

RANK_TOL = 1e-10
NORM_TOL = 1e-10
FUNCTOR_TOL = 1e-9
DEFAULT_GRID = (1.0, 1.5, 2.0, 3.0, INF)


class SequenceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MeasureContext:
    """Multiplication representation of ``functions`` (default: atom indicators)."""

    space: MeasureSpace
    schedule: TruncationSchedule = TruncationSchedule()
    functions: Optional[tuple[SimpleFunction, ...]] = None

    @property
    def basis(self) -> tuple[SimpleFunction, ...]:
        if self.functions is not None:
            return tuple(self.functions)
        return tuple(SimpleFunction.indicator_atom(a) for a in self.space.labels)

    @property
    def key(self) -> str:
        return f"measure:{id(self)}"

    quotient_kernel = False

    def images(self, p: float) -> tuple[list[int], list[np.ndarray]]:
        """Indices of basis functions in the pullback ideal at ``p`` and their truncations."""
        idx, mats = [], []
        for i, f in enumerate(self.basis):
            if p == INF or isinstance(classify_exact(self.space, f, p), Member):
                idx.append(i)
                mats.append(build_truncation(self.space, f, self.schedule).matrix)
        return idx, mats

    def dim(self) -> int:
        return build_truncation(self.space, SimpleFunction.zero(), self.schedule).matrix.shape[0]


@dataclass(frozen=True, eq=False)
class GroupContext:
    """Group algebra ``L^1(G)`` acting through ``rep``; basis is the point masses."""

    rep: UnitaryRep

    @property
    def key(self) -> str:
        return f"group:{id(self)}"

    quotient_kernel = True

    def images(self, p: float) -> tuple[list[int], list[np.ndarray]]:
        return list(range(self.rep.group.order)), list(self.rep.matrices)

    def dim(self) -> int:
        return self.rep.dim


Context = Union[MeasureContext, GroupContext]


@dataclass(frozen=True)
class SequenceNode:
    p: float
    context_key: str
    column: str
    left_coords: tuple[int, ...]
    connecting_map: np.ndarray
    quotient_map: np.ndarray
    free_coords: tuple[int, ...]
    mid_dim: int
    quotient_dim: int
    left_norms: tuple[float, ...]
    op_dim: int

    @property
    def left_dim(self) -> int:
        return len(self.left_coords)


def _vec(mats: Sequence[np.ndarray], mid_dim: int) -> np.ndarray:
    if not mats:
        return np.zeros((mid_dim, 0), dtype=np.complex128)
    return np.stack([as_matrix(m).ravel() for m in mats], axis=1)


def _tol(a: np.ndarray) -> float:
    return RANK_TOL * max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)


def annihilator(c: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Rows ``Q`` with ``Q @ c = 0`` spanning the annihilator of ``im c``.

    ``Q`` restricted to the returned free coordinates is the identity.
    """
    mid = c.shape[0]
    if c.shape[1] == 0:
        return np.eye(mid, dtype=np.complex128), tuple(range(mid))
    w, free = nullspace(c.conj().T, _tol(c), return_free=True)
    return w.conj().T, tuple(free)


def build_node(context: Context, p: float, column: Optional[str] = None) -> SequenceNode:
    """The sequence ``E_p`` for ``context`` with left exactness verified."""
    p = check_exponent(p)
    d = context.dim()
    mid = d * d
    idx, mats = context.images(p)
    c = _vec(mats, mid)
    if context.quotient_kernel and c.shape[1]:
        _, pivots = rref(c, _tol(c))
        idx = [idx[j] for j in pivots]
        mats = [mats[j] for j in pivots]
        c = c[:, pivots]
    r = rank(c, _tol(c)) if c.size else 0
    if r != c.shape[1]:
        raise SequenceError(f"connecting map has rank {r} < {c.shape[1]}: a kernel was not quotiented out")
    q, free = annihilator(c)
    norms = tuple(schatten_norm(m, p) for m in mats)
    label = column or ("E_inf" if p == INF else f"E_{p:g}")
    return SequenceNode(p, context.key, label, tuple(idx), c, q, free, mid, mid - r, norms, d)


@dataclass(frozen=True)
class ExactnessReport:
    column: str
    injective: bool
    quotient_consistent: bool
    image_killed: bool
    kernel_is_image: bool
    residual: float

    @property
    def passed(self) -> bool:
        return self.injective and self.quotient_consistent and self.image_killed and self.kernel_is_image

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "injective": self.injective,
            "quotient_consistent": self.quotient_consistent,
            "image_killed": self.image_killed,
            "kernel_is_image": self.kernel_is_image,
            "residual": self.residual,
            "passed": self.passed,
        }


def verify_exactness(node: SequenceNode) -> ExactnessReport:
    c, q = node.connecting_map, node.quotient_map
    rc = rank(c, _tol(c)) if c.size else 0
    rq = rank(q, _tol(q)) if q.size else 0
    residual = float(np.max(np.abs(q @ c))) if q.size and c.size else 0.0
    # together: C injective, Q C = 0 and dim ker Q = dim left, so ker Q = im C
    return ExactnessReport(
        node.column,
        injective=rc == node.left_dim,
        quotient_consistent=rq == node.quotient_dim and node.quotient_dim + node.left_dim == node.mid_dim,
        image_killed=residual <= _tol(c),
        kernel_is_image=node.mid_dim - rq == node.left_dim,
        residual=residual,
    )


@dataclass(frozen=True)
class SystemMorphism:
    p: float
    q: float
    left: np.ndarray
    mid: np.ndarray
    right: np.ndarray
    left_residual: float
    right_residual: float
    contraction_excess: float

    @property
    def commutes(self) -> bool:
        return self.left_residual == 0.0 and self.right_residual == 0.0

    @property
    def contractive(self) -> bool:
        return self.contraction_excess <= 0.0


def _selection(target: Sequence[int], source: Sequence[int]) -> np.ndarray:
    pos = {c: i for i, c in enumerate(target)}
    out = np.zeros((len(target), len(source)))
    for j, c in enumerate(source):
        if c not in pos:
            raise SequenceError(f"basis element {c} leaves the pullback ideal")
        out[pos[c], j] = 1.0
    return out


def build_morphism(
    node_p: SequenceNode, node_q: SequenceNode, rng: Optional[np.random.Generator] = None, samples: int = 8
) -> SystemMorphism:
    """``phi_{p,q}``: inclusion on the left, identity ``i_{p,q}`` in the middle, induced map on quotients."""
    if node_p.context_key != node_q.context_key:
        raise SequenceError("nodes come from different contexts")
    if node_p.p > node_q.p:
        raise SequenceError(f"morphisms run from smaller to larger exponent ({node_p.p} > {node_q.p})")
    left = _selection(node_q.left_coords, node_p.left_coords)
    mid = np.eye(node_p.mid_dim)
    right = node_q.quotient_map[:, list(node_p.free_coords)]
    cp, cq = node_p.connecting_map, node_q.connecting_map
    lres = float(np.max(np.abs(cq @ left - mid @ cp))) if cp.size else 0.0
    rres = float(np.max(np.abs(right @ node_p.quotient_map - node_q.quotient_map @ mid))) if right.size else 0.0
    d = node_p.op_dim
    elements = [cp[:, j].reshape(d, d) for j in range(cp.shape[1])]
    rng = rng or np.random.default_rng(0)
    elements += [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(samples)]
    excess = -math.inf
    for x in elements:
        np_, nq = schatten_norm(x, node_p.p), schatten_norm(x, node_q.p)
        excess = max(excess, nq - np_ - NORM_TOL * max(np_, 1.0))
    return SystemMorphism(node_p.p, node_q.p, left, mid, right, lres, rres, excess)


def compose(second: SystemMorphism, first: SystemMorphism) -> SystemMorphism:
    if first.q != second.p:
        raise SequenceError("morphisms are not composable")
    return SystemMorphism(
        first.p,
        second.q,
        second.left @ first.left,
        second.mid @ first.mid,
        second.right @ first.right,
        max(first.left_residual, second.left_residual),
        max(first.right_residual, second.right_residual),
        max(first.contraction_excess, second.contraction_excess),
    )


def _same_maps(a: SystemMorphism, b: SystemMorphism) -> bool:
    return all(np.array_equal(x, y) for x, y in ((a.left, b.left), (a.mid, b.mid), (a.right, b.right)))


@dataclass
class DirectedSystem:
    grid: tuple[float, ...]
    nodes: dict[float, SequenceNode]
    morphisms: dict[tuple[float, float], SystemMorphism]

    def coherence(self) -> dict[str, bool]:
        out = {}
        for p, q, r in itertools.combinations(self.grid, 3):
            lhs = compose(self.morphisms[(q, r)], self.morphisms[(p, q)])
            out[f"{encode_exponent(p)}<{encode_exponent(q)}<{encode_exponent(r)}"] = _same_maps(lhs, self.morphisms[(p, r)])
        return out


def build_system(context: Context, grid: Sequence[float] = DEFAULT_GRID, seed: int = 0) -> DirectedSystem:
    grid = tuple(check_exponent(p) for p in grid)
    if list(grid) != sorted(set(grid)):
        raise SequenceError("p-grid must be strictly increasing")
    rng = np.random.default_rng(seed)
    nodes = {p: build_node(context, p) for p in grid}
    morphs = {(p, q): build_morphism(nodes[p], nodes[q], rng) for p, q in itertools.combinations_with_replacement(grid, 2)}
    return DirectedSystem(grid, nodes, morphs)


def verify_system(context: Context, grid: Sequence[float] = DEFAULT_GRID, seed: int = 0) -> dict:
    """Exactness of every column, commuting blocks for every comparable pair, coherence over triples.

    When the grid ends at ``inf`` it contributes two columns, ``E_0`` (compacts)
    and ``E_inf`` (bounded operators); at finite truncation they coincide and
    are reported as such.
    """
    system = build_system(context, grid, seed)
    columns = []
    for p in system.grid:
        if p == INF:
            columns.append(("E_0", p))
            columns.append(("E_inf", p))
        else:
            columns.append((f"E_{p:g}", p))
    exact = []
    for label, p in columns:
        rep = verify_exactness(replace(system.nodes[p], column=label))
        exact.append(rep.to_dict())
    blocks = []
    for (a, pa), (b, pb) in zip(columns, columns[1:]):
        m = system.morphisms[(pa, pb)]
        blocks.append(
            {
                "from": a,
                "to": b,
                "left_square_residual": m.left_residual,
                "right_square_residual": m.right_residual,
                "commutes_exactly": m.commutes,
                "contractive": m.contractive,
            }
        )
    all_pairs = all(m.commutes and m.contractive for m in system.morphisms.values())
    coherence = system.coherence()
    rows = {
        "D0": [n.left_dim for n in system.nodes.values()],
        "D1": [n.mid_dim for n in system.nodes.values()],
        "D2": [n.quotient_dim for n in system.nodes.values()],
    }
    passed = all(e["passed"] for e in exact) and all_pairs and all(coherence.values())
    return {
        "grid": [encode_exponent(p) for p in system.grid],
        "columns": [c for c, _ in columns],
        "rows": rows,
        "exactness": exact,
        "blocks": blocks,
        "all_pairs_commute": all_pairs,
        "coherence": coherence,
        "note": "E_0 and E_inf coincide at finite truncation" if INF in system.grid else "",
        "passed": passed,
    }


def verify_fig2(
    space: MeasureSpace,
    functions: Optional[Sequence[SimpleFunction]] = None,
    schedule: TruncationSchedule = TruncationSchedule(),
    grid: Sequence[float] = DEFAULT_GRID,
    seed: int = 0,
) -> dict:
    ctx = MeasureContext(space, schedule, tuple(functions) if functions is not None else None)
    return verify_system(ctx, grid, seed)


# --- functoriality ------------------------------------------------------------


def conjugation_matrix(u: np.ndarray) -> np.ndarray:
    """Matrix of ``T -> U T U*`` on row-major vectorized operators."""
    u = as_matrix(u)
    return np.kron(u, u.conj())


@dataclass(frozen=True)
class NodeMap:
    """Action of the functor on one intertwiner at one exponent."""

    left: np.ndarray
    mid: np.ndarray
    right: np.ndarray
    left_residual: float
    right_residual: float


def induced_node_map(u, node1: SequenceNode, node2: SequenceNode) -> NodeMap:
    """Components of ``S(U)`` between ``E_p`` of two contexts related by ``U``."""
    mid = conjugation_matrix(u)
    c1, c2 = node1.connecting_map, node2.connecting_map
    target = mid @ c1
    left = np.linalg.lstsq(c2, target, rcond=None)[0] if c2.size else np.zeros((0, c1.shape[1]))
    right = node2.quotient_map @ mid[:, list(node1.free_coords)]
    lres = float(np.max(np.abs(c2 @ left - target))) if target.size else 0.0
    rres = float(np.max(np.abs(right @ node1.quotient_map - node2.quotient_map @ mid))) if right.size else 0.0
    return NodeMap(left, mid, right, lres, rres)


def _algebra_intertwines(u, images1, images2, tol=FUNCTOR_TOL) -> bool:
    return all(np.max(np.abs(u @ a - b @ u)) <= tol for a, b in zip(images1, images2))


@dataclass(frozen=True)
class FunctorCase:
    """Composable unitary intertwiners ``rep1 --U1--> rep2 --U2--> rep3``."""

    rep1: UnitaryRep
    rep2: UnitaryRep
    rep3: UnitaryRep
    u1: np.ndarray
    u2: np.ndarray


def verify_functor_laws(
    cases: Sequence[FunctorCase],
    grid: Sequence[float] = DEFAULT_GRID,
    n_operators: int = 100,
    seed: int = 0,
) -> dict:
    """Identity and composition laws of ``pi -> {E_p^pi}`` on unitary intertwiners.

    Also checks each induced node map commutes with the sequence maps and that
    ``T -> U T U*`` preserves every Schatten norm on random operators.
    """
    rng = np.random.default_rng(seed)
    worst = {"identity": 0.0, "composition": 0.0, "squares": 0.0, "norms": 0.0}
    for case in cases:
        reps = (case.rep1, case.rep2, case.rep3)
        for u, (a, b) in ((case.u1, reps[:2]), (case.u2, reps[1:])):
            if not is_unitary(u):
                raise SequenceError("functor laws are checked on unitary intertwiners only")
            if not _algebra_intertwines(u, a.matrices, b.matrices):
                raise SequenceError("U is not an intertwiner")
        ctxs = [GroupContext(r) for r in reps]
        u21 = case.u2 @ case.u1
        for p in grid:
            n1, n2, n3 = (build_node(c, p) for c in ctxs)
            ident = induced_node_map(np.eye(case.rep1.dim), n1, n1)
            for comp, want in ((ident.left, np.eye(n1.left_dim)), (ident.mid, np.eye(n1.mid_dim)), (ident.right, np.eye(n1.quotient_dim))):
                if comp.size:
                    worst["identity"] = max(worst["identity"], float(np.max(np.abs(comp - want))))
            f1, f2, f12 = induced_node_map(case.u1, n1, n2), induced_node_map(case.u2, n2, n3), induced_node_map(u21, n1, n3)
            for a, b in ((f12.left, f2.left @ f1.left), (f12.mid, f2.mid @ f1.mid), (f12.right, f2.right @ f1.right)):
                if a.size:
                    worst["composition"] = max(worst["composition"], float(np.max(np.abs(a - b))))
            worst["squares"] = max(worst["squares"], *(m.left_residual for m in (f1, f2, f12)), *(m.right_residual for m in (f1, f2, f12)))
        d = case.rep1.dim
        for _ in range(max(1, n_operators // max(len(cases), 1))):
            t = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            for u in (case.u1, case.u2, u21):
                ut = u @ t @ u.conj().T
                for p in grid:
                    a, b = schatten_norm(t, p), schatten_norm(ut, p)
                    worst["norms"] = max(worst["norms"], abs(a - b) / a)
    passed = (
        worst["identity"] <= FUNCTOR_TOL
        and worst["composition"] <= FUNCTOR_TOL
        and worst["squares"] <= FUNCTOR_TOL
        and worst["norms"] <= FUNCTOR_TOL
    )
    return {"cases": len(cases), "worst": worst, "tolerance": FUNCTOR_TOL, "passed": passed}
