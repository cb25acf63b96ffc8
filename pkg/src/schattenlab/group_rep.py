"""Finite groups, unitary representations and the induced group-algebra representation.

Haar measure is counting measure, so ``pi(f) = sum_x f(x) pi(x)`` and the group
algebra ``L^1(G)`` is ``C^|G|`` with convolution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import as_matrix, nullspace, operator_norm
from .schatten import check_exponent, schatten_norm

UNITARY_TOL = 1e-10
INTERTWINE_TOL = 1e-9


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group given by its Cayley table ``table[a, b] = a * b`` on indices ``0..n-1``."""

    table: np.ndarray
    name: str = "G"
    element_names: Optional[tuple[str, ...]] = None
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise GroupError("Cayley table must be a non-empty square")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise GroupError("Cayley table entries out of range")
        full = np.arange(n)
        for r in range(n):
            if not (np.array_equal(np.sort(t[r]), full) and np.array_equal(np.sort(t[:, r]), full)):
                raise GroupError("Cayley table is not a Latin square")
        # (ab)c == a(bc) for all triples
        lhs = t[t[:, :, None], np.arange(n)[None, None, :]]
        rhs = t[np.arange(n)[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise GroupError("Cayley table is not associative")
        ids = [e for e in range(n) if np.array_equal(t[e], full) and np.array_equal(t[:, e], full)]
        if not ids:
            raise GroupError("no identity element")
        e = ids[0]
        inv = np.array([int(np.where(t[a] == e)[0][0]) for a in range(n)])
        if not np.all(t[inv, full] == e):
            raise GroupError("left and right inverses disagree")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverse", inv)
        if self.element_names is not None and len(self.element_names) != n:
            raise GroupError("element_names has the wrong length")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def to_json(self) -> dict:
        out = {"schema": 1, "name": self.name, "cayley": self.table.tolist()}
        if self.element_names is not None:
            out["elements"] = list(self.element_names)
        return out

    @classmethod
    def from_json(cls, obj) -> "FiniteGroup":
        if not isinstance(obj, dict) or "cayley" not in obj:
            raise GroupError("$.cayley: missing Cayley table")
        if obj.get("schema", 1) != 1:
            raise GroupError(f"$.schema: unsupported version {obj['schema']!r}")
        names = obj.get("elements")
        return cls(np.array(obj["cayley"]), obj.get("name", "G"), tuple(names) if names else None)


def cyclic(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, f"Z/{n}")


def from_permutations(perms: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """Group of permutations (must be closed under composition); ``(a*b)(i) = a(b(i))``."""
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.zeros((n, n), dtype=int)
    for i, a in enumerate(perms):
        for j, b in enumerate(perms):
            c = tuple(a[k] for k in b)
            if c not in index:
                raise GroupError("permutation set is not closed")
            table[i, j] = index[c]
    return FiniteGroup(table, name, tuple("".join(map(str, p)) for p in perms))


def symmetric(k: int) -> FiniteGroup:
    return from_permutations(list(itertools.permutations(range(k))), f"S{k}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n."""
    rots = [tuple((i + r) % n for i in range(n)) for r in range(n)]
    refl = [tuple((r - i) % n for i in range(n)) for r in range(n)]
    return from_permutations(rots + refl, f"D{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    table = np.zeros((n * m, n * m), dtype=int)
    for a, b, c, d in itertools.product(range(n), range(m), range(n), range(m)):
        table[a * m + b, c * m + d] = g.table[a, c] * m + h.table[b, d]
    return FiniteGroup(table, f"{g.name}x{h.name}")


@dataclass(frozen=True, eq=False)
class UnitaryRep:
    """Homomorphism ``G -> U(d)``, validated on construction."""

    group: FiniteGroup
    matrices: tuple[np.ndarray, ...]
    name: str = "pi"

    def __post_init__(self):
        mats = tuple(as_matrix(m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        g = self.group
        if len(mats) != g.order:
            raise GroupError(f"need {g.order} matrices, got {len(mats)}")
        d = mats[0].shape[0]
        eye = np.eye(d)
        for x, m in enumerate(mats):
            if m.shape != (d, d):
                raise GroupError(f"matrix for element {x} has shape {m.shape}, expected {(d, d)}")
            if np.max(np.abs(m.conj().T @ m - eye)) > UNITARY_TOL:
                raise GroupError(f"matrix for element {x} is not unitary")
        if np.max(np.abs(mats[g.identity] - eye)) > UNITARY_TOL:
            raise GroupError("identity element is not sent to the identity")
        stack = np.stack(mats)
        for x in range(g.order):
            prod = np.einsum("ij,njk->nik", mats[x], stack)
            if np.max(np.abs(prod - stack[g.table[x]])) > UNITARY_TOL:
                raise GroupError(f"not a homomorphism at element {x}")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def conjugate(self, v) -> "UnitaryRep":
        """The equivalent representation ``x -> V pi(x) V*``."""
        v = as_matrix(v)
        return UnitaryRep(self.group, tuple(v @ m @ v.conj().T for m in self.matrices), f"{self.name}^V")

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "matrices": [[[[z.real, z.imag] for z in row] for row in m] for m in self.matrices],
        }


def regular_rep(g: FiniteGroup) -> UnitaryRep:
    """Left translation on ``C^G``: ``pi(x) e_y = e_{xy}``."""
    n = g.order
    mats = []
    for x in range(n):
        m = np.zeros((n, n))
        m[g.table[x], np.arange(n)] = 1.0
        mats.append(m)
    return UnitaryRep(g, tuple(mats), "regular")


def trivial_rep(g: FiniteGroup, dim: int = 1) -> UnitaryRep:
    return UnitaryRep(g, tuple(np.eye(dim) for _ in range(g.order)), "trivial")


def character_rep(g: FiniteGroup, values: Sequence[complex], name: str = "chi") -> UnitaryRep:
    """One-dimensional representation from a character given elementwise."""
    return UnitaryRep(g, tuple(np.array([[v]], dtype=complex) for v in values), name)


def sign_rep(g: FiniteGroup) -> UnitaryRep:
    """Sign character: parity for permutation groups, ``(-1)^x`` for even cyclic groups."""
    if g.element_names is not None and all(len(s) == len(g.element_names[0]) for s in g.element_names):
        vals = [_parity([int(c) for c in s]) for s in g.element_names]
    elif g.order % 2 == 0 and np.array_equal(g.table, cyclic(g.order).table):
        vals = [(-1) ** x for x in range(g.order)]
    else:
        raise GroupError("sign representation needs a permutation group or an even cyclic group")
    return character_rep(g, vals, "sign")


def _parity(perm: Sequence[int]) -> int:
    seen, sign = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign *= (-1) ** (length - 1)
    return sign


def dft_diagonal_rep(n: int) -> UnitaryRep:
    """``Z/n`` acting diagonally by ``x -> diag(w^{kx})``, ``w = exp(2 pi i / n)``."""
    w = np.exp(2j * np.pi / n)
    ks = np.arange(n)
    return UnitaryRep(cyclic(n), tuple(np.diag(w ** (ks * x)) for x in range(n)), "dft")


def dft_matrix(n: int) -> np.ndarray:
    """Unitary ``F`` with ``F regular(x) F* = dft_diagonal(x)`` on ``Z/n``."""
    w = np.exp(2j * np.pi / n)
    ks = np.arange(n)
    return w ** np.outer(ks, ks) / np.sqrt(n)


def direct_sum(r1: UnitaryRep, r2: UnitaryRep) -> UnitaryRep:
    if r1.group is not r2.group and not np.array_equal(r1.group.table, r2.group.table):
        raise GroupError("direct sum needs a common group")
    d1, d2 = r1.dim, r2.dim
    mats = []
    for a, b in zip(r1.matrices, r2.matrices):
        m = np.zeros((d1 + d2, d1 + d2), dtype=complex)
        m[:d1, :d1] = a
        m[d1:, d1:] = b
        mats.append(m)
    return UnitaryRep(r1.group, tuple(mats), f"{r1.name}+{r2.name}")


def _same_group(g: FiniteGroup, h: FiniteGroup) -> bool:
    return g is h or np.array_equal(g.table, h.table)


# --- group algebra ----------------------------------------------------------


def as_group_function(f, g: FiniteGroup) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    if f.shape != (g.order,):
        raise GroupError(f"group function needs {g.order} values, got shape {f.shape}")
    return f


def convolve(g: FiniteGroup, f, h) -> np.ndarray:
    """``(f * h)(x) = sum_y f(y) h(y^-1 x)``; equivalently ``sum_{y,z: yz=x} f(y) h(z)``."""
    f, h = as_group_function(f, g), as_group_function(h, g)
    out = np.zeros(g.order, dtype=np.complex128)
    np.add.at(out, g.table.ravel(), np.outer(f, h).ravel())
    return out


def involution(g: FiniteGroup, f) -> np.ndarray:
    """``f*(x) = conj(f(x^-1))``."""
    f = as_group_function(f, g)
    return f[g.inverse].conj()


def delta(g: FiniteGroup, x: int) -> np.ndarray:
    e = np.zeros(g.order, dtype=np.complex128)
    e[x] = 1.0
    return e


def induce(rep: UnitaryRep, f) -> np.ndarray:
    """``pi(f) = sum_x f(x) pi(x)``."""
    f = as_group_function(f, rep.group)
    return np.tensordot(f, np.stack(rep.matrices), axes=1)


def induce_map_matrix(rep: UnitaryRep) -> np.ndarray:
    """Matrix of the linear map ``f -> vec(pi(f))``: column ``x`` is ``vec(pi(x))``."""
    return np.stack([m.ravel() for m in rep.matrices], axis=1)


@dataclass(frozen=True)
class PullbackIdeal:
    p: float
    kernel_basis: tuple[np.ndarray, ...]
    quotient_dim: int
    algebra_dim: int
    note: str

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_basis)


def pullback_ideal(rep: UnitaryRep, p: float) -> PullbackIdeal:
    """Kernel of ``f -> pi(f)`` and the dimension of ``T_p / ker``.

    In finite dimension every operator is Schatten class, so the pullback ideal
    is the whole group algebra; what varies with the representation is the kernel.
    """
    p = check_exponent(p)
    a = induce_map_matrix(rep)
    tol = 1e-10 * max(operator_norm(a), 1.0)
    ker = nullspace(a, tol)
    basis = tuple(ker[:, k] for k in range(ker.shape[1]))
    n = rep.group.order
    return PullbackIdeal(
        p,
        basis,
        n - len(basis),
        n,
        "finite-dimensional: T_p is all of L^1(G); quotient is L^1(G)/ker(pi)",
    )


def verify_intertwiner(u, rep1: UnitaryRep, rep2: UnitaryRep, tol: float = INTERTWINE_TOL) -> bool:
    """``U pi1(x) = pi2(x) U`` for every group element."""
    u = as_matrix(u, name="U")
    if not _same_group(rep1.group, rep2.group):
        raise GroupError("representations of different groups")
    if u.shape != (rep2.dim, rep1.dim):
        raise GroupError(f"intertwiner must be {rep2.dim}x{rep1.dim}, got {u.shape}")
    return all(operator_norm(u @ a - b @ u) <= tol for a, b in zip(rep1.matrices, rep2.matrices))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def check_unitary_equiv_invariance(u, rep1: UnitaryRep, rep2: UnitaryRep, f, p: float, rtol: float = 1e-9) -> bool:
    """Unitary intertwiners preserve the Schatten norm of every ``pi(f)``."""
    if not is_unitary(u):
        raise GroupError("U must be unitary")
    if not verify_intertwiner(u, rep1, rep2):
        raise GroupError("U does not intertwine the representations")
    n1 = schatten_norm(induce(rep1, f), p)
    n2 = schatten_norm(induce(rep2, f), p)
    return abs(n1 - n2) <= rtol * max(n1, n2, np.finfo(float).tiny)


def rep_from_json(obj, g: FiniteGroup) -> UnitaryRep:
    """Either a builtin name (``regular``, ``trivial``, ``sign``, ``dft``) or explicit matrices."""
    if isinstance(obj, str):
        builders = {"regular": regular_rep, "trivial": trivial_rep, "sign": sign_rep}
        if obj == "dft":
            if not np.array_equal(g.table, cyclic(g.order).table):
                raise GroupError("$.representation: dft needs the cyclic group Z/n")
            return dft_diagonal_rep(g.order)
        if obj not in builders:
            raise GroupError(f"$.representation: unknown builtin {obj!r}")
        return builders[obj](g)
    mats = []
    for i, m in enumerate(obj.get("matrices", [])):
        try:
            arr = np.array(m, dtype=float)
        except (TypeError, ValueError):
            raise GroupError(f"$.representation.matrices[{i}]: not a numeric array") from None
        if arr.ndim == 3 and arr.shape[-1] == 2:
            arr = arr[..., 0] + 1j * arr[..., 1]
        mats.append(arr)
    return UnitaryRep(g, tuple(mats))
