import math

import numpy as np
import pytest
from hypothesis import given

from schattenlab.linalg import operator_norm
from schattenlab.measure_space import AtomEntry, DiffusePiece, MeasureError, MeasureSpace, SimpleFunction, integrate_abs_power
from schattenlab.multiplication_rep import (
    ATOMIC_SUPPORT_VIOLATION,
    PSUM_DIVERGES,
    AtomLabel,
    Converged,
    Diverges,
    GaborLabel,
    Inconclusive,
    Member,
    NotMember,
    TruncationSchedule,
    build_truncation,
    classify_atom_stream,
    classify_exact,
    classify_numeric,
    diagnose_divergence,
    mode_integral,
    trace_power_partial,
    verify_lemma1,
)
from schattenlab.oracles import quadrature_mode_integral
from schattenlab.random_models import mixed_space, simple_function
from schattenlab.schatten import INF, schatten_norm
from strategies import seeds, spaces_and_functions

LEB = MeasureSpace.lebesgue()


def chi(lo, hi, space=LEB, value=1.0):
    a, b = space.diffuse[0].interval
    parts = [((a, lo), 0.0), ((lo, hi), value), ((hi, b), 0.0)]
    return SimpleFunction(diffuse_values=(tuple((s, v) for s, v in parts if s[1] > s[0]),))


# build_truncation


def test_atoms_are_diagonal():
    space = MeasureSpace((AtomEntry("a", 2.0), AtomEntry("b", 1.0)))
    op = build_truncation(space, SimpleFunction({"a": 3, "b": -1}), TruncationSchedule())
    np.testing.assert_array_equal(op.matrix, np.diag([3, -1]))
    assert op.labels == (AtomLabel("a"), AtomLabel("b"))


def test_constant_on_cell_is_scalar():
    c = 2.5 - 1j
    op = build_truncation(LEB, SimpleFunction.constant_on(LEB, c), TruncationSchedule(2))
    np.testing.assert_allclose(op.matrix, c * np.eye(5), atol=1e-15)
    assert op.labels == tuple(GaborLabel(0, m) for m in range(-2, 3))


def test_half_indicator_entry_against_quadrature():
    op = build_truncation(LEB, chi(0, 0.5), TruncationSchedule(1))
    i, j = 1, 2  # modes m = 0, m' = 1
    want = 1 / (math.pi * 1j)
    assert op.matrix[i, j] == pytest.approx(want, abs=1e-15)
    assert op.matrix[i, j] == pytest.approx(quadrature_mode_integral(-1, 0, 0.5), abs=1e-13)


@given(seeds)
def test_mode_integral_matches_quadrature(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(-12, 13))
    lo, hi = sorted(rng.uniform(-2, 2, size=2))
    assert abs(mode_integral(k, lo, hi) - quadrature_mode_integral(k, lo, hi)) <= 1e-12


def test_cells_not_aligned_with_integers():
    space = MeasureSpace(diffuse=(DiffusePiece.uniform(-0.5, 1.25, 2.0),))
    f = SimpleFunction.constant_on(space, 1.0)
    op = build_truncation(space, f, TruncationSchedule(0))
    assert [l.n for l in op.labels] == [-1, 0, 1]
    np.testing.assert_allclose(np.diag(op.matrix), [1.0, 2.0, 0.5])


def test_schedule_errors():
    with pytest.raises(ValueError):
        TruncationSchedule(-1)
    with pytest.raises(MeasureError, match="do not meet"):
        build_truncation(LEB, SimpleFunction.zero(), TruncationSchedule(1, n_range=(0, 3)))
    with pytest.raises(MeasureError):
        build_truncation(LEB, SimpleFunction({"nope": 1}), TruncationSchedule())


# trace partials


def test_zero_function_has_zero_partials():
    space = MeasureSpace((AtomEntry("a", 1.0),), (DiffusePiece.uniform(0, 2),))
    for m in (0, 3, 17):
        assert trace_power_partial(space, SimpleFunction.zero(), 1.5, TruncationSchedule(m)) == 0.0


@pytest.mark.parametrize("N", [1, 4, 10, 30])
def test_geometric_partials(N):
    space = MeasureSpace.integers(N)
    f = SimpleFunction({str(n): 2.0 ** -abs(n) for n in range(-N, N + 1)})
    got = trace_power_partial(space, f, 1, TruncationSchedule())
    oracle = sum(2.0 ** -abs(n) for n in range(-N, N + 1))
    assert got == pytest.approx(oracle, rel=1e-15)
    assert got == pytest.approx(3 - 2.0 ** (1 - N), rel=1e-15)


@pytest.mark.parametrize("M", [0, 4, 8, 16, 32, 64])
def test_lebesgue_indicator_partials(M):
    assert trace_power_partial(LEB, SimpleFunction.constant_on(LEB, 1.0), 1, TruncationSchedule(M)) == 2 * M + 1


def test_partial_is_trace_of_abs_power():
    space = MeasureSpace((AtomEntry("a", 0.7),), (DiffusePiece.uniform(0, 2),))
    f = SimpleFunction({"a": 2j}, ((((0, 0.3), 1.5), ((0.3, 2), -0.5)),))
    p = 1.5
    absp = f.map(lambda v: complex(abs(v) ** p))
    op = build_truncation(space, absp, TruncationSchedule(3))
    assert trace_power_partial(space, f, p, TruncationSchedule(3)) == pytest.approx(np.trace(op.matrix).real, rel=1e-13)


@given(spaces_and_functions(), seeds)
def test_partials_are_monotone(sf, seed):
    space, f = sf
    p = float(np.random.default_rng(seed).choice([1.0, 2.0, 3.0]))
    vals = [trace_power_partial(space, f, p, TruncationSchedule(m)) for m in (0, 1, 4, 9)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    atoms = [trace_power_partial(space, f, p, TruncationSchedule(0, include_atoms=k)) for k in range(len(space.atoms) + 1)]
    assert all(b >= a for a, b in zip(atoms, atoms[1:]))


# diagnose_divergence


def test_diagnose_linear_growth():
    res = diagnose_divergence([(m, 2 * m + 1) for m in (4, 8, 16, 32, 64)])
    assert isinstance(res, Diverges) and res.linear_rate == pytest.approx(2.0, abs=1e-12)


def test_diagnose_linear_growth_on_uneven_sizes():
    res = diagnose_divergence([(m, 2 * m + 1) for m in (0, 1, 2, 10, 11)])
    assert isinstance(res, Diverges) and res.linear_rate == pytest.approx(2.0, abs=1e-12)


def test_diagnose_zero():
    assert diagnose_divergence([(m, 0.0) for m in (4, 8, 16, 32)]) == Converged(0.0, 0.0)


def test_diagnose_geometric_limit():
    res = diagnose_divergence([(n, 3 - 2.0 ** (1 - n)) for n in (4, 8, 16, 32, 64)])
    assert isinstance(res, Converged) and res.limit == pytest.approx(3.0, abs=1e-6)


def test_diagnose_geometric_limit_at_coarse_sizes():
    # slope above tolerance, but increments collapse: the tail bound takes over
    res = diagnose_divergence([(n, 3 - 2.0 ** (1 - n)) for n in (1, 2, 3, 4, 5)])
    assert isinstance(res, Converged) and res.limit == pytest.approx(3.0, abs=0.1)


def test_diagnose_small_amplitude_divergence():
    eps = 1e-8
    partials = [(m, trace_power_partial(LEB, SimpleFunction.constant_on(LEB, eps), 1, TruncationSchedule(m))) for m in (4, 8, 16, 32, 64)]
    res = diagnose_divergence(partials)
    assert isinstance(res, Diverges) and res.linear_rate == pytest.approx(2 * eps, rel=1e-9)
    assert isinstance(classify_numeric(LEB, SimpleFunction.constant_on(LEB, eps), 1), NotMember)


def test_diagnose_ambiguous_is_inconclusive():
    # increments shrink by a factor 0.8: neither linear growth nor a fast tail
    pts, v = [], 0.0
    for k, n in enumerate((4, 8, 16, 32, 64)):
        v += 0.8**k
        pts.append((n, v))
    with pytest.raises(Inconclusive) as info:
        diagnose_divergence(pts)
    assert "increment_ratio" in info.value.diagnostics


def test_diagnose_input_errors():
    with pytest.raises(ValueError, match="at least 4"):
        diagnose_divergence([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(ValueError, match="increasing"):
        diagnose_divergence([(1, 1), (1, 2), (3, 3), (4, 4)])
    with pytest.raises(ValueError, match="non-decreasing"):
        diagnose_divergence([(1, 5), (2, 2), (3, 3), (4, 4)])


# classification


MIXED = MeasureSpace((AtomEntry("a", 1.0),), (DiffusePiece.uniform(0, 1),))
CASES = [
    (LEB, SimpleFunction.constant_on(LEB, 1.0), 1.0, NotMember(ATOMIC_SUPPORT_VIOLATION)),
    (MeasureSpace((AtomEntry("a", 1.0), AtomEntry("b", 5.0))), SimpleFunction({"a": 3, "b": 4}), 2.0, Member(5.0)),
    (MIXED, SimpleFunction({"a": 5}, ((((0, 1), 1.0),),)), 2.0, NotMember(ATOMIC_SUPPORT_VIOLATION)),
]


@pytest.mark.parametrize("space, f, p, want", CASES)
def test_classify_examples_both_routes(space, f, p, want):
    exact = classify_exact(space, f, p)
    numeric = classify_numeric(space, f, p)
    assert type(exact) is type(want) is type(numeric)
    if isinstance(want, Member):
        assert exact.norm == pytest.approx(want.norm, rel=1e-15)
        assert numeric.norm == pytest.approx(want.norm, rel=1e-6)
    else:
        assert exact.reason == numeric.reason == want.reason


def test_classify_ten_atoms(rng):
    space = MeasureSpace(tuple(AtomEntry(f"x{i}", float(rng.uniform(0.1, 3))) for i in range(10)))
    f = SimpleFunction({f"x{i}": complex(rng.normal(), rng.normal()) for i in range(10)})
    exact, numeric = classify_exact(space, f, 1.7), classify_numeric(space, f, 1.7)
    oracle = sum(abs(v) ** 1.7 for v in f.atom_values.values()) ** (1 / 1.7)
    assert exact.norm == pytest.approx(oracle, rel=1e-14)
    assert numeric.norm == pytest.approx(exact.norm, rel=1e-6)


def test_null_diffuse_region_does_not_block_membership():
    space = MeasureSpace((AtomEntry("a", 1.0),), (DiffusePiece.uniform(0, 1, 0.0),))
    f = SimpleFunction({"a": 2.0}, ((((0, 1), 7.0),),))
    assert classify_exact(space, f, 1) == Member(2.0)
    assert isinstance(classify_numeric(space, f, 1), Member)


@given(seeds)
def test_numeric_agrees_with_exact(seed):
    rng = np.random.default_rng(seed)
    space = mixed_space(rng)
    f = simple_function(rng, space)
    for p in (1.0, 2.0, 3.0):
        exact = classify_exact(space, f, p)
        numeric = classify_numeric(space, f, p)
        assert type(exact) is type(numeric)
        if isinstance(exact, Member) and exact.norm > 0:
            assert numeric.norm == pytest.approx(exact.norm, rel=1e-6)
        member = integrate_abs_power(space, SimpleFunction({}, f.diffuse_values), p) == 0
        assert isinstance(exact, Member) == member


def test_atom_stream_modes():
    harmonic = classify_atom_stream(lambda k: 1 / (k + 1), 1.0)
    assert harmonic == NotMember(PSUM_DIVERGES)
    geometric = classify_atom_stream(lambda k: 2.0**-k, 1.0)
    assert isinstance(geometric, Member) and geometric.norm == pytest.approx(2.0, rel=1e-12)


# counting measure on the integers


def test_integer_model_examples(rng):
    assert verify_lemma1(0, [1.0], 2)
    delta = [0.0] * 5 + [1.0] + [0.0] * 5
    assert verify_lemma1(5, delta, 1.5)
    assert verify_lemma1(50, [1 / (1 + abs(n)) for n in range(-50, 51)], 2)
    assert verify_lemma1(20, rng.normal(size=41) + 1j * rng.normal(size=41), 1)
    with pytest.raises(ValueError):
        verify_lemma1(3, [1.0], 2)


@given(seeds)
def test_atoms_only_norm_is_lp_norm(seed):
    rng = np.random.default_rng(seed)
    space = mixed_space(rng)
    f = SimpleFunction(simple_function(rng, space).atom_values)
    op = build_truncation(space, f, TruncationSchedule(2))
    vals = np.abs(np.array(list(f.atom_values.values()) or [0.0]))
    for p in (1.0, 1.5, 2.0, 3.0):
        want = float(np.sum(vals**p)) ** (1 / p)
        assert schatten_norm(op.matrix, p) == pytest.approx(want, rel=1e-12, abs=1e-300)
    assert schatten_norm(op.matrix, INF) == pytest.approx(float(vals.max()), rel=1e-12, abs=1e-300)


# *-homomorphism and contractivity


@given(seeds)
def test_homomorphism_for_cellwise_constant_functions(seed):
    rng = np.random.default_rng(seed)
    space = MeasureSpace((AtomEntry("a", 1.0), AtomEntry("b", 2.0)), (DiffusePiece.uniform(-1, 2),))

    def draw():
        cells = tuple(((float(n), float(n + 1)), complex(rng.normal(), rng.normal())) for n in (-1, 0, 1))
        return SimpleFunction({"a": complex(rng.normal(), rng.normal()), "b": complex(rng.normal())}, (cells,))

    f, g = draw(), draw()
    fg = SimpleFunction(
        {k: f.value_at_atom(k) * g.value_at_atom(k) for k in space.labels},
        (tuple((s, a * b) for (s, a), (_, b) in zip(f.diffuse_values[0], g.diffuse_values[0])),),
    )
    sched = TruncationSchedule(3)
    mf, mg = build_truncation(space, f, sched).matrix, build_truncation(space, g, sched).matrix
    np.testing.assert_allclose(build_truncation(space, fg, sched).matrix, mf @ mg, atol=1e-13)


@given(spaces_and_functions())
def test_conjugate_is_adjoint(sf):
    space, f = sf
    sched = TruncationSchedule(2)
    a = build_truncation(space, f, sched).matrix
    np.testing.assert_allclose(build_truncation(space, f.conj(), sched).matrix, a.conj().T, atol=1e-14)


@given(spaces_and_functions())
def test_compression_is_contractive(sf):
    space, f = sf
    bound = max(
        [abs(v) for v in f.atom_values.values()]
        + [abs(v) * d for piece, part in zip(space.diffuse, f.diffuse_values or [None] * len(space.diffuse)) for v, d in _cell_values(piece, part)]
        + [0.0]
    )
    op = build_truncation(space, f, TruncationSchedule(3))
    assert operator_norm(op.matrix) <= bound + 1e-9


def _cell_values(piece, part):
    from schattenlab.measure_space import cells

    for lo, hi, d, v in cells(piece, part):
        yield v, d
