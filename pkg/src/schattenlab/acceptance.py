"""The acceptance suite behind ``schattenlab verify-all``.

Each criterion is a function of a seed returning a JSON-ready dict with the
measured quantities, the tolerance applied and a pass flag. Reports contain no
timings so that equal seeds give byte-identical output.
"""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import group_rep as gr
from .directed_system import (
    FunctorCase,
    GroupContext,
    MeasureContext,
    build_node,
    verify_exactness,
    verify_functor_laws,
    verify_system,
)
from .linalg import operator_norm, svd_values
from .measure_space import AtomEntry, DiffusePiece, InvariantCounting, MeasureSpace, SimpleFunction, check_group_invariance
from .multiplication_rep import (
    DEFAULT_MODES,
    Diverges,
    Inconclusive,
    Member,
    NotMember,
    TruncationSchedule,
    classify_exact,
    classify_numeric,
    diagnose_divergence,
    trace_power_partial,
    verify_lemma1,
)
from .oracles import overlap_support_measure, singular_values_charpoly
from .random_models import complex_matrix, mixed_space, simple_function, unitary
from .schatten import INF, dual_exponent, encode_exponent, hs_inner, holder_witness, norm_from_values, verify_ideal_bound

P_GRID = (1.0, 1.5, 2.0, 3.0, INF)


def _result(cid: int, name: str, passed: bool, measured: dict, tolerance) -> dict:
    return {"id": cid, "name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance}


def counting_lp(seed: int, samples: int = 200, N: int = 20) -> dict:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(samples):
        vals = rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1)
        for p in P_GRID:
            failures += not verify_lemma1(N, vals, p, rtol=1e-12)
    return _result(1, "counting_measure_lp", failures == 0, {"checks": samples * len(P_GRID), "failures": failures}, 1e-12)


def gabor_divergence(seed: int) -> dict:
    space = MeasureSpace.lebesgue(0.0, 1.0)
    f = SimpleFunction.constant_on(space, 1.0)
    partials = [(m, trace_power_partial(space, f, 1.0, TruncationSchedule(m))) for m in DEFAULT_MODES]
    partial_err = max(abs(v - (2 * m + 1)) for m, v in partials)
    diag = diagnose_divergence(partials)
    slope = diag.linear_rate if isinstance(diag, Diverges) else 0.0
    verdict = classify_numeric(space, f, 1.0)
    passed = partial_err <= 1e-12 and isinstance(diag, Diverges) and abs(slope - 2.0) <= 1e-9 and isinstance(verdict, NotMember)
    return _result(
        2,
        "gabor_divergence",
        passed,
        {"partials": [[m, v] for m, v in partials], "max_partial_error": partial_err, "slope": slope, "numeric_verdict": type(verdict).__name__},
        {"partials": 1e-12, "slope": 1e-9},
    )


def atomic_dichotomy(seed: int, samples: int = 500) -> dict:
    rng = np.random.default_rng(seed)
    disagree = exact_wrong = inconclusive = runs = 0
    worst_norm = 0.0
    for _ in range(samples):
        space = mixed_space(rng)
        f = simple_function(rng, space)
        member_oracle = overlap_support_measure(space, f) == 0.0
        for p in (1.0, 2.0, 3.0):
            runs += 1
            ex = classify_exact(space, f, p)
            exact_wrong += isinstance(ex, Member) != member_oracle
            try:
                nu = classify_numeric(space, f, p)
            except Inconclusive:
                inconclusive += 1
                continue
            if type(nu) is not type(ex):
                disagree += 1
            elif isinstance(ex, Member) and ex.norm > 0:
                worst_norm = max(worst_norm, abs(nu.norm - ex.norm) / ex.norm)
    passed = exact_wrong == 0 and disagree == 0 and inconclusive == 0 and worst_norm <= 1e-6
    return _result(
        3,
        "atomic_dichotomy",
        passed,
        {"runs": runs, "exact_mismatches": exact_wrong, "route_disagreements": disagree, "inconclusive": inconclusive, "worst_norm_rel_error": worst_norm},
        {"norm_rel": 1e-6},
    )


def invariant_counting(seed: int, samples: int = 200) -> dict:
    rng = np.random.default_rng(seed)
    wrong = 0
    for _ in range(samples):
        n = int(rng.integers(1, 25))
        g = gr.cyclic(n) if rng.random() < 0.5 or n % 2 else gr.dihedral(n // 2) if n >= 6 else gr.cyclic(n)
        c = float(rng.uniform(0.1, 5.0))
        masses = [c] * n
        if n > 1 and rng.random() < 0.5:
            masses[int(rng.integers(0, n))] = c * float(rng.uniform(1.01, 2.0))
        # oracle: every left translation preserves every singleton mass
        invariant = all(masses[g.table[x, y]] == masses[y] for x in range(n) for y in range(n))
        verdict = check_group_invariance(n, masses)
        if invariant != isinstance(verdict, InvariantCounting):
            wrong += 1
        elif invariant and verdict.scale != c:
            wrong += 1
    return _result(4, "invariant_means_counting", wrong == 0, {"models": samples, "wrong": wrong}, 0.0)


def inequalities(seed: int, samples: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    worst = {"monotonicity": -np.inf, "triangle": -np.inf, "holder": -np.inf, "ideal": -np.inf}
    witness_err = 0.0
    ideal_fail = 0
    for _ in range(samples):
        n = int(rng.integers(1, 9))
        a, b = complex_matrix(rng, n), complex_matrix(rng, n)
        sa, sb, sab = svd_values(a), svd_values(b), svd_values(a + b)
        norms_a = {p: norm_from_values(sa, p) for p in P_GRID}
        norms_b = {p: norm_from_values(sb, p) for p in P_GRID}
        for p, q in itertools.combinations(P_GRID, 2):
            worst["monotonicity"] = max(worst["monotonicity"], norms_a[q] - norms_a[p])
        for p in P_GRID:
            worst["triangle"] = max(worst["triangle"], norm_from_values(sab, p) - norms_a[p] - norms_b[p])
            q = dual_exponent(p)
            worst["holder"] = max(worst["holder"], abs(hs_inner(a, b)) - norms_a[p] * norm_from_values(sb, q))
        k, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        x, t, y = complex_matrix(rng, k, n), complex_matrix(rng, n, m), complex_matrix(rng, m, int(rng.integers(1, 9)))
        p = P_GRID[int(rng.integers(0, len(P_GRID)))]
        lhs = norm_from_values(svd_values(x @ t @ y), p)
        rhs = operator_norm(x) * norm_from_values(svd_values(t), p) * operator_norm(y)
        worst["ideal"] = max(worst["ideal"], (lhs - rhs) / max(rhs, 1.0))
        ideal_fail += not verify_ideal_bound(x, t, y, p)
        for p in (1.5, 2.0, 3.0):
            w, attained = holder_witness(a, p)
            target = norms_a[p]
            witness_err = max(witness_err, abs(attained - target) / target, abs(norm_from_values(svd_values(w), dual_exponent(p)) - 1.0))
    passed = all(v <= 1e-9 for v in worst.values()) and ideal_fail == 0 and witness_err <= 1e-8
    return _result(
        5,
        "schatten_inequalities",
        passed,
        {"worst_excess": {k: float(v) for k, v in worst.items()}, "ideal_bound_failures": ideal_fail, "witness_rel_error": witness_err},
        {"inequalities": 1e-9, "witness": 1e-8},
    )


def svd_correctness(seed: int, samples: int = 500) -> dict:
    rng = np.random.default_rng(seed)
    eig_err = inv_err = 0.0
    for _ in range(samples):
        r, c = (int(v) for v in rng.integers(1, 7, size=2))
        a = complex_matrix(rng, r, c)
        s = svd_values(a)
        ref = singular_values_charpoly(a)
        eig_err = max(eig_err, float(np.max(np.abs(s**2 - ref**2))) / float(s[0] ** 2))
        u, v = unitary(rng, r), unitary(rng, c)
        inv_err = max(inv_err, float(np.max(np.abs(svd_values(u @ a @ v) - s))) / float(s[0]))
    passed = eig_err <= 1e-10 and inv_err <= 1e-10
    return _result(6, "svd_correctness", passed, {"charpoly_rel_error": eig_err, "unitary_invariance_rel_error": inv_err}, 1e-10)


def _test_groups() -> list[gr.FiniteGroup]:
    return [gr.cyclic(n) for n in range(1, 9)] + [gr.symmetric(3), gr.dihedral(4)]


def algebra_map(seed: int, pairs: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    conv_err = inv_err = 0.0
    kernel_mismatch = 0
    for g in _test_groups():
        reps = [gr.regular_rep(g), gr.trivial_rep(g), gr.direct_sum(gr.trivial_rep(g), gr.regular_rep(g))]
        try:
            reps.append(gr.sign_rep(g))
        except gr.GroupError:
            pass
        rep = reps[0]
        for _ in range(pairs):
            f = rng.normal(size=g.order) + 1j * rng.normal(size=g.order)
            h = rng.normal(size=g.order) + 1j * rng.normal(size=g.order)
            conv_err = max(conv_err, float(np.max(np.abs(gr.induce(rep, gr.convolve(g, f, h)) - gr.induce(rep, f) @ gr.induce(rep, h)))))
            inv_err = max(inv_err, float(np.max(np.abs(gr.induce(rep, gr.involution(g, f)) - gr.induce(rep, f).conj().T))))
        for r in reps:
            ideal = gr.pullback_ideal(r, 1.0)
            oracle_rank = int(np.linalg.matrix_rank(gr.induce_map_matrix(r)))
            if ideal.quotient_dim != oracle_rank or ideal.kernel_dim + ideal.quotient_dim != g.order:
                kernel_mismatch += 1
    passed = conv_err <= 1e-9 and inv_err <= 1e-9 and kernel_mismatch == 0
    return _result(
        7,
        "group_algebra_map",
        passed,
        {"convolution_error": conv_err, "involution_error": inv_err, "kernel_mismatches": kernel_mismatch},
        1e-9,
    )


def sequence_context() -> MeasureContext:
    space = MeasureSpace(
        (AtomEntry("a", 1.0), AtomEntry("b", 2.0), AtomEntry("c", 0.5)),
        (DiffusePiece((0.25, 1.75), (((0.25, 1.0), 1.0), ((1.0, 1.75), 0.5))),),
    )
    return MeasureContext(space, TruncationSchedule(1))


def exact_sequences(seed: int) -> dict:
    reports = {
        "measure": verify_system(sequence_context(), P_GRID, seed),
        "Z/4_regular": verify_system(GroupContext(gr.regular_rep(gr.cyclic(4))), P_GRID, seed),
    }
    summary = {
        k: {
            "exact_nodes": sum(e["passed"] for e in r["exactness"]),
            "columns": len(r["columns"]),
            "max_residual": max(max(b["left_square_residual"], b["right_square_residual"]) for b in r["blocks"]),
            "coherent_triples": sum(r["coherence"].values()),
            "triples": len(r["coherence"]),
        }
        for k, r in reports.items()
    }
    return _result(8, "directed_system_exactness", all(r["passed"] for r in reports.values()), summary, 0.0)


def _functor_cases(rng: np.random.Generator, count: int) -> list[FunctorCase]:
    bases = [gr.regular_rep(gr.cyclic(n)) for n in range(2, 7)]
    bases += [gr.regular_rep(gr.symmetric(3)), gr.direct_sum(gr.trivial_rep(gr.cyclic(2)), gr.sign_rep(gr.cyclic(2)))]
    bases += [gr.direct_sum(gr.regular_rep(gr.cyclic(3)), gr.trivial_rep(gr.cyclic(3)))]
    cases = []
    for i in range(count):
        r1 = bases[i % len(bases)]
        v, w = unitary(rng, r1.dim), unitary(rng, r1.dim)
        r2 = r1.conjugate(v)
        cases.append(FunctorCase(r1, r2, r2.conjugate(w), v, w))
    return cases


def functor_laws(seed: int, pairs: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    rep = verify_functor_laws(_functor_cases(rng, pairs), P_GRID, n_operators=100, seed=seed)
    return _result(9, "functor_laws", rep["passed"], {"cases": rep["cases"], "worst": rep["worst"]}, rep["tolerance"])


def corrupted_node_selftest(seed: int) -> dict:
    """A node with one image column zeroed must fail injectivity and nothing else."""
    node = build_node(sequence_context(), 2.0)
    bad = node.connecting_map.copy()
    bad[:, 0] = 0
    rep = verify_exactness(replace(node, connecting_map=bad))
    flags = rep.to_dict()
    failed = [k for k in ("injective", "quotient_consistent", "image_killed", "kernel_is_image") if not flags[k]]
    return {"name": "corrupted_node_selftest", "failed_checks": failed, "passed": failed == ["injective"]}


SUITE = (
    counting_lp,
    gabor_divergence,
    atomic_dichotomy,
    invariant_counting,
    inequalities,
    svd_correctness,
    algebra_map,
    exact_sequences,
    functor_laws,
)


def run_criteria(seed: int, criteria=SUITE, workers: int = 4) -> list[dict]:
    """Run criteria concurrently; each gets its own child seed, results keep suite order."""
    children = np.random.SeedSequence(seed).spawn(len(SUITE))
    seeds = {fn: int(c.generate_state(1)[0]) for fn, c in zip(SUITE, children)}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda fn: fn(seeds[fn]), criteria))


def verify_all(seed: int = 0, workers: int = 4) -> dict:
    results = run_criteria(seed, workers=workers)
    # determinism: a second run of the cheap criteria must serialize identically
    cheap = (gabor_divergence, invariant_counting, algebra_map, exact_sequences)
    first = [r for fn, r in zip(SUITE, results) if fn in cheap]
    again = run_criteria(seed, cheap, workers=workers)
    same = json.dumps(first, sort_keys=True) == json.dumps(again, sort_keys=True)
    results.append(_result(10, "determinism", same, {"rerun_identical": same, "criteria_rerun": [r["id"] for r in first]}, 0.0))
    selftest = corrupted_node_selftest(seed)
    return {
        "schema": 1,
        "seed": seed,
        "criteria": results,
        "selftest": selftest,
        "passed": all(r["passed"] for r in results) and selftest["passed"],
    }


def format_line(r: dict) -> str:
    return f"[{'PASS' if r['passed'] else 'FAIL'}] {r['id']:>2} {r['name']}: {json.dumps(r['measured'], sort_keys=True)}"
