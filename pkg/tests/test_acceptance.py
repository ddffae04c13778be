"""Acceptance criteria 1-10 with their pinned tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the pytest terminal summary.
"""

from __future__ import annotations

import itertools
import random
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from paritycode.codes import add_multibody_spin, verify_code
from paritycode.conditions import check_conditions
from paritycode.gadgets import audit_ancilla_counts, even_parity_gadget, format_audit, mbody_gadget, odd_parity_gadget
from paritycode.instances import generate_instance
from paritycode.layouts import (
    build_square_lattice,
    build_tree_code,
    build_triangular_lattice,
    face_nu,
    square_faces,
    square_mu_block,
)
from paritycode.metrics import metric_delta_e
from paritycode.oracles import (
    brute_force_logical_ground,
    gadget_groundspace_oracle,
    label_oracle,
    logical_spectrum,
    projects_onto_target,
)
from paritycode.program import compile_program
from paritycode.spectral import HilbertSpec, assemble, lowest_eigs
from paritycode.sweep import ExperimentConfig, default_r_grid, run_sweep

# tolerances
RESIDUAL_TOL = 1e-9  # conditions (i)-(iii)
SPECTRUM_TOL = 1e-8  # subspace spectrum match
DELTA_E_TOL = 1e-6  # times J_av, at R = 1e4
IDENTITY_TOL = 1e-8  # gap identity
CHI_BAR_MAX = 1.5

# time budgets in seconds
BUDGET = {1: 1, 2: 5, 3: 30, 4: 10, 5: 120, 6: 600, 7: 1800, 8: 120, 9: 5, 10: 60}

J = 1.0
J_AV = J / 2
VARIANT_POLICY = {"even_qutrit": "all_even", "odd_qubit": "all_odd"}


def report(k: int, ok: bool, detail: str, elapsed: float) -> None:
    within = elapsed <= BUDGET[k]
    line = f"[{'PASS' if ok and within else 'FAIL'}] criterion {k}: {detail} ({elapsed:.1f}s, budget {BUDGET[k]}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def test_criterion_1_structure_counts():
    t0 = time.perf_counter()
    bad = []
    for n in (3, 4, 5):
        model = generate_instance(n)
        odd = compile_program(model, build_square_lattice(n, "all_odd"), "odd_qubit", 1.0)
        even = compile_program(model, build_square_lattice(n, "all_even"), "even_qutrit", 1.0)
        if odd.total_dim != 2 ** (n * n):
            bad.append(("odd", n, odd.total_dim))
        if even.total_dim != 2 ** (n * (n + 1) // 2) * 3 ** (n * (n - 1) // 2):
            bad.append(("even", n, even.total_dim))
    report(1, not bad, f"program dimensions for N=3,4,5 exact, mismatches={bad}", time.perf_counter() - t0)


def test_criterion_2_mu_rule():
    t0 = time.perf_counter()
    rnd = random.Random(2024)
    mismatches = 0
    checked = 0
    for n in range(2, 7):
        for _ in range(100):
            nu = {f: rnd.choice((1, -1)) for f in square_faces(n)}
            code = build_square_lattice(n, nu)
            for (i, j), mu in square_mu_block(n, face_nu(code)).items():
                checked += 1
                mismatches += code.label_of((i, j)).mu != mu
        odd = build_square_lattice(n, "all_odd")
        for i, j in itertools.combinations(range(n + 1), 2):
            checked += 1
            mismatches += odd.label_of((i, j)).mu != (-1) ** (i * (j - i))
    report(2, mismatches == 0, f"{checked} spin signs, {mismatches} mismatches", time.perf_counter() - t0)


def test_criterion_3_gadget_ground_spaces():
    t0 = time.perf_counter()
    failures = []
    for m in (3, 4):
        if not projects_onto_target(even_parity_gadget(m, 1.0)):
            failures.append(("qutrit", m))
        for ratio in (1.5, 2, 2.5):
            if not projects_onto_target(odd_parity_gadget(m, 1.0, ratio)):
                failures.append(("qubit", m, ratio))
        for ratio in (0.9, 3.1):
            if projects_onto_target(odd_parity_gadget(m, 1.0, ratio, strict=False)):
                failures.append(("qubit outside window passed", m, ratio))
    for m in range(3, 9):
        for target in (1, -1):
            if not projects_onto_target(mbody_gadget(m, target, 1.0)):
                failures.append(("mbody", m, target))
    report(3, not failures, f"qutrit, qubit window and M=3..8 gadgets, failures={failures}", time.perf_counter() - t0)


def test_criterion_4_ancilla_audit():
    t0 = time.perf_counter()
    rows = audit_ancilla_counts(8, 3)
    complete = {(r.m, r.target) for r in rows} == {(m, t) for m in range(3, 9) for t in (1, -1)}
    # every minimal count is confirmed by the oracle: P works, P - 1 does not
    confirmed = all(
        projects_onto_target(mbody_gadget(r.m, r.target, 1.0, n_ancillas=r.minimal))
        and (r.minimal == 0 or not projects_onto_target(mbody_gadget(r.m, r.target, 1.0, n_ancillas=r.minimal - 1)))
        for r in rows
    )
    print(format_audit(rows))
    flagged = [(r.m, r.target, r.minimal, r.stated) for r in rows if not r.agrees]
    report(
        4, complete and confirmed,
        f"audit table M=3..8 both signs, oracle-confirmed; disagreements (M, sign, minimal, stated)={flagged}",
        time.perf_counter() - t0,
    )


def test_criterion_5_subspace_spectrum():
    t0 = time.perf_counter()
    worst = {"spectrum": 0.0, "residual": 0.0, "margin": np.inf}
    failures = []
    for variant, policy in VARIANT_POLICY.items():
        code = build_square_lattice(3, policy)
        for seed in range(20):
            model = generate_instance(3, J, seed)
            prog = compile_program(model, code, variant, 100 * J_AV)
            rep = check_conditions(prog, code, model)
            levels = np.sort(lowest_eigs(assemble(prog, 1.0), 8).eigenvalues)
            spec_res = float(np.max(np.abs(levels - (rep.E0 + logical_spectrum(model)))))
            res = max(rep.commutator_residual_i, rep.parity_residual_ii, rep.mu_residual_ii,
                      rep.flip_unitary_residual_iii)
            worst["spectrum"] = max(worst["spectrum"], spec_res)
            worst["residual"] = max(worst["residual"], res)
            worst["margin"] = min(worst["margin"], rep.gap_margin_iv)
            if spec_res > SPECTRUM_TOL or res > RESIDUAL_TOL or not rep.gap_margin_iv > 0:
                failures.append((variant, seed))
    report(
        5, not failures,
        f"N=3, 20 instances x 2 variants at R=100: max spectrum err {worst['spectrum']:.1e}, "
        f"max residual {worst['residual']:.1e}, min margin {worst['margin']:.3g}, failures={failures}",
        time.perf_counter() - t0,
    )


def test_criterion_6_delta_e_monotone():
    t0 = time.perf_counter()
    grid = (1.0, 10.0, 100.0, 1000.0)
    failures, notes = [], []
    for n in (2, 3):
        cfg = ExperimentConfig(n, tuple(VARIANT_POLICY), J=J, R_grid=grid + (1e4,), instances=50,
                               base_seed=600 + n, metrics=("delta_e",))
        summary = {(r.variant, r.R): r for r in run_sweep(cfg, workers=1).summary}
        for variant in VARIANT_POLICY:
            med = [summary[(variant, R)].median_delta_e for R in grid]
            end = summary[(variant, 1e4)].median_delta_e
            notes.append(f"N={n} {variant} medians {[f'{x:.2g}' for x in med]} end {end:.1e}")
            if any(b > a for a, b in zip(med, med[1:])) or end > DELTA_E_TOL * J_AV:
                failures.append((n, variant))
    report(6, not failures, "; ".join(notes), time.perf_counter() - t0)


def test_criterion_7_chi_pipeline():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(2, tuple(VARIANT_POLICY), J=J, R_grid=default_r_grid(10), instances=400, base_seed=7)
    first = run_sweep(cfg, workers=1)
    second = run_sweep(cfg, workers=2)
    strip = lambda res: [(r.seed, r.variant, r.R, r.e_phys, r.min_gap_phys, r.chi, r.flags) for r in res.records]
    deterministic = strip(first) == strip(second) and first.summary_csv() == second.summary_csv()
    complete = len(first.records) == 2 * 10 * 400 and all(not r.flags.startswith("error") for r in first.records)
    in_range = all(row.chi_bar is not None and 0 < row.chi_bar <= CHI_BAR_MAX for row in first.summary)
    near_zero = {v: sum(r.n_near_zero for r in first.summary if r.variant == v) for v in VARIANT_POLICY}
    excluded = {v: sum(r.n_excluded for r in first.summary if r.variant == v) for v in VARIANT_POLICY}
    bars = {v: [round(r.chi_bar, 3) for r in first.summary if r.variant == v] for v in VARIANT_POLICY}
    report(
        7, deterministic and complete and in_range,
        f"8000 records, deterministic={deterministic}, chi_bar per R {bars}, "
        f"near-zero counts {near_zero}, excluded {excluded}",
        time.perf_counter() - t0,
    )


def _decode(program, n):
    op = assemble(program, 1.0)
    idx = int(np.argmin(op.diagonal))
    z = HilbertSpec(program.site_dims).decode(idx)
    return tuple(z[program.code.vertex_spin(k)] for k in range(1, n + 1))


def test_criterion_8_decoding():
    t0 = time.perf_counter()
    failures, used = [], 0
    for n in (2, 3):
        for variant, policy in VARIANT_POLICY.items():
            code = build_square_lattice(n, policy)
            seed, found = 0, 0
            while found < 50:
                model = generate_instance(n, J, 800 + seed)
                seed += 1
                spectrum = logical_spectrum(model)
                if spectrum[1] - spectrum[0] < 1e-9:
                    continue
                found += 1
                used += 1
                cfg, _ = brute_force_logical_ground(model)
                if _decode(compile_program(model, code, variant, 100 * J_AV), n) != cfg:
                    failures.append((n, variant, 800 + seed - 1))
    report(8, not failures, f"{used} unique-minimiser instances decoded, failures={failures}", time.perf_counter() - t0)


def test_criterion_9_generalised_codes():
    t0 = time.perf_counter()
    problems = []
    trees = [[(1, 2)], [(1, 2), (2, 3)], [(1, 2), (1, 3), (1, 4), (1, 5)], [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)]]
    for edges in trees:
        code = build_tree_code(edges)
        n = code.n_logical
        if code.n_spins != 2 * n - 1 or not verify_code(code).passed:
            problems.append(("tree", n))
    for n in range(2, 6):
        if not verify_code(build_triangular_lattice(n)).passed:
            problems.append(("triangular", n))
    cases = {
        "I": (5, {1, 2, 3, 4}, [(1, 3), (2, 4)]),
        "II": (5, {2, 3, 4, 5}, [(1, 3), (2, 4), (1, 5)]),
        "III six-body": (6, {1, 2, 3, 4, 5, 6}, [(1, 4), (2, 5), (3, 6)]),
    }
    for name, (n, target, locality) in cases.items():
        new = add_multibody_spin(build_square_lattice(n), target, locality)
        oracle = label_oracle(new)[-1]
        if new.labels[-1].subset != target or oracle != (frozenset(target), new.labels[-1].mu):
            problems.append(("multibody", name))
        if not verify_code(new).passed:
            problems.append(("multibody verify", name))
    report(9, not problems, f"trees 2N-1, triangular N<=5, multibody I-III, problems={problems}", time.perf_counter() - t0)


def test_criterion_10_gap_identity():
    t0 = time.perf_counter()
    worst, applicable, skipped, failures = 0.0, 0, 0, []
    for n in (2, 3):
        for variant, policy in VARIANT_POLICY.items():
            code = build_square_lattice(n, policy)
            for seed in range(20):
                model = generate_instance(n, J, 1000 + seed)
                for R in (0.5, 1.0, 2.0, 10.0, 100.0):
                    d = metric_delta_e(model, compile_program(model, code, variant, R * J_AV))
                    if d.identity_residual is None:
                        skipped += 1
                        continue
                    applicable += 1
                    worst = max(worst, d.identity_residual)
                    if d.identity_residual > IDENTITY_TOL:
                        failures.append((n, variant, seed, R))
    report(
        10, not failures and applicable > 0,
        f"{applicable} cases with non-negative margin, max residual {worst:.1e}; "
        f"{skipped} negative-margin cases not applicable",
        time.perf_counter() - t0,
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
