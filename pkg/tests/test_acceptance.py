"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from qbsearch.accounting import CostModel, total_cost
from qbsearch.amplifier import (AmplifierConfig, channel_apply, detect, growth_bound,
                                lift, logistic_step, theorem_report)
from qbsearch.differential import exhaustive_tables, random_tables
from qbsearch.oracle import (BitString, OracleSpec, build_truth_table, classical_scan,
                             compile_reversible, eval_f, from_table)
from qbsearch.qsim import apply_hadamard, apply_not, apply_oracle, new_basis_state
from qbsearch.search import run_search

from conftest import ACCEPTANCE_LINES, random_expr

SIGMA_3 = np.diag([1.0, -1.0])
LOG_SLOPE = math.log2(3.71) - 1


def record(tag, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_c1_oracle_equivalence():
    start = time.perf_counter()
    checked = bad = 0
    suites = [exhaustive_tables(1), exhaustive_tables(2), exhaustive_tables(3),
              random_tables(4, 500, seed=2024)]
    for tables in suites:
        for _, table in tables:
            spec = from_table(table)
            rep = run_search(spec)
            scan = classical_scan(spec)
            agree = rep.found == (scan.found is not None)
            witness = not rep.found or eval_f(spec, rep.bits) == 1
            checked += 1
            bad += not (agree and witness)
    elapsed = time.perf_counter() - start
    ok = checked == 4 + 16 + 256 + 500 and bad == 0 and elapsed < 10
    assert record("C1 oracle equivalence", ok, f"{checked - bad}/{checked} agree in {elapsed:.2f}s")


def test_c2_theorem1_probe():
    start = time.perf_counter()
    rows = theorem_report(1, 500, 3.71)
    elapsed = time.perf_counter() - start
    failing = [r.n for r in rows if r.k_min is None or r.k_min > 2 * r.n]
    ok = not failing and all(r.thm1_holds for r in rows) and elapsed < 1
    assert record("C2 crossing within 2n, n=1..500", ok,
                  f"{len(rows) - len(failing)}/{len(rows)} rows, {elapsed:.3f}s")


def test_c3_growth_bound_and_stated_bound_flagged():
    rows = theorem_report(1, 500, 3.71)
    ceil_ok = [r.n for r in rows if r.k_min <= math.ceil((r.n - 1) / LOG_SLOPE)]
    strict_ok = all(r.k_min <= growth_bound(r.n) and r.eq7_as_upper_holds for r in rows)
    ceil_from_2 = len(ceil_ok) == 499 and 1 not in ceil_ok
    flagged = [r.n for r in rows if not r.eq7_as_stated_holds]
    n4 = rows[3]
    ok = (strict_ok and ceil_from_2 and len(flagged) == 500
          and n4.k_min == 2 and not n4.eq7_as_stated_holds)
    assert record("C3 crossing growth bound", ok,
                  f"k_min <= floor((n-1)/c)+1 on 500/500; ceil form on n=2..500; "
                  f"stated lower bound flagged false on {len(flagged)}/500 (n=4: k_min=2 < 3.75)")


@pytest.mark.xfail(strict=True, reason="n=1: x0=1/2 is not > 1/2, k_min=1 > ceil(0)=0")
def test_c3_literal_ceiling_over_full_sweep():
    rows = theorem_report(1, 500, 3.71)
    bad = [r.n for r in rows if r.k_min > math.ceil((r.n - 1) / LOG_SLOPE)]
    record("C3 literal ceil bound, n=1..500", not bad,
           f"violated at n={bad} (k_min={rows[0].k_min}); see growth-bound line")
    assert not bad


def _search_suite(n, rng):
    yield from_table([0] * 2**n, n)
    yield from_table([1] * 2**n, n)
    yield build_truth_table([2**n - 1], n)
    yield build_truth_table([int(rng.integers(0, 2**n))], n)
    for _ in range(3):
        yield from_table(rng.integers(0, 2, 2**n), n)


def test_c4_gate_count_reconciliation():
    rng = np.random.default_rng(7)
    runs = bad = 0
    for n in range(2, 13):
        for spec in _search_suite(n, rng):
            rc = run_search(spec).complexity
            runs += 1
            half = n * (n - 1) // 2
            bad += not (rc.hadamards == half and rc.oracle_calls == n and rc.nots <= half)
    identity_bad = [
        (n, t) for n in range(1, 1001) for t in (0, 1, 10, 100)
        if not (n * (n - 1) + n * t + (5 * n * (n - 2)) // 8 + 1
                <= (13 * n * n - 18 * n + 8 * n * t) // 8 + 1)
        or not total_cost(CostModel(n, t)).identity_holds
    ]
    ok = bad == 0 and not identity_bad
    assert record("C4 gate-count reconciliation", ok,
                  f"{runs - bad}/{runs} runs exact; identity holds on {4000 - len(identity_bad)}/4000 (n, t_uf)")


def test_c5_channel_consistency():
    rng = np.random.default_rng(11)
    worst = 0.0
    shape_ok = True
    for p in rng.random(1000):
        rho = lift(p)
        x = p
        for _ in range(50):
            rho = channel_apply(rho)
            x = logistic_step(x)
            worst = max(worst, abs(np.trace(rho.matrix @ SIGMA_3).real - x))
            m = rho.matrix
            shape_ok &= (abs(np.trace(m).real - 1) <= 1e-12 and m[0, 1] == 0 and m[1, 0] == 0
                         and np.linalg.eigvalsh(m).min() >= -1e-12)
    zero_quiet = all(not detect(0.0, AmplifierConfig(k_max=k)).detected
                     for k in (0, 1, 10, 100, 1000, 10_000))
    ok = worst <= 1e-12 and shape_ok and zero_quiet
    assert record("C5 amplifier channel consistency", ok,
                  f"max |tr(rho sigma3) - x_k| = {worst:.2e} over 1000 p x 50 steps; detect(0) silent")


def test_c6_simulator_properties():
    rng = np.random.default_rng(5)
    state = new_basis_state(4, 2)
    v = rng.normal(size=state.amplitudes.size) + 1j * rng.normal(size=state.amplitudes.size)
    state.amplitudes[:] = v / np.linalg.norm(v)
    worst = step_worst = 0.0
    for _ in range(10_000):
        q = int(rng.integers(1, state.qubit_count + 1))
        before = state.norm()
        (apply_hadamard if rng.random() < 0.5 else apply_not)(state, q)
        after = state.norm()
        step_worst = max(step_worst, abs(after - before))
        worst = max(worst, abs(after - 1))

    inv_worst = 0.0
    for _ in range(200):
        before = state.amplitudes.copy()
        q = int(rng.integers(1, state.qubit_count + 1))
        apply_hadamard(apply_hadamard(state, q), q)
        inv_worst = max(inv_worst, np.max(np.abs(state.amplitudes - before)))
        apply_not(apply_not(state, q), q)
        inv_worst = max(inv_worst, np.max(np.abs(state.amplitudes - before)))

    circuits = basis_bad = 0
    for n in range(1, 5):
        for _ in range(40):
            circuit = compile_reversible(random_expr(rng, n, 4), n)
            if circuit.total_qubits > 18:
                continue
            spec = OracleSpec(n, np.array([circuit.evaluate(x) for x in range(2**n)], dtype=np.uint8),
                              "compiled", circuit=circuit)
            circuits += 1
            for x in range(2**n):
                s = new_basis_state(n, circuit.m, BitString.from_int(x, n))
                apply_oracle(s, spec)
                (out,) = np.flatnonzero(s.amplitudes)
                basis_bad += not (out & (2**n - 1) == x and out >> (n + circuit.m) == spec.table[x])
    ok = worst <= 1e-12 and step_worst <= 1e-12 and inv_worst <= 1e-12 and basis_bad == 0 and circuits >= 100
    assert record("C6 simulator properties", ok,
                  f"norm drift {worst:.1e} over 1e4 gates (per gate {step_worst:.1e}); H/X inverse err {inv_worst:.1e}; "
                  f"{circuits} compiled oracles exhaustive, {basis_bad} bad")


def test_c7_worked_examples():
    rep = run_search(build_truth_table([2], 2))
    s1, s2 = rep.stages
    first = (s1.p == 0.5 and s1.trace.k == 1 and abs(s1.trace.xs[1] - 0.9275) < 1e-15
             and str(rep.bits) == "01" and rep.x == 2)
    zero = run_search(from_table([0] * 8))
    second = (str(zero.bits) == "111" and zero.final_check_performed
              and zero.final_check_value == 0 and zero.existence == "NoSolution")
    assert record("C7 worked examples", first and second,
                  f"minterm{{2}}: p={s1.p}, k={s1.trace.k}, eps={rep.bits}, x={rep.x}; "
                  f"f=0: candidate {zero.bits}, {zero.existence}")


def test_c8_performance():
    rng = np.random.default_rng(3)
    table = np.zeros(2**12, dtype=np.uint8)
    table[rng.integers(0, 2**12, 3)] = 1
    start = time.perf_counter()
    rep = run_search(from_table(table, 12))
    elapsed = time.perf_counter() - start
    ok = elapsed < 5 and rep.found and len(rep.stages) == 12
    assert record("C8 n=12 search time", ok, f"{elapsed:.3f}s")
