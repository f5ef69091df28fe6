import numpy as np
import pytest

from qbsearch.amplifier import AmplifierConfig
from qbsearch.oracle import build_truth_table, classical_scan, eval_f, from_expression, from_table
from qbsearch.search import prepare_stage, run_search, run_stage

from conftest import all_tables


def count_solutions(table, n, prefix, eps_i):
    """Brute-force count of x with f(x)=1 matching prefix and eps_i."""
    fixed = list(prefix) + [eps_i]
    return sum(
        1 for x in range(2**n)
        if table[x] and all(((x >> k) & 1) == b for k, b in enumerate(fixed))
    )


def test_stage1_minterm2():
    st = run_stage(1, (), build_truth_table([2], 2))
    assert st.p == 0.5
    assert st.trace.k == 1 and st.trace.xs[1] == pytest.approx(0.9275, abs=1e-15)
    assert st.epsilon == 0


def test_stage2_minterm2():
    st = run_stage(2, (0,), build_truth_table([2], 2))
    assert st.p == 0.0 and not st.detected and st.epsilon == 1


def test_constant_one_detects_immediately():
    spec = from_table([1] * 8)
    for i, prefix in [(1, ()), (2, (0,)), (3, (0, 0))]:
        st = run_stage(i, prefix, spec)
        assert st.p == 1.0 and st.trace.k == 0 and st.epsilon == 0


def test_stage_prefix_length_checked():
    with pytest.raises(ValueError):
        run_stage(2, (), from_table([0, 1, 0, 0]))


def test_prefix_threading_on_state_vector():
    spec = from_table([0] * 16)
    state = prepare_stage(4, (1, 0, 1), spec)
    assert state.register_bits(range(1, 5)) == [1, 0, 1, 0]
    assert state.log.not_count == 2


def test_search_minterm2():
    rep = run_search(build_truth_table([2], 2))
    assert str(rep.bits) == "01" and rep.x == 2
    assert rep.existence == "SolutionFound"
    assert not rep.final_check_performed


def test_search_zero_function():
    rep = run_search(from_table([0] * 8))
    assert str(rep.bits) == "111" and rep.candidate == 7
    assert rep.final_check_performed and rep.final_check_value == 0
    assert rep.existence == "NoSolution" and rep.x is None


def test_search_only_all_ones():
    for n in range(1, 6):
        rep = run_search(build_truth_table([2**n - 1], n))
        assert rep.final_check_performed and rep.final_check_value == 1
        assert rep.found and rep.x == 2**n - 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_stage_p_and_soundness_against_counts(n):
    for table in all_tables(n):
        spec = from_table(table, n)
        rep = run_search(spec)
        for st in rep.stages:
            s = count_solutions(table, n, st.prefix, 0)
            assert st.solutions == s
            assert abs(st.p_raw - s / 2 ** (n - st.i)) < 1e-12
            if st.detected:
                assert s >= 1
            assert not st.false_negative
            assert st.gates.not_count == sum(st.prefix) <= st.i - 1
            assert st.gates.hadamard_count == n - st.i
            assert st.gates.oracle_count == 1
            if st.detected:
                assert st.trace.k <= 2 * n
        assert rep.final_check_performed == (not any(st.detected for st in rep.stages))


def test_compiled_backend_matches_table():
    for text in ["x1 & x2 & ~x3", "x1 ^ x2 ^ x3", "~x1 & ~x2 & ~x3", "x2 | x3"]:
        c = from_expression(text, 3, backend="compiled")
        t = c.with_backend("table")
        rc, rt = run_search(c), run_search(t)
        assert (rc.found, str(rc.bits)) == (rt.found, str(rt.bits))
        assert rc.t_uf == c.circuit.t_uf
        assert rc.gates.elementary_gate_count == 3 * c.circuit.t_uf


def test_found_solution_is_the_largest_binary_descent(rng):
    # the descent picks eps_i = 0 whenever possible, from eps_1 upward
    for _ in range(50):
        n = 4
        table = rng.integers(0, 2, 2**n)
        rep = run_search(from_table(table, n))
        sols = [x for x in range(2**n) if table[x]]
        if not sols:
            assert not rep.found
            continue
        reversed_bits = lambda x: [(x >> k) & 1 for k in range(n)]
        assert rep.x == min(sols, key=reversed_bits)


def test_tiny_budget_causes_false_negative():
    # with k_max = 0 a small p is never amplified: the run flags it
    spec = build_truth_table([4], 3)
    rep = run_search(spec, AmplifierConfig(k_max=0))
    assert rep.false_negatives
    assert not rep.consistent or not rep.found


def test_report_json_fields():
    d = run_search(build_truth_table([2], 2)).to_dict()
    assert d["bits"] == "01" and d["x"] == 2
    assert [(s["i"], s["p"], s["k"], s["epsilon"]) for s in d["stages"]] == [(1, 0.5, 1, 0), (2, 0.0, None, 1)]
    assert d["instrumentation"]["hadamard_count"] == 1
    assert d["complexity"]["formula"]["n"] == 2
