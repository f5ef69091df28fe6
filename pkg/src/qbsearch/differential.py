"""Quantum search versus the classical scan, over many functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .amplifier import AmplifierConfig
from .oracle import OracleSpec, classical_scan, eval_f, from_table
from .search import run_search


def exhaustive_tables(n: int) -> Iterator[tuple[int, np.ndarray]]:
    """All 2**(2**n) truth tables; function index bit x is f(x)."""
    size = 2**n
    for index in range(2**size):
        yield index, np.array([(index >> x) & 1 for x in range(size)], dtype=np.uint8)


def random_tables(n: int, samples: int, seed: int) -> Iterator[tuple[int, np.ndarray]]:
    for j in range(samples):
        rng = np.random.default_rng([seed, j])
        yield j, rng.integers(0, 2, size=2**n, dtype=np.uint8)


@dataclass
class DifferentialSummary:
    n: int
    mode: str
    total: int = 0
    # matrix[quantum_found][classical_found]
    matrix: list[list[int]] = field(default_factory=lambda: [[0, 0], [0, 0]])
    bad_witness: list[int] = field(default_factory=list)
    false_negative_runs: int = 0

    @property
    def agree(self) -> int:
        return self.matrix[0][0] + self.matrix[1][1] - len(self.bad_witness)

    @property
    def disagreements(self) -> int:
        return self.total - self.agree

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "total": self.total,
            "agree": self.agree,
            "disagree": self.disagreements,
            "matrix": {
                "quantum_found_classical_found": self.matrix[1][1],
                "quantum_found_classical_reject": self.matrix[1][0],
                "quantum_none_classical_found": self.matrix[0][1],
                "quantum_none_classical_reject": self.matrix[0][0],
            },
            "bad_witness": self.bad_witness,
            "false_negative_runs": self.false_negative_runs,
        }


def compare(spec: OracleSpec, config: AmplifierConfig | None = None) -> tuple[bool, bool, bool, bool]:
    """(quantum found, classical found, witness valid, any false negative)."""
    report = run_search(spec, config)
    scan = classical_scan(spec)
    witness_ok = not report.found or eval_f(spec, report.bits) == 1
    return report.found, scan.found is not None, witness_ok, bool(report.false_negatives)


def run_differential(n: int, mode: str = "exhaustive", samples: int = 500, seed: int = 0,
                     config: AmplifierConfig | None = None) -> DifferentialSummary:
    if mode == "exhaustive":
        tables = exhaustive_tables(n)
    elif mode == "random":
        tables = random_tables(n, samples, seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    summary = DifferentialSummary(n, mode)
    for index, table in tables:
        q, c, ok, fneg = compare(from_table(table, n), config)
        summary.total += 1
        summary.matrix[int(q)][int(c)] += 1
        if q and c and not ok:
            summary.bad_witness.append(index)
        summary.false_negative_runs += fneg
    return summary
