"""Gate and channel counts: closed-form budget versus what a run used.

All floor ("Gauss symbol") arithmetic goes through ``Fraction`` so the
formulas are exact for any n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .search import SearchReport


@dataclass(frozen=True)
class CostModel:
    n: int
    t_uf: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.t_uf < 0:
            raise ValueError("t_uf must be non-negative")


def stage_cost(n: int, i: int, t_uf: int) -> int:
    """(n - i) Hadamards + (i - 1) NOTs + one oracle: n - 1 + t_uf."""
    if not 1 <= i <= n:
        raise ValueError(f"stage {i} outside 1..{n}")
    return (n - i) + (i - 1) + t_uf


def gauss(q: Fraction) -> int:
    return math.floor(q)


@dataclass(frozen=True)
class FormulaBlock:
    n: int
    t_uf: int
    stage_costs: tuple[int, ...]
    gate_sum: int
    stage_channel_bound: int
    channel_bound: int
    total_T: int

    @property
    def identity_holds(self) -> bool:
        return self.gate_sum + self.channel_bound <= self.total_T

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t_uf": self.t_uf,
            "stage_cost": self.stage_costs[0],
            "gate_sum": self.gate_sum,
            "stage_channel_bound": self.stage_channel_bound,
            "channel_bound": self.channel_bound,
            "total_T": self.total_T,
            "identity_holds": self.identity_holds,
        }


def total_cost(model: CostModel) -> FormulaBlock:
    n, t = model.n, model.t_uf
    stage_costs = tuple(stage_cost(n, i, t) for i in range(1, n + 1))
    gate_sum = n * (n - 1) + n * t
    channel_bound = gauss(Fraction(5, 8) * n * (n - 2)) + 1
    total = gauss(Fraction(13, 8) * n * n - Fraction(9, 4) * n + n * t) + 1
    return FormulaBlock(
        n=n,
        t_uf=t,
        stage_costs=stage_costs,
        gate_sum=gate_sum,
        stage_channel_bound=gauss(Fraction(5, 4) * (n - 1)) + 1,
        channel_bound=channel_bound,
        total_T=total,
    )


@dataclass(frozen=True)
class ReconcileReport:
    formula: FormulaBlock
    hadamards: int
    nots: int
    oracle_calls: int
    elementary_oracle_gates: int
    # channel_steps counts every application, including the full budget
    # spent by stages that never cross; crossing_sum adds up k_i only
    channel_steps: int
    crossing_sum: int

    @property
    def hadamards_expected(self) -> int:
        return self.formula.n * (self.formula.n - 1) // 2

    @property
    def nots_worst_case(self) -> int:
        return self.formula.n * (self.formula.n - 1) // 2

    @property
    def hadamards_match(self) -> bool:
        return self.hadamards == self.hadamards_expected

    @property
    def nots_within(self) -> bool:
        return self.nots <= self.nots_worst_case

    @property
    def oracle_calls_match(self) -> bool:
        return self.oracle_calls == self.formula.n

    @property
    def channels_within_bound(self) -> bool:
        # reported, not enforced
        return self.channel_steps <= self.formula.channel_bound

    @property
    def measured_total(self) -> int:
        return (self.hadamards + self.nots + self.oracle_calls * self.formula.t_uf
                + self.channel_steps)

    @property
    def ok(self) -> bool:
        return self.hadamards_match and self.nots_within and self.oracle_calls_match

    def to_dict(self) -> dict:
        return {
            "formula": self.formula.to_dict(),
            "measured": {
                "hadamards": self.hadamards,
                "nots": self.nots,
                "oracle_calls": self.oracle_calls,
                "elementary_oracle_gates": self.elementary_oracle_gates,
                "channel_steps": self.channel_steps,
                "crossing_sum": self.crossing_sum,
                "total": self.measured_total,
            },
            "deltas": {
                "hadamards": self.hadamards - self.hadamards_expected,
                "nots": self.nots - self.nots_worst_case,
                "oracle_calls": self.oracle_calls - self.formula.n,
                "channel_steps": self.channel_steps - self.formula.channel_bound,
                "total": self.measured_total - self.formula.total_T,
            },
            "checks": {
                "hadamards_match": self.hadamards_match,
                "nots_within_worst_case": self.nots_within,
                "oracle_calls_match": self.oracle_calls_match,
                "channels_within_bound": self.channels_within_bound,
            },
        }


def reconcile(report: "SearchReport", model: CostModel) -> ReconcileReport:
    if report.n != model.n:
        raise ValueError(f"report has n={report.n}, cost model n={model.n}")
    gates = report.gates
    return ReconcileReport(
        formula=total_cost(model),
        hadamards=gates.hadamard_count,
        nots=gates.not_count,
        oracle_calls=gates.oracle_count,
        elementary_oracle_gates=gates.elementary_gate_count,
        channel_steps=report.channel_steps,
        crossing_sum=sum(st.trace.k for st in report.stages if st.detected),
    )
