"""Bit-by-bit quantum search driver.

Stage i fixes eps_i.  It prepares |eps_1..eps_{i-1}, 0, 0..0>|0^m>|0>,
spreads qubits i+1..n with Hadamards, runs U_f, reduces the answer qubit
to (1-p)|0><0| + p|1><1| and feeds p to the amplifier.  Detection means
some solution has eps_i = 0; otherwise eps_i is set to 1.  If no stage
ever detects, the candidate is 1...1 and f(1...1) is evaluated directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import accounting
from .amplifier import AmplifierConfig, AmplifierTrace, detect
from .oracle import BitString, OracleSpec, eval_f
from .qsim import (GateLog, QuantumState, SimulationError, apply_hadamard,
                   apply_not, apply_oracle, new_basis_state, reduce_last_qubit)

DYADIC_TOL = 1e-12


@dataclass
class StageResult:
    i: int
    prefix: tuple[int, ...]
    p: float
    p_raw: float
    solutions: int
    trace: AmplifierTrace
    epsilon: int
    gates: GateLog

    @property
    def detected(self) -> bool:
        return self.trace.detected

    @property
    def false_negative(self) -> bool:
        return not self.detected and self.p > 0

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "prefix": "".join(map(str, self.prefix)),
            "p": self.p,
            "k": self.trace.k,
            "steps": self.trace.steps,
            "detected": self.detected,
            "epsilon": self.epsilon,
            "gates": self.gates.as_dict(),
        }


def prepare_stage(i: int, prefix: tuple[int, ...], spec: OracleSpec) -> QuantumState:
    """Stage-i input: prefix NOTs applied, eps_i and the free qubits at 0."""
    n = spec.n
    state = new_basis_state(n, spec.m)
    for k, bit in enumerate(prefix, start=1):
        if bit:
            apply_not(state, k)
    expected = list(prefix) + [0] * (n - i + 1)
    if state.register_bits(range(1, n + 1)) != expected:
        raise SimulationError(f"stage {i} input does not carry prefix {prefix}")
    return state


def run_stage(i: int, prefix: tuple[int, ...] | list[int], spec: OracleSpec,
              config: AmplifierConfig | None = None) -> StageResult:
    config = config or AmplifierConfig()
    prefix = tuple(prefix)
    n = spec.n
    if not 1 <= i <= n or len(prefix) != i - 1:
        raise ValueError(f"stage {i} needs a prefix of {i - 1} bits, got {len(prefix)}")
    state = prepare_stage(i, prefix, spec)
    for q in range(i + 1, n + 1):
        apply_hadamard(state, q)
    apply_oracle(state, spec)
    rho = reduce_last_qubit(state)

    # p = s / 2**(n-i) exactly; snap away Hadamard rounding before it can
    # push p = 1/2 across the detection threshold
    free = n - i
    p_raw = rho.p
    s = round(p_raw * 2**free)
    if abs(p_raw - s / 2**free) > DYADIC_TOL:
        raise SimulationError(f"stage {i}: p={p_raw!r} is not a multiple of 2^-{free}")
    p = s / 2**free

    trace = detect(p, config, n)
    return StageResult(
        i=i,
        prefix=prefix,
        p=p,
        p_raw=p_raw,
        solutions=s,
        trace=trace,
        epsilon=0 if trace.detected else 1,
        gates=state.log.copy(),
    )


@dataclass
class SearchReport:
    n: int
    bits: BitString
    found: bool
    stages: list[StageResult]
    final_check_performed: bool
    final_check_value: int | None
    consistent: bool
    a: float
    k_max: int
    t_uf: int
    complexity: accounting.ReconcileReport | None = field(default=None, repr=False)

    @property
    def x(self) -> int | None:
        return self.bits.to_int() if self.found else None

    @property
    def candidate(self) -> int:
        return self.bits.to_int()

    @property
    def existence(self) -> str:
        return "SolutionFound" if self.found else "NoSolution"

    @property
    def gates(self) -> GateLog:
        total = GateLog()
        for st in self.stages:
            total = total + st.gates
        return total

    @property
    def channel_steps(self) -> int:
        return sum(st.trace.steps for st in self.stages)

    @property
    def false_negatives(self) -> list[int]:
        return [st.i for st in self.stages if st.false_negative]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "existence": self.existence,
            "bits": str(self.bits),
            "x": self.x,
            "candidate": self.candidate,
            "final_check_performed": self.final_check_performed,
            "final_check_value": self.final_check_value,
            "consistent": self.consistent,
            "amplifier": {"a": self.a, "k_max": self.k_max},
            "stages": [st.to_dict() for st in self.stages],
            "instrumentation": {
                **self.gates.as_dict(),
                "channel_steps": self.channel_steps,
                "k": [st.trace.k for st in self.stages],
                "false_negative_stages": self.false_negatives,
            },
            "complexity": None if self.complexity is None else self.complexity.to_dict(),
        }


def default_t_uf(spec: OracleSpec) -> int:
    # a table oracle is charged as one opaque gate
    return spec.t_uf if spec.t_uf is not None else 1


def run_search(spec: OracleSpec, config: AmplifierConfig | None = None,
               t_uf: int | None = None) -> SearchReport:
    """Fix eps_1..eps_n stage by stage and decide whether f has a root."""
    config = config or AmplifierConfig()
    prefix: list[int] = []
    stages = []
    for i in range(1, spec.n + 1):
        st = run_stage(i, prefix, spec, config)
        stages.append(st)
        prefix.append(st.epsilon)
    bits = BitString(tuple(prefix))

    if any(st.detected for st in stages):
        # some stage saw a solution under the fixed prefix; the later
        # stages only narrow it down, so no final check is needed
        found, checked, value = True, False, None
        consistent = eval_f(spec, bits) == 1
    else:
        value = eval_f(spec, bits)
        found, checked = value == 1, True
        consistent = True

    report = SearchReport(
        n=spec.n,
        bits=bits,
        found=found,
        stages=stages,
        final_check_performed=checked,
        final_check_value=value,
        consistent=consistent,
        a=config.a,
        k_max=config.budget(spec.n),
        t_uf=default_t_uf(spec) if t_uf is None else t_uf,
    )
    report.complexity = accounting.reconcile(report, accounting.CostModel(spec.n, report.t_uf))
    return report
