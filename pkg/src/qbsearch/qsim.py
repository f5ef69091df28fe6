"""Dense state-vector simulation over n + m + 1 qubits.

Qubit q (1-based) is bit q-1 of the amplitude index.  Qubits 1..n form the
search register, n+1..n+m hold oracle garbage, and qubit n+m+1 is the
answer qubit.  Gates mutate the state in place and bump its ``log``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

import numpy as np

from .oracle import BitString, OracleSpec

DEFAULT_MAX_QUBITS = 26
# 1/sqrt(2) as a float pair; the low part cancels the systematic norm drift
# that (1/sqrt(2))**2 != 1/2 would otherwise accumulate over many Hadamards
_SQRT1_2 = 0.7071067811865476
_SQRT1_2_LO = -4.833646656726457e-17


class SimulationError(RuntimeError):
    pass


def max_qubits() -> int:
    """Qubit cap, overridable through ``QBS_MAX_QUBITS``."""
    raw = os.environ.get("QBS_MAX_QUBITS")
    return int(raw) if raw else DEFAULT_MAX_QUBITS


@dataclass
class GateLog:
    hadamard_count: int = 0
    not_count: int = 0
    oracle_count: int = 0
    elementary_gate_count: int = 0

    def __add__(self, other: "GateLog") -> "GateLog":
        return GateLog(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def copy(self) -> "GateLog":
        return GateLog(**self.as_dict())

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class QuantumState:
    n: int
    m: int
    amplitudes: np.ndarray
    log: GateLog = field(default_factory=GateLog)

    @property
    def qubit_count(self) -> int:
        return self.n + self.m + 1

    @property
    def answer_qubit(self) -> int:
        return self.qubit_count

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def register_bits(self, qubits: range) -> list[int] | None:
        """Bits on ``qubits`` if every nonzero component agrees on them."""
        nz = np.flatnonzero(np.abs(self.amplitudes) > 1e-14)
        values = set()
        for idx in nz:
            values.add(tuple((int(idx) >> (q - 1)) & 1 for q in qubits))
            if len(values) > 1:
                return None
        return list(values.pop()) if values else None

    def dump(self, threshold: float = 1e-14) -> str:
        """Text dump: ``index re im`` for every non-negligible amplitude."""
        lines = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > threshold):
            amp = self.amplitudes[idx]
            lines.append(f"{idx} {amp.real:.17g} {amp.imag:.17g}")
        return "\n".join(lines) + ("\n" if lines else "")


def new_basis_state(n: int, m: int, prefix: BitString | None = None) -> QuantumState:
    """|prefix>|0^m>|0> with qubits beyond the prefix set to 0."""
    total = n + m + 1
    if n < 1 or m < 0:
        raise SimulationError(f"invalid register sizes n={n}, m={m}")
    if total > max_qubits():
        raise SimulationError(f"{total} qubits exceeds the cap of {max_qubits()}")
    index = 0
    if prefix is not None:
        if prefix.n > n:
            raise SimulationError(f"prefix of {prefix.n} bits does not fit in n={n}")
        index = prefix.to_int()
    amps = np.zeros(2**total, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(n, m, amps)


def _check_qubit(state: QuantumState, q: int) -> None:
    if not 1 <= q <= state.qubit_count:
        raise SimulationError(f"qubit {q} outside 1..{state.qubit_count}")


def _split(state: QuantumState, q: int) -> np.ndarray:
    # view with axis 1 = value of qubit q
    return state.amplitudes.reshape(-1, 2, 2 ** (q - 1))


def apply_hadamard(state: QuantumState, q: int) -> QuantumState:
    _check_qubit(state, q)
    v = _split(state, q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    plus, minus = a + b, a - b
    v[:, 0, :] = plus * _SQRT1_2 + plus * _SQRT1_2_LO
    v[:, 1, :] = minus * _SQRT1_2 + minus * _SQRT1_2_LO
    state.log.hadamard_count += 1
    return state


def apply_not(state: QuantumState, q: int) -> QuantumState:
    _check_qubit(state, q)
    v = _split(state, q)
    v[:, [0, 1], :] = v[:, [1, 0], :]
    state.log.not_count += 1
    return state


def _controlled_flip(state: QuantumState, controls: tuple[int, ...], target: int) -> None:
    if not controls:
        v = _split(state, target)
        v[:, [0, 1], :] = v[:, [1, 0], :]
        return
    idx = np.arange(state.amplitudes.size)
    cmask = sum(1 << (c - 1) for c in controls)
    tbit = 1 << (target - 1)
    src = idx[((idx & cmask) == cmask) & ((idx & tbit) == 0)]
    amps = state.amplitudes
    amps[src], amps[src | tbit] = amps[src | tbit], amps[src].copy()


def apply_oracle(state: QuantumState, spec: OracleSpec) -> QuantumState:
    """U_f |x>|0^m>|0> = |x>|z_x>|f(x)>.

    Table and expression backends use a permutation that flips the answer
    qubit where f(x) = 1 (no ancillas); the compiled backend runs its gate
    list and counts each gate as elementary.
    """
    if spec.n != state.n:
        raise SimulationError(f"oracle over {spec.n} bits, state has n={state.n}")
    if spec.m != state.m:
        raise SimulationError(f"oracle needs m={spec.m} ancillas, state has m={state.m}")
    amps = state.amplitudes
    upper = amps.reshape(-1, 2**state.n)[1:]
    if np.any(np.abs(upper) > 1e-14):
        raise SimulationError("oracle input has nonzero amplitude on dust/answer qubits")
    if spec.backend == "compiled":
        for g in spec.circuit.gates:
            _controlled_flip(state, g.controls, g.target)
        state.log.elementary_gate_count += spec.circuit.t_uf
    else:
        if spec.backend == "expression":
            table = np.array([spec.expr.evaluate(x) for x in range(2**spec.n)], dtype=bool)
        else:
            table = spec.table.astype(bool)
        rows = amps.reshape(2, -1)  # row = answer qubit value
        hit = np.flatnonzero(table)
        rows[1, hit] = rows[0, hit]
        rows[0, hit] = 0
    state.log.oracle_count += 1
    return state


@dataclass(frozen=True, eq=False)
class QubitDensity:
    """2x2 density operator of one qubit.

    ``bloch_z`` optionally records tr(rho sigma_3) exactly; the matrix
    entries (1 +- z)/2 lose low bits of z when z is small.
    """

    matrix: np.ndarray
    bloch_z: float | None = None

    @classmethod
    def diagonal(cls, p0: float, p1: float, bloch_z: float | None = None) -> "QubitDensity":
        return cls(np.array([[p0, 0], [0, p1]], dtype=np.complex128), bloch_z)

    @property
    def p(self) -> float:
        """Weight on |1><1|."""
        return float(self.matrix[1, 1].real)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def coherence(self) -> float:
        return float(abs(self.matrix[0, 1]))

    def sigma_z(self) -> float:
        """tr(rho sigma_3)."""
        if self.bloch_z is not None:
            return self.bloch_z
        return float((self.matrix[0, 0] - self.matrix[1, 1]).real)

    def is_valid(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        hermitian = np.allclose(m, m.conj().T, atol=tol, rtol=0)
        eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
        return hermitian and abs(self.trace - 1) <= tol and eig.min() >= -tol


def reduce_last_qubit(state: QuantumState, check_diagonal: bool = True) -> QubitDensity:
    """Partial trace over everything but the answer qubit."""
    norm = state.norm()
    if abs(norm - 1) > 1e-9:
        raise SimulationError(f"state norm {norm!r} is not 1")
    rows = state.amplitudes.reshape(2, -1)
    rho = rows @ rows.conj().T
    if check_diagonal and abs(rho[0, 1]) > 1e-12:
        raise SimulationError(f"answer qubit has coherence {abs(rho[0, 1]):.3g}")
    return QubitDensity(rho)
