"""Simulator for a bit-by-bit quantum search with logistic-map amplification."""
from .accounting import CostModel, reconcile, stage_cost, total_cost
from .amplifier import (AmplifierConfig, AmplifierTrace, channel_apply, detect,
                        logistic_step, min_crossing, theorem_report)
from .oracle import (BitString, OracleSpec, ReversibleCircuit, build_truth_table,
                     classical_scan, compile_reversible, eval_f, load_oracle,
                     parse_expression)
from .qsim import (GateLog, QuantumState, QubitDensity, apply_hadamard, apply_not,
                   apply_oracle, new_basis_state, reduce_last_qubit)
from .search import SearchReport, StageResult, run_search, run_stage

__version__ = "0.1.0"
