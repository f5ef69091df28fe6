"""Boolean objective functions f: {0, ..., 2**n - 1} -> {0, 1}.

An oracle can be backed by a truth table, by an expression tree, or by a
reversible circuit compiled from that tree.  Whatever the backend, the
truth table is always materialised so the backends can be cross-checked.

Bit convention: ``x = sum(2**(k-1) * eps_k)``, so eps_1 is the least
significant bit and qubit k of the search register holds eps_k.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

MAX_TABLE_BITS = 20
MAX_ANCILLAS = 64


class OracleError(ValueError):
    """Raised for malformed oracle definitions."""


class ParseError(OracleError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# --------------------------------------------------------------------------
# Bit strings
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BitString:
    """Bits eps_1..eps_n; ``bits[0]`` is eps_1 (weight 1)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("BitString needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"bits must be 0/1, got {self.bits!r}")

    @classmethod
    def from_int(cls, x: int, n: int) -> "BitString":
        if not 0 <= x < 2**n:
            raise ValueError(f"{x} does not fit in {n} bits")
        return cls(tuple((x >> k) & 1 for k in range(n)))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        return cls(tuple(int(c) for c in text))

    @property
    def n(self) -> int:
        return len(self.bits)

    def to_int(self) -> int:
        return sum(b << k for k, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


# --------------------------------------------------------------------------
# Expression trees
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int

    def evaluate(self, x: int) -> int:
        return (x >> (self.index - 1)) & 1


@dataclass(frozen=True)
class Not:
    child: "Expr"

    def evaluate(self, x: int) -> int:
        return 1 - self.child.evaluate(x)


@dataclass(frozen=True)
class And:
    children: tuple["Expr", ...]

    def evaluate(self, x: int) -> int:
        return int(all(c.evaluate(x) for c in self.children))


@dataclass(frozen=True)
class Or:
    children: tuple["Expr", ...]

    def evaluate(self, x: int) -> int:
        return int(any(c.evaluate(x) for c in self.children))


@dataclass(frozen=True)
class Xor:
    left: "Expr"
    right: "Expr"

    def evaluate(self, x: int) -> int:
        return self.left.evaluate(x) ^ self.right.evaluate(x)


Expr = Union[Var, Not, And, Or, Xor]


def variables(expr: Expr) -> set[int]:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Not):
        return variables(expr.child)
    if isinstance(expr, Xor):
        return variables(expr.left) | variables(expr.right)
    return set().union(*(variables(c) for c in expr.children))


def to_text(expr: Expr) -> str:
    """Render an expression in the same infix syntax the parser accepts."""
    if isinstance(expr, Var):
        return f"x{expr.index}"
    if isinstance(expr, Not):
        return "~" + to_text(expr.child)
    if isinstance(expr, And):
        return "(" + " & ".join(to_text(c) for c in expr.children) + ")"
    if isinstance(expr, Or):
        return "(" + " | ".join(to_text(c) for c in expr.children) + ")"
    return f"({to_text(expr.left)} ^ {to_text(expr.right)})"


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|([~&|^()]))")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(3)
        if m.group(1):
            tokens.append(("var", int(m.group(2)), start))
        else:
            tokens.append((m.group(3), None, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    # precedence, loosest first: | then ^ then & then prefix ~
    def __init__(self, text: str, n: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, kind: str) -> bool:
        if self.tok[0] == kind:
            self.i += 1
            return True
        return False

    def parse(self) -> Expr:
        expr = self.parse_or()
        if self.tok[0] != "end":
            raise ParseError(f"unexpected token {self.tok[0]!r}", self.tok[2])
        return expr

    def parse_or(self) -> Expr:
        items = [self.parse_xor()]
        while self.take("|"):
            items.append(self.parse_xor())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def parse_xor(self) -> Expr:
        expr = self.parse_and()
        while self.take("^"):
            expr = Xor(expr, self.parse_and())
        return expr

    def parse_and(self) -> Expr:
        items = [self.parse_not()]
        while self.take("&"):
            items.append(self.parse_not())
        return items[0] if len(items) == 1 else And(tuple(items))

    def parse_not(self) -> Expr:
        if self.take("~"):
            return Not(self.parse_not())
        kind, value, pos = self.tok
        if kind == "(":
            self.i += 1
            expr = self.parse_or()
            if not self.take(")"):
                raise ParseError(f"unclosed parenthesis opened at position {pos}",
                                 self.tok[2])
            return expr
        if kind == "var":
            if not 1 <= value <= self.n:
                raise ParseError(f"variable x{value} outside x1..x{self.n}", pos)
            self.i += 1
            return Var(value)
        what = "end of input" if kind == "end" else repr(kind)
        raise ParseError(f"expected variable, '~' or '(' but found {what}", pos)


def parse_expression(text: str, n: int) -> Expr:
    """Parse ``x1 & ~(x2 | x3) ^ x4`` style expressions over x1..xn."""
    if n < 1:
        raise OracleError("n must be positive")
    return _Parser(text, n).parse()


# --------------------------------------------------------------------------
# Reversible circuits
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    """X (no controls), CNOT (one control) or Toffoli (two controls).

    Qubits are 1-based; qubit q is bit q-1 of a basis index.
    """

    controls: tuple[int, ...]
    target: int

    @property
    def name(self) -> str:
        return ("X", "CNOT", "TOFFOLI")[len(self.controls)]


@dataclass(frozen=True)
class ReversibleCircuit:
    n: int
    m: int
    gates: tuple[Gate, ...]

    @property
    def total_qubits(self) -> int:
        return self.n + self.m + 1

    @property
    def answer_qubit(self) -> int:
        return self.total_qubits

    @property
    def t_uf(self) -> int:
        return len(self.gates)

    def simulate(self, basis: int) -> int:
        """Classically push one basis index through the gate list."""
        for g in self.gates:
            if all((basis >> (c - 1)) & 1 for c in g.controls):
                basis ^= 1 << (g.target - 1)
        return basis

    def evaluate(self, x: int) -> int:
        return (self.simulate(x) >> (self.answer_qubit - 1)) & 1


class _Compiler:
    def __init__(self, n: int, max_ancillas: int):
        self.n = n
        self.max_ancillas = max_ancillas
        self.m = 0
        self.gates: list[Gate] = []

    def ancilla(self) -> int:
        if self.m >= self.max_ancillas:
            raise OracleError(f"expression needs more than {self.max_ancillas} ancillas")
        self.m += 1
        return self.n + self.m

    def emit(self, controls: Sequence[int], target: int) -> None:
        controls = tuple(dict.fromkeys(controls))  # x & x -> single control
        self.gates.append(Gate(controls, target))

    def line(self, expr: Expr) -> int:
        """Return a qubit holding expr's value, computing it if needed."""
        if isinstance(expr, Var):
            return expr.index
        return self.into(expr, None)

    def into(self, expr: Expr, target: int | None) -> int:
        # target None: allocate a fresh ancilla (after compiling children,
        # so ancilla numbering follows evaluation order).
        if isinstance(expr, Var):
            src = expr.index
            target = self.ancilla() if target is None else target
            self.emit([src], target)
        elif isinstance(expr, Not):
            src = self.line(expr.child)
            target = self.ancilla() if target is None else target
            self.emit([src], target)
            self.emit([], target)
        elif isinstance(expr, Xor):
            a, b = self.line(expr.left), self.line(expr.right)
            target = self.ancilla() if target is None else target
            self.emit([a], target)
            self.emit([b], target)
        else:
            a = self.line(expr.children[0])
            for k, child in enumerate(expr.children[1:], start=2):
                b = self.line(child)
                last = k == len(expr.children)
                t = target if last and target is not None else self.ancilla()
                if isinstance(expr, And):
                    self.emit([a, b], t)
                else:
                    # a | b == a ^ b ^ (a & b); never touches the inputs
                    self.emit([a], t)
                    self.emit([b], t)
                    self.emit([a, b], t)
                a = t
            target = a
        return target


def compile_reversible(expr: Expr, n: int, max_ancillas: int = MAX_ANCILLAS) -> ReversibleCircuit:
    """Compile ``expr`` to X/CNOT/Toffoli gates computing f into the last qubit.

    Every internal node below the root gets its own ancilla and nothing is
    uncomputed, so the ancillas end up holding the garbage z_x.  The root is
    written straight into the answer qubit.
    """
    bad = [v for v in variables(expr) if not 1 <= v <= n]
    if bad:
        raise OracleError(f"variables {bad} outside 1..{n}")
    comp = _Compiler(n, max_ancillas)
    # the answer qubit index depends on m, which is only known at the end;
    # compile against a placeholder and renumber afterwards
    placeholder = 10**9
    comp.into(expr, placeholder)
    answer = n + comp.m + 1
    gates = tuple(
        Gate(g.controls, answer if g.target == placeholder else g.target)
        for g in comp.gates
    )
    return ReversibleCircuit(n=n, m=comp.m, gates=gates)


# --------------------------------------------------------------------------
# Oracle specification
# --------------------------------------------------------------------------

BACKENDS = ("table", "expression", "compiled")


@dataclass(frozen=True, eq=False)
class OracleSpec:
    """f as a truth table plus (optionally) an expression and its circuit.

    ``backend`` selects which representation answers ``eval_f`` and drives
    the quantum oracle.  ``y_target`` is always 1.
    """

    n: int
    table: np.ndarray
    backend: str = "table"
    expr: Expr | None = None
    circuit: ReversibleCircuit | None = None
    y_target: int = field(default=1, init=False)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise OracleError(f"unknown backend {self.backend!r}")
        if len(self.table) != 2**self.n:
            raise OracleError(f"truth table has {len(self.table)} entries, expected {2**self.n}")
        if self.backend == "expression" and self.expr is None:
            raise OracleError("expression backend without an expression")
        if self.backend == "compiled" and self.circuit is None:
            raise OracleError("compiled backend without a circuit")
        self.table.setflags(write=False)

    @property
    def m(self) -> int:
        return self.circuit.m if self.backend == "compiled" else 0

    @property
    def t_uf(self) -> int | None:
        return self.circuit.t_uf if self.circuit is not None else None

    def with_backend(self, backend: str) -> "OracleSpec":
        return OracleSpec(self.n, self.table, backend, self.expr, self.circuit)

    def solutions(self) -> np.ndarray:
        return np.flatnonzero(self.table)


def _check_n(n: int, cap: int) -> None:
    if n < 1:
        raise OracleError("n must be positive")
    if n > cap:
        raise OracleError(f"n={n} exceeds the truth-table cap of {cap}")


def build_truth_table(source: Union[Expr, Iterable[int]], n: int,
                      cap: int = MAX_TABLE_BITS) -> OracleSpec:
    """Tabulate an expression or a minterm list into a table-backed oracle."""
    _check_n(n, cap)
    if isinstance(source, (Var, Not, And, Or, Xor)):
        xs = np.arange(2**n)
        table = np.array([source.evaluate(int(x)) for x in xs], dtype=np.uint8)
        return OracleSpec(n, table, "table", expr=source)
    table = np.zeros(2**n, dtype=np.uint8)
    for t in source:
        if not 0 <= t < 2**n:
            raise OracleError(f"minterm {t} outside 0..{2**n - 1}")
        table[t] = 1
    return OracleSpec(n, table)


def from_table(bits: Sequence[int], n: int | None = None) -> OracleSpec:
    table = np.asarray(bits, dtype=np.uint8)
    if n is None:
        n = int(len(table)).bit_length() - 1
    _check_n(n, MAX_TABLE_BITS)
    if np.any(table > 1):
        raise OracleError("truth table entries must be 0 or 1")
    return OracleSpec(n, table.copy())


def from_expression(text: str, n: int, backend: str = "compiled",
                    max_ancillas: int = MAX_ANCILLAS) -> OracleSpec:
    expr = parse_expression(text, n)
    spec = build_truth_table(expr, n)
    circuit = compile_reversible(expr, n, max_ancillas) if backend == "compiled" else None
    return OracleSpec(n, spec.table, backend, expr, circuit)


def eval_f(spec: OracleSpec, x: Union[BitString, int]) -> int:
    """Evaluate f through the spec's active backend."""
    if isinstance(x, BitString):
        if x.n != spec.n:
            raise OracleError(f"input has {x.n} bits, oracle expects {spec.n}")
        x = x.to_int()
    elif not 0 <= x < 2**spec.n:
        raise OracleError(f"input {x} outside 0..{2**spec.n - 1}")
    if spec.backend == "expression":
        return spec.expr.evaluate(x)
    if spec.backend == "compiled":
        return spec.circuit.evaluate(x)
    return int(spec.table[x])


# --------------------------------------------------------------------------
# Classical reference machine
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    found: BitString | None
    calls: int

    @property
    def x(self) -> int | None:
        return None if self.found is None else self.found.to_int()

    def to_dict(self) -> dict:
        return {
            "verdict": "Found" if self.found is not None else "Reject",
            "x": self.x,
            "bits": None if self.found is None else str(self.found),
            "calls": self.calls,
        }


def classical_scan(spec: OracleSpec) -> ScanResult:
    """Test x = 0, 1, 2, ... in order; stop at the first solution."""
    calls = 0
    for i in range(2**spec.n):
        calls += 1
        if eval_f(spec, i) == spec.y_target:
            return ScanResult(BitString.from_int(i, spec.n), calls)
    return ScanResult(None, calls)


# --------------------------------------------------------------------------
# Oracle files
# --------------------------------------------------------------------------

def encode_table_hex(table: Sequence[int]) -> str:
    bits = np.asarray(table, dtype=np.uint8)
    return np.packbits(bits, bitorder="little").tobytes().hex()


def decode_table_hex(data: str, n: int) -> np.ndarray:
    try:
        raw = bytes.fromhex(data)
    except ValueError as exc:
        raise OracleError(f"bad hex table: {exc}") from None
    size = 2**n
    if len(raw) != (size + 7) // 8:
        raise OracleError(f"hex table has {len(raw)} bytes, expected {(size + 7) // 8}")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    if np.any(bits[size:]):
        raise OracleError("hex table has nonzero padding bits")
    return bits[:size].copy()


def oracle_from_dict(doc: dict, backend: str | None = None) -> OracleSpec:
    """Build an oracle from the ``{"n", "kind", "data"}`` file layout.

    Expressions default to the compiled backend; tables and minterm lists
    can only use the table backend.
    """
    try:
        n, kind, data = doc["n"], doc["kind"], doc["data"]
    except (KeyError, TypeError):
        raise OracleError("oracle document needs keys 'n', 'kind', 'data'") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise OracleError("'n' must be an integer")
    _check_n(n, MAX_TABLE_BITS)
    if kind == "table":
        if not isinstance(data, str):
            raise OracleError("table data must be a hex string")
        spec = OracleSpec(n, decode_table_hex(data, n))
    elif kind == "minterms":
        if not isinstance(data, list) or not all(isinstance(t, int) for t in data):
            raise OracleError("minterm data must be a list of integers")
        spec = build_truth_table(data, n)
    elif kind == "expr":
        if not isinstance(data, str):
            raise OracleError("expression data must be a string")
        return from_expression(data, n, backend or "compiled")
    else:
        raise OracleError(f"unknown oracle kind {kind!r}")
    if backend not in (None, "table"):
        raise OracleError(f"backend {backend!r} needs an expression oracle")
    return spec


def load_oracle(path: Union[str, Path], backend: str | None = None) -> OracleSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise OracleError(f"{path}: invalid JSON ({exc})") from None
    return oracle_from_dict(doc, backend)


def oracle_to_dict(spec: OracleSpec) -> dict:
    if spec.expr is not None:
        return {"n": spec.n, "kind": "expr", "data": to_text(spec.expr)}
    return {"n": spec.n, "kind": "table", "data": encode_table_hex(spec.table)}
