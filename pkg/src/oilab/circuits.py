"""Gate-level boolean circuit IR with exact evaluation and enumeration.

A circuit is a DAG over wires: wires ``0..k_in-1`` carry the input bits and
gate ``g`` writes wire ``k_in + g`` (output wires are allocated
consecutively, so a gate can only read wires defined before it).  The
circuit's outputs are an arbitrary list of wire indices, which makes
pass-through bits free: an output may point straight at an input wire.

Bitstrings are python ``str`` of '0'/'1' with the leftmost character the
most significant bit; index ``i`` of any enumeration corresponds to
``format(i, f"0{width}b")``.

Everything here is pure and the types are immutable after construction, so
concurrent readers need no locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .distributions import Distribution
from .errors import ParseError, ResourceError, WidthError
from .jsonio import require_field
from .seeding import derive_rng

GATE_ARITY = {
    "NOT": 1,
    "AND": 2,
    "OR": 2,
    "XOR": 2,
    "CONST0": 0,
    "CONST1": 0,
    "COPY": 1,
}


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple[int, ...]
    out: int

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.inputs) != GATE_ARITY[self.kind]:
            raise ValueError(
                f"{self.kind} takes {GATE_ARITY[self.kind]} inputs, got {len(self.inputs)}"
            )


@dataclass(frozen=True)
class BoolCircuit:
    """Deterministic total map {0,1}^k_in -> {0,1}^k_out."""

    k_in: int
    k_out: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.k_in < 1 or self.k_out < 1:
            raise WidthError("circuit widths must be >= 1")
        for position, gate in enumerate(self.gates):
            expected = self.k_in + position
            if gate.out != expected:
                raise ValueError(
                    f"gate {position} must write wire {expected}, not {gate.out}"
                )
            for wire in gate.inputs:
                if not 0 <= wire < expected:
                    raise ValueError(f"gate {position} reads undefined wire {wire}")
        if len(self.outputs) != self.k_out:
            raise WidthError("outputs list must have k_out entries")
        n_wires = self.k_in + len(self.gates)
        for wire in self.outputs:
            if not 0 <= wire < n_wires:
                raise ValueError(f"output wire {wire} undefined")

    @property
    def n_wires(self) -> int:
        return self.k_in + len(self.gates)

    def to_json_dict(self) -> dict:
        return {
            "k_in": self.k_in,
            "k_out": self.k_out,
            "gates": [
                {"kind": g.kind, "in": list(g.inputs), "out": g.out} for g in self.gates
            ],
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "BoolCircuit":
        k_in = require_field(obj, "k_in", "circuit object")
        k_out = require_field(obj, "k_out", "circuit object")
        gates = []
        for i, raw in enumerate(require_field(obj, "gates", "circuit object")):
            kind = require_field(raw, "kind", f"gate {i}")
            inputs = tuple(require_field(raw, "in", f"gate {i}"))
            out = require_field(raw, "out", f"gate {i}")
            try:
                gates.append(Gate(kind, inputs, out))
            except ValueError as exc:
                raise ParseError(f"gate {i}: {exc}") from exc
        outputs = tuple(require_field(obj, "outputs", "circuit object"))
        try:
            return cls(k_in, k_out, tuple(gates), outputs)
        except (ValueError, WidthError) as exc:
            raise ParseError(f"circuit object: {exc}") from exc


_GATE_BATCH_OPS = {
    "NOT": lambda w, g: ~w[g.inputs[0]],
    "COPY": lambda w, g: w[g.inputs[0]],
    "AND": lambda w, g: w[g.inputs[0]] & w[g.inputs[1]],
    "OR": lambda w, g: w[g.inputs[0]] | w[g.inputs[1]],
    "XOR": lambda w, g: w[g.inputs[0]] ^ w[g.inputs[1]],
}


def eval_circuit_batch(circuit: BoolCircuit, inputs: np.ndarray) -> np.ndarray:
    """Evaluate on a (N, k_in) boolean matrix, returning (N, k_out)."""
    if inputs.ndim != 2 or inputs.shape[1] != circuit.k_in:
        raise WidthError(
            f"input block has shape {inputs.shape}, expected (N, {circuit.k_in})"
        )
    n_rows = inputs.shape[0]
    wires: list[np.ndarray] = [np.ascontiguousarray(inputs[:, j]) for j in range(circuit.k_in)]
    for gate in circuit.gates:
        if gate.kind == "CONST0":
            wires.append(np.zeros(n_rows, dtype=bool))
        elif gate.kind == "CONST1":
            wires.append(np.ones(n_rows, dtype=bool))
        else:
            wires.append(_GATE_BATCH_OPS[gate.kind](wires, gate))
    return np.column_stack([wires[w] for w in circuit.outputs])


def eval_circuit(circuit: BoolCircuit, x: str) -> str:
    """Evaluate on a single bitstring."""
    if len(x) != circuit.k_in or any(ch not in "01" for ch in x):
        raise WidthError(f"input {x!r} is not a {circuit.k_in}-bit string")
    wires = [ch == "1" for ch in x]
    for gate in circuit.gates:
        if gate.kind == "NOT":
            wires.append(not wires[gate.inputs[0]])
        elif gate.kind == "COPY":
            wires.append(wires[gate.inputs[0]])
        elif gate.kind == "AND":
            wires.append(wires[gate.inputs[0]] and wires[gate.inputs[1]])
        elif gate.kind == "OR":
            wires.append(wires[gate.inputs[0]] or wires[gate.inputs[1]])
        elif gate.kind == "XOR":
            wires.append(wires[gate.inputs[0]] != wires[gate.inputs[1]])
        elif gate.kind == "CONST0":
            wires.append(False)
        else:
            wires.append(True)
    return "".join("1" if wires[w] else "0" for w in circuit.outputs)


def bit_matrix(width: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the full truth-table input block, MSB first."""
    indices = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts) & 1).astype(bool)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Inverse of bit_matrix rows: (N, w) boolean -> integer indices."""
    width = bits.shape[1]
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return bits.astype(np.int64) @ weights

_CHUNK_ROWS = 2 ** 18


def enumerate_distribution(circuit: BoolCircuit, caps: Caps = DEFAULT_CAPS) -> Distribution:
    """Exact output distribution by iterating all 2^k_in inputs.

    Probabilities come out as Fractions with denominator 2^k_in.  Inputs
    wider than the enumeration cap raise ResourceError: brute force is
    infeasible there by definition of the cap.
    """
    if circuit.k_in > caps.enum_bits:
        raise ResourceError(
            f"enumeration over {circuit.k_in} bits exceeds cap of {caps.enum_bits}"
        )
    total = 1 << circuit.k_in
    counts: dict[int, int] = {}
    for start in range(0, total, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, total)
        outs = eval_circuit_batch(circuit, bit_matrix(circuit.k_in, start, stop))
        values, chunk_counts = np.unique(pack_bits(outs), return_counts=True)
        for value, count in zip(values.tolist(), chunk_counts.tolist()):
            counts[value] = counts.get(value, 0) + count
    denom = Fraction(1, total)
    return Distribution(
        circuit.k_out,
        {format(v, f"0{circuit.k_out}b"): c * denom for v, c in counts.items()},
    )


def identity_circuit(width: int) -> BoolCircuit:
    return BoolCircuit(width, width, (), tuple(range(width)))


def constant_circuit(k_in: int, bits: str) -> BoolCircuit:
    """Circuit ignoring its input and emitting the fixed string ``bits``."""
    gates = tuple(
        Gate("CONST1" if ch == "1" else "CONST0", (), k_in + i) for i, ch in enumerate(bits)
    )
    return BoolCircuit(k_in, len(bits), gates, tuple(range(k_in, k_in + len(bits))))


_RANDOM_KINDS = ("NOT", "AND", "OR", "XOR", "COPY", "CONST0", "CONST1")


def random_circuit(k_in: int, k_out: int, gate_count: int, seed: int) -> BoolCircuit:
    """Seed-deterministic random circuit; with no gates, outputs fall back to
    input wires (output j reads input j mod k_in)."""
    if k_in < 1 or k_out < 1:
        raise WidthError("circuit widths must be >= 1")
    if gate_count < 0:
        raise ValueError("gate_count must be >= 0")
    rng = derive_rng(seed, "random-circuit", k_in, k_out, gate_count)
    gates = []
    for position in range(gate_count):
        kind = _RANDOM_KINDS[rng.integers(len(_RANDOM_KINDS))]
        available = k_in + position
        inputs = tuple(int(rng.integers(available)) for _ in range(GATE_ARITY[kind]))
        gates.append(Gate(kind, inputs, k_in + position))
    if gate_count == 0:
        outputs = tuple(j % k_in for j in range(k_out))
    else:
        n_wires = k_in + gate_count
        outputs = tuple(int(rng.integers(n_wires)) for _ in range(k_out))
    return BoolCircuit(k_in, k_out, tuple(gates), outputs)


@dataclass(frozen=True)
class SdInstance:
    """A statistical-difference instance: two circuits with a promise gap.

    YES means the output distributions are at total-variation distance at
    most ``a``; NO means the distance exceeds ``b``.
    """

    c0: BoolCircuit
    c1: BoolCircuit
    a: Fraction
    b: Fraction

    def __post_init__(self):
        from .jsonio import as_exact_probability

        object.__setattr__(self, "a", as_exact_probability(self.a))
        object.__setattr__(self, "b", as_exact_probability(self.b))
        if self.c0.k_out != self.c1.k_out:
            raise WidthError("the two circuits must share an output width")
        if self.a > self.b:
            raise ValueError("promise requires a <= b")

    def to_json_dict(self) -> dict:
        from .jsonio import fraction_to_string

        return {
            "c0": self.c0.to_json_dict(),
            "c1": self.c1.to_json_dict(),
            "a": fraction_to_string(self.a),
            "b": fraction_to_string(self.b),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SdInstance":
        return cls(
            BoolCircuit.from_json_dict(require_field(obj, "c0", "sd instance")),
            BoolCircuit.from_json_dict(require_field(obj, "c1", "sd instance")),
            require_field(obj, "a", "sd instance"),
            require_field(obj, "b", "sd instance"),
        )
