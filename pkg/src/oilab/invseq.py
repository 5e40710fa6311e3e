"""Sequentially invertible circuit sequences and the reductions onto them.

A sequence step is a pair of circuits on ``k`` state bits plus ``r_i``
random bits; once the random bits are hard-wired the two directions invert
each other, so each direction acts as a permutation of {0,1}^k.  The
output distribution of a sequence is obtained by folding the forward
circuits from the all-zero state over all randomness tuples.

``reduce_sd_to_sisd`` compiles a statistical-difference instance into two
such sequences using one random bit per step: the first block of steps
XORs fresh random bits into a scratch register (building a uniform input),
the deterministic middle step XORs the compiled circuit's value into the
output register, and the final block re-perturbs the scratch register so
its content becomes an independent uniform string.  The construction
preserves total-variation distance exactly.

``polarize`` is the gap amplifier used when the raw promise parameters
fail the decision gap condition: an XOR-combination drives close
distributions together (distance is raised to the power of the number of
combined copies, exactly), and a direct product drives far ones apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circuits import (
    BoolCircuit,
    Gate,
    SdInstance,
    bit_matrix,
    eval_circuit_batch,
    pack_bits,
)
from .config import Caps, DEFAULT_CAPS
from .distributions import Distribution
from .errors import MalformedSequenceError, PreconditionError, ResourceError
from .jsonio import as_exact_probability, fraction_to_string, require_field
from .seeding import derive_rng


@dataclass(frozen=True)
class InvPair:
    """One sequence step: forward/backward circuits over k state bits and
    r hard-wired random bits, laid out as state || randomness."""

    forward: BoolCircuit
    backward: BoolCircuit
    k: int
    r: int

    def __post_init__(self):
        if self.k < 1 or self.r < 0:
            raise MalformedSequenceError("need k >= 1 and r >= 0")
        for name, circ in (("forward", self.forward), ("backward", self.backward)):
            if circ.k_in != self.k + self.r or circ.k_out != self.k:
                raise MalformedSequenceError(
                    f"{name} circuit maps {circ.k_in}->{circ.k_out} bits, "
                    f"expected {self.k + self.r}->{self.k}"
                )

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "forward": self.forward.to_json_dict(),
            "backward": self.backward.to_json_dict(),
        }


@dataclass(frozen=True)
class InvertibleSequence:
    pairs: tuple[InvPair, ...]
    k: int

    def __post_init__(self):
        for i, pair in enumerate(self.pairs):
            if pair.k != self.k:
                raise MalformedSequenceError(
                    f"pair {i} is on {pair.k} bits, sequence is on {self.k}"
                )

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def max_randomness(self) -> int:
        return max((p.r for p in self.pairs), default=0)

    @property
    def size_bound(self) -> int:
        return max(
            (max(len(p.forward.gates), len(p.backward.gates)) for p in self.pairs),
            default=0,
        )

    @property
    def total_random_bits(self) -> int:
        return sum(p.r for p in self.pairs)

    def to_json_dict(self) -> dict:
        return {"k": self.k, "pairs": [p.to_json_dict() for p in self.pairs]}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "InvertibleSequence":
        k = require_field(obj, "k", "sequence object")
        pairs = []
        for i, raw in enumerate(require_field(obj, "pairs", "sequence object")):
            pairs.append(
                InvPair(
                    BoolCircuit.from_json_dict(require_field(raw, "forward", f"pair {i}")),
                    BoolCircuit.from_json_dict(require_field(raw, "backward", f"pair {i}")),
                    k,
                    require_field(raw, "r", f"pair {i}"),
                )
            )
        return cls(tuple(pairs), k)


@dataclass(frozen=True)
class SisdInstance:
    """Two invertible sequences with a promise gap on their output distributions."""

    seq0: InvertibleSequence
    seq1: InvertibleSequence
    a: Fraction
    b: Fraction
    r: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_exact_probability(self.a))
        object.__setattr__(self, "b", as_exact_probability(self.b))
        if self.seq0.k != self.seq1.k:
            raise MalformedSequenceError("sequences must share the state width")
        if max(self.seq0.max_randomness, self.seq1.max_randomness) > self.r:
            raise MalformedSequenceError("some step uses more randomness than the bound r")
        if self.a > self.b:
            raise ValueError("promise requires a <= b")

    def to_json_dict(self) -> dict:
        return {
            "seq0": self.seq0.to_json_dict(),
            "seq1": self.seq1.to_json_dict(),
            "a": fraction_to_string(self.a),
            "b": fraction_to_string(self.b),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SisdInstance":
        seq0 = InvertibleSequence.from_json_dict(require_field(obj, "seq0", "sisd instance"))
        seq1 = InvertibleSequence.from_json_dict(require_field(obj, "seq1", "sisd instance"))
        r = max(seq0.max_randomness, seq1.max_randomness)
        return cls(
            seq0,
            seq1,
            require_field(obj, "a", "sisd instance"),
            require_field(obj, "b", "sisd instance"),
            r,
        )


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class PairCheck:
    index: int
    exhaustive: bool
    points_checked: int
    ok: bool
    counterexample: tuple[str, str] | None  # (x, z) with backward(forward(x;z);z) != x


@dataclass(frozen=True)
class SequenceValidationReport:
    checks: tuple[PairCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _check_pair(pair: InvPair, index: int, assignments: np.ndarray) -> PairCheck:
    k = pair.k
    forward_out = eval_circuit_batch(pair.forward, assignments)
    round_trip = eval_circuit_batch(
        pair.backward, np.hstack([forward_out, assignments[:, k:]])
    )
    good = (round_trip == assignments[:, :k]).all(axis=1)
    exhaustive = len(assignments) == 1 << (pair.k + pair.r)
    if good.all():
        return PairCheck(index, exhaustive, len(assignments), True, None)
    bad = int(np.argmin(good))
    row = "".join("1" if v else "0" for v in assignments[bad])
    return PairCheck(index, exhaustive, len(assignments), False, (row[:k], row[k:]))


def validate_sequence(
    seq: InvertibleSequence,
    exhaustive_cap: int = 2 ** 20,
    sample_count: int = 10 ** 4,
    seed: int = 0,
) -> SequenceValidationReport:
    """Check the inverse identity for every pair.

    Exhaustive over all (x, z) when 2^(k+r) fits under ``exhaustive_cap``,
    otherwise over ``sample_count`` seeded random points.
    """
    checks = []
    for index, pair in enumerate(seq.pairs):
        domain = 1 << (pair.k + pair.r)
        if domain <= exhaustive_cap:
            assignments = bit_matrix(pair.k + pair.r, 0, domain)
        else:
            rng = derive_rng(seed, "validate", index)
            assignments = rng.integers(0, 2, size=(sample_count, pair.k + pair.r)).astype(bool)
        checks.append(_check_pair(pair, index, assignments))
    return SequenceValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# output distribution

def sequence_output_distribution(
    seq: InvertibleSequence, caps: Caps = DEFAULT_CAPS
) -> Distribution:
    """Exact D(sequence): fold forward circuits from 0^k over all randomness
    tuples.  Cost is 2^(total random bits), guarded by the enumeration cap."""
    total_bits = seq.total_random_bits
    if total_bits > caps.enum_bits:
        raise ResourceError(
            f"folding over {total_bits} random bits exceeds cap of {caps.enum_bits}"
        )
    states = np.zeros((1, seq.k), dtype=bool)
    for pair in seq.pairs:
        if pair.r == 0:
            states = eval_circuit_batch(pair.forward, states)
            continue
        blocks = []
        for z in range(1 << pair.r):
            z_bits = bit_matrix(pair.r, z, z + 1)
            tiled = np.broadcast_to(z_bits, (states.shape[0], pair.r))
            blocks.append(eval_circuit_batch(pair.forward, np.hstack([states, tiled])))
        states = np.vstack(blocks)
    values, counts = np.unique(pack_bits(states), return_counts=True)
    denom = Fraction(1, len(states))
    return Distribution(
        seq.k,
        {format(v, f"0{seq.k}b"): c * denom for v, c in zip(values.tolist(), counts.tolist())},
    )


# ---------------------------------------------------------------------------
# circuit assembly helpers

class _Builder:
    """Accumulates gates with the consecutive-output-wire discipline."""

    def __init__(self, k_in: int):
        self.k_in = k_in
        self.gates: list[Gate] = []

    def add(self, kind: str, *inputs: int) -> int:
        wire = self.k_in + len(self.gates)
        self.gates.append(Gate(kind, tuple(inputs), wire))
        return wire

    def inline(self, circuit: BoolCircuit, input_wires: list[int]) -> list[int]:
        """Splice a sub-circuit in, reading from the given wires."""
        mapping = dict(enumerate(input_wires))
        for position, gate in enumerate(circuit.gates):
            new_wire = self.add(gate.kind, *(mapping[w] for w in gate.inputs))
            mapping[circuit.k_in + position] = new_wire
        return [mapping[w] for w in circuit.outputs]

    def build(self, outputs: list[int]) -> BoolCircuit:
        return BoolCircuit(self.k_in, len(outputs), tuple(self.gates), tuple(outputs))


def _xor_bit_step(state_width: int, bit: int) -> InvPair:
    """Step XORing the single random bit into state position ``bit``; its own inverse."""
    builder = _Builder(state_width + 1)
    flipped = builder.add("XOR", bit, state_width)
    outputs = list(range(state_width))
    outputs[bit] = flipped
    circuit = builder.build(outputs)
    return InvPair(circuit, circuit, state_width, 1)


def _apply_circuit_step(circuit: BoolCircuit, prefix_width: int) -> InvPair:
    """Deterministic step (x, y) -> (x, y XOR circuit(x-prefix)); an involution."""
    state_width = prefix_width + circuit.k_out
    builder = _Builder(state_width)
    value_wires = builder.inline(circuit, list(range(circuit.k_in)))
    out_wires = [builder.add("XOR", prefix_width + j, w) for j, w in enumerate(value_wires)]
    step = builder.build(list(range(prefix_width)) + out_wires)
    return InvPair(step, step, state_width, 0)


def reduce_sd_to_sisd(inst: SdInstance) -> SisdInstance:
    """Compile circuits into one-random-bit invertible sequences with the
    same promise parameters and exactly the same statistical difference.

    Each emitted sequence has length 2*max(k_in)+1 on max(k_in)+k_out state
    bits; every step equals its own inverse, so backward == forward.
    """
    prefix_width = max(inst.c0.k_in, inst.c1.k_in)
    state_width = prefix_width + inst.c0.k_out

    def compile_one(circuit: BoolCircuit) -> InvertibleSequence:
        perturb = [_xor_bit_step(state_width, i) for i in range(prefix_width)]
        middle = _apply_circuit_step(circuit, prefix_width)
        return InvertibleSequence(tuple(perturb) + (middle,) + tuple(perturb), state_width)

    return SisdInstance(compile_one(inst.c0), compile_one(inst.c1), inst.a, inst.b, 1)


# ---------------------------------------------------------------------------
# polarization

def xor_combine(c0: BoolCircuit, c1: BoolCircuit, reps: int, which: int) -> BoolCircuit:
    """Mix ``reps`` independent copies, each evaluating c0 or c1 according to
    selector bits whose parity is pinned to ``which``.

    The output distribution's total-variation distance is exactly the
    original distance raised to the power ``reps``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    block_width = max(c0.k_in, c1.k_in)
    builder = _Builder(reps * block_width + (reps - 1))
    selector_base = reps * block_width

    # parity-completing selector for the last block
    if reps == 1:
        last_selector = builder.add("CONST1" if which else "CONST0")
    else:
        acc = selector_base
        for j in range(1, reps - 1):
            acc = builder.add("XOR", acc, selector_base + j)
        last_selector = builder.add("NOT", acc) if which else acc

    outputs: list[int] = []
    for block in range(reps):
        base = block * block_width
        selector = selector_base + block if block < reps - 1 else last_selector
        not_selector = builder.add("NOT", selector)
        out0 = builder.inline(c0, [base + j for j in range(c0.k_in)])
        out1 = builder.inline(c1, [base + j for j in range(c1.k_in)])
        for w0, w1 in zip(out0, out1):
            pick1 = builder.add("AND", selector, w1)
            pick0 = builder.add("AND", not_selector, w0)
            outputs.append(builder.add("OR", pick1, pick0))
    return builder.build(outputs)


def direct_product(circuit: BoolCircuit, reps: int) -> BoolCircuit:
    """Concatenate ``reps`` independent copies of the circuit."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    builder = _Builder(reps * circuit.k_in)
    outputs: list[int] = []
    for block in range(reps):
        base = block * circuit.k_in
        outputs.extend(builder.inline(circuit, [base + j for j in range(circuit.k_in)]))
    return builder.build(outputs)


def default_polarization_exponent() -> int:
    """Smallest k whose target labels (2^-k, 1-2^-k) leave a decision gap >= 1/2."""
    k = 1
    while True:
        a = Fraction(1, 2 ** k)
        b = 1 - a
        if b * b - 2 * a + a * a >= Fraction(1, 2):
            return k
        k += 1


def polarize(
    inst: SdInstance,
    k: int | None = None,
    xor_reps: int | None = None,
    product_reps: int | None = None,
) -> SdInstance:
    """Amplify the promise gap to (2^-k, 1 - 2^-k).

    Applies the XOR-combination first (so a close pair lands below
    ``product_reps * a**xor_reps`` by a union bound) and the direct product
    second (driving far pairs toward distance 1).  The default repetition
    counts (xor_reps=k, product_reps=k+1) are calibrated for desk-scale
    instances; both can be overridden when circuit width is at a premium.
    """
    if inst.b * inst.b <= inst.a:
        raise PreconditionError(
            f"polarization needs b^2 > a, got a={inst.a}, b={inst.b}"
        )
    if k is None:
        k = default_polarization_exponent()
    if k < 1:
        raise ValueError("k must be >= 1")
    xor_reps = k if xor_reps is None else xor_reps
    product_reps = k + 1 if product_reps is None else product_reps

    def compile_one(which: int) -> BoolCircuit:
        mixed = xor_combine(inst.c0, inst.c1, xor_reps, which)
        return direct_product(mixed, product_reps) if product_reps > 1 else mixed

    a_out = Fraction(1, 2 ** k)
    return SdInstance(compile_one(0), compile_one(1), a_out, 1 - a_out)
