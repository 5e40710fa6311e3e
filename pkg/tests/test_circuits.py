from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oilab.circuits import (
    BoolCircuit,
    Gate,
    SdInstance,
    bit_matrix,
    constant_circuit,
    enumerate_distribution,
    eval_circuit,
    eval_circuit_batch,
    identity_circuit,
    pack_bits,
    random_circuit,
)
from oilab.config import Caps
from oilab.distributions import Distribution, uniform_distribution
from oilab.errors import ParseError, ResourceError, WidthError


def and_circuit():
    return BoolCircuit(2, 1, (Gate("AND", (0, 1), 2),), (2,))


class TestEval:
    def test_identity_via_copy_gates(self):
        c = BoolCircuit(2, 2, (Gate("COPY", (0,), 2), Gate("COPY", (1,), 3)), (2, 3))
        assert eval_circuit(c, "01") == "01"

    def test_single_not(self):
        c = BoolCircuit(1, 1, (Gate("NOT", (0,), 1),), (1,))
        assert eval_circuit(c, "0") == "1"
        assert eval_circuit(c, "1") == "0"

    def test_two_bit_and(self):
        assert eval_circuit(and_circuit(), "11") == "1"
        assert eval_circuit(and_circuit(), "10") == "0"

    def test_width_mismatch(self):
        with pytest.raises(WidthError):
            eval_circuit(and_circuit(), "111")
        with pytest.raises(WidthError):
            eval_circuit(and_circuit(), "1x")

    def test_all_gate_kinds(self):
        c = BoolCircuit(
            2,
            5,
            (
                Gate("XOR", (0, 1), 2),
                Gate("OR", (0, 1), 3),
                Gate("CONST0", (), 4),
                Gate("CONST1", (), 5),
                Gate("COPY", (2,), 6),
            ),
            (2, 3, 4, 5, 6),
        )
        assert eval_circuit(c, "10") == "11011"


class TestStructure:
    def test_gate_must_write_consecutive_wire(self):
        with pytest.raises(ValueError):
            BoolCircuit(2, 1, (Gate("AND", (0, 1), 5),), (0,))

    def test_gate_cannot_read_future_wire(self):
        with pytest.raises(ValueError):
            BoolCircuit(2, 1, (Gate("AND", (0, 3), 2),), (2,))

    def test_output_wire_must_exist(self):
        with pytest.raises(ValueError):
            BoolCircuit(2, 1, (), (5,))

    def test_bad_arity(self):
        with pytest.raises(ValueError):
            Gate("NOT", (0, 1), 2)
        with pytest.raises(ValueError):
            Gate("FANCY", (0,), 2)

    def test_widths_positive(self):
        with pytest.raises(WidthError):
            BoolCircuit(0, 1, (), (0,))


class TestEnumerate:
    def test_constant_zero(self):
        dist = enumerate_distribution(constant_circuit(2, "0"))
        assert dist.probs == {"0": Fraction(1)}

    def test_identity_is_uniform(self):
        assert enumerate_distribution(identity_circuit(2)) == uniform_distribution(2)

    def test_two_bit_and(self):
        dist = enumerate_distribution(and_circuit())
        assert dist.probs == {"0": Fraction(3, 4), "1": Fraction(1, 4)}
        assert sum(dist.probs.values()) == 1

    def test_cap_exceeded(self):
        with pytest.raises(ResourceError):
            enumerate_distribution(identity_circuit(8), Caps(enum_bits=6))

    def test_probabilities_are_dyadic_and_exact(self):
        dist = enumerate_distribution(random_circuit(5, 3, 12, seed=3))
        assert dist.is_exact
        assert sum(dist.probs.values()) == 1
        for p in dist.probs.values():
            assert (1 << 5) % p.denominator == 0


class TestRandomCircuit:
    def test_deterministic(self):
        assert random_circuit(3, 2, 10, seed=7) == random_circuit(3, 2, 10, seed=7)
        assert random_circuit(3, 2, 10, seed=7) != random_circuit(3, 2, 10, seed=8)

    def test_gateless_fallback_wires_inputs(self):
        c = random_circuit(2, 1, 0, seed=1)
        assert c.outputs == (0,)
        c2 = random_circuit(2, 3, 0, seed=1)
        assert c2.outputs == (0, 1, 0)

    def test_distribution_matches_scalar_reevaluation(self):
        # independent oracle: count outputs with the scalar evaluator
        c = random_circuit(3, 2, 10, seed=5)
        counts: dict[str, int] = {}
        for i in range(8):
            y = eval_circuit(c, format(i, "03b"))
            counts[y] = counts.get(y, 0) + 1
        expected = Distribution(2, {k: Fraction(v, 8) for k, v in counts.items()})
        assert enumerate_distribution(c) == expected

    def test_parameter_validation(self):
        with pytest.raises(WidthError):
            random_circuit(0, 1, 3, seed=0)
        with pytest.raises(ValueError):
            random_circuit(2, 1, -1, seed=0)


@st.composite
def circuits(draw):
    k_in = draw(st.integers(1, 4))
    k_out = draw(st.integers(1, 3))
    gate_count = draw(st.integers(0, 12))
    seed = draw(st.integers(0, 2 ** 32))
    return random_circuit(k_in, k_out, gate_count, seed)


@settings(max_examples=60, deadline=None)
@given(circuits(), st.integers(0, 2 ** 20))
def test_batch_agrees_with_scalar(circuit, raw_x):
    x = raw_x % (1 << circuit.k_in)
    block = bit_matrix(circuit.k_in, x, x + 1)
    batch_out = eval_circuit_batch(circuit, block)[0]
    assert "".join("1" if b else "0" for b in batch_out) == eval_circuit(
        circuit, format(x, f"0{circuit.k_in}b")
    )


@settings(max_examples=40, deadline=None)
@given(circuits())
def test_json_round_trip(circuit):
    assert BoolCircuit.from_json_dict(circuit.to_json_dict()) == circuit


def test_pack_bits_inverts_bit_matrix():
    block = bit_matrix(6, 0, 64)
    assert np.array_equal(pack_bits(block), np.arange(64))


def test_from_json_names_missing_field():
    with pytest.raises(ParseError, match="k_out"):
        BoolCircuit.from_json_dict({"k_in": 2})


def test_sd_instance_contracts():
    inst = SdInstance(identity_circuit(2), identity_circuit(2), "0.1", "0.9")
    assert inst.a == Fraction(1, 10) and inst.b == Fraction(9, 10)
    with pytest.raises(WidthError):
        SdInstance(identity_circuit(2), identity_circuit(3), 0, 1)
    with pytest.raises(ValueError):
        SdInstance(identity_circuit(2), identity_circuit(2), "0.9", "0.1")
    round_trip = SdInstance.from_json_dict(inst.to_json_dict())
    assert round_trip == inst
