"""Exact state-vector simulation of order and choice interference.

Conventions
-----------
* Basis index ``i`` of an ``n``-qubit vector corresponds to the bitstring
  ``format(i, f"0{n}b")`` (leftmost character = most significant bit),
  matching the circuit layer.
* The order-interference vector of m unitaries is the unnormalized sum,
  over all m! application orders, of the composed unitaries applied to the
  input state.  Its norm lies in [0, m!] and can vanish outright (X and Z
  anticommute, so their two orders cancel on every state).
* Oracle queries are probabilistic: the success probability is the product
  of the phase-alignment factor (how coherently the different orders
  contribute to each basis amplitude) and a norm factor penalizing small
  interference norms, tempered by the patience parameter lambda.  A failed
  query returns a structured failure rather than raising, so callers can
  retry under a budget.
* Unitaries coming from circuits are permutation tables; dense matrices
  are for hand-built examples.  Keeping permutations as index tables makes
  an order-interference query cost O(m! * m * 2^n) instead of paying for
  matrix products.

All operations are pure given an explicit generator; concurrent tasks
should each derive their own stream via ``seeding.derive_rng``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuits import bit_matrix, eval_circuit_batch, pack_bits
from .config import Caps, DEFAULT_CAPS
from .errors import (
    DegenerateInputError,
    InvalidPairError,
    PreconditionError,
    ResourceError,
    WidthError,
)
from .invseq import InvPair

NORMALIZATION_TOLERANCE = 1e-10
UNITARITY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over n qubits; index i <-> n-bit string of i."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise WidthError(f"amplitude vector must have length 2^{self.n}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, n: int, bits: str) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(n, amps)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls.basis(n, "0" * n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = NORMALIZATION_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0:
            raise DegenerateInputError("cannot normalize the zero vector")
        return StateVector(self.n, self.amps / norm)

    def inner(self, other: "StateVector") -> complex:
        if self.n != other.n:
            raise WidthError("qubit counts differ")
        return complex(np.vdot(self.amps, other.amps))

    def to_json_list(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amps]

    @classmethod
    def from_json_list(cls, pairs: list) -> "StateVector":
        amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
        n = int(round(math.log2(len(amps))))
        if 1 << n != len(amps):
            raise WidthError("amplitude list length is not a power of two")
        return cls(n, amps)


@dataclass(frozen=True, eq=False)
class SimUnitary:
    """Either a permutation of basis states (index table) or a dense matrix."""

    n: int
    table: np.ndarray | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        dim = 1 << self.n
        if (self.table is None) == (self.matrix is None):
            raise ValueError("exactly one of table/matrix must be given")
        if self.table is not None:
            table = np.asarray(self.table, dtype=np.int64)
            if table.shape != (dim,) or len(np.unique(table)) != dim:
                raise InvalidPairError("permutation table is not a bijection on the basis")
            object.__setattr__(self, "table", table)
        else:
            matrix = np.asarray(self.matrix, dtype=np.complex128)
            if matrix.shape != (dim, dim):
                raise WidthError(f"matrix must be {dim}x{dim}")
            defect = np.abs(matrix.conj().T @ matrix - np.eye(dim)).max()
            if defect > UNITARITY_TOLERANCE:
                raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
            object.__setattr__(self, "matrix", matrix)

    @property
    def kind(self) -> str:
        return "permutation" if self.table is not None else "dense"

    def apply(self, amps: np.ndarray) -> np.ndarray:
        if self.table is not None:
            out = np.empty_like(amps)
            out[self.table] = amps
            return out
        return self.matrix @ amps

    def to_json_dict(self) -> dict:
        if self.table is not None:
            return {"kind": "permutation", "n": self.n, "table": self.table.tolist()}
        return {
            "kind": "dense",
            "n": self.n,
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SimUnitary":
        from .jsonio import require_field

        kind = require_field(obj, "kind", "unitary object")
        n = require_field(obj, "n", "unitary object")
        if kind == "permutation":
            return cls(n, table=np.array(require_field(obj, "table", "unitary object")))
        if kind == "dense":
            rows = require_field(obj, "matrix", "unitary object")
            matrix = np.array([[complex(re, im) for re, im in row] for row in rows])
            return cls(n, matrix=matrix)
        raise ValueError(f"unknown unitary kind {kind!r}")


def identity_unitary(n: int) -> SimUnitary:
    return SimUnitary(n, table=np.arange(1 << n))


def pauli_x() -> SimUnitary:
    return SimUnitary(1, matrix=np.array([[0, 1], [1, 0]], dtype=np.complex128))


def pauli_z() -> SimUnitary:
    return SimUnitary(1, matrix=np.array([[1, 0], [0, -1]], dtype=np.complex128))


def permutation_unitary_from_circuit(pair: InvPair, z: str) -> SimUnitary:
    """Basis permutation x -> forward(x; z) for one hard-wired randomness.

    The full table is built by evaluating the forward circuit on every
    basis state, and checked to be a bijection; a non-invertible forward
    map surfaces as InvalidPairError.
    """
    if len(z) != pair.r or any(ch not in "01" for ch in z):
        raise WidthError(f"randomness {z!r} is not a {pair.r}-bit string")
    dim = 1 << pair.k
    states = bit_matrix(pair.k, 0, dim)
    if pair.r:
        z_bits = bit_matrix(pair.r, int(z, 2), int(z, 2) + 1)
        states = np.hstack([states, np.broadcast_to(z_bits, (dim, pair.r))])
    table = pack_bits(eval_circuit_batch(pair.forward, states))
    if len(np.unique(table)) != dim:
        raise InvalidPairError(
            f"forward circuit is not a permutation for randomness {z!r}"
        )
    return SimUnitary(pair.k, table=table)


# ---------------------------------------------------------------------------
# order interference

@dataclass(frozen=True, eq=False)
class OIQuery:
    unitaries: tuple[SimUnitary, ...]
    psi: StateVector
    lam: int
    caps: Caps = DEFAULT_CAPS

    def __post_init__(self):
        object.__setattr__(self, "unitaries", tuple(self.unitaries))
        m = len(self.unitaries)
        if m < 1:
            raise ValueError("need at least one unitary")
        if m > self.caps.max_oracle_unitaries:
            raise ResourceError(
                f"{m} unitaries means {math.factorial(m)} orderings; "
                f"cap is {self.caps.max_oracle_unitaries}"
            )
        for u in self.unitaries:
            if u.n != self.psi.n:
                raise WidthError("all unitaries must act on the state's qubit count")
        if self.lam < 1:
            raise ValueError("lambda must be a positive integer")
        if not self.psi.is_normalized():
            raise PreconditionError("query state must be normalized")

    @property
    def m(self) -> int:
        return len(self.unitaries)


@dataclass(frozen=True, eq=False)
class OIVectorResult:
    vector: np.ndarray                 # unnormalized sum over orderings
    alphas: np.ndarray                 # (orderings, 2^n) per-ordering amplitudes
    orderings: tuple[tuple[int, ...], ...]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def oi_vector(query: OIQuery) -> OIVectorResult:
    """Sum over all m! application orders; ordering (i, j, ...) applies
    unitary i first."""
    orderings = tuple(itertools.permutations(range(query.m)))
    alphas = np.empty((len(orderings), 1 << query.psi.n), dtype=np.complex128)
    for row, ordering in enumerate(orderings):
        amps = query.psi.amps
        for index in ordering:
            amps = query.unitaries[index].apply(amps)
        alphas[row] = amps
    return OIVectorResult(alphas.sum(axis=0), alphas, orderings)


def phase_alignment(alphas: np.ndarray) -> float:
    """How coherently the per-ordering amplitudes add, in [0, 1]."""
    denominator = float(np.abs(alphas).sum())
    if denominator == 0.0:
        raise DegenerateInputError("all per-ordering amplitudes are zero")
    numerator = float(np.abs(alphas.sum(axis=0)).sum())
    return min(numerator / denominator, 1.0)


@dataclass(frozen=True, eq=False)
class OIOutcome:
    """Result of one probabilistic oracle query.

    ``interference_norm`` is the norm of the raw (unnormalized)
    interference vector; ``norm_factor`` the patience-tempered factor it
    contributes to the success probability.  The state is present only on
    success.
    """

    success: bool
    state: StateVector | None
    interference_norm: float
    phase_alignment: float
    norm_factor: float
    success_probability: float

    def diagnostics_dict(self) -> dict:
        return {
            "oi_norm": self.interference_norm,
            "phase_alignment": self.phase_alignment,
            "success_probability": self.success_probability,
        }


def _oracle_outcome(
    vector: np.ndarray,
    alignment: float,
    denominator_scale: int,
    lam: int,
    n: int,
    rng: np.random.Generator,
) -> OIOutcome:
    norm = float(np.linalg.norm(vector))
    scaled = norm / denominator_scale
    norm_factor = scaled / (scaled + 1.0 / lam)
    probability = alignment * norm_factor
    success = norm > 0 and bool(rng.random() < probability)
    state = StateVector(n, vector / norm) if success else None
    return OIOutcome(success, state, norm, alignment, norm_factor, probability)


def oi_oracle_query(query: OIQuery, rng: np.random.Generator) -> OIOutcome:
    """Draw one oracle attempt: with probability
    alignment * (||OI||/m!) / (||OI||/m! + 1/lambda)
    the outcome carries the normalized order-interference state.

    A zero interference vector yields success probability 0, never an
    exception; diagnostics are populated either way.
    """
    result = oi_vector(query)
    alignment = phase_alignment(result.alphas)
    return _oracle_outcome(
        result.vector,
        alignment,
        math.factorial(query.m),
        query.lam,
        query.psi.n,
        rng,
    )


# ---------------------------------------------------------------------------
# choice interference

def ci_vector(unitaries: tuple[SimUnitary, ...], psi: StateVector) -> np.ndarray:
    """Unnormalized sum of each unitary applied once (no orderings)."""
    for u in unitaries:
        if u.n != psi.n:
            raise WidthError("all unitaries must act on the state's qubit count")
    total = np.zeros_like(psi.amps)
    for u in unitaries:
        total += u.apply(psi.amps)
    return total


def ci_oracle_query(
    unitaries: tuple[SimUnitary, ...],
    psi: StateVector,
    lam: int,
    rng: np.random.Generator,
    caps: Caps = DEFAULT_CAPS,
) -> OIOutcome:
    """Choice-interference oracle, simulated at the contract level: success
    probability alignment * (||CI||/m) / (||CI||/m + 1/lambda), success
    state CI/||CI||."""
    query = OIQuery(tuple(unitaries), psi, lam, caps)  # reuse the validation
    alphas = np.stack([u.apply(psi.amps) for u in query.unitaries])
    alignment = phase_alignment(alphas)
    return _oracle_outcome(
        alphas.sum(axis=0), alignment, query.m, lam, psi.n, rng
    )


# ---------------------------------------------------------------------------
# swap test

@dataclass(frozen=True)
class SwapTestResult:
    estimate: float        # 2 * accept fraction - 1
    exact_overlap: float   # |<phi|psi>|^2, for oracle checks
    accepts: int
    shots: int


def swap_test(
    phi: StateVector, psi: StateVector, shots: int, rng: np.random.Generator
) -> SwapTestResult:
    """Simulate the swap-test estimator of |<phi|psi>|^2.

    Each shot accepts with probability 1/2 + |<phi|psi>|^2 / 2; the
    estimate is 2 * (accept fraction) - 1 and may dip below zero by shot
    noise.
    """
    if phi.n != psi.n:
        raise WidthError("states must have the same qubit count")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    for state in (phi, psi):
        if not state.is_normalized():
            raise PreconditionError("swap test inputs must be normalized")
    overlap = abs(phi.inner(psi)) ** 2
    accept_probability = 0.5 + overlap / 2.0
    accepts = int(np.count_nonzero(rng.random(shots) < accept_probability))
    return SwapTestResult(2.0 * accepts / shots - 1.0, float(overlap), accepts, shots)
