"""Decision pipeline for statistical difference over invertible sequences.

The output-distribution state of a sequence is built iteratively: starting
from the all-zero basis state, each random step is one choice-interference
oracle call over the step's per-randomness permutations (retried under a
budget, since the oracle is probabilistic), and each deterministic step is
a direct permutation application.  The resulting amplitudes are
proportional to the sequence's output probabilities, so the swap test
between the two states estimates the squared cosine similarity of the two
output distributions, which the promise gap separates across a threshold.

Thresholding: a YES instance (distance <= a) keeps the squared overlap at
or above (1-a)^2 while a NO instance (distance > b) pushes it below
1 - b^2 — empirically for the cosine variant, hence the counterexample
scanner at the bottom.  The decision threshold is the midpoint, and the
gap (1-a)^2 - (1-b^2) = b^2 - 2a + a^2 must be positive, otherwise the
caller should polarize first.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuits import SdInstance
from .config import Caps, DEFAULT_CAPS
from .distributions import Distribution, cosine_similarity, tv_distance
from .errors import GapViolationError, OracleFailureError, ResourceError
from .invseq import InvertibleSequence, SisdInstance, polarize, reduce_sd_to_sisd
from .jsonio import as_exact_probability
from .qsim import StateVector, ci_oracle_query, permutation_unitary_from_circuit, swap_test
from .seeding import derive_rng

AMPLITUDE_REALITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    lam: int = 100              # oracle patience parameter
    retry_budget: int = 50      # attempts per choice-interference call
    swap_shots: int = 4096
    trial_count: int = 25
    seed: int = 0
    tau: Fraction | None = None  # decision threshold override
    caps: Caps = DEFAULT_CAPS

    def __post_init__(self):
        if min(self.lam, self.retry_budget, self.swap_shots, self.trial_count) < 1:
            raise ValueError("all solver counts must be >= 1")


@dataclass(frozen=True)
class ThresholdSpec:
    tau: Fraction
    gap: Fraction
    yes_bound: Fraction  # squared overlap stays >= this on the YES side
    no_bound: Fraction   # squared overlap stays <= this on the NO side


def derive_threshold(a, b) -> ThresholdSpec:
    """Exact threshold arithmetic from the promise parameters.

    yes_bound = (1-a)^2, no_bound = 1-b^2, tau their midpoint, and
    gap = b^2 - 2a + a^2 — which equals yes_bound - no_bound, so a positive
    gap is exactly what makes the two bounds separable.
    """
    a = as_exact_probability(a)
    b = as_exact_probability(b)
    gap = b * b - 2 * a + a * a
    if gap <= 0:
        error = GapViolationError(
            f"gap b^2 - 2a + a^2 = {gap} is not positive for a={a}, b={b}; "
            "polarize the instance first"
        )
        error.gap = gap  # exact value, for callers that report it
        raise error
    yes_bound = (1 - a) * (1 - a)
    no_bound = 1 - b * b
    return ThresholdSpec((yes_bound + no_bound) / 2, gap, yes_bound, no_bound)


@dataclass(frozen=True)
class StageRecord:
    stage: int
    r: int
    attempts: int
    success_probability: float
    min_real_amplitude: float


def build_output_state(
    seq: InvertibleSequence,
    cfg: SolverConfig,
    rng: np.random.Generator,
    stage_log: list[StageRecord] | None = None,
) -> StateVector:
    """Iteratively build the sequence's output-distribution state.

    Every random step queries the choice-interference oracle over its
    2^r permutation unitaries, retrying up to cfg.retry_budget times;
    exhaustion raises OracleFailureError with the stage index.  All
    intermediate states must keep non-negative real amplitudes (they are
    counting states), which is asserted per stage.
    """
    if seq.k > cfg.caps.qubit_cap:
        raise ResourceError(f"state width {seq.k} exceeds qubit cap {cfg.caps.qubit_cap}")
    state = StateVector.zero(seq.k)
    for stage, pair in enumerate(seq.pairs):
        if pair.r == 0:
            unitary = permutation_unitary_from_circuit(pair, "")
            state = StateVector(seq.k, unitary.apply(state.amps))
            attempts, probability = 0, 1.0
        else:
            unitaries = tuple(
                permutation_unitary_from_circuit(pair, format(z, f"0{pair.r}b"))
                for z in range(1 << pair.r)
            )
            attempts = 0
            outcome = None
            for attempts in range(1, cfg.retry_budget + 1):
                outcome = ci_oracle_query(unitaries, state, cfg.lam, rng, cfg.caps)
                if outcome.success:
                    break
            if outcome is None or not outcome.success:
                raise OracleFailureError(stage, outcome.success_probability, attempts)
            state = outcome.state
            probability = outcome.success_probability
        min_real = float(state.amps.real.min())
        if min_real < -AMPLITUDE_REALITY_TOLERANCE or np.abs(state.amps.imag).max() > AMPLITUDE_REALITY_TOLERANCE:
            raise AssertionError(
                f"stage {stage} produced amplitudes outside the non-negative real cone"
            )
        if stage_log is not None:
            stage_log.append(StageRecord(stage, pair.r, attempts, probability, min_real))
    return state


@dataclass(frozen=True)
class Decision:
    verdict: str                      # "YES" | "NO"
    estimate: float                   # median swap-test estimate
    tau: float
    gap: float
    trials: tuple[float, ...]
    exact_overlap: float
    stage_log0: tuple[StageRecord, ...] = field(default=(), repr=False)
    stage_log1: tuple[StageRecord, ...] = field(default=(), repr=False)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "estimate": self.estimate,
            "tau": self.tau,
            "gap": self.gap,
            "trials": list(self.trials),
            "exact_overlap": self.exact_overlap,
            "oracle_attempts": [
                [record.attempts for record in log]
                for log in (self.stage_log0, self.stage_log1)
            ],
        }


def decide_sisd(inst: SisdInstance, cfg: SolverConfig) -> Decision:
    """Build both output states, estimate their squared overlap by repeated
    swap tests, and compare the median estimate against the threshold."""
    spec = derive_threshold(inst.a, inst.b)
    tau = cfg.tau if cfg.tau is not None else spec.tau
    log0: list[StageRecord] = []
    log1: list[StageRecord] = []
    state0 = build_output_state(inst.seq0, cfg, derive_rng(cfg.seed, "build", 0), log0)
    state1 = build_output_state(inst.seq1, cfg, derive_rng(cfg.seed, "build", 1), log1)
    estimates = []
    exact = 0.0
    for trial in range(cfg.trial_count):
        result = swap_test(state0, state1, cfg.swap_shots, derive_rng(cfg.seed, "trial", trial))
        estimates.append(result.estimate)
        exact = result.exact_overlap
    median = statistics.median(estimates)
    verdict = "YES" if median >= tau else "NO"
    return Decision(
        verdict,
        float(median),
        float(tau),
        float(spec.gap),
        tuple(estimates),
        exact,
        tuple(log0),
        tuple(log1),
    )


def decide_sd(
    inst: SdInstance, cfg: SolverConfig, polarize_k: int | None = None
) -> Decision:
    """End-to-end decision: polarize when the raw gap is invalid, compile to
    sequences, then run the oracle pipeline.

    When the raw parameters violate the gap condition, ``polarize_k`` must
    be provided (amplification changes circuit sizes, so it is an explicit
    choice); a valid raw gap is used as-is.
    """
    gap = inst.b * inst.b - 2 * inst.a + inst.a * inst.a
    if gap <= 0:
        if polarize_k is None:
            raise GapViolationError(
                f"raw promise gap {gap} is not positive; pass polarize_k to amplify "
                "(or polarize the instance yourself)"
            )
        inst = polarize(inst, polarize_k)
    return decide_sisd(reduce_sd_to_sisd(inst), cfg)


# ---------------------------------------------------------------------------
# empirical threshold validity

@dataclass(frozen=True)
class ThresholdCounterexample:
    side: str            # "yes" or "no"
    distance: float
    squared_cosine: float
    bound: float
    d0: dict
    d1: dict


def cosine_threshold_counterexamples(
    pairs: list[tuple[Distribution, Distribution]],
    a,
    b,
    tolerance: float = 1e-12,
) -> list[ThresholdCounterexample]:
    """Scan distribution pairs for violations of the threshold bounds.

    The bounds transplant a fidelity fact onto the cosine similarity of
    probability vectors; that transfer is not guaranteed in general, so violations are
    possible and are reported as structured counterexamples for logging.
    """
    a = as_exact_probability(a)
    b = as_exact_probability(b)
    yes_bound = float((1 - a) * (1 - a))
    no_bound = float(1 - b * b)
    found = []
    for d0, d1 in pairs:
        distance = float(tv_distance(d0, d1))
        squared = cosine_similarity(d0, d1) ** 2
        if distance <= a and squared < yes_bound - tolerance:
            found.append(
                ThresholdCounterexample(
                    "yes", distance, squared, yes_bound,
                    d0.to_json_dict(), d1.to_json_dict(),
                )
            )
        if distance > b and squared > no_bound + tolerance:
            found.append(
                ThresholdCounterexample(
                    "no", distance, squared, no_bound,
                    d0.to_json_dict(), d1.to_json_dict(),
                )
            )
    return found
