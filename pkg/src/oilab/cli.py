"""Command-line front end.

Commands: ``circuit stats``, ``reduce sd-to-sisd``, ``polarize``,
``decide sd|sisd``, ``oracle oi|ci``, ``lwe gen|to-gapcvp|dist|experiment``.

Every report embeds the seed, a hash of the parsed configuration, and the
package version; re-running a command with the same inputs and seed
reproduces the report byte for byte.  Exit codes: 0 for YES or plain
success, 1 for NO, 2 for any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from fractions import Fraction

import numpy as np

from . import __version__
from .circuits import BoolCircuit, SdInstance, enumerate_distribution
from .config import caps_from_env
from .errors import OilabError
from .invseq import (
    InvertibleSequence,
    SisdInstance,
    polarize,
    reduce_sd_to_sisd,
    validate_sequence,
)
from .jsonio import (
    atomic_write_text,
    canonical_dumps,
    config_hash,
    fraction_to_string,
    load_json,
    require_field,
    write_json,
)
from .lwe import (
    GapCvpInstance,
    LweInstance,
    LweParams,
    dist_to_lattice,
    gap_experiment,
    lwe_to_gapcvp,
    sample_lwe,
    sample_uniform,
)
from .qsim import OIQuery, SimUnitary, StateVector, ci_oracle_query, oi_oracle_query
from .seeding import derive_rng
from .solver import SolverConfig, decide_sd, decide_sisd

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2


def _caps(args):
    caps = caps_from_env()
    if getattr(args, "cap_bits", None) is not None:
        caps = replace(caps, enum_bits=args.cap_bits, cvp_enum_cap=2 ** args.cap_bits)
    return caps


def _envelope(args, command: str) -> dict:
    config = {
        key: value
        for key, value in sorted(vars(args).items())
        if key != "handler" and not callable(value)
    }
    return {
        "command": command,
        "version": __version__,
        "seed": getattr(args, "seed", 0),
        "config_hash": config_hash(config),
    }


def _emit(args, report: dict) -> None:
    text = canonical_dumps(report)
    sys.stdout.write(text)
    out = getattr(args, "out", None)
    if out:
        atomic_write_text(out, text)


# ---------------------------------------------------------------------------
# handlers

def _cmd_circuit_stats(args) -> int:
    circuit = BoolCircuit.from_json_dict(load_json(args.instance))
    payload = {
        "k_in": circuit.k_in,
        "k_out": circuit.k_out,
        "gate_count": len(circuit.gates),
        "wire_count": circuit.n_wires,
    }
    caps = _caps(args)
    if circuit.k_in <= caps.enum_bits:
        dist = enumerate_distribution(circuit, caps)
        payload["distribution"] = {
            "support_size": len(dist.probs),
            "max_prob": fraction_to_string(max(dist.probs.values())),
            "min_prob": fraction_to_string(min(dist.probs.values())),
        }
    _emit(args, {**_envelope(args, "circuit stats"), **payload})
    return EXIT_YES


def _cmd_reduce(args) -> int:
    inst = SdInstance.from_json_dict(load_json(args.instance))
    reduced = reduce_sd_to_sisd(inst)
    write_json(args.out, reduced.to_json_dict())
    report = {
        **_envelope(args, "reduce sd-to-sisd"),
        "length": len(reduced.seq0),
        "state_width": reduced.seq0.k,
        "max_randomness": reduced.r,
        "written": args.out,
    }
    sys.stdout.write(canonical_dumps(report))
    return EXIT_YES


def _cmd_polarize(args) -> int:
    inst = SdInstance.from_json_dict(load_json(args.instance))
    out = polarize(inst, args.k, args.xor_reps, args.product_reps)
    write_json(args.out, out.to_json_dict())
    report = {
        **_envelope(args, "polarize"),
        "a": fraction_to_string(out.a),
        "b": fraction_to_string(out.b),
        "k_in": out.c0.k_in,
        "k_out": out.c0.k_out,
        "written": args.out,
    }
    sys.stdout.write(canonical_dumps(report))
    return EXIT_YES


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        lam=args.lam,
        retry_budget=args.retry_budget,
        swap_shots=args.shots,
        trial_count=args.trials,
        seed=args.seed,
        tau=Fraction(args.tau) if args.tau is not None else None,
        caps=_caps(args),
    )


def _cmd_decide_sd(args) -> int:
    inst = SdInstance.from_json_dict(load_json(args.instance))
    decision = decide_sd(inst, _solver_config(args), args.polarize_k)
    _emit(args, {**_envelope(args, "decide sd"), **decision.to_json_dict()})
    return EXIT_YES if decision.verdict == "YES" else EXIT_NO


def _cmd_decide_sisd(args) -> int:
    inst = SisdInstance.from_json_dict(load_json(args.instance))
    decision = decide_sisd(inst, _solver_config(args))
    _emit(args, {**_envelope(args, "decide sisd"), **decision.to_json_dict()})
    return EXIT_YES if decision.verdict == "YES" else EXIT_NO


def _load_oracle_query(args) -> tuple[tuple[SimUnitary, ...], StateVector, int]:
    obj = load_json(args.query)
    unitaries = tuple(
        SimUnitary.from_json_dict(raw)
        for raw in require_field(obj, "unitaries", "oracle query")
    )
    psi = StateVector.from_json_list(require_field(obj, "psi", "oracle query"))
    lam = args.lam if args.lam is not None else require_field(obj, "lambda", "oracle query")
    return unitaries, psi, int(lam)


def _oracle_report(args, command: str, outcome) -> dict:
    return {
        **_envelope(args, command),
        "success": outcome.success,
        "diagnostics": outcome.diagnostics_dict(),
        "state": outcome.state.to_json_list() if outcome.state is not None else None,
    }


def _cmd_oracle_oi(args) -> int:
    unitaries, psi, lam = _load_oracle_query(args)
    query = OIQuery(unitaries, psi, lam, _caps(args))
    outcome = oi_oracle_query(query, derive_rng(args.seed, "oracle", "oi"))
    _emit(args, _oracle_report(args, "oracle oi", outcome))
    return EXIT_YES


def _cmd_oracle_ci(args) -> int:
    unitaries, psi, lam = _load_oracle_query(args)
    outcome = ci_oracle_query(
        unitaries, psi, lam, derive_rng(args.seed, "oracle", "ci"), _caps(args)
    )
    _emit(args, _oracle_report(args, "oracle ci", outcome))
    return EXIT_YES


def _cmd_lwe_gen(args) -> int:
    params = LweParams(args.n, args.q, args.m, args.alpha)
    rng = derive_rng(args.seed, "lwe-gen", "uniform" if args.uniform else "lwe")
    inst = sample_uniform(params, rng) if args.uniform else sample_lwe(params, rng)
    write_json(args.out, inst.to_json_dict())
    report = {
        **_envelope(args, "lwe gen"),
        "origin": inst.origin,
        "d": params.distance_threshold,
        "written": args.out,
    }
    sys.stdout.write(canonical_dumps(report))
    return EXIT_YES


def _cmd_lwe_to_gapcvp(args) -> int:
    inst = LweInstance.from_json_dict(load_json(args.instance))
    cvp = lwe_to_gapcvp(inst, args.gamma)
    write_json(args.out, cvp.to_json_dict())
    report = {
        **_envelope(args, "lwe to-gapcvp"),
        "d": cvp.d,
        "gamma": cvp.gamma,
        "written": args.out,
    }
    sys.stdout.write(canonical_dumps(report))
    return EXIT_YES


def _cmd_lwe_dist(args) -> int:
    cvp = GapCvpInstance.from_json_dict(load_json(args.instance))
    dist = dist_to_lattice(cvp, _caps(args))
    _emit(
        args,
        {
            **_envelope(args, "lwe dist"),
            "dist": dist,
            "d": cvp.d,
            "gamma": cvp.gamma,
            "within_d": dist <= cvp.d,
            "beyond_gamma_d": dist > cvp.gamma * cvp.d,
        },
    )
    return EXIT_YES


def _cmd_lwe_experiment(args) -> int:
    params = LweParams(args.n, args.q, args.m, args.alpha)
    report = gap_experiment(
        params, args.gamma, args.trials, args.seed, args.factor, _caps(args)
    )
    envelope = {**_envelope(args, "lwe experiment"), **report.to_json_dict()}
    text = canonical_dumps(envelope)
    sys.stdout.write(text)
    if args.out_prefix:
        atomic_write_text(args.out_prefix + ".json", text)
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["trial", "origin", "dist", "d", "verdict"])
        writer.writerows(report.csv_rows())
        atomic_write_text(args.out_prefix + ".csv", buffer.getvalue())
    return EXIT_YES


def _cmd_validate(args) -> int:
    obj = load_json(args.instance)
    if "seq0" in obj:  # a full two-sequence instance
        sequences = [
            InvertibleSequence.from_json_dict(require_field(obj, key, "sisd instance"))
            for key in ("seq0", "seq1")
        ]
    else:
        sequences = [InvertibleSequence.from_json_dict(obj)]
    reports = [validate_sequence(seq, seed=args.seed) for seq in sequences]
    _emit(
        args,
        {
            **_envelope(args, "validate sequence"),
            "ok": all(r.ok for r in reports),
            "sequences": [
                [
                    {
                        "index": c.index,
                        "exhaustive": c.exhaustive,
                        "points": c.points_checked,
                        "ok": c.ok,
                        "counterexample": list(c.counterexample) if c.counterexample else None,
                    }
                    for c in report.checks
                ]
                for report in reports
            ],
        },
    )
    return EXIT_YES if all(r.ok for r in reports) else EXIT_NO


# ---------------------------------------------------------------------------
# parser assembly

def _add_common(parser, out=True):
    parser.add_argument("--seed", type=int, default=0, help="64-bit experiment seed")
    parser.add_argument("--cap-bits", type=int, default=None, help="enumeration cap override")
    if out:
        parser.add_argument("--out", default=None, help="write the JSON report here")


def _add_solver_flags(parser):
    parser.add_argument("--lambda", dest="lam", type=int, default=100)
    parser.add_argument("--shots", type=int, default=4096)
    parser.add_argument("--trials", type=int, default=25)
    parser.add_argument("--retry-budget", type=int, default=50)
    parser.add_argument("--tau", default=None, help="decision threshold override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oilab", description="order-interference decision workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    circuit = sub.add_parser("circuit").add_subparsers(dest="sub", required=True)
    stats = circuit.add_parser("stats", help="circuit shape and distribution summary")
    stats.add_argument("--instance", required=True)
    _add_common(stats)
    stats.set_defaults(handler=_cmd_circuit_stats)

    reduce_ = sub.add_parser("reduce").add_subparsers(dest="sub", required=True)
    sd2sisd = reduce_.add_parser("sd-to-sisd", help="compile an SD instance to sequences")
    sd2sisd.add_argument("--instance", required=True)
    sd2sisd.add_argument("--out", required=True)
    sd2sisd.add_argument("--seed", type=int, default=0)
    sd2sisd.set_defaults(handler=_cmd_reduce)

    pol = sub.add_parser("polarize", help="amplify the promise gap")
    pol.add_argument("--instance", required=True)
    pol.add_argument("--out", required=True)
    pol.add_argument("--k", type=int, default=None)
    pol.add_argument("--xor-reps", type=int, default=None)
    pol.add_argument("--product-reps", type=int, default=None)
    pol.add_argument("--seed", type=int, default=0)
    pol.set_defaults(handler=_cmd_polarize)

    decide = sub.add_parser("decide").add_subparsers(dest="sub", required=True)
    dsd = decide.add_parser("sd")
    dsd.add_argument("--instance", required=True)
    dsd.add_argument("--polarize-k", type=int, default=None)
    _add_common(dsd)
    _add_solver_flags(dsd)
    dsd.set_defaults(handler=_cmd_decide_sd)
    dsisd = decide.add_parser("sisd")
    dsisd.add_argument("--instance", required=True)
    _add_common(dsisd)
    _add_solver_flags(dsisd)
    dsisd.set_defaults(handler=_cmd_decide_sisd)

    oracle = sub.add_parser("oracle").add_subparsers(dest="sub", required=True)
    for name, handler in (("oi", _cmd_oracle_oi), ("ci", _cmd_oracle_ci)):
        op = oracle.add_parser(name)
        op.add_argument("--query", required=True)
        op.add_argument("--lambda", dest="lam", type=int, default=None)
        _add_common(op)
        op.set_defaults(handler=handler)

    val = sub.add_parser("validate", help="check a sequence's inverse identities")
    val.add_argument("--instance", required=True)
    _add_common(val)
    val.set_defaults(handler=_cmd_validate)

    lwe = sub.add_parser("lwe").add_subparsers(dest="sub", required=True)
    gen = lwe.add_parser("gen")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--q", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--alpha", type=float, required=True)
    gen.add_argument("--uniform", action="store_true")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(handler=_cmd_lwe_gen)

    tocvp = lwe.add_parser("to-gapcvp")
    tocvp.add_argument("--instance", required=True)
    tocvp.add_argument("--gamma", type=float, required=True)
    tocvp.add_argument("--out", required=True)
    tocvp.add_argument("--seed", type=int, default=0)
    tocvp.set_defaults(handler=_cmd_lwe_to_gapcvp)

    dist = lwe.add_parser("dist")
    dist.add_argument("--instance", required=True)
    _add_common(dist)
    dist.set_defaults(handler=_cmd_lwe_dist)

    exp = lwe.add_parser("experiment")
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--q", type=int, required=True)
    exp.add_argument("--m", type=int, required=True)
    exp.add_argument("--alpha", type=float, required=True)
    exp.add_argument("--gamma", type=float, default=1.0)
    exp.add_argument("--factor", type=float, default=3.0, help="calibrated NO-side factor")
    exp.add_argument("--trials", type=int, default=100)
    exp.add_argument("--out-prefix", default=None)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--cap-bits", type=int, default=None)
    exp.set_defaults(handler=_cmd_lwe_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (OilabError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
