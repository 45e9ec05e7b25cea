"""Command line front-end: one subcommand per module, JSON in and out.

Exit codes: 0 success, 2 input/schema error, 3 property-check failure,
4 resource limit exceeded.  Output is deterministic for a fixed
(input, seed, version) triple; floats are printed with 17 significant
digits so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import _threads  # noqa: F401  (cap worker pools before numpy loads)

import numpy as np

from . import __version__, acceptance, classical, encoded, gadgets, perm, qsim, rep_theory, scattering
from .classical import ResourceLimitError, SwapProgram

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CHECK = 3
EXIT_RESOURCE = 4


class CheckFailure(Exception):
    pass


def _format(value) -> str:
    if isinstance(value, bool) or value is None:
        return "true" if value else ("false" if value is False else "null")
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ", ".join(f"{json.dumps(str(k))}: {_format(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value)}")


def emit(report: dict):
    sys.stdout.write(_format(report) + "\n")


def _load_json(source: str) -> dict:
    text = source
    if not source.lstrip().startswith("{"):
        with open(source) as fh:
            text = fh.read()
    return json.loads(text)


def _parse_perm(text: str) -> perm.Perm:
    return perm.check_perm(json.loads(text))


def _perm_key(sigma: perm.Perm) -> str:
    return "[" + ",".join(str(x) for x in sigma) + "]"


def _distribution_map(dist) -> dict:
    out = {}
    for r, w in enumerate(dist.weights):
        if w > 1e-15:
            out[_perm_key(perm.unrank(r, dist.n))] = float(w)
    return out


def cmd_classical(args) -> dict:
    prog = SwapProgram.from_json(_load_json(args.input))
    report: dict = {"n": prog.n, "steps": prog.m}
    dist = classical.exact_distribution(prog)
    report["distribution"] = _distribution_map(dist)
    report["marginals"] = {
        str(color): [float(x) for x in classical.marginal_location(prog, color)]
        for color in range(1, prog.n + 1)
    }
    residuals = {"weight_sum_error": abs(float(dist.weights.sum()) - 1.0)}
    if args.target:
        target = _parse_perm(args.target)
        steps = [(s.i, s.j) for s in prog.steps]
        verdict = {
            "target": list(target),
            "probability": classical.brute_force_probability(prog, target)
            if prog.m <= classical.MAX_SUBSET_M else float(dist.prob(target)),
            "reachable": classical.reachable_general(steps, target),
            "subset_count": classical.count_achieving_subsets(steps, target),
        }
        if prog.is_adjacent():
            verdict["reachable_adjacent"] = classical.reachable_adjacent(
                [s.i for s in prog.steps], target
            )
        report["verdict"] = verdict
        residuals["target_probability_gap"] = abs(
            verdict["probability"] - float(dist.prob(target))
        )
    if args.sample:
        counts = classical.sample_many(prog, args.sample, args.seed)
        report["samples"] = {
            _perm_key(sigma): counts[sigma] for sigma in sorted(counts)
        }
    report["residuals"] = residuals
    return report


def cmd_simulate(args) -> dict:
    gates, n = qsim.circuit_from_json(_load_json(args.input))
    state = qsim.apply_circuit(qsim.PermState.basis(n), gates)
    dist = state.measure_distribution()
    report: dict = {
        "n": n,
        "gates": len(gates),
        "distribution": _distribution_map(dist),
    }
    residuals: dict = {"norm_error": abs(state.norm() - 1.0)}
    for check in args.check or []:
        if check == "trace":
            trace, amp, ok = qsim.trace_identity_check(gates, n)
            residuals["trace_identity"] = abs(trace - math.factorial(n) * amp) / math.factorial(n)
            if not ok:
                raise CheckFailure("trace identity failed")
        elif check == "column":
            if not qsim.column_permutation_check(gates, n):
                raise CheckFailure("column permutation check failed")
            residuals["column_permutation"] = 0.0
        elif check == "duality":
            if not qsim.xy_duality_check(gates, n):
                raise CheckFailure("X/Y duality check failed")
            residuals["xy_duality"] = 0.0
        elif check == "ybe":
            resid = scattering.ybe_residual(args.x, args.y)
            residuals["ybe"] = resid
            if resid >= 1e-12:
                raise CheckFailure(f"Yang-Baxter residual {resid}")
        else:
            raise ValueError(f"unknown check {check!r}")
    report["residuals"] = residuals
    return report


def cmd_scatter(args) -> dict:
    obj = _load_json(args.input)
    traj = scattering.TrajectorySet(
        tuple(obj["positions"]), tuple(obj["velocities"]), float(obj.get("c", 1.0))
    )
    sched = scattering.build_schedule(
        traj, jitter=args.jitter, seed=args.seed or 0
    )
    state = qsim.apply_circuit(
        qsim.PermState.basis(traj.n), scattering.schedule_circuit(sched)
    )
    dist = state.measure_distribution()
    return {
        "n": traj.n,
        "collisions": [
            {"time": c.time, "k": c.k, "relative_velocity": c.relative_velocity,
             "rapidity": c.rapidity}
            for c in sched.collisions
        ],
        "signature": list(sched.signature),
        "distribution": _distribution_map(dist),
        "residuals": {"norm_error": abs(state.norm() - 1.0)},
    }


def cmd_gadget(args) -> dict:
    report: dict = {"z1": args.z1, "z2": args.z2}
    eff, prob = gadgets.four_particle_gadget(args.z1, args.z2)
    target = gadgets.four_particle_target(args.z1, args.z2)
    fidelity = gadgets.gate_fidelity(target, eff)
    report["four_particle"] = {
        "effective_angle": math.atan(args.z1) + math.atan(args.z2),
        "success_probability": prob,
        "fidelity": fidelity,
    }
    residuals = {"four_particle_infidelity": 1.0 - fidelity}
    if args.iters:
        phi = gadgets.three_particle_phi(args.z1, args.z2)
        eff3, prob3 = gadgets.three_particle_nondemolition(args.z1, args.z2, args.iters)
        target3 = np.array(
            [[math.cos(args.iters * phi), 1j * math.sin(args.iters * phi)],
             [1j * math.sin(args.iters * phi), math.cos(args.iters * phi)]]
        )
        fid3 = gadgets.gate_fidelity(target3, eff3)
        report["three_particle"] = {
            "iterations": args.iters,
            "angle_per_iteration": phi,
            "success_probability": prob3,
            "fidelity": fid3,
        }
        residuals["three_particle_infidelity"] = 1.0 - fid3
    report["residuals"] = residuals
    if max(residuals.values()) > 1e-9:
        raise CheckFailure("gadget fidelity below threshold")
    return report


def cmd_compile(args) -> dict:
    gates, n = qsim.circuit_from_json(_load_json(args.input))
    program = gadgets.compile_x_circuit(gates, n, scheme=args.scheme)
    dist, success = gadgets.run_compiled(program)
    direct = qsim.apply_circuit(qsim.PermState.basis(n), gates).measure_distribution()
    tv = dist.total_variation(direct)
    report = {
        "n": n,
        "scheme": args.scheme,
        "segments": len(program.segments),
        "success_probability": success,
        "distribution": _distribution_map(dist),
        "schedule": program.to_json() if args.emit_schedule else None,
        "residuals": {"tv_vs_direct": tv},
    }
    if tv > 1e-9:
        raise CheckFailure(f"compiled distribution deviates by {tv}")
    return report


def cmd_irrep(args) -> dict:
    if args.shape:
        lam = rep_theory.check_partition(json.loads(args.shape))
        report = rep_theory.verify_irrep_relations(lam)
        out: dict = {
            "shape": list(lam),
            "dimension": report["dimension"],
            "tableaux": [
                [list(row) for row in t.rows] for t in rep_theory.standard_tableaux(lam)
            ],
            "matrices": {
                str(k): [[float(x) for x in row] for row in rep_theory.yy_matrix(lam, k)]
                for k in range(1, sum(lam))
            },
            "residuals": {
                "involution": report["involution"],
                "commutation": report["commutation"],
                "braid": report["braid"],
            },
        }
        if not report["ok"]:
            raise CheckFailure("transposition-matrix relations failed")
        return out
    n = args.n
    table = []
    total = 0
    worst = 0.0
    for lam in rep_theory.partitions(n):
        dim = rep_theory.hook_dimension(lam)
        total += dim * dim
        rep = rep_theory.verify_irrep_relations(lam)
        worst = max(worst, rep["involution"], rep["commutation"], rep["braid"])
        table.append({"shape": list(lam), "dimension": dim,
                      "dual": list(rep_theory.dual(lam))})
    report = {
        "n": n,
        "irreps": table,
        "sum_of_squares": total,
        "factorial": math.factorial(n),
        "residuals": {"relations": worst,
                      "dimension_identity": abs(total - math.factorial(n))},
    }
    if total != math.factorial(n) or worst > 1e-12:
        raise CheckFailure("representation identities failed")
    return report


def cmd_encode(args) -> dict:
    circ = encoded.ExchangeCircuit.from_json(_load_json(args.input))
    bits = args.bits
    if len(bits) != circ.n or bits.strip("01"):
        raise ValueError("--bits must be a 0/1 string of length n")
    direct = encoded.exchange_distribution(circ, bits)
    reduced = encoded.exchange_reduction_distribution(circ, bits)
    tv = encoded.total_variation(direct, reduced)
    report = {
        "n": circ.n,
        "input": bits,
        "direct": {k: direct[k] for k in sorted(direct)},
        "reduction": {k: reduced[k] for k in sorted(reduced)},
        "residuals": {"tv": tv},
    }
    if args.sample:
        counts: dict[str, int] = {}
        rng = np.random.default_rng(args.seed)
        for _ in range(args.sample):
            out = encoded.exchange_reduction_sample(circ, bits, rng)
            counts[out] = counts.get(out, 0) + 1
        report["samples"] = {k: counts[k] for k in sorted(counts)}
    if tv > 1e-9:
        raise CheckFailure(f"reduction deviates by {tv}")
    return report


def cmd_selftest(args) -> dict:
    results = acceptance.run_all(
        report=lambda line: print(line, file=sys.stderr)
    )
    report = {
        "criteria": [
            {"number": r.number, "name": r.name,
             "ok": r.ok, "detail": r.detail}
            for r in results
        ],
        "passed": sum(r.ok for r in results),
        "total": len(results),
    }
    if not all(r.ok for r in results):
        raise CheckFailure("acceptance criteria failed")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballistic",
        description="Simulators and verifiers for ball-permuting quantum "
                    "models and probabilistic swap networks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classical", help="exact/sampled swap-program distributions")
    p.add_argument("input", help="SwapProgram JSON (path or inline)")
    p.add_argument("--target", help="permutation as JSON array, e.g. [2,1,3]")
    p.add_argument("--sample", type=int, default=0, help="Monte-Carlo shots")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_classical, needs_seed_if="sample")

    p = sub.add_parser("simulate", help="evolve a circuit and measure")
    p.add_argument("input", help="circuit JSON (path or inline)")
    p.add_argument("--check", action="append",
                   choices=["trace", "column", "duality", "ybe"])
    p.add_argument("--x", type=float, default=1.0, help="rapidity for --check ybe")
    p.add_argument("--y", type=float, default=2.0, help="rapidity for --check ybe")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("scatter", help="schedule and simulate trajectories")
    p.add_argument("input", help="trajectory JSON (path or inline)")
    p.add_argument("--jitter", type=float, default=None,
                   help="position perturbation for tie-breaking")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_scatter)

    p = sub.add_parser("gadget", help="postselected gadget effective gates")
    p.add_argument("--z1", type=float, required=True)
    p.add_argument("--z2", type=float, required=True)
    p.add_argument("--iters", type=int, default=0,
                   help="three-particle gadget iterations")
    p.set_defaults(fn=cmd_gadget)

    p = sub.add_parser("compile", help="compile an X circuit to gadget schedules")
    p.add_argument("input", help="circuit JSON (path or inline)")
    p.add_argument("--scheme", choices=["stationary", "trajectory"],
                   default="stationary")
    p.add_argument("--emit-schedule", action="store_true")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("irrep", help="partition dimensions and matrices")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--shape", help="one partition as JSON array, e.g. [2,1]")
    p.set_defaults(fn=cmd_irrep)

    p = sub.add_parser("encode", help="exchange-circuit reduction")
    p.add_argument("input", help="ExchangeCircuit JSON (path or inline)")
    p.add_argument("--bits", required=True, help="input bit string")
    p.add_argument("--sample", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_encode, needs_seed_if="sample")

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    needs_seed_if = getattr(args, "needs_seed_if", None)
    if needs_seed_if and getattr(args, needs_seed_if) and args.seed is None:
        parser.error(f"--seed is required with --{needs_seed_if}")
    try:
        report = args.fn(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    emit(report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
