"""Command-line surface: analysis, certificates, reductions, covers, norm checks.

Every command embeds its full run configuration (including seeds, tolerances
and size guards) in the report, so any emitted report can be reproduced
bit-for-bit by re-running the embedded config.  Exit codes: 0 success/pass,
1 negative-but-valid result (infeasible, none found, verification fail,
inequality violation), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis, complexity, covering, phi_km, reduction, systems
from .covering import SearchGuardExceeded

TOL_INEQUALITY = 1e-9
DEFAULT_POINT_GUARD = analysis.DEFAULT_POINT_GUARD
DEFAULT_MAX_FORMS = 1 << 12


def _emit(report: dict, args) -> None:
    if args.output == "json":
        text = json.dumps(report, indent=1)
    else:
        lines: list[str] = []

        def nested(val) -> bool:
            return isinstance(val, dict) or (
                isinstance(val, list) and any(isinstance(x, (dict, list)) for x in val)
            )

        def render(obj, indent=0):
            pad = "  " * indent
            if isinstance(obj, dict):
                for key, val in obj.items():
                    if nested(val):
                        lines.append(f"{pad}{key}:")
                        render(val, indent + 1)
                    else:
                        lines.append(f"{pad}{key}: {val}")
            elif isinstance(obj, list):
                for idx, val in enumerate(obj):
                    if nested(val):
                        lines.append(f"{pad}- [{idx}]")
                        render(val, indent + 1)
                    else:
                        lines.append(f"{pad}- {val}")

        render(report)
        text = "\n".join(lines)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _config(args, **extra) -> dict:
    cfg = {"command": args.command}
    cfg.update(extra)
    return cfg


def cmd_analyze(args) -> int:
    system = systems.load_system(args.system)
    flags = systems.system_flags(system)
    normalized = systems.normalize_translation_invariant(system)
    report = {
        "config": _config(args, system=args.system, k_max=args.k_max),
        "p": int(system.p),
        "r": system.r,
        "d": system.d,
        "flags": flags,
        "translation_invariant": normalized is not None,
    }
    if normalized is not None:
        points = systems.associated_set(system)
        report["associated_set"] = [list(pt) for pt in points.points]
    comp = complexity.complexity_report(system, args.k_max, args.node_guard)
    report["complexity"] = comp.to_json()
    _emit(report, args)
    return 0


def cmd_witness(args) -> int:
    system = systems.load_system(args.system)
    targets = [args.at] if args.at is not None else list(range(system.r))
    results = []
    missing = 0
    for i in targets:
        cert = complexity.sequential_witness(system, i, args.k, args.max_len, args.node_guard)
        if cert is None:
            missing += 1
            results.append({"i": i, "found": False})
        else:
            results.append({"i": i, "found": True, "length": cert.length, "certificate": cert.to_json()})
    report = {
        "config": _config(
            args, system=args.system, at=args.at, k=args.k, max_len=args.max_len
        ),
        "results": results,
        "all_found": missing == 0,
    }
    _emit(report, args)
    return 0 if missing == 0 else 1


def cmd_verify(args) -> int:
    system = systems.load_system(args.system)
    cert = complexity.WitnessCertificate.load(args.certificate)
    result = complexity.verify_witness(system, cert)
    report = {
        "config": _config(args, certificate=args.certificate, system=args.system),
        "verdict": result.to_json(),
    }
    _emit(report, args)
    return 0 if result.passed else 1


def cmd_reduce(args) -> int:
    system = systems.load_system(args.system)
    cert = complexity.WitnessCertificate.load(args.witness)
    try:
        chain = reduction.build_chain(system, cert, max_forms=args.max_forms)
    except reduction.InvalidWitness as exc:
        _emit({"config": _config(args), "error": str(exc)}, args)
        return 1
    report = {
        "config": _config(
            args,
            system=args.system,
            witness=args.witness,
            max_forms=args.max_forms,
            numeric_check=args.numeric_check,
            n=args.n,
            trials=args.trials,
            seed=args.seed,
            tolerance=args.tol,
        ),
        "steps": len(chain.steps),
        "truncated": chain.truncated,
        "final_forms": chain.final_system.r,
        "final_variables": chain.final_system.d,
        "chain": chain.to_json(),
    }
    violation = None
    if args.numeric_check and chain.steps:
        checked = []
        for idx, step in enumerate(chain.steps):
            try:
                v = reduction.numeric_step_check(
                    step, args.n, trials=args.trials, seed=args.seed, point_guard=args.point_guard
                )
            except analysis.EnumerationGuardExceeded:
                continue
            checked.append({"step": idx, "violation": v})
        if checked:
            violation = max(c["violation"] for c in checked)
            report["numeric_checks"] = checked
            report["numeric_max_violation"] = violation
    _emit(report, args)
    if chain.truncated:
        return 1
    if violation is not None and violation > args.tol:
        return 1
    return 0


def cmd_gvn(args) -> int:
    system = systems.load_system(args.system)
    if args.at_origin:
        origin = (1,) + (0,) * (system.d - 1)
        try:
            i = system.forms.index(origin)
        except ValueError:
            print("no form equals (1, 0, ..., 0); cannot use --at-origin", file=sys.stderr)
            return 2
    elif args.at is not None:
        i = args.at
    else:
        print("one of --at / --at-origin is required", file=sys.stderr)
        return 2
    tables = None
    if args.family == "counterexample":
        if args.phi_k is None or args.phi_m is None:
            print("--family counterexample needs --phi-k and --phi-M", file=sys.stderr)
            return 2
        w = tuple(int(x) for x in args.w.split(",")) if args.w else None
        tables = phi_km.counterexample_family(int(system.p), args.phi_k, args.phi_m, w, args.ell_family)
    report_obj = analysis.gvn_check(
        system,
        i,
        args.k,
        args.ell,
        args.n,
        family=args.family,
        trials=args.trials,
        seed=args.seed,
        tables=tables,
        tol=args.tol,
        point_guard=args.point_guard,
    )
    report = {
        "config": _config(
            args,
            system=args.system,
            i=i,
            k=args.k,
            ell=args.ell,
            n=args.n,
            family=args.family,
            trials=args.trials,
            seed=args.seed,
            tolerance=args.tol,
            point_guard=args.point_guard,
        ),
        "report": report_obj.to_json(),
    }
    _emit(report, args)
    return 0 if report_obj.passed else 1


def cmd_phikm(args) -> int:
    system = phi_km.phi_system(args.p, args.k, args.m)
    points = phi_km.s_km_points(args.p, args.k, args.m)
    report = {
        "config": _config(args, p=args.p, k=args.k, M=args.m, witness=args.witness, verify=args.verify),
        "p": args.p,
        "forms": system.r,
        "points": [list(z) for z in points],
        "system": system.to_json(),
    }
    exit_code = 0
    if args.system_out:
        with open(args.system_out, "w", encoding="utf-8") as fh:
            json.dump(system.to_json(), fh)
        report["system_written"] = args.system_out
    if args.witness:
        at = tuple(int(x) for x in args.at.split(",")) if args.at else None
        sequence, covers = phi_km.phi_witness(args.p, args.k, args.m)
        cert = phi_km.phi_witness_certificate(args.p, args.k, args.m, at)
        report["witness"] = {
            "length": cert.length,
            "sequence_points": [list(z) for z in sequence[: cert.length]],
            "certificate": cert.to_json(),
            "geometric_covers": [
                [s.to_json() for s in cover] for cover in covers[: cert.length]
            ],
        }
        if args.cert_out:
            with open(args.cert_out, "w", encoding="utf-8") as fh:
                json.dump(cert.to_json(), fh)
            report["certificate_written"] = args.cert_out
        if args.verify:
            verdict = complexity.verify_witness(system, cert)
            report["witness"]["verified"] = verdict.passed
            if not verdict.passed:
                report["witness"]["failures"] = verdict.failures
                exit_code = 1
    _emit(report, args)
    return exit_code


def cmd_cover(args) -> int:
    if args.phikm_origin:
        if args.p is None or args.k is None or args.m is None:
            print("--phikm-origin needs --p, --k, --M", file=sys.stderr)
            return 2
        p, m = args.p, args.m
        origin = (0,) * m
        points = [z for z in phi_km.s_km_points(args.p, args.k, args.m) if z != origin]
        excluded = [origin]
    elif args.points:
        with open(args.points, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        p, m = raw["p"], raw["M"]
        points = [tuple(t) for t in raw["points"]]
        excluded = [tuple(t) for t in raw.get("excluded", [])]
    else:
        print("give a point-set file or --phikm-origin", file=sys.stderr)
        return 2
    mode = "hyperplanes-only" if args.hyperplanes_only else "affine-spans"
    try:
        result = covering.min_cover_excluding(
            p, m, points, excluded, mode=mode, max_count=args.max_count, node_guard=args.node_guard
        )
    except SearchGuardExceeded as exc:
        print(f"search guard exceeded: {exc}", file=sys.stderr)
        return 2
    report = {
        "config": _config(
            args,
            points=args.points,
            phikm_origin=args.phikm_origin,
            p=args.p,
            k=args.k,
            M=args.m,
            mode=mode,
            max_count=args.max_count,
            node_guard=args.node_guard,
        ),
    }
    if result is None:
        report["feasible"] = False
        _emit(report, args)
        return 1
    count, cover = result
    verdict = covering.verify_cover(cover)
    report.update({"feasible": True, "minimum": count, "cover": cover.to_json(), "verified": verdict["passed"]})
    _emit(report, args)
    return 0


def cmd_gowers(args) -> int:
    with open(args.function, "r", encoding="utf-8") as fh:
        table = analysis.FunctionTable.from_json(json.load(fh))
    value = analysis.gowers_norm(table, args.k, args.point_guard)
    report = {
        "config": _config(args, function=args.function, k=args.k, point_guard=args.point_guard),
        "norm": value,
    }
    if args.direct:
        report["direct"] = analysis.gowers_norm_direct(table, args.k, args.point_guard)
        report["difference"] = abs(report["direct"] - value)
    _emit(report, args)
    return 0


def _add_common(sub):
    sub.add_argument("--output", choices=("json", "table"), default="json")
    sub.add_argument("--out", help="write the report to this path instead of stdout")
    sub.add_argument("--node-guard", type=int, default=10**8)
    sub.add_argument("--point-guard", type=int, default=DEFAULT_POINT_GUARD)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqcs", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("analyze", help="validate a system and report its complexity data")
    sp.add_argument("system")
    sp.add_argument("--k-max", type=int, default=6)
    _add_common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = subs.add_parser("witness", help="search witness sequences with covers")
    sp.add_argument("system")
    sp.add_argument("--at", type=int, default=None, help="target form index (default: all)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--max-len", type=int, default=4)
    _add_common(sp)
    sp.set_defaults(func=cmd_witness)

    sp = subs.add_parser("verify", help="re-check a witness certificate against a system")
    sp.add_argument("certificate")
    sp.add_argument("system")
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = subs.add_parser("reduce", help="build the full reduction chain from a witness")
    sp.add_argument("system")
    sp.add_argument("--witness", required=True)
    sp.add_argument("--max-forms", type=int, default=DEFAULT_MAX_FORMS)
    sp.add_argument("--numeric-check", action="store_true")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=TOL_INEQUALITY)
    _add_common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = subs.add_parser("gvn", help="check the norm inequality on random or fixed tuples")
    sp.add_argument("--system", required=True)
    sp.add_argument("--at", type=int, default=None)
    sp.add_argument("--at-origin", action="store_true")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument(
        "--family",
        default="random",
        choices=(
            "random",
            "phases",
            "disk",
            "signs",
            "sparse",
            "character",
            "quadratic-phase",
            "counterexample",
        ),
    )
    sp.add_argument("--phi-k", type=int, default=None)
    sp.add_argument("--phi-M", dest="phi_m", type=int, default=None)
    sp.add_argument("--w", default=None, help="comma-separated weight for the counterexample family")
    sp.add_argument("--ell-family", type=int, default=1, help="tensor level of the counterexample family")
    sp.add_argument("--tol", type=float, default=TOL_INEQUALITY)
    _add_common(sp)
    sp.set_defaults(func=cmd_gvn)

    sp = subs.add_parser("phikm", help="emit progression systems, witnesses and covers")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--M", dest="m", type=int, required=True)
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--at", default=None, help="comma-separated point to end the witness at")
    sp.add_argument("--system-out", default=None)
    sp.add_argument("--cert-out", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_phikm)

    sp = subs.add_parser("cover", help="minimum affine covers excluding points")
    sp.add_argument("points", nargs="?", default=None)
    sp.add_argument("--phikm-origin", action="store_true")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--M", dest="m", type=int, default=None)
    sp.add_argument("--hyperplanes-only", action="store_true")
    sp.add_argument("--max-count", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_cover)

    sp = subs.add_parser("gowers", help="uniformity norm of a function table")
    sp.add_argument("function")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--direct", action="store_true", help="also run the direct-definition oracle")
    _add_common(sp)
    sp.set_defaults(func=cmd_gowers)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (systems.SystemValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, analysis.EnumerationGuardExceeded, SearchGuardExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
