"""Command-line interface: every capability as a subcommand.

Data goes to stdout (or --output); progress for long computations goes to
stderr so pipes stay clean.  Exit codes: 0 success, 1 verification failure,
2 usage error.  Counts beyond 2^53 are serialized as decimal strings in JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import asymptotics, cover, regions, search, spectrum
from .cnf import Composition, compose, to_dimacs
from .core import OrbitKey, enumerate_orbits, orbit_size


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _progress(done: int, total: int):
    print(f"  ... {done}/{total} orbits", file=sys.stderr)


def _key_from(args, n: int) -> OrbitKey:
    return OrbitKey(args.p, args.q, args.r, n)


def _composition_from(args) -> Composition:
    return Composition(
        matching=args.matching,
        two_imp=args.twoimp,
        nand=args.nand,
        id2=args.id2,
        id1=args.id1,
        id0=args.id0,
    )


def _add_composition_flags(p: argparse.ArgumentParser):
    p.add_argument("--matching", type=int, default=0)
    p.add_argument("--twoimp", type=int, default=0)
    p.add_argument("--nand", type=int, default=0)
    p.add_argument("--id2", type=int, default=0)
    p.add_argument("--id1", type=int, default=0)
    p.add_argument("--id0", type=int, default=0)


def _add_orbit_flags(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)


def cmd_orbits(args) -> int:
    keys = enumerate_orbits(args.n)
    rows = [(k.p, k.q, k.r, orbit_size(k)) for k in keys]
    total = sum(r[3] for r in rows)
    if args.format == "json":
        _emit(
            json.dumps(
                {
                    "n": args.n,
                    "count": len(rows),
                    "total_size": str(total),
                    "orbits": [
                        {"p": p, "q": q, "r": r, "size": str(s)} for p, q, r, s in rows
                    ],
                }
            ),
            args.output,
        )
    elif args.format == "csv":
        lines = ["p,q,r,size"] + [f"{p},{q},{r},{s}" for p, q, r, s in rows]
        _emit("\n".join(lines), args.output)
    else:
        lines = [f"({p},{q},{r})  size={s}" for p, q, r, s in rows]
        lines.append(f"{len(rows)} orbits, total {total} = 4^{args.n}")
        _emit("\n".join(lines), args.output)
    return 0


def cmd_spectrum(args) -> int:
    comp = _composition_from(args)
    if args.coeff:
        p, q, r = (int(t) for t in args.coeff.split(","))
        key = OrbitKey(p, q, r, comp.n_coords)
        value = spectrum.coeff_fast(comp, key)
        if args.format == "json":
            _emit(json.dumps({"composition": str(comp), "key": [p, q, r], "coeff": str(value)}), args.output)
        else:
            _emit(f"[{comp}] coefficient at (p,q,r)=({p},{q},{r}): {value}", args.output)
        return 0
    spec = spectrum.composition_spectrum(comp)
    if args.format == "json":
        _emit(spec.to_json(), args.output)
    else:
        lines = [f"degree {spec.degree}, {len(spec.terms)} terms"]
        for key in spec.keys():
            lines.append(f"  ({key.p},{key.q},{key.r}) -> {spec.coeff(key)}")
        _emit("\n".join(lines), args.output)
    return 0


def cmd_classify(args) -> int:
    key = _key_from(args, args.n)
    rids = sorted(regions.classify(key))
    if args.format == "json":
        _emit(json.dumps({"key": key.triple(), "n": args.n, "regions": rids}), args.output)
    else:
        _emit(f"orbit {key.triple()} of n={args.n}: regions {rids}", args.output)
    return 0


def cmd_construct(args) -> int:
    key = _key_from(args, args.n)
    rep = regions.construct_best(key)
    if args.format == "json":
        _emit(json.dumps(rep.to_dict()), args.output)
    else:
        ratio = f"2^{key.n * rep.exponent:.2f}" if rep.ratio is not None else "inf"
        _emit(
            f"orbit {key.triple()}  region={rep.region}  composition={rep.composition}\n"
            f"captured={rep.captured}  orbit_size={rep.orbit_size}\n"
            f"ratio~{ratio}  exponent={rep.exponent:.6f}",
            args.output,
        )
    return 0


def cmd_certify(args) -> int:
    result = regions.certify(
        args.n,
        policy=args.policy,
        per_region=args.per_region,
        seed=args.seed,
        progress=_progress if args.verbose else None,
    )
    if args.format == "json":
        _emit(result.to_json(), args.output)
    elif args.format == "csv":
        _emit(result.to_csv(), args.output)
    else:
        _emit(
            f"n={args.n}: {len(result.reports)} orbits certified; "
            f"max exponent {result.max_exponent:.6f} vs budget {result.budget:.6f} "
            f"-> {'OK' if result.ok else 'FAIL'}",
            args.output,
        )
    return 0 if result.ok else 1


def cmd_search_blocks(args) -> int:
    entries = search.pareto_blocks(args.coords, args.parity)
    if args.format == "json":
        payload = [
            {"spectrum": json.loads(e.spectrum.to_json()), "dimacs": to_dimacs(e.witness)}
            for e in entries
        ]
        _emit(json.dumps(payload), args.output)
    else:
        lines = [f"{len(entries)} non-dominated blocks over {args.coords} coordinate(s), parity {args.parity}:"]
        for e in entries:
            terms = ", ".join(
                f"({k.p},{k.q},{k.r}):{e.spectrum.coeff(k)}" for k in e.spectrum.keys()
            )
            lines.append(f"  spectrum {terms}")
        _emit("\n".join(lines), args.output)
    return 0


def cmd_search_compose(args) -> int:
    print(f"composition search at n={args.n} ...", file=sys.stderr)
    parity = None if args.parity < 0 else args.parity
    result = search.compose_search(args.n, parity=parity, cap=args.cap)
    if args.format == "json":
        _emit(
            json.dumps(
                {
                    "n": result.n,
                    "c": result.c,
                    "hardest": result.hardest.triple() if result.hardest else None,
                }
            ),
            args.output,
        )
    elif args.format == "csv":
        _emit(result.to_csv(), args.output)
    else:
        _emit(result.summary(), args.output)
    return 0


def cmd_optimize(args) -> int:
    result = asymptotics.maximize_min_T(args.region, args.grid_step, args.refine_iters)
    if args.format == "json":
        _emit(json.dumps(result.to_dict()), args.output)
    else:
        _emit(
            f"region {result.region}: observed max {result.observed_max:.6f} at "
            f"(p_hat, r_hat) = ({result.argmax[0]:.4f}, {result.argmax[1]:.4f}); "
            f"reference bound {result.reference_bound}",
            args.output,
        )
    return 0 if result.observed_max <= result.reference_bound else 1


def cmd_estimate_saddle(args) -> int:
    key = _key_from(args, args.n)
    comp = _composition_from(args)
    family = {
        (True, True): "matching_twoimp_nand",
        (False, True): "twoimp_nand",
        (True, False): "matching_nand",
    }.get((comp.matching > 0, comp.two_imp > 0))
    if family is None:
        print("error: need at least one of --matching/--twoimp", file=sys.stderr)
        return 2
    sp = asymptotics.critical_point(
        family, comp.matching, comp.two_imp, comp.nand, key.p, key.q, key.r
    )
    est = asymptotics.saddle_estimate(sp)
    payload = {
        "family": sp.family,
        "u0": sp.u0,
        "v0": sp.v0,
        "gradient_residual": sp.gradient_residual,
        "hessian_det": sp.hessian_det,
        "log2_estimate": est,
    }
    if args.exact:
        value = spectrum.coeff_fast(comp, key)
        exact_log2 = asymptotics.log2_int(value)
        payload["log2_exact"] = exact_log2
        payload["relative_error"] = abs(2.0 ** (est - exact_log2) - 1.0)
    if args.format == "json":
        _emit(json.dumps(payload), args.output)
    else:
        _emit("\n".join(f"{k}: {v}" for k, v in payload.items()), args.output)
    return 0


def cmd_cover(args) -> int:
    key = _key_from(args, args.n)
    rep = regions.construct_best(key) if args.strategy == "regions" else None
    if rep is None:
        from .search import compose_search

        result = compose_search(args.n)
        comp = next(ob.composition for ob in result.per_orbit if ob.key == key)
    else:
        comp = rep.composition
    report = cover.cover_orbit(compose(comp, args.n), key, seed=args.seed, base=comp)
    if args.format == "json":
        _emit(json.dumps(report.to_dict()), args.output)
    else:
        _emit(
            f"orbit {key.triple()} base [{comp}]: captured {report.captured}/{report.orbit_size}, "
            f"t={report.t_target}, rounds={report.rounds}, covered={report.covered}",
            args.output,
        )
    return 0 if report.covered else 1


def cmd_assemble(args) -> int:
    report = cover.assemble_circuit(args.n, strategy=args.strategy, seed=args.seed, verify=args.verify)
    if args.format == "json":
        payload = report.to_dict()
        if args.with_members:
            payload["circuit"] = json.loads(report.circuit.to_json())
        _emit(json.dumps(payload), args.output)
    else:
        lines = [f"n={args.n}: {report.circuit.size} member CNFs"]
        if args.verify:
            lines.append(
                f"verified {report.inputs_checked}/{1 << (2 * args.n)} inputs: "
                + ("OK" if report.verified else "MISMATCH")
            )
        _emit("\n".join(lines), args.output)
    if args.verify and not report.verified:
        return 1
    return 0


def cmd_export_dimacs(args) -> int:
    comp = _composition_from(args)
    _emit(to_dimacs(compose(comp)), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="orbitforge",
        description="Construct, verify and analyze depth-3 bottom-fan-in-2 circuits "
        "for the inner product function.",
    )
    ap.add_argument("--threads", type=int, default=None, help="worker hint (results never depend on it)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--output", default=None, help="write to file instead of stdout")
        p.add_argument("--seed", type=int, default=2024)
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("orbits", help="enumerate orbits and their sizes")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("spectrum", help="spectrum or single coefficient of a composition")
    _add_composition_flags(p)
    p.add_argument("--coeff", default=None, metavar="P,Q,R")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("classify", help="regions containing an orbit")
    _add_orbit_flags(p)
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct", help="best region construction for an orbit")
    _add_orbit_flags(p)
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("certify", help="exact ratio certificates per orbit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--policy", choices=("auto", "all", "stratified"), default="auto")
    p.add_argument("--per-region", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("search", help="block and composition searches")
    ssub = p.add_subparsers(dest="search_command", required=True)
    sp = ssub.add_parser("blocks", help="non-dominated building blocks")
    sp.add_argument("--coords", type=int, choices=(1, 2), required=True)
    sp.add_argument("--parity", type=int, choices=(0, 1), default=0)
    common(sp)
    sp.set_defaults(func=cmd_search_blocks)
    sp = ssub.add_parser("compose", help="per-orbit best compositions and c(n)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cap", type=int, default=200)
    sp.add_argument("--parity", type=int, choices=(-1, 0, 1), default=-1, help="-1 = both classes")
    common(sp)
    sp.set_defaults(func=cmd_search_compose)

    p = sub.add_parser("optimize", help="observed max of the bounded objectives")
    p.add_argument("--region", type=int, choices=(3, 4), required=True)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--refine-iters", type=int, default=40)
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("estimate", help="asymptotic estimates")
    esub = p.add_subparsers(dest="estimate_command", required=True)
    sp = esub.add_parser("saddle", help="saddle-point coefficient estimate")
    _add_orbit_flags(sp)
    _add_composition_flags(sp)
    sp.add_argument("--exact", action="store_true", help="also compute the exact coefficient")
    common(sp)
    sp.set_defaults(func=cmd_estimate_saddle)

    p = sub.add_parser("cover", help="randomized cover of one orbit")
    _add_orbit_flags(p)
    p.add_argument("--strategy", choices=("search", "regions"), default="search")
    common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("assemble", help="assemble and verify a full circuit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--strategy", choices=("search", "regions"), default="search")
    p.add_argument("--with-members", action="store_true")
    common(p)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("export", help="exports")
    xsub = p.add_subparsers(dest="export_command", required=True)
    sp = xsub.add_parser("dimacs", help="DIMACS CNF of a composition")
    _add_composition_flags(sp)
    common(sp)
    sp.set_defaults(func=cmd_export_dimacs)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads is None:
        args.threads = int(os.environ.get("ORBITFORGE_THREADS", "0")) or None
    try:
        return args.func(args)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1


if __name__ == "__main__":
    sys.exit(main())
