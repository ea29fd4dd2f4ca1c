"""Command-line front end.

Exit codes: 0 success, 2 infeasible, 3 unbounded, 4 verification failure,
5 any other error (bad input, iteration limit, ...).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .core import (
    CP,
    HAUSDORFF,
    MOCP,
    SHIFT,
    ConvprojError,
    Infeasible,
    SolutionSet,
    Unbounded,
    format_p,
    kappa_over,
    kappa_under,
    parse_p,
    q_opnorm,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_VERIFY = 4
EXIT_ERROR = 5

log = logging.getLogger("convproj")


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load_solution(path) -> SolutionSet:
    with open(path) as fh:
        return SolutionSet.from_dict(json.load(fh))


def _load_cp(path):
    from .problemfile import load

    pf = load(path)
    if pf.kind != "cp":
        raise ConvprojError(f"{path}: expected a cp problem file")
    return pf


def _resolve(args, pf):
    p = parse_p(args.p) if args.p is not None else pf.p
    eps = args.eps if args.eps is not None else pf.epsilon
    if eps is None:
        raise ConvprojError("no tolerance given (use --eps or options.epsilon)")
    return float(eps), p


def _export_polytope(points, out, stem):
    """Inner polytope of the y-images: JSON always, OFF in 2-D and 3-D."""
    from .geometry import Polyhedron, export_json, export_off

    pts = np.atleast_2d(points)
    poly = Polyhedron.from_vrep(pts)
    export_json(poly, os.path.join(out, f"{stem}.json"))
    if pts.shape[1] in (2, 3):
        export_off(poly.vertices, os.path.join(out, f"{stem}.off"))
    return poly


def cmd_solve_cp(args) -> int:
    from .benson import solve_mocp
    from .reductions import translate_mocp_to_cp_solution
    from .verify import verify_cp_solution

    pf = _load_cp(args.file)
    spec = pf.spec
    eps, p = _resolve(args, pf)
    # solve the lift at eps / kappa_bar so the translated tolerance is eps
    res = solve_mocp(spec, eps / kappa_over(spec.m, p), p, max_iter=args.max_iter, verbose=args.verbose)
    sol = translate_mocp_to_cp_solution(res.solution)
    cert = verify_cp_solution(spec, sol, n_directions=args.grid, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write_json(sol.to_dict(), os.path.join(args.out, "solution.json"))
    _write_json(cert.to_dict(), os.path.join(args.out, "certificate.json"))
    poly = _export_polytope(sol.images, args.out, "polytope")
    print(f"solved: {len(sol)} points, {len(poly.vertices)} polytope vertices, eps={sol.epsilon:.6g}, "
          f"p={format_p(p)}, iterations={res.iterations}, scalarizations={res.scalarizations}")
    print(f"certificate: {'pass' if cert.passed else 'FAIL'} (max gap {cert.max_gap:.3e})")
    return EXIT_OK if cert.passed else EXIT_VERIFY


def cmd_solve_mocp(args) -> int:
    from .benson import solve_mocp
    from .geometry import export_json
    from .verify import verify_mocp_solution

    pf = _load_cp(args.file)
    spec = pf.spec
    eps, p = _resolve(args, pf)
    res = solve_mocp(spec, eps, p, max_iter=args.max_iter, verbose=args.verbose)
    cert = verify_mocp_solution(spec, res.solution, n_directions=args.grid)
    os.makedirs(args.out, exist_ok=True)
    _write_json(res.solution.to_dict(), os.path.join(args.out, "solution.json"))
    _write_json(cert.to_dict(), os.path.join(args.out, "certificate.json"))
    export_json(res.outer, os.path.join(args.out, "outer.json"))
    _write_json({"vertices": res.inner_vertices.tolist(), "rays": np.eye(spec.m + 1).tolist()},
                os.path.join(args.out, "inner.json"))
    print(f"solved: {len(res.solution)} points, achieved eps={res.achieved_eps:.6g} <= {eps:.6g}, "
          f"iterations={res.iterations}")
    print(f"certificate: {'pass' if cert.passed else 'FAIL'} (max gap {cert.max_gap:.3e})")
    return EXIT_OK if cert.passed else EXIT_VERIFY


def cmd_reduce(args) -> int:
    from .problemfile import cp_to_dict, load
    from .reductions import cp_to_mocp, cvop_to_cp

    pf = load(args.file)
    if args.to == "cp":
        if pf.kind != "cvop":
            raise ConvprojError("--to cp expects a cvop problem file")
        out = cp_to_dict(cvop_to_cp(pf.spec), pf.options)
    else:
        if pf.kind == "cvop":
            spec = cvop_to_cp(pf.spec)
        else:
            spec = pf.spec
        spec, lift = cp_to_mocp(spec)
        out = {"kind": "mocp", "feasible_set": cp_to_dict(spec, pf.options),
               "objective_matrix": lift.P.tolist(), "Q": lift.Q.tolist(),
               "ordering_cone": "nonnegative orthant", "dimension": spec.m + 1}
    _emit(out, args.out)
    return EXIT_OK


def _emit(obj, out):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_translate(args) -> int:
    from .reductions import (
        CP_TO_MOCP,
        MOCP_TO_CP,
        flavor_convert,
        translate_cp_to_mocp_solution,
        translate_hausdorff,
        translate_mocp_to_cp_solution,
    )

    sol = _load_solution(args.solution)
    if args.flavor == HAUSDORFF:
        if sol.flavor != HAUSDORFF:
            sol = flavor_convert(sol, HAUSDORFF)
        out = translate_hausdorff(sol, args.direction)
    else:
        if sol.flavor != SHIFT:
            sol = flavor_convert(sol, SHIFT)
        if args.direction == CP_TO_MOCP:
            out = translate_cp_to_mocp_solution(sol)
        elif args.direction == MOCP_TO_CP:
            out = translate_mocp_to_cp_solution(sol)
        else:
            raise ConvprojError(f"unknown direction {args.direction}")
    print(f"epsilon {sol.epsilon:.6g} -> {out.epsilon:.6g} ({sol.kind} -> {out.kind}, {out.flavor})",
          file=sys.stderr)
    _emit(out.to_dict(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_cp_solution, verify_mocp_solution

    pf = _load_cp(args.file)
    sol = _load_solution(args.solution)
    if sol.kind == CP:
        cert = verify_cp_solution(pf.spec, sol, n_directions=args.grid, seed=args.seed)
    elif sol.kind == MOCP:
        cert = verify_mocp_solution(pf.spec, sol, n_directions=args.grid)
    else:
        raise ConvprojError("only CP and MOCP solutions can be verified against a problem file")
    print(f"{'pass' if cert.passed else 'FAIL'}: {sol.kind} {sol.flavor} eps={sol.epsilon:.6g} "
          f"p={format_p(sol.p)} max gap {cert.max_gap:.3e} over {len(cert.gaps)} directions")
    if args.out:
        _write_json(cert.to_dict(), args.out)
    return EXIT_OK if cert.passed else EXIT_VERIFY


def multiplier_row(m: int, p: float) -> str:
    return (f"\u03ba={kappa_under(m, p):.6f}, \u03ba\u0304={kappa_over(m, p):.6f}, "
            f"\u2016Q\u2016={q_opnorm(m, p):.6f}")


def multiplier_table(ms, ps) -> str:
    lines = [f"{'p':>4} {'m':>3} {'kappa':>10} {'kappa_bar':>10} {'Q_norm':>10}"]
    for p in ps:
        for m in ms:
            lines.append(f"{format_p(p):>4} {m:>3} {kappa_under(m, p):10.6f} "
                         f"{kappa_over(m, p):10.6f} {q_opnorm(m, p):10.6f}")
    return "\n".join(lines)


def cmd_multipliers(args) -> int:
    if args.m is not None and args.p is not None:
        print(multiplier_row(args.m, parse_p(args.p)))
        return EXIT_OK
    ms = [args.m] if args.m is not None else range(1, 9)
    ps = [parse_p(args.p)] if args.p is not None else [1.0, 2.0, math.inf]
    print(multiplier_table(ms, ps))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convproj", description="Approximate convex projections via multi-objective lifts.")
    ap.add_argument("--verbose", action="store_true", help="log solver iterations to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, eps=True):
        if eps:
            sp.add_argument("--eps", type=float, default=None)
        sp.add_argument("--p", default=None, help="norm index: 1, 2, inf or any real >= 1")
        sp.add_argument("--grid", type=int, default=2000, help="number of verification directions")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)

    sp = sub.add_parser("solve-cp", help="approximate Y = proj_y S")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--out", default="out")
    sp.add_argument("--max-iter", type=int, default=100)
    sp.set_defaults(func=cmd_solve_cp)

    sp = sub.add_parser("solve-mocp", help="approximate the upper image of the lifted problem")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--out", default="out")
    sp.add_argument("--max-iter", type=int, default=100)
    sp.set_defaults(func=cmd_solve_mocp)

    sp = sub.add_parser("reduce", help="write the lifted or associated problem")
    sp.add_argument("file")
    sp.add_argument("--to", choices=("mocp", "cp"), required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("translate", help="translate a solution between the projection and its lift")
    sp.add_argument("solution")
    sp.add_argument("--direction", choices=("cp-to-mocp", "mocp-to-cp"), required=True)
    sp.add_argument("--flavor", choices=(SHIFT, HAUSDORFF), default=SHIFT)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("verify", help="check a solution against a problem file")
    sp.add_argument("file")
    sp.add_argument("solution")
    common(sp, eps=False)
    sp.add_argument("--out", default=None, help="write the certificate JSON here")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("multipliers", help="print tolerance multipliers")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--p", default=None)
    sp.set_defaults(func=cmd_multipliers)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if not hasattr(args, "verbose"):
        args.verbose = False
    try:
        return args.func(args)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Unbounded as exc:
        print(f"unbounded: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except (ConvprojError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
