"""Command-line entry point: ``torusclosure <verb> [options]``."""

import argparse
import shlex
import sys
import time

from . import density, scenarios
from . import torus as tor
from .arith import DEFAULT_PREC, MAX_PREC
from .errors import ConsistencyError, ParseError, PrecisionExhausted, TorusClosureError
from .parsing import parse_element, parse_field, parse_rational_matrix, parse_units
from .relations import DEFAULT_HEIGHT
from .report import UNKNOWN_VERDICTS, Report, render_json, render_text, to_jsonable
from .units import verify_units

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_INTERNAL = 0, 1, 2, 3

VERBS = ("closure", "zariski", "density", "embed", "conjecture2", "scenario", "fourexp")


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; route usage errors through the input-error path instead
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--prec-bits", type=int, default=DEFAULT_PREC)
    p.add_argument("--max-prec-bits", type=int, default=MAX_PREC)
    p.add_argument("--height-bound", type=int, default=DEFAULT_HEIGHT)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--units", default=None, help="user-supplied units 'e1;e2;...' (verified)")
    p.add_argument("--seed", type=int, default=None, help="reserved; every pipeline is deterministic")
    return p


def build_parser():
    common = _common()
    top = _Parser(prog="torusclosure", description="Euclidean and Zariski closures in arithmetic tori.")
    top.add_argument("--batch", default=None, help="file with one command per line ('#' comments)")
    sub = top.add_subparsers(dest="verb", parser_class=_Parser)

    def field_args(p, elements=True):
        p.add_argument("--field", action="append", default=[],
                       help="defining polynomial in x; repeat for a product of tori")
        if elements:
            p.add_argument("--element", action="append", default=[],
                           help="element in a; for products separate coordinates with ','")

    for verb in ("closure", "density"):
        p = sub.add_parser(verb, parents=[common])
        field_args(p)
        p.add_argument("--lattice", default=None, help="split case: rows of rationals 'a,b;c,d'")
    p = sub.add_parser("zariski", parents=[common])
    field_args(p)
    p.add_argument("--torus", choices=("restriction", "norm-one"), default="restriction")
    p.add_argument("--mode", choices=("arithmetic", "algebraic"), default="arithmetic")
    p = sub.add_parser("embed", parents=[common])
    field_args(p, elements=False)
    p.add_argument("--torus", choices=("norm-one", "restriction", "split"), default="norm-one")
    p = sub.add_parser("conjecture2", parents=[common])
    field_args(p)
    p = sub.add_parser("scenario", parents=[common])
    p.add_argument("name", choices=("counterexample", "example2", "fourexp"))
    field_args(p)
    p.add_argument("--matrix", default=None)
    p = sub.add_parser("fourexp", parents=[common])
    p.add_argument("--matrix", required=True, help="positive rationals 'a,b;c,d' standing for their logs")
    return top


# helpers -----------------------------------------------------------------------


def _fields(args, need=True):
    if not args.field and need:
        raise ParseError("--field is required")
    return [parse_field(f) for f in args.field]


def _elements(args, fields):
    if not args.element:
        raise ParseError("--element is required")
    out = []
    for spec in args.element:
        parts = spec.split(",")
        if len(parts) != len(fields):
            raise ParseError(f"element {spec!r} has {len(parts)} coordinates, expected {len(fields)}")
        out.append(tuple(parse_element(s, K) for s, K in zip(parts, fields)))
    return out


def _units(args, fields):
    if args.units is None:
        return None
    if len(fields) != 1:
        raise ParseError("--units needs exactly one --field")
    K = fields[0]
    return verify_units(K, parse_units(args.units, K), args.prec_bits)


def _torus(fields, kind):
    make = tor.norm_one_torus if kind == "norm-one" else tor.restriction_torus
    tori = [make(K) for K in fields]
    return tori[0] if len(tori) == 1 else tor.product(tori)


def _opts(args):
    return (args.height_bound, args.prec_bits, args.max_prec_bits)


def _closure_results(rep, cl):
    rep.results.update({
        "n": cl.n,
        "dim": cl.dim,
        "kernelCharacters": [list(k) for k in cl.kernel_chars],
        "coordinates": cl.coordinates,
        "latticeMaximality": cl.maximality,
        "exactIdentities": [list(e) for e in cl.exact_identities],
    })
    rep.verdict("closureDim", cl.dim, cl.status)
    rep.verdict("dense", cl.dense, cl.status)


# verbs -------------------------------------------------------------------------


def cmd_closure(args, rep):
    H, prec, max_prec = _opts(args)
    if args.lattice is not None:
        rows = parse_rational_matrix(args.lattice)
        L = density.LogLattice(density.split_space(len(rows)), rows, "Proven")
        points = [tuple(parse_rational_matrix(e)[0]) for e in args.element]
        if not points:
            raise ParseError("--element is required")
        cl = density.closure(L, points, H, prec, max_prec)
        _closure_results(rep, cl)
        alg = density.closure_is_algebraic(cl, "split", H, prec, max_prec)
        rep.results["algebraicity"] = alg.to_dict()
        rep.verdict("algebraicity", alg.kind, alg.status)
        return
    fields = _fields(args)
    S = _torus(fields, "norm-one")
    U = _units(args, fields)
    L = density.torus_unit_lattice(S, U)
    points = _elements(args, fields)
    cl = density.closure(L, points, H, prec, max_prec)
    rep.results["torus"] = S.describe()
    rep.results["unitLatticeSign"] = L.gram_sign
    _closure_results(rep, cl)


def cmd_zariski(args, rep):
    H, prec, max_prec = _opts(args)
    fields = _fields(args)
    S = _torus(fields, args.torus)
    zc = tor.zariski_closure(S, _elements(args, fields), H, prec, max_prec, _units(args, fields), args.mode)
    rep.results.update({
        "torus": S.describe(),
        "mode": args.mode,
        "ambientDim": S.rank,
        "dim": zc.dim,
        "characters": [list(c) for c in zc.xf.basis],
        "subtorusCharacters": [list(c) for c in zc.subtorus.chars],
        "completeness": zc.completeness,
    })
    rep.verdict("zariskiDim", zc.dim, zc.status)


def cmd_embed(args, rep):
    fields = _fields(args, need=args.torus != "split")
    if args.torus == "split":
        T = tor.split_torus()
    else:
        T = _torus(fields, args.torus)
    emb = tor.embed_in_norm_one_product(T)
    rep.results.update({
        "torus": T.describe(),
        "fields": [[str(c) for c in K.poly] if K is not None else None for K in emb.fields],
        "charMap": [list(r) for r in emb.char_map],
        "generators": [list(g) for g in emb.generators],
        "orbitSizes": [len(o) for o in emb.orbits],
    })
    rep.verdict("surjective", emb.surjective, "VerifiedExact")
    rep.verdict("equivariant", emb.equivariant, "VerifiedExact")


def cmd_conjecture2(args, rep):
    H, prec, max_prec = _opts(args)
    fields = _fields(args)
    S = _torus(fields, "norm-one")
    res = density.conjecture2_test(S, _elements(args, fields), _units(args, fields), H, prec, max_prec)
    rep.results.update({
        "torus": S.describe(),
        "euclideanDim": res.euclidean_dim,
        "zariskiDim": res.zariski_dim,
        "kernelCharacters": [list(k) for k in res.closure.kernel_chars],
        "algebraicity": res.algebraic.to_dict() if res.algebraic else None,
    })
    rep.verdict("conjecture2", res.verdict, res.closure.status)
    rep.verdict("euclideanDim", res.euclidean_dim, res.closure.status)
    rep.verdict("zariskiDim", res.zariski_dim, res.zariski.status)


def _scenario_into(rep, sc):
    rep.results["scenario"] = sc.name
    rep.results["inputs"] = sc.inputs
    rep.results["steps"] = [
        {"operation": s.operation, "verdict": to_jsonable(s.verdict), "certification": s.certification,
         "data": to_jsonable(s.data)} for s in sc.steps]
    rep.results["conclusion"] = sc.conclusion
    for k, v in sc.conclusion.items():
        rep.verdict(k, v)


def cmd_scenario(args, rep):
    H, prec, max_prec = _opts(args)
    if args.name == "counterexample":
        sc = scenarios.run_counterexample(H, prec, max_prec)
    elif args.name == "example2":
        K = parse_field(args.field[0]) if args.field else None
        x = None
        if args.element:
            if K is None:
                raise ParseError("--element needs --field")
            x = parse_element(args.element[0], K)
        units = _units(args, [K]) if K is not None else None
        sc = scenarios.run_example2(K, x, H, prec, max_prec, units)
    else:
        if args.matrix is None:
            raise ParseError("scenario fourexp needs --matrix")
        sc = scenarios.four_exp_matrix_check(parse_rational_matrix(args.matrix), H, prec, max_prec)
    _scenario_into(rep, sc)


def cmd_fourexp(args, rep):
    H, prec, max_prec = _opts(args)
    sc = scenarios.four_exp_matrix_check(parse_rational_matrix(args.matrix), H, prec, max_prec)
    _scenario_into(rep, sc)


COMMANDS = {"closure": cmd_closure, "density": cmd_closure, "zariski": cmd_zariski, "embed": cmd_embed,
            "conjecture2": cmd_conjecture2, "scenario": cmd_scenario, "fourexp": cmd_fourexp}


# driver ------------------------------------------------------------------------


def _error(exc):
    d = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError) and exc.position is not None:
        d["position"] = exc.position
        d["token"] = exc.token
    return d


def execute(argv):
    """Run one command; returns (Report, rendered output)."""
    argv = list(argv)
    t0 = time.perf_counter()
    rep = Report(argv[0] if argv and argv[0] in VERBS else "", argv, {})
    fmt = "json" if "json" in argv and "--format" in argv else "text"
    try:
        args = build_parser().parse_args(argv)
        if args.verb is None:
            raise ParseError("missing command; expected one of " + ", ".join(VERBS))
        fmt = args.format
        rep.options = {k: v for k, v in sorted(vars(args).items()) if k not in ("verb", "batch")}
        COMMANDS[args.verb](args, rep)
        unknown = any(isinstance(v, str) and v in UNKNOWN_VERDICTS for v in rep.verdicts.values())
        rep.exit_code = EXIT_UNKNOWN if unknown else EXIT_OK
    except PrecisionExhausted as exc:
        rep.error = _error(exc)
        rep.exit_code = EXIT_UNKNOWN
    except SystemExit as exc:
        # argparse already printed help for a sub-command
        rep.exit_code = EXIT_OK if not exc.code else EXIT_INPUT
    except ConsistencyError as exc:
        rep.error = _error(exc)
        rep.exit_code = EXIT_INTERNAL
    except TorusClosureError as exc:
        rep.error = _error(exc)
        rep.exit_code = EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort exit code 3
        rep.error = _error(exc)
        rep.exit_code = EXIT_INTERNAL
    rep.timings = {"totalSeconds": round(time.perf_counter() - t0, 6)}
    out = render_json(rep) if fmt == "json" else render_text(rep)
    return rep, out


def _batch_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                yield shlex.split(line)


def run(argv=None, stdout=None, stderr=None):
    """Execute argv (without the program name) and return the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if argv[:1] == ["--batch"] or any(a.startswith("--batch") for a in argv[:1]):
        path = argv[1] if argv[0] == "--batch" else argv[0].split("=", 1)[1]
        try:
            lines = list(_batch_lines(path))
        except OSError as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_INPUT
        worst = EXIT_OK
        for line in lines:
            rep, out = execute(line + argv[2:])
            print(out, file=stdout)
            if rep.error:
                print(f"{rep.error['type']}: {rep.error['message']}", file=stderr)
            worst = max(worst, rep.exit_code)
        return worst
    if "-h" in argv or "--help" in argv:
        # help only, no report
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if not exc.code else EXIT_INPUT
    rep, out = execute(argv)
    print(out, file=stdout)
    if rep.error:
        print(f"{rep.error['type']}: {rep.error['message']}", file=stderr)
    return rep.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
