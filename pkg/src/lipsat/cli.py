"""Command-line interface: ``lipsat <command> [options]``.

Exit codes: 0 success, 1 ``--assert`` mismatch (or a failing suite),
2 input or precondition error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import GenModule, Ideal, augment, generic_rank, iter_minors, minor_ideal
from .closure import Curve, CurveFamily, closure_test_module, curve_pullback, ideal_membership
from .closure.engine import DEFAULT_JET_ORDER
from .closure.verdict import CurveObstruction, Verdict
from .double import FAMILIES, diagonal_ideal, double_module, double_vector, tilde_matrix
from .polycore import ParseError, Polynomial, VarRegistry, parse, parse_vector
from .saturation import LEMMAS, inclusion_lemma_check, prop417_check, sat1_test, sat2_test, sat3_test, sat_report
from .suite import PROPERTIES, SuiteConfig, run_suite

COMMANDS = {
    "double": "the doubled module M_D and vector h_D",
    "minors": "k x k minors of M and the ideal they generate",
    "rank": "generic rank of M",
    "diag": "generators of the diagonal ideal",
    "tilde": "the tilde matrix of M",
    "closure-test": "is h in the integral closure of M",
    "sat-test": "all three saturation tests, bracketed along the chain",
    "sat1": "doubled-module test (S1)",
    "sat2": "functional test (S2)",
    "sat3": "minors test (S3)",
    "prop417": "hypotheses of the sufficient condition for S3 = S1",
    "lemma-check": "certify one of the inclusion lemmas on M",
    "example": "the worked two-by-three example",
    "suite": "randomized property suite",
}

EXAMPLE_MATRIX = [["x", "0", "y"], ["y", "x", "0"]]
EXAMPLE_VECTOR = ["x", "3*y"]


class InputError(Exception):
    """Bad command-line input: unreadable file, malformed JSON, unparsable polynomial."""


# --------------------------------------------------------------------------------------
# files


def module_to_json(M: GenModule, vector=None) -> dict:
    reg = M.reg
    out = {"vars": list(reg.space_vars)}
    if reg.params:
        out["params"] = list(reg.params)
    out["matrix"] = [[str(x) for x in row] for row in M.rows()]
    if vector is not None:
        out["vector"] = [str(x) for x in vector]
    return out


def module_from_json(data: dict) -> tuple[GenModule, list[Polynomial] | None]:
    """Parse a ModuleFile object into a module and its optional vector."""
    if not isinstance(data, dict):
        raise InputError("module file must hold a JSON object")
    for key in ("vars", "matrix"):
        if key not in data:
            raise InputError(f"module file lacks {key!r}")
    names, rows = data["vars"], data["matrix"]
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise InputError("'vars' must be a list of names")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError("'matrix' must be a non-empty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"matrix is not rectangular: row lengths {[len(r) for r in rows]}")
    try:
        reg = VarRegistry(names, params=data.get("params", ()))
        M = GenModule.from_rows(reg, [[str(x) for x in r] for r in rows])
        vec = None
        if data.get("vector") is not None:
            vec = [parse(str(x), reg) for x in data["vector"]]
            if len(vec) != M.p:
                raise InputError(f"vector has length {len(vec)}, matrix has {M.p} rows")
    except (ParseError, ValueError) as e:
        raise InputError(str(e)) from e
    return M, vec


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def load_curves(path: str, reg: VarRegistry) -> list[Curve]:
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("curves", [data])
    if not isinstance(data, list) or not all(isinstance(c, dict) for c in data):
        raise InputError(f"{path} must hold a list of curve objects")
    curves = []
    for i, item in enumerate(data):
        try:
            curves.append(Curve.from_json(reg, item, item.get("label", f"file{i}")))
        except (ParseError, ValueError, AttributeError) as e:
            raise InputError(f"curve {i} in {path}: {e}") from e
    return curves


# --------------------------------------------------------------------------------------
# output


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    return str(v)


def emit(payload: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        head = f"# lipsat {payload['command']} seed={payload['seed']}"
        body = {k: v for k, v in payload.items() if k not in ("command", "seed")}
        out.write("\n".join([head] + _text(body)) + "\n")


# --------------------------------------------------------------------------------------
# commands


def _family(args, reg: VarRegistry) -> CurveFamily:
    extra = tuple(load_curves(args.curves, reg)) if args.curves else ()
    return CurveFamily(max_degree=args.curve_degree, seed=args.seed, extra=extra)


def _inputs(args, need_vector: bool = False):
    if not args.module:
        raise InputError("a module file is required (-m FILE)")
    M, vec = module_from_json(_read_json(args.module))
    if args.vector is not None:
        try:
            inline = parse_vector(args.vector, M.reg)
        except (ParseError, ValueError) as e:
            raise InputError(f"--vector: {e}") from e
        if len(inline) != M.p:
            raise InputError(f"--vector has length {len(inline)}, matrix has {M.p} rows")
        if vec is not None and tuple(vec) != tuple(inline):
            print("warning: --vector overrides the vector in the module file", file=sys.stderr)
        vec = inline
    if need_vector and vec is None:
        raise InputError("this command needs a vector (--vector or 'vector' in the module file)")
    return M, vec


def _ideal_json(I: Ideal) -> list[str]:
    # degree first, then the leading exponents in decreasing order
    key = lambda g: (g.degree(), tuple(-a for a in g.leading_term()[0]), str(g))
    return [str(g) for g in sorted(I.gens, key=key)]


def cmd_double(args):
    M, vec = _inputs(args)
    D = double_module(M, args.family)
    out = {"family": args.family, "module": module_to_json(D.module), "tags": [list(t) for t in D.tags]}
    if vec is not None:
        out["vector"] = [str(x) for x in double_vector(vec)]
    return out, None


def cmd_minors(args):
    M, _ = _inputs(args)
    k = args.k if args.k is not None else generic_rank(M)
    if k == 0:
        return {"k": 0, "minors": [], "ideal": ["1"]}, None
    try:
        minors = [{"rows": list(i.rows), "cols": list(i.cols), "minor": str(d)} for i, d in iter_minors(M, k)]
    except ValueError as e:
        raise InputError(str(e)) from e
    return {"k": k, "minors": minors, "ideal": _ideal_json(minor_ideal(M, k).monic())}, None


def cmd_rank(args):
    M, _ = _inputs(args)
    return {"rank": generic_rank(M)}, None


def cmd_diag(args):
    if args.module:
        reg = _inputs(args)[0].reg
    elif args.vars:
        try:
            reg = VarRegistry([v.strip() for v in args.vars.split(",")])
        except ValueError as e:
            raise InputError(str(e)) from e
    else:
        raise InputError("diag needs -m FILE or --vars x,y,...")
    I = diagonal_ideal(reg)
    return {"vars": list(reg.space_vars), "primed": list(reg.primed_vars), "ideal": _ideal_json(I)}, None


def cmd_tilde(args):
    M, _ = _inputs(args)
    return {"module": module_to_json(tilde_matrix(M))}, None


def cmd_closure_test(args):
    M, h = _inputs(args, need_vector=True)
    v = closure_test_module(h, M, _family(args, M.reg), args.degree_bound, args.jet_order)
    return {"verdict": v.to_dict()}, v


def _sat(args, which):
    M, h = _inputs(args, need_vector=True)
    fam = _family(args, M.reg)
    if which == 1:
        v = sat1_test(h, M, fam, args.family, args.degree_bound, args.jet_order)
    elif which == 2:
        v = sat2_test(h, M, args.psi_budget, fam, args.degree_bound, args.jet_order, args.seed)
    else:
        v = sat3_test(h, M, fam, args.degree_bound, args.jet_order)
    return {"verdict": v.to_dict()}, v


def cmd_sat_test(args):
    M, h = _inputs(args, need_vector=True)
    rep = sat_report(h, M, _family(args, M.reg), args.psi_budget, args.degree_bound, args.jet_order, args.seed)
    return rep.to_dict(), rep.verdicts[args.level]


def cmd_prop417(args):
    M, h = _inputs(args, need_vector=True)
    rep = prop417_check(h, M, None, args.degree_bound, _family(args, M.reg), args.jet_order, local=args.local)
    return rep.to_dict(), _both(rep.hyp1, rep.hyp2)


def _both(a: Verdict, b: Verdict) -> Verdict:
    if a.is_out:
        return a
    if b.is_out:
        return b
    return b if a.is_in else a


def cmd_lemma_check(args):
    M, _ = _inputs(args)
    v = inclusion_lemma_check(M, args.lemma, args.degree_bound)
    return {"lemma": args.lemma, "verdict": v.to_dict()}, v


def example_payload(args) -> tuple[dict, Verdict]:
    """The fixed module ``[[x, 0, y], [y, x, 0]]`` with ``h = (x, 3y)``, end to end."""
    M, h = module_from_json({"vars": ["x", "y"], "matrix": EXAMPLE_MATRIX, "vector": EXAMPLE_VECTOR})
    reg = M.reg
    I = minor_ideal(M, 2).monic()
    J = minor_ideal(augment(h, M), 2).monic()
    equal = all(ideal_membership(g, I).is_in for g in J.gens) and all(ideal_membership(g, J).is_in for g in I.gens)
    fam = _family(args, reg)
    s3 = sat3_test(h, M, fam, args.degree_bound, args.jet_order)
    s1 = sat1_test(h, M, fam, args.family, args.degree_bound, args.jet_order)
    s2 = sat2_test(h, M, args.psi_budget, fam, args.degree_bound, args.jet_order, args.seed, sat1=s1)
    out = {
        "module": module_to_json(M, h),
        "I_2(M)": _ideal_json(I),
        "I_2(h, M)": _ideal_json(J),
        "I_2(M) == I_2(h, M)": equal,
    }
    cert = s1.certificate
    if isinstance(cert, CurveObstruction):
        curve, res = cert.curve, cert.result
        MD = double_module(M, args.family).module
        out["curve"] = curve.to_json()
        out["Phi*(M_D)"] = [[str(x) for x in row] for row in curve_pullback(MD, curve).rows()]
        out["Phi*(h_D)"] = [str(x) for x in curve_pullback(double_vector(h), curve)]
        out["obstruction"] = {
            "row": res.row,
            "deficit": res.deficit,
            "residual": [str(x) for x in res.residual],
            "conditions": [str(x) for x in res.conditions],
        }
    out["verdicts"] = {"S3": s3.kind.value, "S1": s1.kind.value, "S2": s2.kind.value}
    out["certificates_verified"] = s3.verify() and s1.verify() and s2.verify()
    return out, s1


def cmd_example(args):
    return example_payload(args)


def cmd_suite(args):
    cfg = SuiteConfig(seed=args.seed, count=args.count, jet_order=args.jet_order,
                      degree_bound=args.degree_bound, properties=tuple(args.property or ()))
    unknown = set(cfg.properties) - {p.name for p in PROPERTIES}
    if unknown:
        raise InputError(f"unknown properties: {sorted(unknown)}")
    rep = run_suite(cfg)
    return {"report": rep.to_dict(), "ok": rep.ok}, rep


HANDLERS = {
    "double": cmd_double,
    "minors": cmd_minors,
    "rank": cmd_rank,
    "diag": cmd_diag,
    "tilde": cmd_tilde,
    "closure-test": cmd_closure_test,
    "sat-test": cmd_sat_test,
    "sat1": lambda a: _sat(a, 1),
    "sat2": lambda a: _sat(a, 2),
    "sat3": lambda a: _sat(a, 3),
    "prop417": cmd_prop417,
    "lemma-check": cmd_lemma_check,
    "example": cmd_example,
    "suite": cmd_suite,
}


# --------------------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--module", metavar="FILE", help="ModuleFile JSON")
    common.add_argument("--vector", help='inline vector such as "(x, 3*y)"; overrides the file')
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--assert", dest="expect", choices=("in", "out"), help="exit 1 unless the verdict matches")
    common.add_argument("--degree-bound", type=int, default=None, metavar="D", help="cofactor degree bound (default auto)")
    common.add_argument("--jet-order", type=int, default=DEFAULT_JET_ORDER, metavar="N")
    common.add_argument("--curve-degree", type=int, default=3, metavar="d")
    common.add_argument("--curves", metavar="FILE", help="JSON list of extra witness curves")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--family", choices=FAMILIES, default="B", help="generator family of M_D")
    common.add_argument("--psi-budget", type=int, default=4, help="random functionals tried by sat2")

    parser = argparse.ArgumentParser(prog="lipsat", description="Lipschitz saturation of modules: constructions and tests.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, blurb in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=blurb, description=blurb)
        if name == "minors":
            sp.add_argument("-k", type=int, default=None, help="minor size (default generic rank)")
        elif name == "diag":
            sp.add_argument("--vars", help="comma-separated space variables")
        elif name == "sat-test":
            sp.add_argument("--level", choices=("S1", "S2", "S3"), default="S1", help="verdict used by --assert")
        elif name == "prop417":
            sp.add_argument("--local", action="store_true", help="certify with a unit minor at the origin")
        elif name == "lemma-check":
            sp.add_argument("--lemma", choices=LEMMAS, required=True)
        elif name == "suite":
            sp.add_argument("--count", type=int, default=10, help="instances per property")
            sp.add_argument("--property", action="append", help="restrict to this property (repeatable)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        payload, result = HANDLERS[args.command](args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (ParseError, ValueError) as e:
        # precondition violations from the library name the offending object
        print(f"precondition violated: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    emit({"command": args.command, "seed": args.seed, **payload}, args.format)
    if args.command == "suite":
        return 0 if result.ok else 1
    if args.expect and isinstance(result, Verdict):
        want = result.is_in if args.expect == "in" else result.is_out
        return 0 if want else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
