"""Command-line entry point.

Every subcommand prints one JSON report document (or writes it to ``--out``).
Exit codes: 0 when every asserted identity held, 1 on a failed check or a
library error, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import congruence as cg
from . import flags as fl
from . import golden
from . import matgroup as mg
from . import suite
from .errors import DVRError
from .hensel import Polynomial, fourth_root_witness, hensel_lift
from .localring import RingDescriptor, additive_subgroup_level, make_ring

log = logging.getLogger("dvrgroups")


class CheckFailed(Exception):
    pass


class UsageError(Exception):
    pass


def _ring_from_args(args) -> RingDescriptor:
    return make_ring(args.char, args.p, args.precision)


def _parse_elem(R: RingDescriptor, text: str):
    text = text.strip()
    if text.startswith("["):
        return R.parse(json.loads(text))
    return R.elem(int(text))


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    return json.loads(Path(path).read_text())


def _ring_from_doc(doc: dict, args) -> RingDescriptor:
    if "ring" in doc:
        return RingDescriptor.from_json(doc["ring"])
    return _ring_from_args(args)


# subcommands ----------------------------------------------------------------------


def cmd_ring(args):
    R = _ring_from_args(args)
    query = {"ring": R.to_json(), "op": args.op}
    if args.op == "level":
        if not args.gens:
            raise UsageError("ring level needs --gens")
        gens = [_parse_elem(R, g) for g in args.gens]
        query["gens"] = [g.to_json() for g in gens]
        return query, {"k": additive_subgroup_level(gens)}
    if args.a is None:
        raise UsageError(f"ring {args.op} needs --a")
    a = _parse_elem(R, args.a)
    query["a"] = a.to_json()
    if args.op == "valuation":
        v = a.valuation()
        return query, {"valuation": v if isinstance(v, int) else repr(v)}
    if args.op == "invert":
        return query, {"value": a.inverse().to_json()}
    if args.op == "neg":
        return query, {"value": (-a).to_json()}
    if args.b is None:
        raise UsageError(f"ring {args.op} needs --b")
    b = _parse_elem(R, args.b)
    query["b"] = b.to_json()
    value = {"add": a + b, "sub": a - b, "mul": a * b}[args.op]
    return query, {"value": value.to_json()}


def cmd_hensel(args):
    R = _ring_from_args(args)
    f = Polynomial.from_json(R, json.loads(args.coeffs))
    a = _parse_elem(R, args.a)
    trace: list = []
    root = hensel_lift(f, a, trace)
    result = {"root": root.to_json(), "residual_valuations": [str(v) for v in trace], "f(root)": f(root).to_json()}
    if f(root):
        raise CheckFailed(json.dumps(result))
    return {"ring": R.to_json(), "poly": f.to_json(), "a": a.to_json()}, result


def cmd_fourth_root(args):
    R = make_ring("zero", args.p, args.precision)
    w = fourth_root_witness(R)
    if w.certificate:
        raise CheckFailed("q^4 + r is not zero")
    return {"ring": R.to_json()}, w.to_json()


def cmd_decompose(args):
    doc = _read_json(args.input)
    if "ring" not in doc and args.p is None:
        raise UsageError("decompose needs a ring in the input file or --p")
    R = _ring_from_doc(doc, args)
    M = mg.RMatrix.from_json(R, doc["matrix"])
    w = mg.decompose_sl2(M) if M.n == 2 and not args.gauss else mg.decompose_sln(M)
    ok = mg.evaluate_word(w) == M
    if not ok:
        raise CheckFailed("word does not evaluate to the input matrix")
    return {"ring": R.to_json(), "matrix": M.to_json()}, {"word": w.to_json(), "letters": len(w), "roundtrip": ok}


def cmd_el_diagonal(args):
    R = _ring_from_args(args)
    x = _parse_elem(R, args.x)
    w = mg.el_diagonal_word(args.k, x)
    rep = mg.el_diagonal_check(args.k, x)
    if not rep.holds:
        raise CheckFailed(json.dumps(rep.to_json()))
    return (
        {"ring": R.to_json(), "k": args.k, "x": x.to_json()},
        {"word": w.to_json(), "value": mg.evaluate_word(w).to_json(), **rep.details},
    )


def cmd_verify_identities(args):
    res = suite.check_identities(per_kind=args.count, seed=args.seed, min_instances=0)
    if not res.passed:
        raise CheckFailed(json.dumps(res.to_json()))
    return {"count": args.count, "seed": args.seed}, res.to_json()


def cmd_congruence(args):
    n, p, m, cap = args.n, args.p, args.m, args.element_cap
    query = {"action": args.action, "n": n, "p": p, "m": m}
    if args.action == "order":
        G = cg.special_linear_group(n, p, m, cap)
        return query, {"order": G.order, "formula": cg.sl_order_formula(n, p, m)}
    if args.action == "abelianization":
        G = cg.special_linear_group(n, p, m, cap)
        factors = cg.abelianization(G)
        return query, {"order": G.order, "invariant_factors": factors}
    if args.action in ("index", "el-index"):
        query["k"] = args.k
        if args.action == "el-index":
            value = cg.el_image_index(n, p, args.k, m, cap)
        else:
            H = cg.group_closure(cg.el_generators(n, p, args.k, m), cap)
            value = cg.subgroup_index(H, cg.special_linear_group(n, p, m, cap))
        result = {"index": value}
        rec = golden.lookup({"op": "el-index", "n": n, "p": p, "k": args.k, "m": m})
        if rec is not None:
            result["golden"] = {"value": rec["value"], "oracle": rec["oracle"]}
            if rec["value"] != value:
                raise CheckFailed(f"index {value} disagrees with pinned oracle value {rec['value']}")
        return query, result
    if args.action == "nontrivial-rep":
        return cmd_nontrivial_rep(args)
    raise UsageError(f"unknown congruence action {args.action}")


def cmd_nontrivial_rep(args):
    rep, G = cg.nontrivial_rep(args.p, args.dim, args.element_cap)
    words = cg.random_relators(G, args.relators, random.Random(args.seed))
    killed = sum(1 for w in words if rep.angle_of_word(w) == 0)
    if killed != len(words):
        raise CheckFailed(f"{len(words) - killed} relators not killed")
    return {"p": args.p, "dim": args.dim}, {**rep.to_json(), "group_order": G.order, "relators_checked": killed}


def _load_mats(obj) -> list:
    return [fl.QMatrix.from_json(M) for M in obj]


def cmd_flags(args):
    doc = _read_json(args.input)
    if args.action == "jh":
        mats = _load_mats(doc["mats"])
        flag = fl.jh_series(mats)
        props = suite.flag_properties(mats, flag)
        if not all(props.values()):
            raise CheckFailed(json.dumps(props))
        return {"mats": [M.to_json() for M in mats]}, {
            "flag": flag.to_json(),
            "dims": flag.dims,
            "adapted_basis": fl.adapted_basis(flag).to_json(),
            **props,
        }
    if args.action == "check-invariance":
        gens = _load_mats(doc["gens"])
        D = gens[0].D
        flag = fl.Flag.from_json(doc["flag"], D) if "flag" in doc else fl.jh_series(_load_mats(doc["mats"]))
        return {"gens": [g.to_json() for g in gens]}, {
            "flag": flag.to_json(),
            "invariant": fl.flag_invariant_under(gens, flag),
        }
    if args.action == "hyperplanes":
        D = int(doc["D"])
        W = [fl.Subspace.span(fl.nullspace([[Fraction(str(x)) for x in normal]], D), D) for normal in doc["normals"]]
        rep = fl.hyperplane_bound_check(W)
        if not rep.holds:
            raise CheckFailed(json.dumps(rep.to_json()))
        return {"D": D, "normals": doc["normals"]}, rep.to_json()
    raise UsageError(f"unknown flags action {args.action}")


def cmd_verify_paper(args):
    def progress(res):
        log.info("%-26s %s (%.2fs)", res.name, "PASS" if res.passed else "FAIL", res.seconds)

    results = suite.verify_paper(seed=args.seed, progress=progress)
    payload = {"checks": [r.to_json() for r in results], "all_passed": all(r.passed for r in results)}
    if not payload["all_passed"]:
        raise CheckFailed(json.dumps(payload, default=str))
    return {"seed": args.seed}, payload


# parser ----------------------------------------------------------------------------------


def _add_ring_flags(sp, precision=16):
    sp.add_argument("--char", choices=["zero", "positive"], default="zero")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--precision", type=int, default=precision)


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps unset ones from clobbering
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=default(None), help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=default(0))
    common.add_argument("--element-cap", type=int, default=default(cg.DEFAULT_ELEMENT_CAP))
    common.add_argument("-v", "--verbose", action="store_true", default=default(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dvrgroups", description=__doc__.splitlines()[0], parents=[_common_flags(False)]
    )
    parser.add_argument("--regen-golden", action="store_true", help="recompute pinned values from the oracles and exit")
    sub = parser.add_subparsers(dest="command")
    common = _common_flags(True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    sp = add("ring", help="arithmetic, valuation, inverse, additive level")
    _add_ring_flags(sp)
    sp.add_argument("--op", choices=["add", "sub", "mul", "neg", "valuation", "invert", "level"], required=True)
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--gens", nargs="+", help="generators for --op level")
    sp.set_defaults(func=cmd_ring)

    sp = add("hensel", help="lift a root of a polynomial")
    _add_ring_flags(sp)
    sp.add_argument("--coeffs", required=True, help="JSON array, lowest degree first")
    sp.add_argument("--a", required=True)
    sp.set_defaults(func=cmd_hensel)

    sp = add("fourth-root", help="unit q with q^4 = -r")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--precision", type=int, default=32)
    sp.set_defaults(func=cmd_fourth_root)

    sp = add("decompose", help="factor an SL_n matrix into elementary letters")
    sp.add_argument("--input", required=True, help='JSON {"ring": {...}, "matrix": [[...]]}')
    sp.add_argument("--char", choices=["zero", "positive"], default="zero")
    sp.add_argument("--p", type=int)
    sp.add_argument("--precision", type=int, default=16)
    sp.add_argument("--gauss", action="store_true", help="use row reduction even for n = 2")
    sp.set_defaults(func=cmd_decompose)

    sp = add("el-diagonal", help="word in EL_2(pi^k O) for diag(1 + pi^2k x, .)")
    _add_ring_flags(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_el_diagonal)

    sp = add("verify-identities", help="random instances of every exact matrix identity")
    sp.add_argument("--count", type=int, default=1700, help="instances per identity")
    sp.set_defaults(func=cmd_verify_identities)

    sp = add("congruence", help="finite quotients SL_n(Z/p^m)")
    sp.add_argument("action", choices=["order", "index", "abelianization", "el-index", "nontrivial-rep"])
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--relators", type=int, default=200)
    sp.set_defaults(func=cmd_congruence)

    sp = add("nontrivial-rep", help="nontrivial SL_2(Z_p) -> GL_D(R) for p = 2, 3")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--relators", type=int, default=200)
    sp.set_defaults(func=cmd_nontrivial_rep)

    sp = add("flags", help="JH-series and flag invariance over Q")
    sp.add_argument("action", choices=["jh", "check-invariance", "hyperplanes"])
    sp.add_argument("--input", required=True)
    sp.set_defaults(func=cmd_flags)

    sp = add("verify-paper", help="run every exact check end to end")
    sp.set_defaults(func=cmd_verify_paper)
    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.regen_golden:
        path = Path(args.out) if args.out else golden.GOLDEN_PATH
        records = golden.regenerate(path)
        print(json.dumps({"golden": str(path), "records": len(records)}, indent=2))
        return 0
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 2

    t0 = time.perf_counter()
    code = 0
    try:
        query, result = args.func(args)
        doc = {"command": args.command, "query": query, "result": result, "ok": True}
    except CheckFailed as exc:
        code = 1
        doc = {"command": args.command, "ok": False, "failure": str(exc)}
    except DVRError as exc:
        code = 1
        doc = {"command": args.command, "ok": False, "error": type(exc).__name__, "message": str(exc)}
    except (UsageError, ValueError, KeyError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"dvrgroups: error: {exc}", file=sys.stderr)
        return 2
    doc["wall_time"] = round(time.perf_counter() - t0, 4)
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
