"""Command-line front end.

Subcommands map files to the library operations:

    dual           polytope -> dual polytope file
    triangulate    polytope -> central triangulation file (rank <= 3)
    validate       triangulation -> validation report
    hodge          pair -> tropical homology table, per ring
    mirror-check   pair -> both tables + transfer spot checks + verdict
    divisor-class  pair + divisor -> restriction cycle + null/nonnull
    patchwork      pair + divisor-or-signs -> betti, components, verdict
    sweep          pair -> one row per divisor class (or raw sign sweep)

All reports are JSON (``--out text`` renders a derived view, never parsed
back).  Reports embed input hashes and the signature/basis identifiers so
golden files are stable.  Exit codes: 0 success, 1 input validation
failure, 2 internal consistency failure, 3 hypothesis failure.
"""

import argparse
import hashlib
import json
import sys

from .errors import HypothesisFails, InputError, InternalCheckError
from .lattice import LatticePolytope
from .mirror import divisor_restriction, is_null_class, sphere_cycle, transfer_class
from .pairs import MirrorPair
from .patchwork import (
    connectedness_verdict,
    divisor_class_representatives,
    divisor_from_signs,
    real_betti,
    sample_divisor_classes,
    signs_from_divisor,
    sweep_rows,
)
from .triangulate import CentralTriangulation, generate_central, validate

SIGNATURE_ID = "koszul-lex-v1"
BASES_ID = "hnf-smith-v1"


def _sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from None


def load_polytope(path):
    data = _load_json(path)
    try:
        return LatticePolytope(data["vertices"], data["rank"])
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad polytope file {path}: {e}") from None


def load_triangulation(path):
    data = _load_json(path)
    try:
        return CentralTriangulation.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad triangulation file {path}: {e}") from None


def load_pair(args):
    T = load_triangulation(args.triangulation)
    Tdual = load_triangulation(args.dual_triangulation)
    return MirrorPair(T, Tdual)


def load_divisor(path):
    data = _load_json(path)
    try:
        return [tuple(int(a) for a in r) for r in data["rays"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad divisor file {path}: {e}") from None


def load_signs(path):
    data = _load_json(path)
    try:
        return {tuple(int(a) for a in p): int(b) & 1 for p, b in data["signs"]}
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad signs file {path}: {e}") from None


def report(args, result, inputs):
    env = {
        "command": args.command,
        "inputs": {p: _sha(p) for p in inputs},
        "signature": SIGNATURE_ID,
        "bases": BASES_ID,
        "seed": getattr(args, "seed", 0),
        "result": result,
    }
    if args.out == "json":
        print(json.dumps(env, sort_keys=True))
    else:
        _render_text(env)
    return 0


def _render_text(env, stream=None):
    stream = stream or sys.stdout
    print(f"# {env['command']}", file=stream)
    for path, digest in sorted(env["inputs"].items()):
        print(f"input {path} sha256={digest[:16]}", file=stream)
    print(f"signature={env['signature']} bases={env['bases']}", file=stream)
    _render_value(env["result"], "", stream)


def _render_value(value, indent, stream):
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                print(f"{indent}{k}:", file=stream)
                _render_value(v, indent + "  ", stream)
            else:
                print(f"{indent}{k}: {json.dumps(v, sort_keys=True)}", file=stream)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                print(f"{indent}- [{i}]", file=stream)
                _render_value(v, indent + "  ", stream)
            else:
                print(f"{indent}- {json.dumps(v, sort_keys=True)}", file=stream)
    else:
        print(f"{indent}{json.dumps(value)}", file=stream)


def _is_flat(v):
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v) or (
            all(isinstance(x, list) and len(x) <= 4 for x in v) and len(v) <= 8
        )
    return False


def cycle_dump(chain):
    return [
        {"tau": [list(p) for p in k[0]], "sigma": [list(p) for p in k[1]],
         "coeff": list(v)}
        for k, v in sorted(chain.items())
    ]


# -- subcommand bodies -----------------------------------------------------------

def cmd_dual(args):
    P = load_polytope(args.polytope)
    D = P.dual()
    payload = {"rank": D.rank, "vertices": [list(v) for v in D.vertices]}
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
    return report(args, payload, [args.polytope])


def cmd_triangulate(args):
    P = load_polytope(args.polytope)
    T = generate_central(P)
    payload = T.to_dict()
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
    summary = {
        "maximal_boundary_simplices": len(T.boundary_simplices),
        "vertices": len(T.vertices),
    }
    return report(args, summary, [args.polytope])


def cmd_validate(args):
    T = load_triangulation(args.triangulation)
    rep = validate(T)
    code = report(args, rep.to_dict(), [args.triangulation])
    return code if rep.ok else 1


RING_RULES = {
    # command -> (allowed rings, default)
    "hodge": (("z", "q", "f2"), "q"),
    "mirror-check": (("z", "q", "f2"), "q"),  # checks all three regardless
    "divisor-class": (("f2",), "f2"),
    "patchwork": (("f2",), "f2"),
    "sweep": (("f2",), "f2"),
}


def resolve_ring(args):
    """Ring/command compatibility, validated before any computation."""
    allowed, default = RING_RULES.get(args.command, (("z", "q", "f2"), "q"))
    ring = args.ring or default
    if ring not in allowed:
        raise InputError(
            f"ring {ring!r} is not available for {args.command}; "
            f"allowed: {', '.join(allowed)}"
        )
    return ring


def cmd_hodge(args):
    ring = resolve_ring(args)
    pair = load_pair(args)
    table = pair.side_a.hodge_table(ring)
    return report(
        args, table, [args.triangulation, args.dual_triangulation]
    )


def cmd_mirror_check(args):
    resolve_ring(args)
    pair = load_pair(args)
    n = pair.n
    result = {"n": n, "tables": {}, "match": {}}
    ok = True
    for ring in ("q", "f2", "z"):
        ta = pair.side_a.hodge_table(ring)
        tb = pair.side_b.hodge_table(ring)
        result["tables"][ring] = {"side_a": ta, "side_b": tb}
        match = all(
            ta["ranks"][p][q] == tb["ranks"][n - p][q]
            for p in range(n + 1)
            for q in range(n + 1)
        )
        if ring == "z":
            match = match and all(
                ta["torsion"][p][q] == tb["torsion"][n - p][q]
                for p in range(n + 1)
                for q in range(n + 1)
            )
        result["match"][ring] = match
        ok = ok and match
    # transfer spot check over F2: the fundamental class maps to a nonzero
    # class of complementary degree, and back to itself up to boundary
    S = sphere_cycle(pair.side_a)
    out = transfer_class(pair.side_a, S, 0)
    nonzero = bool(out) and not is_null_class(
        pair.side_b, out, n, kind="refined", tag="multitangent"
    )
    back = transfer_class(pair.side_b, out, n)
    cx = pair.side_a.complex("refined", "multitangent", 0)
    diff = cx.chain_to_packed(back, n) ^ cx.chain_to_packed(S, n)
    involutive = cx.f2_is_boundary(diff, n)
    result["transfer_spot_checks"] = {
        "fundamental_class_nonzero": nonzero,
        "involution_up_to_boundary": involutive,
    }
    ok = ok and nonzero and involutive
    result["verdict"] = "mirror symmetry holds" if ok else "MISMATCH"
    code = report(args, result, [args.triangulation, args.dual_triangulation])
    return code if ok else 2


def cmd_divisor_class(args):
    resolve_ring(args)
    pair = load_pair(args)
    rays = load_divisor(args.divisor)
    side = pair.side_a
    chain = divisor_restriction(side, rays)
    null = (not chain) or is_null_class(side.mirror, chain, side.n - 1)
    result = {
        "cycle": cycle_dump(chain),
        "class_nonzero": not null,
    }
    return report(
        args,
        result,
        [args.triangulation, args.dual_triangulation, args.divisor],
    )


def cmd_patchwork(args):
    resolve_ring(args)
    pair = load_pair(args)
    side = pair.side_a
    inputs = [args.triangulation, args.dual_triangulation]
    if args.divisor:
        rays = load_divisor(args.divisor)
        eps = signs_from_divisor(side, rays)
        inputs.append(args.divisor)
    else:
        eps = load_signs(args.signs)
        missing = set(side.newton.polytope.lattice_points) - set(eps)
        if missing:
            raise InputError(f"signs file misses lattice points {sorted(missing)}")
        rays = divisor_from_signs(side, eps)
        inputs.append(args.signs)
    betti = real_betti(side, eps)
    verdict = connectedness_verdict(side, rays)
    result = {
        "divisor": [list(v) for v in rays],
        "betti": betti,
        "components": betti[0],
        "verdict": verdict,
    }
    return report(args, result, inputs)


def cmd_sweep(args):
    resolve_ring(args)
    pair = load_pair(args)
    side = pair.side_a
    if args.raw:
        from .patchwork import raw_sign_sweep

        rows = []
        for eps, betti in raw_sign_sweep(side):
            rows.append(
                {
                    "signs": [[list(p), b] for p, b in sorted(eps.items())],
                    "divisor": [list(v) for v in divisor_from_signs(side, eps)],
                    "betti": betti,
                    "b0": betti[0],
                }
            )
        result = {"mode": "raw", "rows": rows}
    else:
        if args.samples:
            masks = sample_divisor_classes(side, args.samples, args.seed)
        else:
            masks = divisor_class_representatives(side)
        rows = sweep_rows(side, masks, with_betti=not args.no_betti)
        agree = sum(
            1
            for r in rows
            if (r["verdict"] == "connected") == (r["b0"] == 1)
        )
        result = {
            "mode": "classes",
            "rows": rows,
            "agreement": f"{agree}/{len(rows)}",
        }
    code = report(args, result, [args.triangulation, args.dual_triangulation])
    return code


# -- argument plumbing ---------------------------------------------------------------

def _add_pair_args(sp):
    sp.add_argument("triangulation", help="triangulation of the Newton polytope")
    sp.add_argument(
        "dual_triangulation", help="triangulation of the dual polytope"
    )


def build_parser():
    ap = argparse.ArgumentParser(
        prog="tropmirror",
        description="exact tropical homology, mirror transfer and patchworking",
    )
    ap.add_argument("--out", choices=("json", "text"), default="json")
    ap.add_argument("--ring", choices=("z", "q", "f2"), default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1, help="accepted; sweeps run serially")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("dual", help="dual polytope")
    sp.add_argument("polytope")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_dual)

    sp = sub.add_parser("triangulate", help="generate a central triangulation")
    sp.add_argument("polytope")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_triangulate)

    sp = sub.add_parser("validate", help="validate a triangulation")
    sp.add_argument("triangulation")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("hodge", help="tropical homology table")
    _add_pair_args(sp)
    sp.set_defaults(func=cmd_hodge)

    sp = sub.add_parser("mirror-check", help="verify the mirror-symmetry identity")
    _add_pair_args(sp)
    sp.set_defaults(func=cmd_mirror_check)

    sp = sub.add_parser("divisor-class", help="mirror divisor restriction class")
    _add_pair_args(sp)
    sp.add_argument("--divisor", required=True)
    sp.set_defaults(func=cmd_divisor_class)

    sp = sub.add_parser("patchwork", help="betti numbers and connectedness")
    _add_pair_args(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--divisor")
    group.add_argument("--signs")
    sp.set_defaults(func=cmd_patchwork)

    sp = sub.add_parser("sweep", help="sweep divisor classes")
    _add_pair_args(sp)
    sp.add_argument("--raw", action="store_true", help="sweep raw sign distributions")
    sp.add_argument("--samples", type=int, default=0, help="sample this many classes")
    sp.add_argument("--no-betti", action="store_true")
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except HypothesisFails as e:
        print(json.dumps({"error": str(e), "kind": "hypothesis"}), file=sys.stderr)
        return 3
    except InputError as e:
        print(json.dumps({"error": str(e), "kind": "input"}), file=sys.stderr)
        return 1
    except InternalCheckError as e:
        print(json.dumps({"error": str(e), "kind": "internal"}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
