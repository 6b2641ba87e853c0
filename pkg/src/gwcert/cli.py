"""Command-line front end: field inspection, valuation and tree utilities,
residue-quotient classification, and the full certificate pipeline.

Exit codes: 0 full success, 2 verification counterexample, 3 skipped work
due to caps, 64 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import certificate as cert_mod
from . import quotients, tree, wordmetric
from .errors import CounterexampleFound, GroupTooLarge, GwcertError
from .field import NumberField
from .fieldspec import load_field, parse_element
from .valuation import mw_set, primes_above, unit_group

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 2
EXIT_SKIPPED = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="gwcert", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_w=True):
        sp.add_argument("--field", help="path to a TOML field spec")
        if need_w:
            sp.add_argument("--w", required=True, help="rational or element string 'a+b*w'")
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("field-info", help="degree, embeddings, unit rank")
    common(sp, need_w=False)
    sp.add_argument("--w", help="optional element to evaluate")

    sp = sub.add_parser("mw", help="primes where w is non-trivial")
    common(sp)

    sp = sub.add_parser("tree", help="DOT export of a tree neighborhood")
    common(sp)
    sp.add_argument("--q", type=int, required=True, help="rational prime of the tree")
    sp.add_argument("--n", type=int, default=1, help="neighborhood radius")

    sp = sub.add_parser("quotient", help="residue ring sizes and t-orders")
    common(sp)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)

    sp = sub.add_parser("classify", help="hyper-elementary classification of F")
    common(sp)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--cap-order", type=int, default=50000)

    for name in ("certificate", "verify-all"):
        sp = sub.add_parser(name, help="run the full verification pipeline")
        common(sp)
        sp.add_argument("--n", type=int, default=1)
        sp.add_argument("--gens", help="generating set '(x,z);(x,z);...'")
        sp.add_argument("--cap-order", type=int, default=50000)
        sp.add_argument("--cap-bfs", type=int, default=2 * 10**6)
    return p


def _load(args):
    """Field and w from the flags; a bare rational --w implies the field Q."""
    if args.field:
        try:
            nf = load_field(args.field)
        except FileNotFoundError:
            print(f"error: field spec not found: {args.field}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    elif getattr(args, "w", None):
        try:
            r = Fraction(args.w)
        except ValueError:
            print("error: --field is required unless --w is rational", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        nf = NumberField([-r, 1])
    else:
        print("error: --field or a rational --w is required", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    w = parse_element(nf, args.w) if getattr(args, "w", None) else None
    return nf, w


def _parse_gens(nf, text):
    if not text:
        return cert_mod.standard_generating_set(nf)
    out = set()
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        x_s, z_s = chunk.rsplit(",", 1)
        out.add(wordmetric.GwElement(parse_element(nf, x_s), int(z_s)))
    out.add(wordmetric.gw_identity(nf))
    for g in list(out):
        if wordmetric.gw_inv(g) not in out:
            print(f"error: generating set is not symmetric at {g}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    return frozenset(out)


def _emit(args, payload: dict, text_lines):
    payload = {"schema": 1, "seed": args.seed, "command": args.command, **payload}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cmd_field_info(args):
    nf, w = _load(args)
    info = {
        "min_poly": [str(c) for c in nf.min_poly],
        "degree": nf.degree,
        "unit_rank": nf.unit_rank,
        "embeddings": [
            {"real": e.is_real, "root": [float(complex(e.root).real), float(complex(e.root).imag)]}
            for e in nf.embeddings
        ],
    }
    lines = [
        f"min_poly: {[str(c) for c in nf.min_poly]}",
        f"degree: {nf.degree}",
        f"unit rank: {nf.unit_rank}",
    ]
    if w is not None:
        info["w"] = [str(c) for c in w.coeffs]
        info["w_norm"] = str(w.norm())
        lines.append(f"w = {list(map(str, w.coeffs))}, norm {w.norm()}")
    _emit(args, info, lines)
    return EXIT_OK


def _cmd_mw(args):
    nf, w = _load(args)
    primes = mw_set(w)
    ug = unit_group(nf, w)
    info = {
        "mw": [{"p": P.p, "kind": P.kind, "e": P.e, "f": P.f} for P in primes],
        "rank_nw": ug.rank_nw,
        "torsion_order": ug.torsion_order,
    }
    lines = [f"M_w: {[(P.p, P.kind) for P in primes]}",
             f"rank n_w: {ug.rank_nw}, torsion order: {ug.torsion_order}"]
    _emit(args, info, lines)
    return EXIT_OK


def _cmd_tree(args):
    nf, w = _load(args)
    P = primes_above(nf, args.q)[0]
    dot = tree.neighborhood_dot(tree.identity_class(P), args.n)
    _emit(args, {"dot": dot, "p": args.q, "radius": args.n}, [dot])
    return EXIT_OK


def _cmd_quotient(args):
    nf, w = _load(args)
    ring = quotients.ResidueRing(w, args.q, args.m)
    t = quotients.t_order(w, args.q, args.m)
    u = quotients.u_order(w, args.q)
    info = {
        "q": args.q,
        "m": args.m,
        "element_count": ring.element_count,
        "unit_count": ring.unit_count,
        "t_order": t,
        "u_order": u,
    }
    lines = [f"|O_w/q^m| = {ring.element_count}, units {ring.unit_count}",
             f"t_w(q,m) = {t}, u_w(q) = {u}"]
    _emit(args, info, lines)
    return EXIT_OK


def _cmd_classify(args):
    nf, w = _load(args)
    ring = quotients.ResidueRing(w, args.q, args.m)
    t = quotients.t_order(w, args.q, args.m)
    t1 = quotients.u_order(w, args.q)
    F = quotients.SemidirectGroup(ring, t, cap=args.cap_order)
    report = quotients.group_report(F, t1)
    lines = [f"group order {report['order']}, subgroups {report['subgroup_count']}, "
             f"hyper-elementary {report['hyperelementary_count']}"]
    for v in report["verdicts"]:
        lines.append(f"  gens {v['generators']}: {v['case']}")
    _emit(args, report, lines)
    return EXIT_OK


def _cmd_certificate(args):
    nf, w = _load(args)
    S = _parse_gens(nf, args.gens)
    cert = cert_mod.build_and_verify(
        w, args.n, S, cap_order=args.cap_order, seed=args.seed, cap_bfs=args.cap_bfs
    )
    payload = cert.to_json()
    lines = [
        f"m2 = {cert.m2}, q = {cert.q}, m = {cert.m}, t = {cert.t}, |F| = {cert.group_order}",
        f"verdicts: {len(cert.verdicts)} "
        f"(case1 {sum(1 for v in cert.verdicts if v.case == 'Case1')}, "
        f"case2 {sum(1 for v in cert.verdicts if v.case == 'Case2')})",
        f"skipped conditions: {list(cert.skipped_conditions)}",
    ]
    if cert.skipped:
        lines.append(f"SKIPPED: {cert.skipped}")
        _emit(args, payload, lines)
        return EXIT_SKIPPED
    _emit(args, payload, lines)
    return EXIT_OK


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "field-info": _cmd_field_info,
        "mw": _cmd_mw,
        "tree": _cmd_tree,
        "quotient": _cmd_quotient,
        "classify": _cmd_classify,
        "certificate": _cmd_certificate,
        "verify-all": _cmd_certificate,
    }
    try:
        return handlers[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except CounterexampleFound as exc:
        print(f"COUNTEREXAMPLE: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    except GroupTooLarge as exc:
        print(f"skipped: {exc}", file=sys.stderr)
        return EXIT_SKIPPED
    except GwcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
