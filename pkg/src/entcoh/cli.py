"""Command-line front end.

    entcoh <command> --fixture F2 [--max-degree N] [--cap SIZE]
                     [--format text|json-report] [--seed S] [--figures DIR]

``--fixture`` takes a path to a structure JSON file or the name of a shipped
example (F0..F3).  Exit codes: 0 ok, 1 parse error, 2 validation or
precondition failure, 3 size cap exceeded, 4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .algebra import hom_cm_bimodule, validate_bimodule, validate_entwining
from .complex import SecondaryComplex, check_square_zero, cohomology
from .errors import EntcohError, ParseError
from .serialize import frac_str, load_structure
from .tensor_basis import DEFAULT_CAP

REPORT_SCHEMA = "entcoh-report/1"
COMMANDS = ("validate", "cohomology", "cup", "equivariant", "hodge", "deform", "obstruct")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entcoh", description="Secondary Hochschild cohomology of entwining structures over a base.")
    p.add_argument("--version", action="version", version=f"entcoh {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    defaults = {"validate": 2, "cohomology": 3, "cup": 2, "equivariant": 2, "hodge": 3, "deform": 3, "obstruct": 3}
    helps = {
        "validate": "check every axiom of the structure",
        "cohomology": "betti numbers of the secondary complex",
        "cup": "cup products on cohomology and the sign relation",
        "equivariant": "equivariant subcomplex and Gerstenhaber identities",
        "hodge": "Hodge decomposition (commutative A, symmetric Hom(C, M))",
        "deform": "deformation bicomplex, total cohomology and H^2",
        "obstruct": "order-by-order lifting of a first-order deformation",
    }
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--fixture", required=True, help="structure JSON path or shipped name F0..F3")
        s.add_argument("--max-degree", type=int, default=defaults[name])
        s.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest basis size allowed")
        s.add_argument("--format", choices=("text", "json-report"), default="text")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--figures", metavar="DIR", help="write PNG figures to DIR")
        if name == "obstruct":
            s.add_argument("--order", type=int, default=3, help="target order of the lifted jet")
            s.add_argument("--jet", help="starting jet JSON (default: a seeded random 2-cocycle)")
    return p


# ---------------------------------------------------------------------------
# commands; each returns (result dict, text lines, figures)


def _complex(e, m, cap):
    return SecondaryComplex(e, m, cap=cap)


def _comp_context(e, m, cap):
    from .comp import CompContext

    if m is not None:
        raise ParseError("this command works with M = A; drop the M field")
    return CompContext(SecondaryComplex(e, cap=cap))


def cmd_validate(e, m, args):
    rep = validate_entwining(e)
    result = {"entwining": rep.to_dict()}
    lines = [f"structure {e.name or '(unnamed)'}: dims C={e.C.dim} A={e.A.dim} B={e.B.dim}"]
    lines += [f"  {c.name:<32} {'pass' if c.passed else 'FAIL ' + str(c.witness)}" for c in rep.checks]
    ok = rep.passed
    if m is not None:
        mrep = validate_bimodule(m, e.A, e)
        result["bimodule"] = mrep.to_dict()
        lines += [f"  M:{c.name:<30} {'pass' if c.passed else 'FAIL ' + str(c.witness)}" for c in mrep.checks]
        ok = ok and mrep.passed
    if rep.passed:
        hom = validate_bimodule(hom_cm_bimodule(e, m if m is not None else _complex(e, None, args.cap).m), e.A, e)
        result["hom_cm"] = hom.to_dict()
        lines.append(f"  Hom(C,M) bimodule                {'pass' if hom.passed else 'FAIL'}")
        ok = ok and hom.passed
    result["passed"] = ok
    lines.append("all checks pass" if ok else "validation failed")
    return result, lines, [], 0 if ok else 2


def cmd_cohomology(e, m, args):
    cx = _complex(e, m, args.cap)
    squares = [check_square_zero(cx, n) is None for n in range(args.max_degree)]
    rep = cohomology(cx, args.max_degree)
    result = rep.to_dict()
    result["square_zero"] = squares
    lines = [f"{'n':>3} {'dim':>8} {'rank':>8} {'ker':>8} {'betti':>6}"]
    for d in rep.degrees:
        lines.append(f"{d.degree:>3} {d.dim:>8} {d.rank:>8} {d.kernel_dim:>8} {d.betti:>6}")
    lines.append("betti " + " ".join(str(b) for b in rep.betti))
    lines.append("delta^2 = 0 " + ("verified" if all(squares) else "FAILED"))
    figs = [("betti.png", "betti", (list(rep.betti), f"{e.name} secondary cohomology"))]
    return result, lines, figs, 0


def cmd_cup(e, m, args):
    from .comp import check_weak_comp, cohomology_cup

    ctx = _comp_context(e, m, args.cap)
    table = cohomology_cup(ctx, args.max_degree)
    axioms = check_weak_comp(ctx, max_degree=min(args.max_degree, 2))
    result = {"cup": table.to_dict(), "weak_comp_axioms": axioms.to_dict()}
    lines = ["betti " + " ".join(str(b) for b in table.degrees), "cup products on representatives:"]
    for (p, a, q, b), coords in sorted(table.products.items()):
        rel = "yes" if table.sign_relation[(p, a, q, b)] else "NO"
        lines.append(f"  [{p}.{a}] cup [{q}.{b}] = ({', '.join(frac_str(x) for x in coords)})   sign relation {rel}")
    lines.append("sign relation " + ("holds" if table.sign_relation_holds else "FAILS"))
    for c in axioms.checks:
        lines.append(f"weak comp {c.name:<22} {'pass' if c.passed else 'FAIL ' + str(c.witness)}")
    return result, lines, [], 0


def cmd_equivariant(e, m, args):
    from .equivariant import (
        alpha_membership,
        check_comp_axioms,
        comp_closure,
        comparison_rank,
        cup_coincidence_on_basis,
        gerstenhaber_check,
        subcomplex_cohomology,
    )

    ctx = _comp_context(e, m, args.cap)
    cx = ctx.cx
    top = args.max_degree
    sub = subcomplex_cohomology(cx, top, with_representatives=True)
    dims = [sub.spaces[n].dim for n in range(top + 1)]
    full = [sub.spaces[n].full_dim for n in range(top + 1)]
    ranks = [comparison_rank(cx, sub, n) for n in range(top + 1)]
    alpha = alpha_membership(ctx)
    closure = comp_closure(ctx, max_degree=min(top, 2), seed=args.seed)
    axioms = check_comp_axioms(ctx, max_degree=min(top, 2))
    cups = [cup_coincidence_on_basis(ctx, p, q) for p in range(top + 1) for q in range(top + 1 - p)]
    cup_ok = all(c.passed for c in cups)
    gerst = gerstenhaber_check(ctx, max_degree=min(top, 2))
    result = {
        "dims": dims,
        "full_dims": full,
        "betti": list(sub.report.betti),
        "comparison_ranks": ranks,
        "alpha_in_E2": alpha.passed,
        "comp_closure": closure.to_dict(),
        "comp_axioms": axioms.to_dict(),
        "cup_equals_sqcup": cup_ok,
        "gerstenhaber": gerst.to_dict(),
    }
    lines = [
        "dim E^n   " + " ".join(str(d) for d in dims),
        "dim C^n   " + " ".join(str(d) for d in full),
        "betti H(E) " + " ".join(str(b) for b in sub.report.betti),
        "rank H(E) -> H " + " ".join(str(r) for r in ranks),
        f"alpha in E^2: {'yes' if alpha.passed else 'NO'}",
        f"comp closure: {'pass' if closure.passed else 'FAIL ' + str(closure.witness)}",
    ]
    lines += [f"comp axiom {c.name:<20} {'pass' if c.passed else 'FAIL ' + str(c.witness)}" for c in axioms.checks]
    lines.append(f"cup = sqcup on E: {'yes' if cup_ok else 'NO'}")
    for name, (ok, cases, witness) in gerst.checks.items():
        lines.append(f"gerstenhaber {name:<22} {'pass' if ok else 'FAIL ' + str(witness)} ({cases} cases)")
    for name, (ok, cases, witness) in gerst.informational.items():
        lines.append(f"informational {name:<21} {'holds' if ok else 'fails ' + str(witness)} ({cases} cases)")
    figs = [("equivariant_betti.png", "betti", (list(sub.report.betti), f"{e.name} equivariant cohomology"))]
    return result, lines, figs, 0


def cmd_hodge(e, m, args):
    from .hodge import hodge_decompose, require_hypotheses

    cx = _complex(e, m, args.cap)
    require_hypotheses(cx)
    rep = hodge_decompose(cx, args.max_degree)
    lines = [f"convention {rep.convention}", f"{'n':>3} {'dim':>6} {'betti':>6}  summand dims / summand betti (i = 0..n)"]
    for n in sorted(rep.dims):
        d, b = rep.totals[n]
        lines.append(
            f"{n:>3} {d:>6} {b:>6}  [{' '.join(str(x) for x in rep.dims[n])}] / [{' '.join(str(x) for x in rep.betti[n])}]"
        )
    figs = [("hodge.png", "hodge", (rep,))]
    return rep.to_dict(), lines, figs, 0


def cmd_deform(e, m, args):
    from .deformation import assemble_bicomplex, direct_h2_dimension, total_cohomology

    if m is not None:
        raise ParseError("deformations use M = A; drop the M field")
    p_max = max(args.max_degree, 2)
    bx = assemble_bicomplex(e, p_max, cap=args.cap)
    tc = total_cohomology(bx, p_max)
    h2 = direct_h2_dimension(bx)
    result = tc.to_dict()
    result["cells"] = {f"{mm},{nn}": bx.cell_dim(mm, nn) for p in range(p_max + 1) for mm, nn in bx.components(p)}
    result["h2_direct"] = h2
    result["h2_agrees"] = h2 == tc.betti[2]
    lines = [f"{'p':>3} {'dim Tot':>8} {'rank D':>8} {'betti':>6}"]
    for p in range(p_max + 1):
        lines.append(f"{p:>3} {tc.dims[p]:>8} {tc.ranks[p]:>8} {tc.betti[p]:>6}")
    lines.append(f"infinitesimal deformations modulo equivalence: {h2} (total H^2 = {tc.betti[2]})")
    status = 0 if h2 == tc.betti[2] else 4
    figs = [("total_betti.png", "betti", (tc.betti, f"{e.name} total cohomology"))]
    return result, lines, figs, status


def cmd_obstruct(e, m, args):
    from .deformation import (
        Bicomplex,
        DeformationJet,
        checked_jet,
        jet_from_json,
        jet_to_json,
        lift_jet,
        random_cocycle,
    )

    if m is not None:
        raise ParseError("deformations use M = A; drop the M field")
    if args.order < 1:
        raise ParseError("--order must be at least 1")
    bx = Bicomplex(e, cap=args.cap)
    if args.jet:
        try:
            data = json.loads(Path(args.jet).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read jet: {exc}") from None
        try:
            jet = jet_from_json(e, data)
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"malformed jet: {exc}") from None
        jet = checked_jet(bx, jet)
    else:
        rng = random.Random(args.seed)
        jet = checked_jet(bx, DeformationJet.from_cocycle(bx, random_cocycle(bx, rng)))
    trace = []
    lines = [f"starting jet of order {jet.order}"]
    while jet.order < args.order:
        res = lift_jet(bx, jet)
        entry = {"order": jet.order + 1, "obstruction_nnz": len(res.obstruction), "lifted": res.lifted}
        trace.append(entry)
        if not res.lifted:
            lines.append(f"order {jet.order + 1}: obstruction class is nonzero in H^3; stopping")
            break
        jet = res.jet
        note = "zero" if not res.obstruction else f"coboundary ({len(res.obstruction)} nonzero entries)"
        lines.append(f"order {jet.order}: obstruction {note}; lifted and re-verified")
    result = {"trace": trace, "final_order": jet.order, "jet": jet_to_json(e, jet)}
    return result, lines, [], 0


HANDLERS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "cup": cmd_cup,
    "equivariant": cmd_equivariant,
    "hodge": cmd_hodge,
    "deform": cmd_deform,
    "obstruct": cmd_obstruct,
}


# ---------------------------------------------------------------------------


def _json_default(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, (tuple, set)):
        return list(x)
    return str(x)


def _write_figures(figs, outdir: str) -> list:
    from . import plotting

    written = []
    for fname, kind, payload in figs:
        path = Path(outdir) / fname
        if kind == "betti":
            plotting.betti_bars(*payload, path)
        else:
            plotting.hodge_heatmap(*payload, path)
        written.append(str(path))
    return written


def render(command: str, fixture: str, args, result: dict, lines: list, status: int) -> str:
    if args.format == "json-report":
        doc = {
            "schema": REPORT_SCHEMA,
            "command": command,
            "fixture": fixture,
            "config": {"max_degree": args.max_degree, "cap": args.cap, "seed": args.seed},
            "status": status,
            "result": result,
        }
        return json.dumps(doc, sort_keys=True, indent=1, default=_json_default) + "\n"
    head = f"entcoh {command} {fixture} (max degree {args.max_degree}, seed {args.seed})"
    return "\n".join([head] + lines) + "\n"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.max_degree < 0:
            raise ParseError("--max-degree must be non-negative")
        e, m = load_structure(args.fixture, validate=args.command != "validate")
        result, lines, figs, status = HANDLERS[args.command](e, m, args)
        if args.figures and figs:
            lines = lines + [f"figure {p}" for p in _write_figures(figs, args.figures)]
        out.write(render(args.command, e.name or Path(args.fixture).stem, args, result, lines, status))
        return status
    except EntcohError as exc:
        err.write(f"error: {exc}\n")
        return exc.exit_code
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
