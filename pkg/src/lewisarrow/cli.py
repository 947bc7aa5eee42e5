"""Command line interface.

Exit status: 0 on success, 1 when a check fails (or a search finds nothing),
2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import algebra as alg
from .fixpoint import FixpointProblem, fixpoint, fixpoint_equation
from .fixtures import read
from .formula import ParseError, normalize, stex, to_text
from .kernel import ScriptError
from .kripke import CONDITIONS, format_model, frame_condition, \
    frame_refutation, parse_model, truth_set

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _formula(text: str):
    from .search import resolve_target
    try:
        return resolve_target(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse formula {text!r}: {exc}") from None


def _names(text: Optional[str]) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


# -- subcommands -----------------------------------------------------------

def cmd_parse(args) -> int:
    phi = _formula(args.formula)
    print(to_text(phi))
    if args.normalize:
        print(to_text(normalize(phi)))
    if args.stex:
        print(to_text(stex(phi, args.stex)))
    return OK


def cmd_fixpoint(args) -> int:
    try:
        problem = FixpointProblem(_formula(args.psi), _formula(args.chi), args.var, args.kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(to_text(fixpoint(problem)))
    print(to_text(fixpoint_equation(problem)))
    return OK


def _load_model(path: str):
    return parse_model(read(path))


def cmd_check_model(args) -> int:
    model = _load_model(args.file)
    phi = _formula(args.formula)
    worlds = [args.world] if args.world else list(model.frame.worlds)
    for w in worlds:
        if w not in model.frame.worlds:
            raise UsageError(f"no world {w!r} in the model")
    holds = truth_set(model, phi)
    for w in worlds:
        print(f"{w}: {'forces' if w in holds else 'does not force'} {to_text(phi)}")
    return OK if all(w in holds for w in worlds) else FAILED


def cmd_check_frame(args) -> int:
    frame = _load_model(args.file).frame
    status = OK
    for c in _names(args.condition):
        if c not in CONDITIONS:
            raise UsageError(f"unknown condition {c!r}; known: {', '.join(CONDITIONS)}")
        res = frame_condition(frame, c)
        if res.holds:
            print(f"{c}: holds")
        else:
            print(f"{c}: fails at {' '.join(res.witness)}")
            status = FAILED
    for text in args.validates or []:
        phi = _formula(text)
        bad = frame_refutation(frame, phi)
        if bad is None:
            print(f"{to_text(phi)}: valid on the frame")
        else:
            valuation, world = bad
            print(f"{to_text(phi)}: refuted at {world}")
            print(format_model(frame, valuation), end="")
            status = FAILED
    return status


def cmd_algebra(args) -> int:
    from .search import EQUATION_NAMES, algebra_axioms
    hae = alg.load_mace4(read(args.file), check=False)
    rep = alg.verify_heyting(hae)
    print(f"Heyting algebra: {'ok' if rep.ok else 'violated: ' + '; '.join(rep.summary())}")
    status = OK if rep.ok else FAILED
    try:
        required = algebra_axioms(_names(args.axioms) or ["iA-"])
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for name in sorted(required):
        if name in EQUATION_NAMES:
            bad = alg.EQUATIONS[name](hae)
            print(f"{name}: " + ("holds" if not bad else f"fails at {bad[0]}"))
        else:
            val = alg.algebra_refutation(hae, _formula(name))
            bad = val is not None
            print(f"{name}: " + ("valid" if not bad else f"refuted at {_show(val)}"))
        status |= FAILED if bad else OK
    for name in _names(args.refute):
        val = alg.algebra_refutation(hae, _formula(name))
        print(f"{name}: " + ("not refuted" if val is None else f"refuted at {_show(val)}"))
        status |= FAILED if val is None else OK
    return status


def _show(valuation: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(valuation.items()))


def cmd_search(args) -> int:
    from .search import SearchSpec, search
    try:
        spec = SearchSpec(_formula(args.refute), frozenset(_names(args.require)), args.max, args.mode)
        report = search(spec, jobs=args.jobs)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0] if exc.args else exc)) from None
    print(report.summary())
    for n, counts in sorted(report.per_size.items()):
        print(f"  size {n}: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    if report.found:
        if args.mode == "frames":
            print(f"# refuted at {report.detail['world']}")
            print(format_model(report.witness.frame, report.witness.valuation), end="")
        else:
            print(f"% refuted at {_show(report.detail['valuation'])}")
            print(alg.format_mace4(report.witness), end="")
        return OK
    return FAILED


def cmd_prove(args) -> int:
    from .kernel import CATALOG, check_text, script_text, verify_catalog
    if args.catalog:
        status = OK
        for entry in verify_catalog(semantic=args.semantic):
            line = f"{entry.name:<22} {entry.verdict}"
            if entry.semantic is not None:
                sem = entry.semantic
                line += f"; {sem['frames']} frames, {len(sem['failures'])} failing lines"
                status |= FAILED if sem["failures"] else OK
            print(line)
            status |= FAILED if not entry.verdict else OK
        return status
    if not args.script:
        raise UsageError("give a script file or catalog name, or --catalog")
    if args.script in CATALOG:
        text = script_text(args.script)
    else:
        text = read(args.script)
    verdict = check_text(text)
    print(verdict)
    return OK if verdict else FAILED


def cmd_reproduce(args) -> int:
    from .repro import reproduce
    from .report import draw_figures, format_results

    def progress(res):
        if not args.quiet or not res.passed:
            print(format_results([res], quiet=True).rstrip() if not res.passed else
                  f"{res.check.id:<20} pass   {res.elapsed:8.2f}  {res.detail}", flush=True)
    results = reproduce(jobs=args.jobs, only=_names(args.only) or None, progress=progress)
    if not args.quiet:
        print()
        print(format_results(results), end="")
    if args.figures:
        for path in draw_figures(results, args.figures):
            if not args.quiet:
                print(f"wrote {path}")
    return OK if all(r.passed for r in results) else FAILED


# -- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lewisarrow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="parse and print a formula")
    s.add_argument("formula")
    s.add_argument("--normalize", action="store_true", help="also print the normal form")
    s.add_argument("--stex", metavar="ATOM", help="also print the stex translation for ATOM")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("fixpoint", help="explicit fixpoint of psi => chi in a variable")
    s.add_argument("--kind", default="jv", type=str.upper, choices=["JV", "JS"])
    s.add_argument("--psi", required=True)
    s.add_argument("--chi", required=True)
    s.add_argument("--var", default="r")
    s.set_defaults(func=cmd_fixpoint)

    s = sub.add_parser("check-model", help="evaluate a formula in a model file")
    s.add_argument("file")
    s.add_argument("formula")
    s.add_argument("--world")
    s.set_defaults(func=cmd_check_model)

    s = sub.add_parser("check-frame", help="frame conditions and frame validity")
    s.add_argument("file")
    s.add_argument("--condition", default="", help="comma separated condition names")
    s.add_argument("--validates", action="append", metavar="FORMULA")
    s.set_defaults(func=cmd_check_frame)

    s = sub.add_parser("algebra", help="algebra files")
    asub = s.add_subparsers(dest="action", required=True)
    v = asub.add_parser("verify", help="check laws, axioms and refutations")
    v.add_argument("file")
    v.add_argument("--axioms", default="", help="axiom sets or schemes that must hold")
    v.add_argument("--refute", default="", help="schemes or formulas that must fail")
    v.set_defaults(func=cmd_algebra)

    s = sub.add_parser("search", help="countermodel search")
    s.add_argument("--mode", choices=["frames", "algebras"], default="frames")
    s.add_argument("--refute", required=True, metavar="FORMULA|SCHEME")
    s.add_argument("--require", default="", help="comma separated conditions or axioms")
    s.add_argument("--max", type=int, default=4)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("prove", help="check a proof script")
    s.add_argument("script", nargs="?")
    s.add_argument("--catalog", action="store_true", help="check every bundled script")
    s.add_argument("--semantic", action="store_true", help="with --catalog, also check lines on frames")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("reproduce", help="run the reproduction suite")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--quiet", action="store_true", help="print failures only")
    s.add_argument("--only", help="comma separated check ids")
    s.add_argument("--figures", metavar="DIR", help="also draw figures into DIR (needs matplotlib)")
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, ValueError, ScriptError) as exc:
        # ValueError covers parse and format errors of every input kind
        print(f"error: {exc}", file=sys.stderr)
        return USAGE

if __name__ == "__main__":
    sys.exit(main())
