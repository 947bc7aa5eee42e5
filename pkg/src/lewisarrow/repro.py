"""The reproduction suite: every desk-scale claim as a named, timed check."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import algebra as alg
from .fixpoint import FixpointProblem, fixpoint_equation
from .fixtures import fixture
from .formula import Atom, Impl, parse, stex
from .ipc import KripkeOracle, ipc_valid, lewis_free_corpus, random_formula
from .kernel import CATALOG, check_proof, dependents, load_script, mutations
from .kripke import frame_condition, frame_validates, load_model, satisfies
from .schemes import atom_form, match_scheme
from .search import SearchSpec, correspondence_sweep, find_algebra_countermodel, find_frame_countermodel


@dataclass
class Outcome:
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)


@dataclass
class ReproCheck:
    id: str
    description: str
    procedure: str
    expected: str
    run: Callable[[int], Outcome]
    limit: Optional[float] = None  # seconds
    criterion: Optional[int] = None


@dataclass
class CheckResult:
    check: ReproCheck
    outcome: Outcome
    elapsed: float

    @property
    def passed(self) -> bool:
        within = self.check.limit is None or self.elapsed <= self.check.limit
        return self.outcome.passed and within

    @property
    def detail(self) -> str:
        d = self.outcome.detail
        if self.outcome.passed and not self.passed:
            d = f"over time limit {self.check.limit:g}s; {d}"
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.check.id:<20} {self.elapsed:8.2f}s  {self.detail}"


# -- criterion 1: the six element algebra ----------------------------------

def appendix_algebra() -> alg.HAE:
    return alg.load_mace4_file(fixture("mace4-6elem.alg"))


def check_mace4(jobs: int = 1) -> Outcome:
    text = fixture("mace4-6elem.alg").read_text()
    n, tables, _ = alg.parse_mace4_tables(text)
    h = alg.load_mace4(text)
    exact = (h.meet.ravel().tolist() == tables["^"] and h.rpc.ravel().tolist() == tables["*"]
             and h.lewis.ravel().tolist() == tables["+"])
    again = alg.load_mace4(alg.format_mace4(h))
    heyting = alg.verify_heyting(h)
    eqs = alg.check_equations(h, ("CK", "CT", "CI"))
    four = atom_form("4circa")
    vals4 = alg.all_valuations(h, ["p", "q"])
    four_ok = bool((alg.eval_many(h, vals4, four) == h.top).all())
    goal = {"p": 2, "q": 4, "s": 3}
    first44 = alg.algebra_refutation(h, atom_form("44circa"))
    at_goal = alg.eval_formula(h, goal, atom_form("44circa"))
    di = alg.eval_formula(h, {"p": 4, "q": 2, "s": 3}, atom_form("Di"))
    parts = {
        "size 6": n == 6,
        "tables bit-exact": exact,
        "dump round-trips": alg.is_isomorphic(h, again),
        "Heyting": heyting.ok,
        "CK/CT/CI on 216 triples": eqs.ok,
        "4circa on 36 valuations": four_ok and len(vals4["p"]) == 36,
        "44circa fails at p=2,q=4,s=3": at_goal != h.top and first44 == goal,
        "Di fails at p=4,q=2,s=3": di != h.top,
    }
    bad = [k for k, v in parts.items() if not v]
    return Outcome(not bad, "all parts hold" if not bad else "failed: " + ", ".join(bad), parts)


# -- criterion 2: correspondence sweeps -----------------------------------

CORRESPONDENCES = [
    ("Box", "brilliant"), ("4box", "semi_transitive"), ("4sub", "gathering"), ("S", "strong"),
    ("P", "transitive_sub"), ("4circa", "gather_transitive"), ("W", "supergathering"),
]


def check_correspondence(jobs: int = 1, n: int = 4) -> Outcome:
    rows = [correspondence_sweep(s, c, n, jobs) for s, c in CORRESPONDENCES]
    bad = [r for r in rows if r["discrepancies"] or r["unconfirmed"]]
    detail = ", ".join(f"{r['scheme']}:{len(r['discrepancies'])}" for r in rows)
    return Outcome(not bad, f"{rows[0]['frames']} frames each; discrepancies {detail}", {"rows": rows})


# -- criterion 3: countermodels ----------------------------------------------

def _iso_to_fixture(model, name: str) -> bool:
    """Same frame and same truth set of ``p`` up to renaming worlds."""
    ref = load_model(fixture(name))
    return _frame_code(model.frame, model.valuation.get("p", ())) == _frame_code(ref.frame, ref.valuation.get("p", ()))


def _frame_code(frame, marked) -> tuple:
    n = frame.n
    best = None
    for perm in itertools.permutations(range(n)):
        name = {w: perm[i] for i, w in enumerate(frame.worlds)}
        key = (tuple(sorted((name[a], name[b]) for a, b in frame.leq)),
               tuple(sorted((name[a], name[b]) for a, b in frame.sub)),
               tuple(sorted(name[w] for w in marked)))
        best = key if best is None or key < best else best
    return best


def check_countermodel_a(jobs: int = 1) -> Outcome:
    spec = SearchSpec("p => []p", {"noetherian", "transitive_sub", "discrete"}, 3)
    rep = find_frame_countermodel(spec, jobs)
    if not rep.found:
        return Outcome(False, rep.summary())
    fr = rep.witness.frame
    ok = (fr.n == 3 and satisfies(fr, ["noetherian", "transitive_sub", "discrete"])
          and frame_validates(fr, atom_form("P")) and frame_validates(fr, atom_form("Lbox")))
    same = _iso_to_fixture(rep.witness, "slimmesmurf.frame")
    return Outcome(ok and same, f"{rep.summary()}; validates P and Lbox: {ok}; matches fixture: {same}",
                   {"report": rep})


def check_countermodel_b(jobs: int = 1) -> Outcome:
    spec = SearchSpec("(p => F) -> [](p => F)", {"supergathering", "noetherian"}, 4)
    rep = find_frame_countermodel(spec, jobs)
    if not rep.found:
        return Outcome(False, rep.summary())
    fr = rep.witness.frame
    small = all(rep.per_size[k]["evaluated"] > 0 for k in (1, 2, 3))
    ok = fr.n == 4 and frame_condition(fr, "supergathering").holds
    same = _iso_to_fixture(rep.witness, "querusmurf.frame")
    return Outcome(ok and same and small, f"{rep.summary()}; matches fixture: {same}", {"report": rep})


def check_countermodel_c(jobs: int = 1) -> Outcome:
    spec = SearchSpec("([]F => F) -> []F", {"noetherian", "gathering"}, 3)
    rep = find_frame_countermodel(spec, jobs)
    ok = rep.found and rep.size <= 3
    return Outcome(ok, rep.summary(), {"report": rep})


# -- criterion 4: fixpoints ---------------------------------------------------

def check_fixpoints(jobs: int = 1) -> Outcome:
    from .sweeps import fixpoint_suite
    rows = fixpoint_suite(4, jobs=jobs)
    bad = [r for r in rows if not r.ok]
    detail = "; ".join(f"{r.check} on {'+'.join(r.conditions)}: {r.failing}" for r in rows)
    return Outcome(not bad, detail, {"rows": rows})


# -- criterion 5: the proof catalog ------------------------------------------

def check_catalog(jobs: int = 1) -> Outcome:
    accepted = {}
    muts = slipped = 0
    for name in CATALOG:
        script = load_script(name)
        accepted[name] = bool(check_proof(script))
        for k, _, m in mutations(script):
            muts += 1
            v = check_proof(m)
            if v or (v.line != k and v.line not in dependents(script, k)):
                slipped += 1
    ok = all(accepted.values()) and slipped == 0
    n_ok = sum(accepted.values())
    return Outcome(ok, f"{n_ok}/{len(CATALOG)} accepted; {muts} mutations, {slipped} not caught at their line",
                   {"accepted": accepted})


def check_catalog_semantics(jobs: int = 1) -> Outcome:
    from .sweeps import spot_check_script
    bad = []
    for name in CATALOG:
        res = spot_check_script(load_script(name), 4)
        if res["failures"] or not res["frames"]:
            bad.append(name)
    return Outcome(not bad, "every line valid on its class" if not bad else "failing: " + ", ".join(bad))


# -- criterion 6: extension stability -----------------------------------------

def check_stability(jobs: int = 1) -> Outcome:
    from .sweeps import stex_sweep
    p, r = Atom("p"), Atom("r")
    e = "e"
    tr = stex(atom_form("Tr"), e)
    ka = stex(atom_form("Ka"), e)
    la = stex(atom_form("La"), e)
    js = stex(fixpoint_equation(FixpointProblem(Impl(r, p), r, "r", "JS")), e)
    parts = {
        "Tr exactly": match_scheme(tr, "Tr", normalized=False) is not None,
        "Ka after rewriting": match_scheme(ka, "Ka") is not None,
        "La after rewriting": match_scheme(la, "La") is not None,
        "JS": match_scheme(js, "JS") is not None,
    }
    sweep = stex_sweep(3)
    parts["e -> stex valid"] = all(x["witness"] is None and x["original"] is None for x in sweep)
    bad = [k for k, v in parts.items() if not v]
    return Outcome(not bad, "all parts hold" if not bad else "failed: " + ", ".join(bad), parts)


# -- criterion 7: IPC -------------------------------------------------------

CURATED = [
    ("p -> p", True),
    ("((p -> q) -> p) -> p", False),
    ("~~p -> p", False),
    ("p | ~p", False),
    ("~~(p | ~p)", True),
    ("~~(((p -> q) -> p) -> p)", True),
    ("~~(~~p -> p)", True),
    ("p -> ~~p", True),
    ("~~~p -> ~p", True),
    ("(p -> q) | (q -> p)", False),
    ("~(p & q) -> (~p | ~q)", False),
    ("(~p | ~q) -> ~(p & q)", True),
    ("(p -> q) -> (~q -> ~p)", True),
    ("((p | q) -> s) <-> ((p -> s) & (q -> s))", True),
]


def check_ipc(jobs: int = 1) -> Outcome:
    curated_bad = [f for f, want in CURATED if ipc_valid(parse(f)) != want]
    corpus = lewis_free_corpus(3)
    oracle = KripkeOracle(["p", "q"], 5)
    disagree = [f for f in corpus if ipc_valid(f) != (oracle.refute(f) is None)]
    rng = random.Random(7)
    sample = [random_formula(rng, rng.randint(4, 6)) for _ in range(500)]
    disagree += [f for f in sample if ipc_valid(f) != (oracle.refute(f) is None)]
    ok = not curated_bad and not disagree
    return Outcome(ok, f"{len(CURATED)} curated ({len(curated_bad)} wrong); {len(corpus)} enumerated "
                       f"+ {len(sample)} sampled, {len(disagree)} disagreements",
                   {"curated_wrong": curated_bad, "disagree": disagree})


# -- further claims ----------------------------------------------------------

def check_algebra_minimality(jobs: int = 1) -> Outcome:
    rep = find_algebra_countermodel(SearchSpec("44circa", {"iA-", "4circa"}, 6, mode="algebras"))
    iso = rep.found and alg.is_isomorphic(rep.witness, appendix_algebra())
    ok = rep.found and rep.size == 6 and iso
    return Outcome(ok, f"{rep.summary()}; isomorphic to the bundled algebra: {iso}", {"report": rep})


def check_algebra_tr(jobs: int = 1) -> Outcome:
    rep = find_algebra_countermodel(SearchSpec("Tr", {"iA-"}, 4, mode="algebras"))
    return Outcome(not rep.found, rep.summary())


def check_scheme_soundness(jobs: int = 1) -> Outcome:
    from .sweeps import soundness_sweep
    from .kripke import SCHEME_CLASSES
    from .schemes import SCHEMES
    bad = []
    total = 0
    for s in SCHEME_CLASSES:
        if SCHEMES[s].family:
            continue
        for row in soundness_sweep(s, 4):
            total += 1
            if row["witness"] is not None:
                bad.append(f"{s} on {'+'.join(row['class']) or 'all'}")
    return Outcome(not bad, f"{total} scheme/class pairs, {len(bad)} failing", {"failing": bad})


def check_fixture_frames(jobs: int = 1) -> Outcome:
    q = load_model(fixture("querusmurf.frame"))
    s = load_model(fixture("slimmesmurf.frame"))
    from .kripke import forces
    ok = (frame_condition(q.frame, "supergathering").holds
          and not forces(q, "a", parse("(p => F) -> [](p => F)"))
          and not forces(s, "a", parse("p => []p")))
    return Outcome(ok, "fixtures refute their formulas at a; querusmurf is supergathering")


def check_separation_hunt(jobs: int = 1) -> Outcome:
    from .sweeps import separation_hunt
    res = separation_hunt(4, jobs=jobs)
    word = "exhausted" if res.ok else "found"
    return Outcome(True, f"{word}: {res.frames} frames validating Wcirc, {res.instances} JS instances",
                   {"result": res})


CHECKS = [
    ReproCheck("mace4-fixture", "six element algebra: Heyting laws, CK/CT/CI, 4circa, 44circa and Di",
               "check_mace4()", "bit-exact load, all laws, failures at the stated valuations",
               check_mace4, 1.0, 1),
    ReproCheck("correspondence", "seven scheme/condition correspondences on frames up to 4 worlds",
               "correspondence_sweep(s, c, 4)", "no discrepancies", check_correspondence, 600.0, 2),
    ReproCheck("countermodel-a", "p => []p on a discrete noetherian transitive frame",
               "find_frame_countermodel(p => []p, ..., 3)", "3-world frame validating P and Lbox",
               check_countermodel_a, 5.0, 3),
    ReproCheck("countermodel-b", "(p => F) -> [](p => F) on a supergathering frame",
               "find_frame_countermodel(..., {supergathering, noetherian}, 4)", "4-world frame",
               check_countermodel_b, 5.0, 3),
    ReproCheck("countermodel-c", "([]F => F) -> []F on a noetherian gathering frame",
               "find_frame_countermodel(..., {noetherian, gathering}, 3)", "found within 3 worlds",
               check_countermodel_c, 5.0, 3),
    ReproCheck("fixpoints", "JV, JS, collapse and uniqueness over the formula catalog",
               "fixpoint_suite(4)", "zero failures", check_fixpoints, None, 4),
    ReproCheck("proof-catalog", "bundled derivations and their single-token mutations",
               "check_proof on each script and mutation", "all accepted, all mutations rejected",
               check_catalog, None, 5),
    ReproCheck("stability", "stex images of Tr, Ka, La and JS", "match_scheme and stex_sweep(3)",
               "matches and validity", check_stability, None, 6),
    ReproCheck("ipc", "G4ip against the curated list and the Kripke oracle", "check_ipc()",
               "no disagreement", check_ipc, 60.0, 7),
    ReproCheck("catalog-semantics", "every script line on the frames of its axiom set",
               "spot_check_script(s, 4)", "no failing line", check_catalog_semantics),
    ReproCheck("scheme-soundness", "each scheme on its registered frame classes",
               "soundness_sweep(s, 4)", "no failures", check_scheme_soundness),
    ReproCheck("algebra-minimality", "smallest algebra refuting 44circa over iA- plus 4circa",
               "find_algebra_countermodel(44circa, 6)", "found at size 6 only, isomorphic to fixture",
               check_algebra_minimality),
    ReproCheck("algebra-tr", "Tr has no algebraic countermodel", "find_algebra_countermodel(Tr, 4)",
               "exhausted", check_algebra_tr),
    ReproCheck("fixture-frames", "bundled frames refute their formulas", "forces on fixtures",
               "refuted at a", check_fixture_frames),
    ReproCheck("js-wcirc-hunt", "frames validating Wcirc against catalog JS equations",
               "separation_hunt(4)", "reported, not judged", check_separation_hunt),
]


def run_check(check: ReproCheck, jobs: int = 1) -> CheckResult:
    start = time.perf_counter()
    try:
        outcome = check.run(jobs)
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        outcome = Outcome(False, f"error: {type(exc).__name__}: {exc}")
    return CheckResult(check, outcome, time.perf_counter() - start)


def reproduce(jobs: int = 1, only: Optional[list[str]] = None, progress=None) -> list[CheckResult]:
    out = []
    for check in CHECKS:
        if only and check.id not in only:
            continue
        res = run_check(check, jobs)
        if progress:
            progress(res)
        out.append(res)
    return out
