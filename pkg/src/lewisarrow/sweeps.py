"""Semantic sweeps over bounded frame classes.

Validity on a class is checked on one frame per isomorphism class, which is
enough since forcing is invariant under relabelling.
"""
from __future__ import annotations

import time
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import algebra as alg
from .fixpoint import (
    FixpointProblem, catalog, collapse_equation, fixpoint_equation, uniqueness_instance,
)
from .formula import Atom, Disj, Formula, Impl, Lewis, atoms, fresh_atom, guarded, stex, to_text
from .frames import FrameBatch, order_data
from .kripke import SCHEME_CLASSES, Model
from .schemes import SCHEMES, atom_form, axiom_set
from .search import _map, filtered_batches


def scheme_class_mask(batch: FrameBatch, schemes: Iterable[str]) -> np.ndarray:
    """Frames lying in the registered class of every listed scheme."""
    keep = np.ones(len(batch), dtype=bool)
    for s in schemes:
        alts = SCHEME_CLASSES[s]
        if any(not alt for alt in alts):
            continue
        ok = np.zeros(len(batch), dtype=bool)
        for alt in alts:
            ok |= batch.satisfying(alt)
        keep &= ok
    return keep


@lru_cache(maxsize=4)
def representatives(max_worlds: int) -> tuple[FrameBatch, ...]:
    """One frame per isomorphism class, for every size up to ``max_worlds``."""
    return tuple(filtered_batches(lambda b: np.ones(len(b), bool), max_worlds, dedupe=True))


def _where(keep, max_worlds: int) -> list[FrameBatch]:
    """Representatives selected by an isomorphism-invariant batch mask."""
    out = []
    for fb in representatives(max_worlds):
        mask = keep(fb)
        if mask.any():
            out.append(fb.select(mask))
    return out


def _class(conditions: Sequence[str], max_worlds: int) -> list[FrameBatch]:
    conditions = list(conditions)
    return _where(lambda b: b.satisfying(conditions), max_worlds)


def _first_failure(batches: list[FrameBatch], phi: Formula) -> Optional[Model]:
    for batch in batches:
        fails, first = batch.refutations(phi)
        if fails.any():
            b = int(np.argmax(fails))
            return Model(batch.frame(b), batch.valuation(phi, int(first[b])))
    return None


# -- soundness of the registered classes ----------------------------------

def soundness_sweep(scheme: str, max_worlds: int = 4) -> list[dict]:
    """Atom-form validity on each registered class of ``scheme``."""
    if SCHEMES[scheme].family:
        raise ValueError("families are checked by fixpoint_suite")
    phi = atom_form(scheme)
    out = []
    for alt in SCHEME_CLASSES[scheme]:
        start = time.perf_counter()
        frames = _class(alt, max_worlds)
        bad = _first_failure(frames, phi)
        out.append({"scheme": scheme, "class": alt, "frames": sum(map(len, frames)),
                    "witness": bad, "elapsed": time.perf_counter() - start})
    return out


def spot_check_script(script, max_worlds: int = 4) -> dict:
    """Every line of an accepted script on the class of its axiom set."""
    schemes = sorted(axiom_set(script.axiom_set).schemes)
    frames = _where(lambda b: scheme_class_mask(b, schemes), max_worlds)
    failures = []
    for ln in script.lines:
        bad = _first_failure(frames, ln.formula)
        if bad is not None:
            failures.append((ln.index, bad))
    return {"frames": sum(map(len, frames)), "lines": len(script.lines), "failures": failures}


# -- the fixpoint suite -----------------------------------------------------

@dataclass
class SuiteResult:
    check: str
    conditions: tuple[str, ...]
    frames: int = 0
    instances: int = 0
    failures: list = field(default_factory=list)  # the first few, with frames
    failing: int = 0  # (instance, frame) pairs that fail
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failing == 0

    def line(self) -> str:
        cls = "+".join(self.conditions)
        status = "ok" if self.ok else f"{self.failing} failing"
        return f"{self.check:<12} {cls:<46} frames={self.frames:<6} instances={self.instances:<6} {status}"


class _Tables:
    """Values of catalog formulas over stacked frames, indexed ``[formula, frame, p, r]``.

    The frames may come from several orders as long as they have the same
    number of upsets; then the top element has the same index everywhere.
    """

    def __init__(self, frames: Sequence[FrameBatch], formulas: Sequence[Formula]):
        frames = list(frames)
        u = frames[0].od.u
        if any(fb.od.u != u or fb.od.top != u - 1 for fb in frames):
            raise ValueError("stacked batches need a common upset count")
        self.frames, self.od, self.top = frames, frames[0].od, u - 1
        self.F = np.concatenate([
            np.stack([fb.evaluate(f, ["p", "r"], fb.od.grid(2)).reshape(len(fb), u, u) for f in formulas])
            for fb in frames], axis=1).astype(np.int64)
        self.L = np.concatenate([fb.lewis for fb in frames]).astype(np.int64)
        self.owner = [(fb, k) for fb in frames for k in range(len(fb))]
        self.bidx = np.arange(len(self.owner))[None, :, None]

    def at(self, table: np.ndarray, r: np.ndarray) -> np.ndarray:
        """``table[f, b, p, r[f, b, p]]`` for a table shaped like ``F``."""
        return np.take_along_axis(table, r[..., None], axis=3)[..., 0]

    def lewis(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.L[self.bidx, x, y]


def _pair_checks(t: _Tables, i: int) -> dict[str, np.ndarray]:
    """For psi = catalog[i] against every chi: which frames fail each equation."""
    F, top = t.F, t.top
    psi = np.broadcast_to(F[i], F.shape)
    chi_top = F[:, :, :, top]                           # chi[T]
    boxed = t.lewis(np.full_like(chi_top, top), chi_top)
    jv = t.lewis(t.at(psi, boxed), chi_top)             # psi[[]chi[T]] => chi[T]
    js = t.lewis(np.broadcast_to(F[i][None, :, :, top], chi_top.shape), chi_top)

    def equation(theta):
        return t.lewis(t.at(psi, theta), t.at(F, theta)) != theta

    return {
        "JV": equation(jv).any(axis=2),
        "JS": equation(js).any(axis=2),
        "X": (jv != js).any(axis=2),
    }


def _unique_checks(t: _Tables, chis: Sequence[int], chunk: int = 8) -> np.ndarray:
    """For each chi: frames where the uniqueness instance fails."""
    chis = list(chis)
    if len(chis) > chunk:
        return np.concatenate([_unique_checks(t, chis[k:k + chunk], chunk) for k in range(0, len(chis), chunk)])
    od = t.od  # a single order, see the callers
    F = t.F[chis]
    m, B, u, _ = F.shape
    x = np.broadcast_to(np.arange(u)[None, None, None, :], F.shape)
    iff = od.meet[od.rpc[x, F], od.rpc[F, x]]
    G = t.lewis(np.full_like(iff.reshape(m, B, -1), od.top), iff.reshape(m, B, -1)).reshape(F.shape)
    r = np.arange(u)
    box_rq = t.L[:, od.top][:, od.meet[od.rpc[r[:, None], r[None, :]], od.rpc[r[None, :], r[:, None]]]]
    # meet(G[p, r], G[p, q]) <= box(r <-> q), for all p, r, q
    lhs = od.meet[G[:, :, :, :, None], G[:, :, :, None, :]]
    bad = od.meet[lhs, box_rq[None, :, None, :, :]] != lhs
    return bad.reshape(m, B, -1).any(axis=2)


KEEP_FAILURES = 20

FIXPOINT_CLASSES = {
    "JV": [("noetherian", "gathering")],
    "JS": [("supergathering",), ("noetherian", "semi_transitive", "transitive_sub")],
    "X": [("supergathering",)],
    "uniqueness": [("noetherian", "semi_transitive")],
}


def _suite_group(args) -> tuple[dict[str, int], list[tuple[str, Optional[int], int, int, int]]]:
    """Worker over batches with one upset count.

    Returns failure counts per check and up to ``KEEP_FAILURES`` sample
    (check, psi, chi, batch, frame) tuples per check.
    """
    parts, checks, max_connectives = args
    formulas = catalog(max_connectives)
    frames = [FrameBatch(order_data(up), rows) for up, rows in parts]
    counts = {c: 0 for c in checks}
    sample: list = []
    kept = {c: 0 for c in checks}

    def record(c, i, j, bi, b):
        if kept[c] < KEEP_FAILURES:
            kept[c] += 1
            sample.append((c, i, j, bi, b))

    if "uniqueness" in checks:
        guarded_ix = [j for j, f in enumerate(formulas) if guarded(f, "r")]
        for bi, fb in enumerate(frames):
            bad = _unique_checks(_Tables([fb], formulas), guarded_ix)
            counts["uniqueness"] += int(bad.sum())
            for k, b in zip(*np.nonzero(bad)):
                record("uniqueness", None, guarded_ix[k], bi, int(b))
    pair = [c for c in checks if c != "uniqueness"]
    if pair:
        t = _Tables(frames, formulas)
        # formulas with equal tables behave alike, so check one of each
        m = t.F.shape[0]
        flat, inverse = np.unique(t.F.reshape(m, -1), axis=0, return_inverse=True)
        inverse = inverse.ravel()
        members = [np.flatnonzero(inverse == a) for a in range(len(flat))]
        t.F = flat.reshape((len(flat),) + t.F.shape[1:])
        where = [(bi, k) for bi, fb in enumerate(frames) for k in range(len(fb))]
        for a in range(len(flat)):
            res = _pair_checks(t, a)
            for c in pair:
                for cj, b in zip(*np.nonzero(res[c])):
                    counts[c] += len(members[a]) * len(members[cj])
                    if kept[c] < KEEP_FAILURES:
                        record(c, int(members[a][0]), int(members[cj][0]), *where[b])
    return counts, sample


def _run_checks(frames: list[FrameBatch], check_names: Sequence[str], formulas, max_connectives: int,
                jobs: int, results: dict) -> None:
    """Run the table checks on ``frames`` and add counts and examples to ``results``."""
    groups: dict[int, list[FrameBatch]] = {}
    for fb in frames:
        groups.setdefault(fb.od.u, []).append(fb)
    keys = sorted(groups)
    tasks = [([(fb.od.up, fb.rows) for fb in groups[u]], tuple(check_names), max_connectives) for u in keys]
    for u, (counts, sample) in zip(keys, _map(_suite_group, tasks, jobs)):
        for c, k in counts.items():
            results[c].failing += k
        for c, i, j, bi, b in sample:
            res = results[c]
            if len(res.failures) >= KEEP_FAILURES:
                continue
            res.failures.append({
                "check": c, "psi": None if i is None else to_text(formulas[i]),
                "chi": to_text(formulas[j]), "frame": groups[u][bi].frame(b)})


def fixpoint_suite(max_worlds: int = 4, max_connectives: int = 2,
                   checks: Iterable[str] = ("JV", "JS", "X", "uniqueness"), jobs: int = 1,
                   classes: Optional[dict] = None) -> list[SuiteResult]:
    """Fixpoint equations, the collapse equation and uniqueness over the catalog.

    Values are combined through per-frame tables of the catalog formulas, so
    each (psi, chi) pair costs a few table lookups per frame.  Checks sharing
    a frame class share one pass over it.
    """
    formulas = catalog(max_connectives)
    m = len(formulas)
    n_guarded = sum(1 for f in formulas if guarded(f, "r"))
    checks = list(checks)
    classes = classes or FIXPOINT_CLASSES
    by_class: dict[tuple[str, ...], list[str]] = {}
    for check in checks:
        for cond in classes[check]:
            by_class.setdefault(cond, []).append(check)
    results: dict[tuple[str, tuple], SuiteResult] = {}
    for cond, group in by_class.items():
        start = time.perf_counter()
        frames = _class(cond, max_worlds)
        here = {c: SuiteResult(c, cond, sum(map(len, frames)), n_guarded if c == "uniqueness" else m * m)
                for c in group}
        _run_checks(frames, group, formulas, max_connectives, jobs, here)
        for c in group:
            here[c].elapsed = time.perf_counter() - start
            results[c, cond] = here[c]
    return [results[c, cond] for c in checks for cond in classes[c]]


def separation_hunt(max_worlds: int = 4, max_connectives: int = 2, jobs: int = 1) -> SuiteResult:
    """Look for a frame validating Wcirc on which some catalog JS equation fails.

    Finding none is reported as "exhausted" at this bound and proves nothing.
    """
    start = time.perf_counter()
    wcirc = atom_form("Wcirc")
    frames = _where(lambda b: b.validates(wcirc), max_worlds)
    formulas = catalog(max_connectives)
    res = SuiteResult("JS", ("validates Wcirc",), sum(map(len, frames)), len(formulas) ** 2)
    _run_checks(frames, ["JS"], formulas, max_connectives, jobs, {"JS": res})
    res.elapsed = time.perf_counter() - start
    return res


def literal_equation(check: str, psi: Formula, chi: Formula) -> Formula:
    """The formula whose validity the table route decides for one instance."""
    if check in ("JV", "JS"):
        return fixpoint_equation(FixpointProblem(psi, chi, "r", check))
    if check == "X":
        return collapse_equation(psi, chi, "r")
    if check == "uniqueness":
        return uniqueness_instance(chi, "r", "q")
    raise KeyError(check)


def table_versus_literal(check: str, conditions: Sequence[str], max_worlds: int = 3,
                         stride: int = 997, max_connectives: int = 2) -> dict:
    """Compare the table route with literal evaluation on a fixed sample.

    Runs on every frame up to ``max_worlds`` (not only the class), so the
    sample includes frames where the equations fail.
    """
    formulas = catalog(max_connectives)
    m = len(formulas)
    if check == "uniqueness":
        sample = [(None, j) for j, f in enumerate(formulas) if guarded(f, "r")][::max(1, stride // 50)]
    else:
        sample = [(k // m, k % m) for k in range(0, m * m, stride)]
    agree = disagree = failing = 0
    guarded_ix = [j for j, f in enumerate(formulas) if guarded(f, "r")]
    for batch in representatives(max_worlds):
        t = _Tables([batch], formulas)
        ucache = _unique_checks(t, guarded_ix) if check == "uniqueness" else None
        for i, j in sample:
            if check == "uniqueness":
                table = ucache[guarded_ix.index(j)]
                phi = literal_equation(check, None, formulas[j])
            else:
                table = _pair_checks(t, i)[check][j]
                phi = literal_equation(check, formulas[i], formulas[j])
            literal = batch.refutations(phi)[0]
            agree += int((table == literal).sum())
            disagree += int((table != literal).sum())
            failing += int(literal.sum())
    return {"check": check, "sample": len(sample), "agree": agree, "disagree": disagree,
            "failing_frames": failing}


# -- extension stability ------------------------------------------------------

def stex_image(phi: Formula) -> Formula:
    """``e -> stex_e(phi)`` for an atom ``e`` fresh for ``phi``."""
    e = fresh_atom(atoms(phi))
    return Impl(Atom(e), stex(phi, e))


def stex_cases() -> list[tuple[str, Formula, tuple[str, ...]]]:
    """(label, formula, frame class) triples for the stability sweep.

    Tr and Ka are checked on every frame; La and sample JS instances on the
    class where the scheme itself is sound.
    """
    cases = [("Tr", atom_form("Tr"), ()), ("Ka", atom_form("Ka"), ()),
             ("La", atom_form("La"), ("noetherian", "gathering"))]
    p, r = Atom("p"), Atom("r")
    for psi, chi in [(r, p), (Impl(r, p), r), (r, Impl(p, r)), (Lewis(p, r), Disj(r, p))]:
        eq = fixpoint_equation(FixpointProblem(psi, chi, "r", "JS"))
        cases.append((f"JS[{to_text(psi)}, {to_text(chi)}]", eq, ("supergathering",)))
    return cases


def stex_sweep(max_worlds: int = 3, cases=None) -> list[dict]:
    """Check the original and ``e -> stex_e(original)`` on each case's class."""
    out = []
    for label, phi, cond in cases if cases is not None else stex_cases():
        frames = _class(cond, max_worlds)
        image = stex_image(phi)
        out.append({"label": label, "class": cond, "frames": sum(map(len, frames)),
                    "original": _first_failure(frames, phi), "formula": image,
                    "witness": _first_failure(frames, image)})
    return out


# -- perturbing the appendix algebra -----------------------------------------

def lewis_cell_mutations(hae: alg.HAE) -> list[dict]:
    """Change each lewis cell to each other value; record which properties break.

    Each entry lists the broken items among CK, CT, CI, 4circa validity and
    the 44circa refutation.
    """
    f4 = atom_form("4circa")
    f44 = atom_form("44circa")
    out = []
    for a in range(hae.size):
        for b in range(hae.size):
            for v in range(hae.size):
                if v == hae.lewis[a, b]:
                    continue
                h = hae.copy()
                h.lewis[a, b] = v
                broken = [name for name, check in (("CK", alg.check_ck), ("CT", alg.check_ct),
                                                   ("CI", alg.check_ci)) if check(h)]
                if not alg.algebra_validates(h, f4):
                    broken.append("4circa")
                if alg.algebra_validates(h, f44):
                    broken.append("44circa")
                out.append({"cell": (a, b), "value": v, "broken": broken})
    return out
