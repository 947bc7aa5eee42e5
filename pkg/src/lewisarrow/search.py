"""Exhaustive countermodel search over small frames and algebras."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from . import algebra as alg
from .formula import Formula, as_formula, parse, to_text
from .frames import FRAME_CAP, FrameBatch, batches, order_data, sub_relations
from .kripke import CONDITIONS, Frame, Model, forces, frame_condition
from .orders import labeled_posets, posets_up_to_iso
from .schemes import SCHEMES, atom_form, axiom_set, BASES

ALGEBRA_CAP = 6


def resolve_target(target: Union[str, Formula]) -> Formula:
    """A formula, formula text, or scheme name (read in atom form)."""
    if isinstance(target, Formula):
        return target
    if target in SCHEMES:
        return atom_form(target)
    return parse(target)


@dataclass
class SearchSpec:
    target: Union[str, Formula]
    constraints: frozenset = frozenset()
    max_size: int = 4
    mode: str = "frames"

    def __post_init__(self):
        self.formula = resolve_target(self.target)
        self.constraints = frozenset(self.constraints)
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")
        if self.mode not in ("frames", "algebras"):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.mode == "frames":
            unknown = self.constraints - set(CONDITIONS)
            if unknown:
                raise KeyError(f"unknown frame conditions {sorted(unknown)}")
        else:
            self.constraints = algebra_axioms(self.constraints)


@dataclass
class SearchReport:
    outcome: str  # "found" | "exhausted"
    witness: object = None
    size: Optional[int] = None
    detail: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    per_size: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def summary(self) -> str:
        total = ", ".join(f"{k}={v}" for k, v in self.counts.items())
        if self.found:
            return f"found at size {self.size} ({total}; {self.elapsed:.2f}s)"
        return f"exhausted ({total}; {self.elapsed:.2f}s)"


# -- frames ----------------------------------------------------------------

def _scan_order(args) -> tuple[int, dict, Optional[tuple]]:
    """Scan every frame over one order; stop at the first refutation."""
    n, oi, target_text, constraints = args
    phi = parse(target_text)
    up = labeled_posets(n)[oi]
    od = order_data(up)
    counts = {"enumerated": 0, "pruned": 0, "evaluated": 0}
    if "discrete" in constraints and not od.discrete:
        return oi, counts, None  # whole order skipped, nothing enumerated
    for rows in sub_relations(od):
        batch = FrameBatch(od, rows)
        counts["enumerated"] += len(batch)
        keep = batch.satisfying(constraints)
        counts["pruned"] += int((~keep).sum())
        if not keep.any():
            continue
        sel = batch.select(keep)
        counts["evaluated"] += len(sel)
        fails, first = sel.refutations(phi)
        if fails.any():
            b = int(np.argmax(fails))
            # frames after the hit in this chunk were neither pruned nor tested
            idx = np.flatnonzero(keep)[b]
            counts["enumerated"] -= int(len(batch) - idx - 1)
            counts["pruned"] -= int((~keep[idx + 1:]).sum())
            counts["evaluated"] -= len(sel) - b - 1
            return oi, counts, (tuple(int(x) for x in sel.rows[b]), int(first[b]))
    return oi, counts, None


def _map(func, tasks: Sequence, jobs: int) -> Iterator:
    if jobs <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield func(t)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(func, t) for t in tasks]
        try:
            for fut in futures:
                yield fut.result()
        finally:
            for fut in futures:
                fut.cancel()


def _add(total: dict, part: dict) -> None:
    for k, v in part.items():
        total[k] = total.get(k, 0) + v


def find_frame_countermodel(spec: SearchSpec, jobs: int = 1) -> SearchReport:
    """First frame, in enumeration order, on which the target fails somewhere.

    The witness is rebuilt as a :class:`Model` and the failure re-checked
    with the scalar forcing relation.
    """
    if spec.mode != "frames":
        raise ValueError("spec.mode must be 'frames'")
    if spec.max_size > FRAME_CAP:
        raise ValueError(f"frame search is capped at {FRAME_CAP} worlds")
    start = time.perf_counter()
    phi = spec.formula
    text = to_text(phi)
    constraints = tuple(sorted(spec.constraints))
    total: dict = {"enumerated": 0, "pruned": 0, "evaluated": 0}
    per_size: dict = {}
    for n in range(1, spec.max_size + 1):
        tasks = [(n, oi, text, constraints) for oi in range(len(labeled_posets(n)))]
        size_counts: dict = {"enumerated": 0, "pruned": 0, "evaluated": 0}
        hit = None
        for oi, counts, found in _map(_scan_order, tasks, jobs):
            _add(size_counts, counts)
            if found is not None:
                hit = (oi, found)
                break
        per_size[n] = size_counts
        _add(total, size_counts)
        if hit is not None:
            oi, (rows, v) = hit
            od = order_data(labeled_posets(n)[oi])
            batch = FrameBatch(od, np.array([rows]))
            frame = batch.frame(0)
            valuation = batch.valuation(phi, v)
            model = Model(frame, valuation)
            bad = [w for w in frame.worlds if not forces(model, w, phi)]
            if not bad:
                raise AssertionError("search witness does not re-verify")
            return SearchReport("found", model, n, {"world": bad[0], "failing_worlds": bad},
                                total, per_size, time.perf_counter() - start)
    return SearchReport("exhausted", None, None, {}, total, per_size, time.perf_counter() - start)


def correspondence_sweep(scheme: str, condition: str, n: int, jobs: int = 1) -> dict:
    """Over every frame with at most ``n`` worlds: frame validity of the
    scheme's atom form against the condition.  Discrepancies are re-checked
    with the scalar evaluators before being reported."""
    from .kripke import frame_validates

    phi = resolve_target(scheme)
    if condition not in CONDITIONS:
        raise KeyError(f"unknown frame condition {condition!r}")
    start = time.perf_counter()
    tasks = [(m, oi, to_text(phi), condition) for m in range(1, n + 1) for oi in range(len(labeled_posets(m)))]
    frames = valid = holds = 0
    discrepancies: list[Frame] = []
    for f, v, h, bad in _map(_sweep_order, tasks, jobs):
        frames += f
        valid += v
        holds += h
        discrepancies.extend(bad)
    confirmed = [fr for fr in discrepancies
                 if frame_validates(fr, phi) != frame_condition(fr, condition).holds]
    return {
        "scheme": scheme, "condition": condition, "max_worlds": n, "frames": frames,
        "valid": valid, "condition_holds": holds, "discrepancies": confirmed,
        "unconfirmed": len(discrepancies) - len(confirmed), "elapsed": time.perf_counter() - start,
    }


def _sweep_order(args):
    n, oi, text, condition = args
    phi = parse(text)
    od = order_data(labeled_posets(n)[oi])
    frames = valid = holds = 0
    bad = []
    for rows in sub_relations(od):
        batch = FrameBatch(od, rows)
        v = batch.validates(phi)
        h = batch.condition(condition)
        frames += len(batch)
        valid += int(v.sum())
        holds += int(h.sum())
        for b in np.flatnonzero(v != h):
            bad.append(batch.frame(int(b)))
    return frames, valid, holds, bad


def class_batches(conditions: Iterable[str], max_worlds: int, dedupe: bool = False) -> Iterator[FrameBatch]:
    """Batches holding exactly the frames (at most ``max_worlds``) meeting the conditions.

    With ``dedupe`` only the first frame of each isomorphism class is kept.
    """
    conditions = list(conditions)
    return filtered_batches(lambda b: b.satisfying(conditions), max_worlds, dedupe,
                            discrete_only="discrete" in conditions)


def filtered_batches(keep: Callable[[FrameBatch], np.ndarray], max_worlds: int, dedupe: bool = False,
                     discrete_only: bool = False,
                     after: Optional[Callable[[FrameBatch], np.ndarray]] = None) -> Iterator[FrameBatch]:
    """Batches of the frames selected by ``keep``, optionally one per isomorphism class.

    ``after`` is an isomorphism-invariant filter applied once duplicates are gone.
    """
    for n in range(1, max_worlds + 1):
        seen: set[int] = set()
        for _, batch in batches(n, discrete_only=discrete_only):
            mask = keep(batch)
            if not mask.any():
                continue
            sel = batch.select(mask)
            if dedupe:
                fresh = np.zeros(len(sel), dtype=bool)
                for i, c in enumerate(sel.canonical_codes().tolist()):
                    if c not in seen:
                        seen.add(c)
                        fresh[i] = True
                if not fresh.any():
                    continue
                sel = sel.select(fresh)
            if after is not None:
                mask = after(sel)
                if not mask.any():
                    continue
                sel = sel.select(mask)
            yield sel


def class_validates(phi: Formula, conditions: Iterable[str], max_worlds: int) -> tuple[int, Optional[Model]]:
    """Count frames in the class and return a refuting model if one exists."""
    count = 0
    for batch in class_batches(conditions, max_worlds):
        count += len(batch)
        fails, first = batch.refutations(phi)
        if fails.any():
            b = int(np.argmax(fails))
            return count, Model(batch.frame(b), batch.valuation(phi, int(first[b])))
    return count, None


# -- algebras --------------------------------------------------------------

EQUATION_NAMES = ("CK", "CT", "CI", "CD")


def algebra_axioms(names: Iterable[str]) -> frozenset[str]:
    """Map scheme and axiom-set names to algebra constraints.

    Tr, Ka and Di become the equations CT, CK and CD; every axiom set
    contributes CI because it is closed under the Na rule.  Other schemes
    are kept by name and checked through atom-form validity.
    """
    out: set[str] = set()
    for name in names:
        if name in EQUATION_NAMES:
            out.add(name)
            continue
        if name in BASES or "+" in name:
            schemes = axiom_set(name).schemes
            out.add("CI")
        elif name in SCHEMES:
            schemes = {name}
        else:
            raise KeyError(f"unknown algebra axiom {name!r}")
        for s in schemes:
            out.add({"Tr": "CT", "Ka": "CK", "Di": "CD"}.get(s, s))
    return frozenset(out)


@dataclass
class Lattice:
    n: int
    order: np.ndarray
    meet: np.ndarray
    join: np.ndarray
    rpc: np.ndarray


def bounded_lattices(n: int, distributive: bool = True) -> Iterator[Lattice]:
    """Lattices on ``0..n-1`` with bottom 0 and top 1, one per isomorphism class."""
    if n == 1:
        z = np.zeros((1, 1), dtype=np.int64)
        yield Lattice(1, np.ones((1, 1), dtype=bool), z, z, z)
        return
    m = n - 2
    for mid in posets_up_to_iso(m):
        order = np.zeros((n, n), dtype=bool)
        order[0, :] = True
        order[:, 1] = True
        for i in range(m):
            for j in range(m):
                if mid[i] >> j & 1:
                    order[i + 2, j + 2] = True
        lat = _lattice(order, distributive)
        if lat is not None:
            yield lat


def _lattice(order: np.ndarray, distributive: bool) -> Optional[Lattice]:
    n = order.shape[0]
    meet = np.zeros((n, n), dtype=np.int64)
    join = np.zeros((n, n), dtype=np.int64)
    for a, b in itertools.product(range(n), repeat=2):
        lows = [c for c in range(n) if order[c, a] and order[c, b]]
        g = [c for c in lows if all(order[d, c] for d in lows)]
        ups = [c for c in range(n) if order[a, c] and order[b, c]]
        lub = [c for c in ups if all(order[c, d] for d in ups)]
        if len(g) != 1 or len(lub) != 1:
            return None
        meet[a, b], join[a, b] = g[0], lub[0]
    if distributive:
        x, y, z = np.meshgrid(*[np.arange(n)] * 3, indexing="ij")
        if (meet[x, join[y, z]] != join[meet[x, y], meet[x, z]]).any():
            return None
    rpc = np.zeros((n, n), dtype=np.int64)
    for a, b in itertools.product(range(n), repeat=2):
        cands = [c for c in range(n) if order[meet[c, a], b]]
        best = [c for c in cands if all(order[d, c] for d in cands)]
        if len(best) != 1:
            return None
        rpc[a, b] = best[0]
    return Lattice(n, order, meet, join, rpc)


def _candidate_rows(lat: Lattice, a: int, axioms: frozenset[str]) -> np.ndarray:
    """All possible rows ``b -> (a => b)`` meeting the single-row constraints."""
    n = lat.n
    top = 1 if n > 1 else 0
    fixed: dict[int, int] = {}
    if "CK" in axioms and "CI" in axioms:
        # a => c is above a => a = top whenever a <= c
        fixed = {c: top for c in range(n) if lat.order[a, c]}
    elif "CI" in axioms:
        fixed = {a: top}
    free = [c for c in range(n) if c not in fixed]
    rows = np.zeros((n ** len(free), n), dtype=np.int64)
    for c, v in fixed.items():
        rows[:, c] = v
    if free:
        grid = np.meshgrid(*[np.arange(n)] * len(free), indexing="ij")
        for c, g in zip(free, grid):
            rows[:, c] = g.ravel()
    keep = np.ones(len(rows), dtype=bool)
    if "CK" in axioms:
        for b, c in itertools.product(range(n), repeat=2):
            keep &= lat.meet[rows[:, b], rows[:, c]] == rows[:, lat.meet[b, c]]
    if "CI" in axioms:
        keep &= rows[:, a] == top
    if "4circa" in axioms:
        # (a => b) <= a => (a => b)
        for b in range(n):
            fb = rows[:, b]
            keep &= lat.order[fb, rows[np.arange(len(rows)), fb]]
    if "CT" in axioms:
        # the triples (a, a, c)
        for c in range(n):
            keep &= lat.order[lat.meet[rows[:, a], rows[:, c]], rows[:, c]]
    return rows[keep]


def _ct_compat(lat: Lattice, a: int, ra: np.ndarray, b: int, rb: np.ndarray) -> np.ndarray:
    """compat[i, j]: rows ra[i] (for a) and rb[j] (for b) satisfy CT on (a, b, c) and (b, a, c)."""
    m, o = lat.meet, lat.order
    ab = m[ra[:, b][:, None, None], rb[None, :, :]]          # (a=>b) & (b=>c)
    ok1 = o[ab, np.broadcast_to(ra[:, None, :], ab.shape)].all(axis=2)
    ba = m[rb[:, a][None, :, None], ra[:, None, :]]          # (b=>a) & (a=>c)
    ok2 = o[ba, np.broadcast_to(rb[None, :, :], ba.shape)].all(axis=2)
    return ok1 & ok2


def enumerate_algebras(n: int, axioms: Iterable[str] = ("CK", "CT", "CI")) -> Iterator[alg.HAE]:
    """Every expansion of each distributive lattice of size ``n`` (up to lattice
    isomorphism) by a Lewis table meeting the axioms.

    Single-row constraints (CK, CI, 4circa) filter candidate rows first; CT
    couples pairs of rows and is propagated during backtracking.  Schemes
    without a dedicated filter are checked by atom-form validity at the end.
    """
    if n > ALGEBRA_CAP:
        raise ValueError(f"algebra enumeration is capped at {ALGEBRA_CAP} elements")
    axioms = algebra_axioms(axioms)
    if n > 3 and "CK" not in axioms:
        raise ValueError("enumeration above 3 elements needs CK to constrain the rows")
    late = [s for s in axioms if s not in EQUATION_NAMES and s != "4circa"]
    late_forms = [atom_form(s) for s in sorted(late)]
    for lat in bounded_lattices(n):
        rows = [_candidate_rows(lat, a, axioms) for a in range(n)]
        if any(len(r) == 0 for r in rows):
            continue
        compat = {}
        if "CT" in axioms:
            for a, b in itertools.combinations(range(n), 2):
                compat[a, b] = _ct_compat(lat, a, rows[a], b, rows[b])
        for choice in _combine(rows, compat, n):
            lewis = np.stack([rows[a][i] for a, i in enumerate(choice)])
            hae = alg.HAE(n, lat.meet, lat.join, lat.rpc, lewis, bot=0, top=1 if n > 1 else 0)
            if "CD" in axioms and alg.check_cd(hae):
                continue
            if any(not alg.algebra_validates(hae, f) for f in late_forms):
                continue
            yield hae


def _combine(rows: list[np.ndarray], compat: dict, n: int) -> Iterator[tuple[int, ...]]:
    """Backtracking over row choices, pruning by pairwise compatibility."""
    allowed = [np.ones(len(r), dtype=bool) for r in rows]

    def go(a: int, chosen: list[int], allowed: list[np.ndarray]):
        if a == n:
            yield tuple(chosen)
            return
        for i in np.flatnonzero(allowed[a]):
            nxt = allowed
            if compat:
                nxt = list(allowed)
                dead = False
                for b in range(a + 1, n):
                    nxt[b] = allowed[b] & compat[a, b][i]
                    if not nxt[b].any():
                        dead = True
                        break
                if dead:
                    continue
            chosen.append(int(i))
            yield from go(a + 1, chosen, nxt)
            chosen.pop()

    yield from go(0, [], allowed)


def find_algebra_countermodel(spec: SearchSpec) -> SearchReport:
    """Smallest algebra (first in enumeration order) refuting the target.

    Every smaller size is enumerated completely before moving on, so a hit
    at size ``k`` certifies that no algebra below ``k`` qualifies.
    """
    if spec.mode != "algebras":
        raise ValueError("spec.mode must be 'algebras'")
    if spec.max_size > ALGEBRA_CAP:
        raise ValueError(f"algebra search is capped at {ALGEBRA_CAP} elements")
    start = time.perf_counter()
    phi = spec.formula
    per_size: dict = {}
    total = {"enumerated": 0}
    for n in range(1, spec.max_size + 1):
        count = 0
        for hae in enumerate_algebras(n, spec.constraints):
            count += 1
            val = alg.algebra_refutation(hae, phi)
            if val is not None:
                # re-verify through the scalar evaluator
                if alg.eval_formula(hae, val, phi) == hae.top:
                    raise AssertionError("algebra witness does not re-verify")
                per_size[n] = {"enumerated": count}
                total["enumerated"] += count
                return SearchReport("found", hae, n, {"valuation": val, "exhausted_sizes": list(range(1, n))},
                                    total, per_size, time.perf_counter() - start)
        per_size[n] = {"enumerated": count}
        total["enumerated"] += count
    return SearchReport("exhausted", None, None, {"exhausted_sizes": list(range(1, spec.max_size + 1))},
                        total, per_size, time.perf_counter() - start)


def search(spec: SearchSpec, jobs: int = 1) -> SearchReport:
    if spec.mode == "frames":
        return find_frame_countermodel(spec, jobs)
    return find_algebra_countermodel(spec)
