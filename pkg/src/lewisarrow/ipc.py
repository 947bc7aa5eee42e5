"""Intuitionistic propositional validity.

The decision procedure is the contraction-free calculus G4ip.  A second,
independent route enumerates small rooted Kripke models; it is used to
produce countermodels and to cross-check the prover.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .formula import (
    BINARY, Atom, Bot, Conj, Disj, Formula, Impl, Lewis, Meta, Top, as_formula, atoms,
    conj_all, subformulas, to_text, transform,
)
from .orders import rooted_posets, upsets


# -- abstraction of Lewis subterms ---------------------------------------

@dataclass(frozen=True)
class AbstractedFormula:
    body: Formula
    table: dict[str, Formula]

    def restore(self) -> Formula:
        return restore(self.body, self.table)


def restore(body: Formula, table: dict[str, Formula]) -> Formula:
    return transform(body, lambda f: table.get(f.name, f) if isinstance(f, Atom) else f)


def abstract_many(formulas: Sequence[Formula], prefix: str = "a") -> tuple[list[Formula], dict[str, Formula]]:
    """Replace maximal Lewis subterms by fresh atoms, shared across all inputs."""
    formulas = [as_formula(f) for f in formulas]
    used = set().union(*(atoms(f) for f in formulas)) if formulas else set()
    names: dict[Formula, str] = {}
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            name = f"{prefix}{counter}"
            if name not in used:
                return name

    def go(f: Formula) -> Formula:
        if isinstance(f, Lewis):
            if f not in names:
                names[f] = fresh()
            return Atom(names[f])
        if isinstance(f, BINARY):
            return type(f)(go(f.left), go(f.right))
        return f

    bodies = [go(f) for f in formulas]
    return bodies, {v: k for k, v in names.items()}


def abstract_strict(phi) -> AbstractedFormula:
    bodies, table = abstract_many([phi])
    return AbstractedFormula(bodies[0], table)


# -- G4ip --------------------------------------------------------------------

class _Prover:
    def __init__(self):
        self.memo: dict[tuple[frozenset, Formula], bool] = {}

    @staticmethod
    def saturate(gamma: frozenset) -> Optional[frozenset]:
        """Apply the invertible left rules that do not branch; None if F is present."""
        todo = list(gamma)
        out: set[Formula] = set()
        while todo:
            f = todo.pop()
            if f in out:
                continue
            if isinstance(f, Bot):
                return None
            if isinstance(f, Top):
                continue
            if isinstance(f, Conj):
                todo += [f.left, f.right]
                continue
            if isinstance(f, Impl):
                a, b = f.left, f.right
                if isinstance(a, Top):
                    todo.append(b)
                    continue
                if isinstance(a, Bot):
                    continue
                if isinstance(a, Conj):
                    todo.append(Impl(a.left, Impl(a.right, b)))
                    continue
                if isinstance(a, Disj):
                    todo += [Impl(a.left, b), Impl(a.right, b)]
                    continue
                if isinstance(a, Atom) and a in out:
                    todo.append(b)
                    continue
            out.add(f)
            if isinstance(f, Atom):
                # re-examine implications waiting on this atom
                waiting = [g for g in out if isinstance(g, Impl) and g.left == f]
                for g in waiting:
                    out.discard(g)
                    todo.append(g.right)
        return frozenset(out)

    def prove(self, gamma: frozenset, goal: Formula) -> bool:
        key = (gamma, goal)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.memo[key] = False  # G4ip terminates; this only guards re-entry
        out = self._prove(gamma, goal)
        self.memo[key] = out
        return out

    def _prove(self, gamma: frozenset, goal: Formula) -> bool:
        if isinstance(goal, Top):
            return True
        if isinstance(goal, Conj):
            return self.prove(gamma, goal.left) and self.prove(gamma, goal.right)
        if isinstance(goal, Impl):
            return self.prove(gamma | {goal.left}, goal.right)
        sat = self.saturate(gamma)
        if sat is None:
            return True
        if sat != gamma:
            return self.prove(sat, goal)
        if goal in gamma:
            return True
        for f in gamma:
            if isinstance(f, Disj):
                rest = gamma - {f}
                return self.prove(rest | {f.left}, goal) and self.prove(rest | {f.right}, goal)
        if isinstance(goal, Disj):
            if self.prove(gamma, goal.left) or self.prove(gamma, goal.right):
                return True
        for f in gamma:
            if isinstance(f, Impl) and isinstance(f.left, Impl):
                c, d, b = f.left.left, f.left.right, f.right
                rest = gamma - {f}
                if self.prove(rest | {Impl(d, b)}, Impl(c, d)) and self.prove(rest | {b}, goal):
                    return True
        return False


def _lewis_free(phi: Formula) -> None:
    for f in subformulas(phi):
        if isinstance(f, Lewis):
            raise ValueError(f"Lewis arrow present; abstract first: {to_text(f)}")
        if isinstance(f, Meta):
            raise ValueError(f"metavariable %{f.name} present")


def ipc_valid(phi) -> bool:
    """Decide IPC theoremhood of a Lewis-free formula."""
    phi = as_formula(phi)
    _lewis_free(phi)
    return _Prover().prove(frozenset(), phi)


def ipc_entails(premises: Iterable[Formula], goal: Formula) -> bool:
    """IPC validity of ``premises -> goal`` after joint abstraction of Lewis terms."""
    premises = list(premises)
    bodies, _ = abstract_many(premises + [goal])
    return ipc_valid(Impl(conj_all(bodies[:-1]), bodies[-1]))


# -- the Kripke oracle ----------------------------------------------------

class _UpsetAlgebra:
    """Heyting algebra of upsets of a rooted order, for vectorized evaluation."""

    def __init__(self, up: tuple[int, ...]):
        self.up = up
        self.n = len(up)
        self.elems = upsets(up)
        pos = {m: i for i, m in enumerate(self.elems)}
        u = len(self.elems)
        self.index = pos
        self.top = pos[(1 << self.n) - 1]
        self.bot = pos[0]
        self.meet = np.empty((u, u), dtype=np.int16)
        self.join = np.empty((u, u), dtype=np.int16)
        self.rpc = np.empty((u, u), dtype=np.int16)
        for i, a in enumerate(self.elems):
            for j, b in enumerate(self.elems):
                self.meet[i, j] = pos[a & b]
                self.join[i, j] = pos[a | b]
                bad = a & ~b
                self.rpc[i, j] = pos[sum(1 << k for k in range(self.n) if up[k] & bad == 0)]
        self.root_in = np.array([m & 1 for m in self.elems], dtype=bool)

    def grid(self, k: int) -> list[np.ndarray]:
        u = len(self.elems)
        if k == 0:
            return []
        return [g.ravel() for g in np.meshgrid(*[np.arange(u, dtype=np.int16)] * k, indexing="ij")]


class KripkeOracle:
    """Evaluate many formulas over every rooted model up to ``max_worlds`` points.

    Subformula values are cached per order, so a corpus sharing structure is
    evaluated once per distinct subterm.
    """

    def __init__(self, names: Sequence[str], max_worlds: int = 5):
        self.names = sorted(names)
        self.algebras = [_UpsetAlgebra(up) for n in range(1, max_worlds + 1) for up in rooted_posets(n)]
        self.vals = [alg.grid(len(self.names)) for alg in self.algebras]
        self.cache: list[dict[Formula, np.ndarray]] = [{} for _ in self.algebras]

    def _eval(self, i: int, f: Formula) -> np.ndarray:
        cache = self.cache[i]
        hit = cache.get(f)
        if hit is not None:
            return hit
        alg = self.algebras[i]
        if isinstance(f, Atom):
            if f.name not in self.names:
                raise KeyError(f"atom {f.name!r} not covered by the oracle")
            out = self.vals[i][self.names.index(f.name)] if self.names else np.zeros(1, np.int16)
        elif isinstance(f, Top):
            out = np.int16(alg.top)
        elif isinstance(f, Bot):
            out = np.int16(alg.bot)
        else:
            table = {Conj: alg.meet, Disj: alg.join, Impl: alg.rpc}[type(f)]
            out = table[self._eval(i, f.left), self._eval(i, f.right)]
        cache[f] = out
        return out

    def refute(self, phi: Formula) -> Optional[tuple[int, int]]:
        """(algebra index, valuation index) of the first refuting model, or None."""
        for i, alg in enumerate(self.algebras):
            value = np.atleast_1d(self._eval(i, phi))
            bad = np.flatnonzero(value != alg.top)
            if bad.size:
                return i, int(bad[0])
        return None

    def model(self, hit: tuple[int, int]):
        from .kripke import default_names, frame_from_masks, Model
        i, v = hit
        alg = self.algebras[i]
        frame = frame_from_masks(alg.n, alg.up, [0] * alg.n)
        names = default_names(alg.n)
        valuation = {}
        for j, atom in enumerate(self.names):
            mask = alg.elems[int(self.vals[i][j][v])]
            valuation[atom] = frozenset(names[k] for k in range(alg.n) if mask >> k & 1)
        return Model(frame, valuation)


def ipc_countermodel(phi, max_worlds: int = 5):
    """A rooted model refuting ``phi`` at its root (world ``a``), or None.

    Any returned model has been re-checked with :func:`kripke.forces`.
    """
    from .kripke import forces

    phi = as_formula(phi)
    _lewis_free(phi)
    oracle = KripkeOracle(sorted(atoms(phi)), max_worlds)
    hit = oracle.refute(phi)
    if hit is None:
        return None
    model = oracle.model(hit)
    # the upset value misses some world; the root misses it by persistence
    if forces(model, "a", phi):
        raise AssertionError("oracle countermodel does not refute the formula at its root")
    return model


# -- corpora -----------------------------------------------------------------

def lewis_free_corpus(max_connectives: int = 3, leaves: Sequence[Formula] = (Atom("p"), Atom("q"), Bot())):
    from .fixpoint import formulas_up_to
    return formulas_up_to(list(leaves), max_connectives, ops=(Conj, Disj, Impl))


def random_formula(rng, connectives: int, leaves: Sequence[Formula] = (Atom("p"), Atom("q"), Bot())) -> Formula:
    """A uniformly shaped random tree with exactly ``connectives`` binary nodes."""
    if connectives == 0:
        return leaves[rng.randrange(len(leaves))]
    left = rng.randrange(connectives)
    op = (Conj, Disj, Impl)[rng.randrange(3)]
    return op(random_formula(rng, left, leaves), random_formula(rng, connectives - 1 - left, leaves))
