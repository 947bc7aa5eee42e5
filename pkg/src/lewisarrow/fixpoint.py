"""Explicit fixpoints for formulas whose principal connective is the Lewis arrow.

For ``phi = psi => chi`` and a designated variable ``r`` (write ``f[x]`` for
``f[r := x]``):

* de Jongh-Visser:  ``theta = psi[[] chi[T]] => chi[T]``
* de Jongh-Sambin:  ``theta = psi[T] => chi[T]``

No simplification is applied to the results.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal

from .formula import (
    BINARY, TOP, Atom, AtomLike, Conj, Disj, Formula, Impl, Lewis, atoms, box,
    guarded, iff, substitute, _name,
)

Kind = Literal["JV", "JS"]


@dataclass(frozen=True)
class FixpointProblem:
    psi: Formula
    chi: Formula
    r: str = "r"
    kind: Kind = "JV"

    def __post_init__(self):
        object.__setattr__(self, "r", _name(self.r))
        kind = self.kind.upper()
        if kind not in ("JV", "JS"):
            raise ValueError(f"unknown fixpoint kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)

    @property
    def target(self) -> Formula:
        return Lewis(self.psi, self.chi)


def jv_fixpoint(problem: FixpointProblem) -> Formula:
    chi_top = substitute(problem.chi, problem.r, TOP)
    return Lewis(substitute(problem.psi, problem.r, box(chi_top)), chi_top)


def js_fixpoint(problem: FixpointProblem) -> Formula:
    return Lewis(substitute(problem.psi, problem.r, TOP), substitute(problem.chi, problem.r, TOP))


def fixpoint(problem: FixpointProblem) -> Formula:
    return jv_fixpoint(problem) if problem.kind == "JV" else js_fixpoint(problem)


def fixpoint_equation(problem: FixpointProblem) -> Formula:
    """``theta <-> (psi => chi)[r := theta]`` for the problem's kind."""
    theta = fixpoint(problem)
    return iff(theta, substitute(problem.target, problem.r, theta))


def collapse_equation(psi: Formula, chi: Formula, r: AtomLike = "r") -> Formula:
    """The X scheme: the JV fixpoint is equivalent to the JS fixpoint."""
    jv = jv_fixpoint(FixpointProblem(psi, chi, r, "JV"))
    js = js_fixpoint(FixpointProblem(psi, chi, r, "JS"))
    return iff(jv, js)


def uniqueness_instance(chi: Formula, r: AtomLike, q: AtomLike) -> Formula:
    """``([](r <-> chi) & [](q <-> chi[r:=q])) -> [](r <-> q)``."""
    r, q = _name(r), _name(q)
    if not guarded(chi, r):
        raise ValueError(f"{r!r} is not guarded in the fixpoint formula")
    if q in atoms(chi) or q == r:
        raise ValueError(f"{q!r} is not fresh")
    ra, qa = Atom(r), Atom(q)
    return Impl(Conj(box(iff(ra, chi)), box(iff(qa, substitute(chi, r, qa)))), box(iff(ra, qa)))


# -- the (psi, chi) catalog used by the semantic suites ------------------------

def formulas_up_to(leaves: list[Formula], max_connectives: int,
                   ops=(Conj, Disj, Impl, Lewis)) -> list[Formula]:
    """Every formula over ``leaves`` with at most ``max_connectives`` binary nodes."""
    by_size: list[list[Formula]] = [list(leaves)]
    for k in range(1, max_connectives + 1):
        level = []
        for op in ops:
            for i in range(k):
                for left in by_size[i]:
                    for right in by_size[k - 1 - i]:
                        level.append(op(left, right))
        by_size.append(level)
    return [f for level in by_size for f in level]


def catalog(max_connectives: int = 2, r: str = "r", p: str = "p") -> list[Formula]:
    return formulas_up_to([Atom(r), Atom(p)], max_connectives)


def catalog_pairs(max_connectives: int = 2) -> Iterator[tuple[Formula, Formula]]:
    fs = catalog(max_connectives)
    return itertools.product(fs, fs)


# -- recognizing instances of the fixpoint families ------------------------

def _anti_unify(a: Formula, b: Formula, hole_a: Formula, hole_b: Formula, r: Atom) -> Formula | None:
    """Find f with f[r:=hole_a] == a and f[r:=hole_b] == b, placing r only where needed."""
    if a == b:
        return a
    if a == hole_a and b == hole_b:
        return r
    if type(a) is type(b) and isinstance(a, BINARY):
        left = _anti_unify(a.left, b.left, hole_a, hole_b, r)
        if left is None:
            return None
        right = _anti_unify(a.right, b.right, hole_a, hole_b, r)
        if right is None:
            return None
        return type(a)(left, right)
    return None


def _split_iff(phi: Formula) -> tuple[Formula, Formula] | None:
    if (isinstance(phi, Conj) and isinstance(phi.left, Impl) and isinstance(phi.right, Impl)
            and phi.left.left == phi.right.right and phi.left.right == phi.right.left):
        return phi.left.left, phi.left.right
    return None


def match_family(phi: Formula, kind: str) -> dict | None:
    """Recover ``{psi, chi, r}`` such that the ``kind`` scheme instance equals ``phi``."""
    kind = kind.upper()
    parts = _split_iff(phi)
    if parts is None:
        return None
    theta, rhs = parts
    if not isinstance(theta, Lewis) or not isinstance(rhs, Lewis):
        return None
    r = Atom(_fresh_r(phi))
    if kind == "JS":
        psi = _anti_unify(theta.left, rhs.left, TOP, theta, r)
        chi = _anti_unify(theta.right, rhs.right, TOP, theta, r)
        if psi is None or chi is None:
            return None
        sigma = {"psi": psi, "chi": chi, "r": r}
        made = fixpoint_equation(FixpointProblem(psi, chi, r.name, "JS"))
    elif kind == "JV":
        chi = _anti_unify(theta.right, rhs.right, TOP, theta, r)
        if chi is None:
            return None
        psi = _anti_unify(theta.left, rhs.left, box(theta.right), theta, r)
        if psi is None:
            return None
        sigma = {"psi": psi, "chi": chi, "r": r}
        made = fixpoint_equation(FixpointProblem(psi, chi, r.name, "JV"))
    elif kind == "X":
        # chi[T] is all that survives; take chi := chi[T]
        chi = theta.right
        if rhs.right != chi:
            return None
        psi = _anti_unify(theta.left, rhs.left, box(chi), TOP, r)
        if psi is None:
            return None
        sigma = {"psi": psi, "chi": chi, "r": r}
        made = collapse_equation(psi, chi, r.name)
    else:
        raise KeyError(kind)
    return sigma if made == phi else None


def _fresh_r(phi: Formula) -> str:
    used = atoms(phi)
    if "r" not in used:
        return "r"
    i = 1
    while f"r{i}" in used:
        i += 1
    return f"r{i}"


__all__ = [
    "FixpointProblem", "jv_fixpoint", "js_fixpoint", "fixpoint", "fixpoint_equation",
    "collapse_equation", "uniqueness_instance", "catalog", "catalog_pairs",
    "formulas_up_to", "match_family",
]
