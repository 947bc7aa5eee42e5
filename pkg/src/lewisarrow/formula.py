"""Formulas over IPC plus the binary Lewis arrow, with concrete syntax.

Grammar (ASCII, decreasing precedence)::

    atom      [a-z][a-zA-Z0-9_]*      T (top)   F (bottom)   %name (metavariable)
    prefix    ~a   [] a   [.] a
    &         left associative
    |         left associative
    ->        right associative
    =>        non-associative
    <-> <=>   non-associative sugar

``~a`` is ``a -> F``, ``[] a`` is ``T => a``, ``[.] a`` is ``a & ([] a)``,
``a <-> b`` is ``(a -> b) & (b -> a)`` and ``a <=> b`` is
``(a => b) & (b => a)``.  Sugar is expanded while parsing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    # convenience constructors, handy in tests and scripts
    def __and__(self, other: "Formula") -> "Formula":
        return Conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Disj(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Impl(self, other)


@dataclass(frozen=True, slots=True, repr=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True, slots=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, slots=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Meta(Formula):
    """Metavariable of a scheme template (written ``%phi``)."""

    name: str

    def __repr__(self) -> str:
        return f"Meta({self.name!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Conj(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Conj({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Disj(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Disj({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Impl(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Impl({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Lewis(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Lewis({self.left!r}, {self.right!r})"


BINARY = (Conj, Disj, Impl, Lewis)
TOP = Top()
BOT = Bot()

AtomLike = Union[str, Atom]


def box(phi: Formula) -> Formula:
    return Lewis(TOP, phi)


def dotbox(phi: Formula) -> Formula:
    return Conj(phi, box(phi))


def neg(phi: Formula) -> Formula:
    return Impl(phi, BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return Conj(Impl(a, b), Impl(b, a))


def strict_iff(a: Formula, b: Formula) -> Formula:
    return Conj(Lewis(a, b), Lewis(b, a))


def conj_all(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for f in items[1:]:
        out = Conj(out, f)
    return out


def _name(r: AtomLike) -> str:
    return r.name if isinstance(r, Atom) else r


# -- traversal -------------------------------------------------------------

def subformulas(phi: Formula) -> Iterator[Formula]:
    """Preorder traversal (with repetitions)."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, BINARY):
            stack.append(f.right)
            stack.append(f.left)


def atoms(phi: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(phi) if isinstance(f, Atom))


def metavars(phi: Formula) -> list[str]:
    """Metavariable names in order of first occurrence."""
    seen: dict[str, None] = {}
    for f in subformulas(phi):
        if isinstance(f, Meta):
            seen.setdefault(f.name)
    return list(seen)


def size(phi: Formula) -> int:
    return sum(1 for _ in subformulas(phi))


def connectives(phi: Formula) -> int:
    return sum(1 for f in subformulas(phi) if isinstance(f, BINARY))


def has_lewis(phi: Formula) -> bool:
    return any(isinstance(f, Lewis) for f in subformulas(phi))


def fresh_atom(avoid: Iterable[str], base: str = "e") -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def transform(phi: Formula, leaf: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``phi`` bottom-up, mapping each leaf node through ``leaf``."""
    if isinstance(phi, BINARY):
        left = transform(phi.left, leaf)
        right = transform(phi.right, leaf)
        if left is phi.left and right is phi.right:
            return phi
        return type(phi)(left, right)
    return leaf(phi)


# -- substitution ------------------------------------------------------------

def substitute(phi: Formula, r: AtomLike, psi: Formula) -> Formula:
    """Replace every occurrence of atom ``r`` in ``phi`` by ``psi``."""
    name = _name(r)
    return transform(phi, lambda f: psi if isinstance(f, Atom) and f.name == name else f)


def substitute_many(phi: Formula, sigma: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of atoms, keyed by atom name."""
    return transform(phi, lambda f: sigma.get(f.name, f) if isinstance(f, Atom) else f)


def fill(template: Formula, sigma: Mapping[str, Formula]) -> Formula:
    """Replace metavariables (keyed by name without ``%``)."""
    def leaf(f: Formula) -> Formula:
        if isinstance(f, Meta):
            if f.name not in sigma:
                raise KeyError(f.name)
            return sigma[f.name]
        return f
    return transform(template, leaf)


def guarded(phi: Formula, r: AtomLike) -> bool:
    """True iff every occurrence of ``r`` lies beneath some Lewis node."""
    name = _name(r)

    def ok(f: Formula) -> bool:
        if isinstance(f, Atom):
            return f.name != name
        if isinstance(f, Lewis):
            return True
        if isinstance(f, BINARY):
            return ok(f.left) and ok(f.right)
        return True

    return ok(phi)


def stex(phi: Formula, p: AtomLike) -> Formula:
    """Relativize every Lewis arrow to the fresh atom ``p``.

    Homomorphic on the IPC connectives; ``A => B`` becomes
    ``(p -> A') => (p -> B')``.
    """
    name = _name(p)
    if name in atoms(phi):
        raise ValueError(f"variable capture: {name!r} occurs in {to_text(phi)}")
    pa = Atom(name)

    def go(f: Formula) -> Formula:
        if isinstance(f, Lewis):
            return Lewis(Impl(pa, go(f.left)), Impl(pa, go(f.right)))
        if isinstance(f, BINARY):
            return type(f)(go(f.left), go(f.right))
        return f

    return go(phi)


# -- normalization used by scheme matching ----------------------------------

def normalize(phi: Formula) -> Formula:
    """Canonical form modulo a fixed set of IPC equivalences.

    Rewrites, applied bottom-up: ``T -> a = a``, ``a -> T = T``,
    ``a & T = T & a = a``; ``a -> (b & c) = (a -> b) & (a -> c)``;
    implication chains ``a1 -> ... -> an -> h`` have their premises
    deduplicated and sorted.  Every rewrite is an IPC equivalence, so by
    replacement of provable equivalents it is sound modulo iA-.
    """
    if isinstance(phi, Conj):
        left, right = normalize(phi.left), normalize(phi.right)
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return Conj(left, right)
    if isinstance(phi, Impl):
        return _norm_impl([normalize(phi.left)], normalize(phi.right))
    if isinstance(phi, (Disj, Lewis)):
        return type(phi)(normalize(phi.left), normalize(phi.right))
    return phi


def _norm_impl(premises: list[Formula], head: Formula) -> Formula:
    # head is normalized, so a chain head is never an Impl with a Conj head
    if isinstance(head, Conj):
        return Conj(_norm_impl(list(premises), head.left), _norm_impl(list(premises), head.right))
    if isinstance(head, Impl):
        chain = [head.left]
        h = head.right
        while isinstance(h, Impl):
            chain.append(h.left)
            h = h.right
        premises = premises + chain
        head = h
    if isinstance(head, Top):
        return TOP
    keyed = {to_text(p): p for p in premises if not isinstance(p, Top)}
    out = head
    for key in sorted(keyed, reverse=True):
        out = Impl(keyed[key], out)
    return out


# -- printing ----------------------------------------------------------------

_LEVEL = {Lewis: 1, Impl: 2, Disj: 3, Conj: 4}
_SYMBOL = {Lewis: "=>", Impl: "->", Disj: "|", Conj: "&"}


def _level(f: Formula) -> int:
    return _LEVEL.get(type(f), 5)


def to_text(phi: Formula) -> str:
    """Print with minimal parentheses; ``parse(to_text(f)) == f``."""
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bot):
        return "F"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Meta):
        return "%" + phi.name
    lvl = _LEVEL[type(phi)]
    if isinstance(phi, Lewis):
        lmin, rmin = lvl + 1, lvl + 1
    elif isinstance(phi, Impl):
        lmin, rmin = lvl + 1, lvl
    else:
        lmin, rmin = lvl, lvl + 1

    def wrap(f: Formula, need: int) -> str:
        s = to_text(f)
        return s if _level(f) >= need else f"({s})"

    return f"{wrap(phi.left, lmin)} {_SYMBOL[type(phi)]} {wrap(phi.right, rmin)}"


# -- parsing -----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


_TOKEN = re.compile(
    r"\s*(?:(?P<op><=>|<->|=>|->|\[\.\]|\[\]|[&|~()])"
    r"|(?P<meta>%[a-z][a-zA-Z0-9_]*)"
    r"|(?P<const>[TF])(?![a-zA-Z0-9_])"
    r"|(?P<atom>[a-z][a-zA-Z0-9_]*))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unknown token {text[pos]!r}", pos, text)
        kind = m.lastgroup
        value = m.group(kind)
        out.append((kind, value, m.start(kind)))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.peek()[2], self.text)

    def at(self, *ops: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value in ops

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self) -> Formula:
        left = self.lewis()
        if self.at("<->", "<=>"):
            op = self.take()[1]
            right = self.lewis()
            if self.at("<->", "<=>"):
                raise self.error(f"{op} is non-associative; add parentheses")
            return iff(left, right) if op == "<->" else strict_iff(left, right)
        return left

    def lewis(self) -> Formula:
        left = self.impl()
        if self.at("=>"):
            self.take()
            right = self.impl()
            if self.at("=>"):
                raise self.error("=> is non-associative; add parentheses")
            return Lewis(left, right)
        return left

    def impl(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.take()
            return Impl(left, self.impl())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.take()
            f = Disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = Conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "op":
            if value == "~":
                self.take()
                return neg(self.unary())
            if value == "[]":
                self.take()
                return box(self.unary())
            if value == "[.]":
                self.take()
                return dotbox(self.unary())
            if value == "(":
                self.take()
                f = self.iff()
                if not self.at(")"):
                    raise self.error("expected ')'")
                self.take()
                return f
            raise self.error(f"unexpected {value!r}")
        if kind == "const":
            self.take()
            return TOP if value == "T" else BOT
        if kind == "atom":
            self.take()
            return Atom(value)
        if kind == "meta":
            self.take()
            return Meta(value[1:])
        raise self.error("unexpected end of input")


def parse(text: str) -> Formula:
    return _Parser(text).parse()


def as_formula(x: Union[str, Formula]) -> Formula:
    return parse(x) if isinstance(x, str) else x
