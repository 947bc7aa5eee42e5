"""Finite Lewisian Kripke frames and models.

A frame has a partial order ``leq`` and a relation ``sub`` with
``k <= l  and  l < m  implies  k < m`` (``<`` standing for ``sub``).
"""
from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .formula import (
    Atom, Bot, Conj, Disj, Formula, Impl, Lewis, Meta, Top, as_formula, atoms,
)


class FrameError(ValueError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class FormatError(ValueError):
    pass


class UnknownAtomWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=True)
class Frame:
    worlds: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    sub: frozenset[tuple[str, str]]

    @property
    def n(self) -> int:
        return len(self.worlds)

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        """Bitmask of the worlds above each world (itself included)."""
        ix = self.index
        masks = [0] * self.n
        for a, b in self.leq:
            masks[ix[a]] |= 1 << ix[b]
        return tuple(masks)

    @cached_property
    def sub_masks(self) -> tuple[int, ...]:
        ix = self.index
        masks = [0] * self.n
        for a, b in self.sub:
            masks[ix[a]] |= 1 << ix[b]
        return tuple(masks)

    def upsets(self) -> list[int]:
        """All upward closed sets as bitmasks, in increasing numeric order."""
        up = self.up_masks
        out = []
        for m in range(1 << self.n):
            if all(up[k] & ~m == 0 for k in range(self.n) if m >> k & 1):
                out.append(m)
        return out

    def mask_to_set(self, mask: int) -> frozenset[str]:
        return frozenset(w for i, w in enumerate(self.worlds) if mask >> i & 1)

    def set_to_mask(self, worlds: Iterable[str]) -> int:
        ix = self.index
        return sum(1 << ix[w] for w in set(worlds))

    def __repr__(self) -> str:
        leq = sorted((a, b) for a, b in self.leq if a != b)
        return f"Frame(worlds={list(self.worlds)}, leq={leq}, sub={sorted(self.sub)})"


def _closure(worlds: tuple[str, ...], gens: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    rel = {(w, w) for w in worlds} | set(gens)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return rel


def validate_frame(worlds: Iterable[str], leq: Iterable[tuple[str, str]] = (),
                   sub: Iterable[tuple[str, str]] = ()) -> Frame:
    """Close the ``leq`` generators and check the frame laws.

    ``sub`` is taken verbatim.  Raises :class:`FrameError` when the closed
    order is not antisymmetric or the composition law fails; the error
    carries the first offending pair or triple.
    """
    worlds = tuple(dict.fromkeys(worlds))
    known = set(worlds)
    leq, sub = list(leq), list(sub)
    for a, b in leq + sub:
        if a not in known or b not in known:
            raise FrameError(f"unknown world in pair ({a}, {b})", (a, b))
    order = _closure(worlds, leq)
    for a, b in sorted(order):
        if a != b and (b, a) in order:
            raise FrameError(f"order is not antisymmetric: {a} <= {b} <= {a}", (a, b))
    subset = frozenset(sub)
    for k, l, m in itertools.product(worlds, repeat=3):
        if (k, l) in order and (l, m) in subset and (k, m) not in subset:
            raise FrameError(f"composition law fails: {k} <= {l} < {m} but not {k} < {m}", (k, l, m))
    return Frame(worlds, frozenset(order), subset)


@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        val = {}
        for name, ws in self.valuation.items():
            ws = frozenset(ws)
            unknown = ws - set(self.frame.worlds)
            if unknown:
                raise FrameError(f"valuation of {name} mentions unknown worlds {sorted(unknown)}")
            for a, b in self.frame.leq:
                if a in ws and b not in ws:
                    raise FrameError(f"valuation of {name} is not upward closed: {a} <= {b}", (a, b))
            val[name] = ws
        object.__setattr__(self, "valuation", val)


# -- forcing -----------------------------------------------------------------

def forces(model: Model, w: str, phi, _memo: Optional[dict] = None) -> bool:
    """Evaluate ``w |- phi`` directly from the forcing clauses."""
    phi = as_formula(phi)
    frame = model.frame
    if w not in frame.index:
        raise KeyError(f"unknown world {w!r}")
    memo = {} if _memo is None else _memo
    warned: set[str] = memo.setdefault("__warned__", set())

    def go(k: str, f: Formula) -> bool:
        key = (k, f)
        if key in memo:
            return memo[key]
        if isinstance(f, Top):
            out = True
        elif isinstance(f, Bot):
            out = False
        elif isinstance(f, Atom):
            if f.name not in model.valuation and f.name not in warned:
                warned.add(f.name)
                warnings.warn(f"atom {f.name!r} has no valuation; reading it as false",
                              UnknownAtomWarning, stacklevel=3)
            out = k in model.valuation.get(f.name, ())
        elif isinstance(f, Conj):
            out = go(k, f.left) and go(k, f.right)
        elif isinstance(f, Disj):
            out = go(k, f.left) or go(k, f.right)
        elif isinstance(f, Impl):
            out = all(not go(l, f.left) or go(l, f.right)
                      for l in frame.worlds if (k, l) in frame.leq)
        elif isinstance(f, Lewis):
            out = all(not go(l, f.left) or go(l, f.right)
                      for l in frame.worlds if (k, l) in frame.sub)
        elif isinstance(f, Meta):
            raise ValueError(f"cannot evaluate metavariable %{f.name}")
        else:
            raise TypeError(f)
        memo[key] = out
        return out

    return go(w, phi)


def truth_set(model: Model, phi) -> frozenset[str]:
    phi = as_formula(phi)
    memo: dict = {}
    return frozenset(w for w in model.frame.worlds if forces(model, w, phi, memo))


def extension(frame: Frame, masks: Mapping[str, int], phi: Formula) -> int:
    """Truth set of ``phi`` as a bitmask, atoms given as bitmasks (missing = empty)."""
    n = frame.n
    full = (1 << n) - 1
    up, sub = frame.up_masks, frame.sub_masks
    cache: dict[Formula, int] = {}

    def go(f: Formula) -> int:
        hit = cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            out = full
        elif isinstance(f, Bot):
            out = 0
        elif isinstance(f, Atom):
            out = masks.get(f.name, 0)
        elif isinstance(f, Conj):
            out = go(f.left) & go(f.right)
        elif isinstance(f, Disj):
            out = go(f.left) | go(f.right)
        elif isinstance(f, (Impl, Lewis)):
            bad = go(f.left) & ~go(f.right)
            rel = up if isinstance(f, Impl) else sub
            out = 0
            for k in range(n):
                if rel[k] & bad == 0:
                    out |= 1 << k
        else:
            raise ValueError(f"cannot evaluate {f!r}")
        cache[f] = out
        return out

    return go(phi)


def valuations(frame: Frame, names: Iterable[str]):
    """All assignments of the given atoms to upsets, as name -> bitmask dicts."""
    names = sorted(names)
    ups = frame.upsets()
    for choice in itertools.product(ups, repeat=len(names)):
        yield dict(zip(names, choice))


def frame_refutation(frame: Frame, phi) -> Optional[tuple[dict[str, frozenset[str]], str]]:
    """First valuation (and world) at which ``phi`` fails, or None."""
    phi = as_formula(phi)
    full = (1 << frame.n) - 1
    for val in valuations(frame, atoms(phi)):
        ext = extension(frame, val, phi)
        if ext != full:
            bad = next(i for i in range(frame.n) if not ext >> i & 1)
            return {a: frame.mask_to_set(m) for a, m in val.items()}, frame.worlds[bad]
    return None


def frame_validates(frame: Frame, phi) -> bool:
    """True iff ``phi`` holds at every world under every admissible valuation."""
    return frame_refutation(frame, phi) is None


# -- frame conditions --------------------------------------------------------

@dataclass(frozen=True)
class ConditionResult:
    condition: str
    holds: bool
    witness: Optional[tuple[str, ...]] = None

    def __bool__(self) -> bool:
        return self.holds


def _check_lewis(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if leq(k, l) and sub(l, m) and not sub(k, m):
            return (k, l, m)


def _check_brilliant(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if sub(k, l) and leq(l, m) and not sub(k, m):
            return (k, l, m)


def _check_semi_transitive(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if sub(k, l) and sub(l, m) and not any(sub(k, x) and leq(x, m) for x in W):
            return (k, l, m)


def _check_gathering(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if sub(k, l) and sub(l, m) and not leq(l, m):
            return (k, l, m)


def _check_noetherian(F, W, leq, sub):
    # a world reaching itself by a nonempty sub-path
    masks = F.sub_masks
    for i, w in enumerate(W):
        seen, frontier = 0, masks[i]
        while frontier:
            if frontier >> i & 1:
                return (w,)
            seen |= frontier
            nxt = 0
            for j in range(F.n):
                if frontier >> j & 1:
                    nxt |= masks[j]
            frontier = nxt & ~seen


def _check_supergathering(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if sub(k, l) and sub(l, m):
            if not any(sub(k, x) and l != x and leq(l, x) and leq(x, m) for x in W):
                return (k, l, m)


def _check_strong(F, W, leq, sub):
    for k, l in itertools.product(W, repeat=2):
        if sub(k, l) and not leq(k, l):
            return (k, l)


def _check_transitive_sub(F, W, leq, sub):
    for k, l, m in itertools.product(W, repeat=3):
        if sub(k, l) and sub(l, m) and not sub(k, m):
            return (k, l, m)


def _check_gather_transitive(F, W, leq, sub):
    for x, y, z in itertools.product(W, repeat=3):
        if sub(x, y) and sub(y, z) and not (sub(x, z) or leq(y, z)):
            return (x, y, z)


def _check_discrete(F, W, leq, sub):
    for k, l in itertools.product(W, repeat=2):
        if k != l and leq(k, l):
            return (k, l)


CONDITIONS = {
    "lewis": _check_lewis,
    "brilliant": _check_brilliant,
    "semi_transitive": _check_semi_transitive,
    "gathering": _check_gathering,
    "noetherian": _check_noetherian,
    "supergathering": _check_supergathering,
    "strong": _check_strong,
    "transitive_sub": _check_transitive_sub,
    "gather_transitive": _check_gather_transitive,
    "discrete": _check_discrete,
}


def frame_condition(frame: Frame, condition: str) -> ConditionResult:
    """Exhaustive check; the witness is the lexicographically first violation
    (worlds ordered as listed in the frame)."""
    try:
        check = CONDITIONS[condition]
    except KeyError:
        raise KeyError(f"unknown frame condition {condition!r}") from None
    leq = lambda a, b: (a, b) in frame.leq  # noqa: E731
    sub = lambda a, b: (a, b) in frame.sub  # noqa: E731
    witness = check(frame, frame.worlds, leq, sub)
    return ConditionResult(condition, witness is None, witness)


def satisfies(frame: Frame, conditions: Iterable[str]) -> bool:
    return all(frame_condition(frame, c).holds for c in conditions)


# Frame classes on which each scheme is sound; a class is a list of
# alternatives, each alternative a tuple of conditions that must all hold.
SCHEME_CLASSES: dict[str, list[tuple[str, ...]]] = {
    "Tr": [()], "Ka": [()], "Di": [()],
    "Box": [("brilliant",)],
    "4box": [("semi_transitive",)],
    "4sub": [("gathering",)],
    "S": [("strong",)],
    "P": [("transitive_sub",)],
    "4circa": [("gather_transitive",)],
    "44circa": [("gather_transitive",)],
    "Lbox": [("noetherian", "semi_transitive")],
    "La": [("noetherian", "gathering")],
    "JV": [("noetherian", "gathering")],
    "W": [("supergathering",)],
    "X": [("supergathering",)],
    "JS": [("supergathering",), ("noetherian", "semi_transitive", "transitive_sub")],
    "Wstar": [("supergathering",), ("noetherian", "semi_transitive", "transitive_sub")],
    "Wcirc": [("supergathering",), ("noetherian", "semi_transitive", "transitive_sub")],
    "Lcirca": [("supergathering",), ("noetherian", "semi_transitive", "transitive_sub"),
               ("noetherian", "gathering")],
}


def in_scheme_class(frame: Frame, schemes: Iterable[str]) -> bool:
    """True iff the frame lies in the registered sound class of every scheme."""
    return all(any(satisfies(frame, alt) for alt in SCHEME_CLASSES[s]) for s in schemes)


# -- dual algebra ------------------------------------------------------------

def dual_algebra(frame: Frame):
    """The algebra of upsets; elements are ordered as :meth:`Frame.upsets`."""
    from .algebra import HAE

    ups = frame.upsets()
    pos = {m: i for i, m in enumerate(ups)}
    n = frame.n
    up, sub = frame.up_masks, frame.sub_masks

    def arrow(rel, a, b):
        bad = a & ~b
        return sum(1 << k for k in range(n) if rel[k] & bad == 0)

    size = len(ups)
    meet = [[pos[a & b] for b in ups] for a in ups]
    join = [[pos[a | b] for b in ups] for a in ups]
    rpc = [[pos[arrow(up, a, b)] for b in ups] for a in ups]
    lewis = [[pos[arrow(sub, a, b)] for b in ups] for a in ups]
    return HAE(size, meet, join, rpc, lewis, bot=pos[0], top=pos[(1 << n) - 1],
               names=[",".join(sorted(frame.mask_to_set(m))) or "{}" for m in ups])


# -- text format -------------------------------------------------------------

_LEQ = re.compile(r"^([A-Za-z0-9_]+)<=([A-Za-z0-9_]+)$")
_SUB = re.compile(r"^([A-Za-z0-9_]+)<([A-Za-z0-9_]+)$")


def parse_model(text: str) -> Model:
    """Read the line based frame/model format (``worlds:``, ``leq:``, ``sub:``, ``val p:``)."""
    worlds: list[str] = []
    leq: list[tuple[str, str]] = []
    sub: list[tuple[str, str]] = []
    val: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError(f"line {lineno}: expected 'key: values'")
        key, _, rest = line.partition(":")
        key, items = key.strip(), rest.split()
        if key == "worlds":
            worlds.extend(items)
        elif key == "leq":
            for item in items:
                m = _LEQ.match(item)
                if not m:
                    raise FormatError(f"line {lineno}: bad order pair {item!r}")
                leq.append(m.groups())
        elif key == "sub":
            for item in items:
                m = _SUB.match(item)
                if not m:
                    raise FormatError(f"line {lineno}: bad sub pair {item!r}")
                sub.append(m.groups())
        elif key.startswith("val"):
            name = key[3:].strip()
            if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", name):
                raise FormatError(f"line {lineno}: bad atom name {name!r}")
            val.setdefault(name, []).extend(items)
        else:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
    if not worlds:
        raise FormatError("no worlds declared")
    try:
        frame = validate_frame(worlds, leq, sub)
        return Model(frame, {k: frozenset(v) for k, v in val.items()})
    except FrameError as exc:
        raise FormatError(str(exc)) from exc


def parse_frame(text: str) -> Frame:
    return parse_model(text).frame


def load_model(path) -> Model:
    with open(path) as fh:
        return parse_model(fh.read())


def _covers(frame: Frame) -> list[tuple[str, str]]:
    strict = {(a, b) for a, b in frame.leq if a != b}
    out = []
    for a, b in sorted(strict, key=lambda p: (frame.index[p[0]], frame.index[p[1]])):
        if not any((a, c) in strict and (c, b) in strict for c in frame.worlds):
            out.append((a, b))
    return out


def format_model(frame: Frame, valuation: Optional[Mapping[str, Iterable[str]]] = None,
                 comment: str = "") -> str:
    ix = frame.index
    lines = [f"# {c}" for c in comment.splitlines()] if comment else []
    lines.append("worlds: " + " ".join(frame.worlds))
    covers = _covers(frame)
    if covers:
        lines.append("leq: " + " ".join(f"{a}<={b}" for a, b in covers))
    if frame.sub:
        pairs = sorted(frame.sub, key=lambda p: (ix[p[0]], ix[p[1]]))
        lines.append("sub: " + " ".join(f"{a}<{b}" for a, b in pairs))
    for name in sorted(valuation or {}):
        ws = sorted(valuation[name], key=ix.__getitem__)
        lines.append(" ".join([f"val {name}:", *ws]))
    return "\n".join(lines) + "\n"


def frame_from_masks(n: int, up: Iterable[int], sub: Iterable[int], names: Optional[list[str]] = None) -> Frame:
    """Build a frame from per-world bitmasks (``up`` must already be a closed order)."""
    names = names or default_names(n)
    leq = frozenset((names[k], names[l]) for k, m in enumerate(up) for l in range(n) if m >> l & 1)
    rel = frozenset((names[k], names[l]) for k, m in enumerate(sub) for l in range(n) if m >> l & 1)
    return Frame(tuple(names), leq, rel)


def default_names(n: int) -> list[str]:
    return [chr(ord("a") + i) for i in range(n)]


__all__ = [
    "Frame", "Model", "FrameError", "FormatError", "UnknownAtomWarning", "validate_frame",
    "forces", "truth_set", "extension", "valuations", "frame_validates", "frame_refutation",
    "frame_condition", "ConditionResult", "CONDITIONS", "SCHEME_CLASSES", "in_scheme_class",
    "satisfies", "dual_algebra", "parse_model", "parse_frame", "load_model", "format_model",
    "frame_from_masks", "default_names",
]
