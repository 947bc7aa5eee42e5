"""A small checker for Hilbert-style derivations.

Rules: axiom instances, modus ponens, the Na rule (from ``A -> B`` infer
``A => B``) and IPC consequence, where Lewis subterms are treated as
atoms shared across the cited lines and the conclusion.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .fixtures import fixture
from .formula import BINARY, Atom, Bot, Formula, Impl, Lewis, ParseError, TOP, Top, box, parse, to_text
from .ipc import ipc_entails
from .schemes import AxiomSet, axiom_set, get_scheme, scheme_instance


class ScriptError(ValueError):
    """A malformed script; ``lineno`` is the file line, ``index`` the proof line number."""

    def __init__(self, message: str, lineno: Optional[int] = None, index: Optional[int] = None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno
        self.index = index


@dataclass(frozen=True)
class Ax:
    scheme: str
    sigma: tuple[tuple[str, Formula], ...]

    def text(self) -> str:
        inner = ", ".join(f"%{k}:={to_text(v)}" for k, v in self.sigma)
        return f"ax {self.scheme} {{{inner}}}"


@dataclass(frozen=True)
class MP:
    minor: int
    major: int

    def text(self) -> str:
        return f"mp {self.minor} {self.major}"


@dataclass(frozen=True)
class Na:
    premise: int

    def text(self) -> str:
        return f"na {self.premise}"


@dataclass(frozen=True)
class IPC:
    cited: tuple[int, ...] = ()

    def text(self) -> str:
        return "ipc" + (" " + ",".join(map(str, self.cited)) if self.cited else "")


Justification = Union[Ax, MP, Na, IPC]


@dataclass(frozen=True)
class Line:
    index: int
    formula: Formula
    why: Justification

    def text(self) -> str:
        return f"{self.index}. {to_text(self.formula)} ; {self.why.text()}"


@dataclass
class ProofScript:
    axiom_set: str
    goal: Formula
    lines: list[Line] = field(default_factory=list)
    name: str = ""

    def text(self) -> str:
        out = [f"logic: {self.axiom_set}", f"goal: {to_text(self.goal)}"]
        out += [ln.text() for ln in self.lines]
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        where = f"line {self.line}" if self.line is not None else "script"
        return f"rejected at {where}: {self.reason}"


# -- parsing -----------------------------------------------------------------

_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.*?)\s*$")
_AX = re.compile(r"^ax\s+(\S+)\s*(?:\{(.*)\})?$")


def _ints(text: str, lineno: int) -> tuple[int, ...]:
    text = text.strip().strip("[]")
    if not text:
        return ()
    try:
        return tuple(int(t) for t in re.split(r"[\s,]+", text) if t)
    except ValueError:
        raise ScriptError(f"bad line reference list {text!r}", lineno) from None


def _justification(text: str, lineno: int) -> Justification:
    head = text.split(None, 1)[0] if text.split() else ""
    rest = text[len(head):].strip()
    if head == "ax":
        m = _AX.match(text)
        if not m:
            raise ScriptError(f"bad axiom justification {text!r}", lineno)
        sigma = []
        body = (m.group(2) or "").strip()
        for item in filter(None, (s.strip() for s in body.split(","))):
            key, sep, value = item.partition(":=")
            if not sep:
                raise ScriptError(f"bad binding {item!r}", lineno)
            key = key.strip().lstrip("%")
            try:
                sigma.append((key, parse(value)))
            except ParseError as exc:
                raise ScriptError(f"binding %{key}: {exc}", lineno) from None
        return Ax(m.group(1), tuple(sigma))
    if head == "mp":
        nums = _ints(rest, lineno)
        if len(nums) != 2:
            raise ScriptError("mp takes two line numbers", lineno)
        return MP(*nums)
    if head == "na":
        nums = _ints(rest, lineno)
        if len(nums) != 1:
            raise ScriptError("na takes one line number", lineno)
        return Na(nums[0])
    if head == "ipc":
        return IPC(_ints(rest, lineno))
    raise ScriptError(f"unknown rule {head!r}", lineno)


def parse_script(text: str, name: str = "") -> ProofScript:
    logic = goal = None
    lines: list[Line] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("logic:"):
            logic = line[len("logic:"):].strip()
            continue
        if line.startswith("goal:"):
            try:
                goal = parse(line[len("goal:"):])
            except ParseError as exc:
                raise ScriptError(f"goal: {exc}", lineno) from None
            continue
        m = _LINE.match(line)
        if not m:
            raise ScriptError("expected 'n. formula ; rule'", lineno)
        index = int(m.group(1))
        try:
            formula = parse(m.group(2))
            why = _justification(m.group(3), lineno)
        except ParseError as exc:
            raise ScriptError(str(exc), lineno, index) from None
        except ScriptError as exc:
            raise ScriptError(str(exc), None, index) from None
        lines.append(Line(index, formula, why))
    if logic is None:
        raise ScriptError("missing 'logic:' header")
    if goal is None:
        raise ScriptError("missing 'goal:' header")
    return ProofScript(logic, goal, lines, name)


# -- checking ---------------------------------------------------------------

def check_text(text: str) -> Verdict:
    """Parse and check; parse errors become rejections at their source line."""
    try:
        script = parse_script(text)
    except ScriptError as exc:
        return Verdict(False, exc.index, str(exc))
    return check_proof(script)


def check_proof(script: ProofScript) -> Verdict:
    try:
        logic: AxiomSet = axiom_set(script.axiom_set)
    except KeyError as exc:
        return Verdict(False, None, str(exc.args[0]))
    seen: dict[int, Formula] = {}
    last = 0
    for ln in script.lines:
        if ln.index <= last:
            return Verdict(False, ln.index, "line numbers must increase")
        last = ln.index
        reason = _check_line(ln, seen, logic)
        if reason:
            return Verdict(False, ln.index, reason)
        seen[ln.index] = ln.formula
    if not script.lines:
        return Verdict(False, None, "empty script")
    if script.lines[-1].formula != script.goal:
        return Verdict(False, script.lines[-1].index, "last line is not the goal")
    return Verdict(True)


def references(why: Justification) -> tuple[int, ...]:
    if isinstance(why, MP):
        return (why.minor, why.major)
    if isinstance(why, Na):
        return (why.premise,)
    if isinstance(why, IPC):
        return why.cited
    return ()


def _check_line(ln: Line, seen: dict[int, Formula], logic: AxiomSet) -> str:
    why, phi = ln.why, ln.formula
    for i in references(why):
        if i not in seen:
            return f"reference to line {i}, which is not an earlier line"
    if isinstance(why, Ax):
        try:
            get_scheme(why.scheme)
        except KeyError as exc:
            return str(exc.args[0])
        if why.scheme not in logic:
            return f"scheme {why.scheme} is not in {logic.name}"
        try:
            inst = scheme_instance(why.scheme, dict(why.sigma))
        except (KeyError, ValueError) as exc:
            return str(exc.args[0]) if exc.args else "bad instance"
        if inst != phi:
            return f"not the stated instance of {why.scheme}: expected {to_text(inst)}"
        return ""
    if isinstance(why, MP):
        minor, major = seen[why.minor], seen[why.major]
        if major != Impl(minor, phi):
            return f"line {why.major} is not line {why.minor} -> this line"
        return ""
    if isinstance(why, Na):
        prem = seen[why.premise]
        if not isinstance(prem, Impl):
            return f"line {why.premise} is not an implication"
        if phi != Lewis(prem.left, prem.right):
            return f"this line is not the Lewis arrow form of line {why.premise}"
        return ""
    if isinstance(why, IPC):
        if not ipc_entails([seen[i] for i in why.cited], phi):
            return "not an IPC consequence of the cited lines"
        return ""
    return "unknown justification"


def expand_lob(lines: Sequence[Line], premise: int, logic: str) -> list[Line]:
    """Löb's rule: from line ``premise`` = ``[]A -> A`` derive ``A``.

    Returns the five lines the rule stands for; needs Lbox in the axiom set.
    """
    if "Lbox" not in axiom_set(logic):
        raise ScriptError(f"Löb's rule needs Lbox, which is not in {logic}")
    by_index = {ln.index: ln for ln in lines}
    if premise not in by_index:
        raise ScriptError(f"no line {premise}")
    f = by_index[premise].formula
    if not (isinstance(f, Impl) and f.left == box(f.right)):
        raise ScriptError(f"line {premise} is not of the form []A -> A")
    a = f.right
    k = max(by_index) + 1
    return [
        Line(k, Impl(TOP, f), IPC((premise,))),
        Line(k + 1, box(f), Na(k)),
        Line(k + 2, Impl(box(f), box(a)), Ax("Lbox", (("phi", a),))),
        Line(k + 3, box(a), MP(k + 1, k + 2)),
        Line(k + 4, a, MP(k + 3, premise)),
    ]


# -- the bundled catalog -----------------------------------------------------

CATALOG = [
    "La-from-W",
    "Lbox-from-La",
    "Lbox-from-Wcirc",
    "Lbox-from-Lcirca",
    "4box-from-4circa",
    "Lcirca-in-iGLWcirc",
    "4circa-in-iGLacirc",
    "Lcirca-in-iGLa",
]


def script_text(name: str) -> str:
    return (fixture("proofs") / f"{name}.proof").read_text()


def load_script(name_or_path: str) -> ProofScript:
    if name_or_path in CATALOG:
        return parse_script(script_text(name_or_path), name_or_path)
    with open(name_or_path) as fh:
        return parse_script(fh.read(), name_or_path)


@dataclass
class CatalogEntry:
    name: str
    verdict: Verdict
    semantic: Optional[dict] = None


def verify_catalog(semantic: bool = False, max_worlds: int = 4) -> list[CatalogEntry]:
    """Check every bundled script; optionally spot-check every line semantically."""
    out = []
    for name in CATALOG:
        script = load_script(name)
        verdict = check_proof(script)
        entry = CatalogEntry(name, verdict)
        if semantic and verdict:
            from .sweeps import spot_check_script
            entry.semantic = spot_check_script(script, max_worlds)
        out.append(entry)
    return out


# -- single-token mutations --------------------------------------------------

def _positions(f: Formula, path=()):
    yield path, f
    if isinstance(f, BINARY):
        yield from _positions(f.left, path + (0,))
        yield from _positions(f.right, path + (1,))


def _replace_at(f: Formula, path, new: Formula) -> Formula:
    if not path:
        return new
    if path[0] == 0:
        return type(f)(_replace_at(f.left, path[1:], new), f.right)
    return type(f)(f.left, _replace_at(f.right, path[1:], new))


def formula_mutations(f: Formula, fresh: str = "z"):
    """Every formula differing from ``f`` in exactly one token."""
    for path, sub in _positions(f):
        if isinstance(sub, (Atom, Top, Bot)):
            yield _replace_at(f, path, Atom(fresh))
        elif isinstance(sub, BINARY):
            for op in BINARY:
                if op is not type(sub):
                    yield _replace_at(f, path, op(sub.left, sub.right))


def _retarget(why: Justification, slot: int, value: int) -> Justification:
    refs = list(references(why))
    refs[slot] = value
    if isinstance(why, MP):
        return MP(*refs)
    if isinstance(why, Na):
        return Na(refs[0])
    return IPC(tuple(refs))


def mutations(script: ProofScript):
    """Yield ``(line index, description, mutated script)`` for single-token edits.

    Covers a token change in each line's formula and each change of a cited
    line number to another earlier line or to the citing line itself.
    """
    for pos, ln in enumerate(script.lines):
        def variant(new_line: Line) -> ProofScript:
            lines = list(script.lines)
            lines[pos] = new_line
            return ProofScript(script.axiom_set, script.goal, lines, script.name)

        for g in formula_mutations(ln.formula):
            yield ln.index, f"formula {to_text(g)}", variant(Line(ln.index, g, ln.why))
        refs = references(ln.why)
        earlier = [x.index for x in script.lines[:pos]] + [ln.index]
        for slot, old in enumerate(refs):
            for new in earlier:
                if new != old:
                    why = _retarget(ln.why, slot, new)
                    yield ln.index, f"cite {new} for {old}", variant(Line(ln.index, ln.formula, why))


def dependents(script: ProofScript, index: int) -> set[int]:
    return {ln.index for ln in script.lines if index in references(ln.why)}
