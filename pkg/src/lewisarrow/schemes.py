"""Named axiom schemes, axiom sets, and matching formulas against schemes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import fixpoint as fx
from .formula import (
    BINARY, Atom, Formula, Meta, fill, metavars, normalize, parse, as_formula, size,
)


@dataclass(frozen=True)
class Scheme:
    name: str
    metavars: tuple[str, ...]
    template: Optional[Formula]
    family: bool = False
    label: str = ""

    def __post_init__(self):
        if self.template is not None:
            used = set(metavars(self.template))
            missing = used - set(self.metavars)
            if missing:
                raise ValueError(f"{self.name}: unlisted metavariables {sorted(missing)}")


_TEMPLATES = {
    "Tr": "((%phi => %psi) & (%psi => %chi)) -> (%phi => %chi)",
    "Ka": "((%phi => %psi) & (%phi => %chi)) -> (%phi => (%psi & %chi))",
    "Di": "((%phi => %chi) & (%psi => %chi)) -> ((%phi | %psi) => %chi)",
    "Box": "(%phi => %psi) -> [](%phi -> %psi)",
    "4box": "[]%phi -> [][]%phi",
    "4sub": "%phi => []%phi",
    "Lbox": "[]([]%phi -> %phi) -> []%phi",
    "W": "(%phi => %psi) -> (([]%psi -> %phi) => %psi)",
    "S": "%phi -> []%phi",
    "La": "([]%phi -> %phi) => %phi",
    "P": "(%phi => %psi) -> [](%phi => %psi)",
    "Wstar": "(%phi => %psi) -> (((%phi => %psi) -> %phi) => %psi)",
    "Wcirc": "((%phi & (%phi => %psi)) => %psi) -> (%phi => %psi)",
    # main connective is material implication, see the notes in the README
    "Lcirca": "(%phi => ((%phi => %psi) -> %psi)) -> (%phi => %psi)",
    "4circa": "(%phi => %psi) -> (%phi => (%phi => %psi))",
    "44circa": "(%phi => (%psi => %chi)) -> (%phi => (%psi => (%phi => (%psi => %chi))))",
}

_FAMILY_LABELS = {
    "JS": "psi[T] => chi[T]  <->  (psi => chi)[r := psi[T] => chi[T]]",
    "JV": "psi[[]chi[T]] => chi[T]  <->  (psi => chi)[r := that fixpoint]",
    "X": "JV fixpoint <-> JS fixpoint",
}


def _build_registry() -> dict[str, Scheme]:
    reg = {}
    for name, text in _TEMPLATES.items():
        template = parse(text)
        reg[name] = Scheme(name, tuple(metavars(template)), template, label=text)
    for name, label in _FAMILY_LABELS.items():
        reg[name] = Scheme(name, ("psi", "chi", "r"), None, family=True, label=label)
    return reg


SCHEMES: dict[str, Scheme] = _build_registry()

# metavariable -> atom used by the atom-form convention
ATOM_FORM_NAMES = {"phi": "p", "psi": "q", "chi": "s"}


def get_scheme(name: str) -> Scheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise KeyError(f"unknown scheme {name!r}") from None


def _clean(sigma: Mapping[str, object]) -> dict[str, object]:
    return {k.lstrip("%"): v for k, v in sigma.items()}


def scheme_instance(name: str, sigma: Mapping[str, object]) -> Formula:
    """Instantiate a scheme; keys may be written with or without ``%``."""
    scheme = get_scheme(name)
    sigma = _clean(sigma)
    if scheme.family:
        for key in ("psi", "chi"):
            if key not in sigma:
                raise KeyError(f"{name}: missing binding for %{key}")
        psi, chi = as_formula(sigma["psi"]), as_formula(sigma["chi"])
        r = sigma.get("r", "r")
        r = r.name if isinstance(r, Atom) else str(r)
        if name == "X":
            return fx.collapse_equation(psi, chi, r)
        return fx.fixpoint_equation(fx.FixpointProblem(psi, chi, r, name))
    missing = [m for m in scheme.metavars if m not in sigma]
    if missing:
        raise KeyError(f"{name}: missing binding for %{missing[0]}")
    return fill(scheme.template, {k: as_formula(v) for k, v in sigma.items()})


def atom_form(name: str) -> Formula:
    """The template with %phi, %psi, %chi read as the atoms p, q, s."""
    scheme = get_scheme(name)
    if scheme.family:
        raise ValueError(f"{name} is a family; instantiate it with psi, chi and r")
    return fill(scheme.template, {m: Atom(ATOM_FORM_NAMES[m]) for m in scheme.metavars})


# -- matching ----------------------------------------------------------------

def _collect(template: Formula, target: Formula, cands: dict[str, list[Formula]]) -> None:
    if isinstance(template, Meta):
        bucket = cands.setdefault(template.name, [])
        if target not in bucket:
            bucket.append(target)
        return
    if isinstance(template, BINARY) and type(template) is type(target):
        _collect(template.left, target.left, cands)
        _collect(template.right, target.right, cands)


def _exact(template: Formula, target: Formula, sigma: dict[str, Formula]) -> bool:
    if isinstance(template, Meta):
        bound = sigma.get(template.name)
        if bound is None:
            sigma[template.name] = target
            return True
        return bound == target
    if isinstance(template, BINARY):
        return (type(template) is type(target)
                and _exact(template.left, target.left, sigma)
                and _exact(template.right, target.right, sigma))
    return template == target


def match_template(phi: Formula, template: Formula, normalized: bool = True,
                   limit: int = 4096) -> Optional[dict[str, Formula]]:
    """Find bindings of the template's metavariables producing ``phi``.

    Plain syntactic matching is tried first.  With ``normalized`` set, a
    candidate substitution is also accepted when its instance and ``phi``
    agree after :func:`normalize`.  Candidates are harvested from aligned
    positions in preorder and tried smallest first, so the result is
    deterministic.
    """
    sigma: dict[str, Formula] = {}
    if _exact(template, phi, sigma):
        return sigma
    if not normalized:
        return None
    names = metavars(template)
    cands: dict[str, list[Formula]] = {}
    nphi = normalize(phi)
    _collect(template, phi, cands)
    _collect(template, nphi, cands)
    _collect(normalize(template), nphi, cands)
    if any(n not in cands for n in names):
        return None
    # smaller bindings first, ties broken by harvest order
    pools = [sorted(cands[n], key=size) for n in names]
    for count, choice in enumerate(itertools.product(*pools)):
        if count >= limit:
            break
        trial = dict(zip(names, choice))
        if normalize(fill(template, trial)) == nphi:
            return trial
    return None


def match_scheme(phi: Formula, name: str, normalized: bool = True) -> Optional[dict[str, Formula]]:
    """Substitution ``sigma`` with ``scheme_instance(name, sigma)`` equal to ``phi``.

    For ordinary schemes equality holds syntactically when plain matching
    succeeds, otherwise after normalization of both sides.  Families (JS,
    JV, X) are matched syntactically by recovering ``psi``, ``chi`` and a
    fresh ``r``.
    """
    scheme = get_scheme(name)
    phi = as_formula(phi)
    if scheme.family:
        return fx.match_family(phi, name)
    return match_template(phi, scheme.template, normalized)


# -- axiom sets --------------------------------------------------------------

@dataclass(frozen=True)
class AxiomSet:
    name: str
    schemes: frozenset[str] = field(default_factory=frozenset)

    def __contains__(self, scheme: str) -> bool:
        return scheme in self.schemes

    def plus(self, *names: str) -> "AxiomSet":
        for n in names:
            get_scheme(n)
        return AxiomSet("+".join([self.name, *names]), self.schemes | frozenset(names))


_IA_MINUS = frozenset({"Tr", "Ka"})

BASES: dict[str, frozenset[str]] = {
    "iA-": _IA_MINUS,
    "iA": _IA_MINUS | {"Di"},
    "iGLbox-": _IA_MINUS | {"Lbox"},
    "iGLa-": _IA_MINUS | {"La"},
    "iGLW-": _IA_MINUS | {"W"},
    "iGLP-": _IA_MINUS | {"Lbox", "P"},
    "iGLWstar-": _IA_MINUS | {"Wstar"},
    "iGLWcirc-": _IA_MINUS | {"Wcirc"},
    "iGLacirc-": _IA_MINUS | {"Lcirca"},
}


def axiom_set(name: str) -> AxiomSet:
    """Resolve ``base+Scheme+...`` (for example ``iA-+4circa``)."""
    base, *extra = [part.strip() for part in name.split("+")]
    if base not in BASES:
        raise KeyError(f"unknown axiom set {base!r}")
    out = AxiomSet(base, BASES[base])
    return out.plus(*extra) if extra else out


def parse_axiom_list(text: str) -> frozenset[str]:
    """Comma separated scheme names and axiom-set names, as used on the CLI."""
    out: set[str] = set()
    for item in filter(None, (s.strip() for s in text.split(","))):
        if item in SCHEMES:
            out.add(item)
        else:
            out |= axiom_set(item).schemes
    return frozenset(out)
