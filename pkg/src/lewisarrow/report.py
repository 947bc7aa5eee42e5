"""Rendering reproduction results as text and, optionally, as figures."""
from __future__ import annotations

import os
from typing import Iterable, Sequence

from .kernel import CATALOG, check_proof, load_script
from .schemes import BASES, atom_form


def format_results(results: Sequence, quiet: bool = False) -> str:
    """A fixed-width table, one row per check; ``quiet`` keeps only failures."""
    rows = [r for r in results if not (quiet and r.passed)]
    lines = []
    if not quiet:
        lines.append(f"{'check':<20} {'status':<6} {'seconds':>8}  detail")
        lines.append("-" * 78)
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{r.check.id:<20} {status:<6} {r.elapsed:8.2f}  {r.detail}")
    if not quiet:
        failed = sum(not r.passed for r in results)
        lines.append("-" * 78)
        lines.append(f"{len(results) - failed} passed, {failed} failed")
    return "\n".join(lines) + ("\n" if lines else "")


# -- which logic contains which, according to the bundled derivations -------

def _logic_for(scheme: str) -> str:
    for name, schemes in BASES.items():
        if schemes == BASES["iA-"] | {scheme}:
            return name
    return f"iA-+{scheme}"


def inclusions() -> list[tuple[str, str, str]]:
    """``(weaker, stronger, script)`` edges from accepted catalog scripts.

    A script in logic L whose goal is the atom form of scheme S shows that
    iA- plus S is contained in L.
    """
    edges = []
    for name in CATALOG:
        script = load_script(name)
        if not check_proof(script):
            continue
        for s in ("La", "Lbox", "4box", "Lcirca", "4circa", "W", "Wcirc"):
            if atom_form(s) == script.goal:
                weaker = _logic_for(s)
                if weaker != script.axiom_set:
                    edges.append((weaker, script.axiom_set, name))
                break
    return edges


def _ranks(nodes: Iterable[str], edges) -> dict[str, int]:
    rank = {n: 0 for n in nodes}
    for _ in range(len(rank)):
        for a, b, _ in edges:
            rank[b] = max(rank[b], rank[a] + 1)
    return rank


def draw_figures(results: Sequence, directory: str) -> list[str]:
    """Write a timing bar chart and the inclusion diagram; return the paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(directory, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(8, 0.4 * len(results) + 1.2))
    names = [r.check.id for r in results][::-1]
    secs = [r.elapsed for r in results][::-1]
    colors = ["tab:green" if r.passed else "tab:red" for r in results][::-1]
    ax.barh(names, secs, color=colors)
    ax.set_xlabel("seconds")
    ax.set_title("reproduction checks")
    fig.tight_layout()
    path = os.path.join(directory, "timings.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    edges = inclusions()
    nodes = sorted({x for a, b, _ in edges for x in (a, b)} | {"iA-"})
    edges = edges + [("iA-", n, "") for n in nodes if n != "iA-" and not any(b == n for _, b, _ in edges)]
    rank = _ranks(nodes, edges)
    levels: dict[int, list[str]] = {}
    for n in nodes:
        levels.setdefault(rank[n], []).append(n)
    pos = {}
    for k, ns in levels.items():
        for i, n in enumerate(sorted(ns)):
            pos[n] = (i - (len(ns) - 1) / 2, k)
    fig, ax = plt.subplots(figsize=(8, 1.6 * (max(levels) + 1) + 1))
    for a, b, label in edges:
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.annotate("", xy=(x1, y1 - 0.15), xytext=(x0, y0 + 0.15),
                    arrowprops=dict(arrowstyle="->", color="0.4"))
        if label:
            ax.text((x0 + x1) / 2, (y0 + y1) / 2, label, fontsize=7, color="0.3", ha="center")
    for n, (x, y) in pos.items():
        ax.text(x, y, n, ha="center", va="center", fontsize=10,
                bbox=dict(boxstyle="round", facecolor="white", edgecolor="0.2"))
    xs = [x for x, _ in pos.values()]
    ax.set_xlim(min(xs) - 1, max(xs) + 1)
    ax.set_ylim(-0.6, max(levels) + 0.6)
    ax.axis("off")
    ax.set_title("inclusions shown by the bundled derivations (arrow: contained in)")
    fig.tight_layout()
    path = os.path.join(directory, "logics.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)
    return paths
