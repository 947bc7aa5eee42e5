"""Locating the bundled example files."""
from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

FIXTURES = ("slimmesmurf.frame", "querusmurf.frame", "mace4-6elem.alg")


def fixture(name: str) -> Path:
    path = Path(str(resources.files("lewisarrow").joinpath("data").joinpath(name)))
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture {name!r}")
    return path


def resolve(path: str) -> Path:
    """The file itself if it exists, else the bundled fixture of that basename."""
    if os.path.exists(path):
        return Path(path)
    base = os.path.basename(path)
    try:
        return fixture(base)
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}") from None


def read(path: str) -> str:
    return resolve(path).read_text()
