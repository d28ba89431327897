"""The shipped catalog of named triples.

Twelve entries: the six classes previously proven minimal (for the two
parameterised families a periodic representative stands in), and six
newer examples that carry a documented bound on the one-row
neighbourhood parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .deltaspec import DeltaSpec, parse_spec
from .errors import InputError


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    spec: DeltaSpec
    expected_m_beta: int | None
    note: str


_ENTRIES = (
    ("bipartite-permutation", None, "proven minimal; chain links only"),
    ("unit-interval", None, "proven minimal; chain links over clique columns"),
    ("bichain", None, "proven minimal; even-to-odd long bonds"),
    ("split-permutation", None, "proven minimal; even-column bonds, alternating cliques"),
    ("binary-alpha-periodic", None, "periodic representative of the binary-letter family"),
    ("quaternary-alpha-recurrent", None, "periodic representative of the four-letter family"),
    ("clique-columns", 1, "documented one-row class bound 1"),
    ("hub-bonds", 2, "documented one-row class bound 2"),
    ("offset-bonds", 3, "documented one-row class bound 3"),
    ("odd-parity-bonds", 3, "documented one-row class bound 3"),
    ("even-parity-bonds", 2, "documented one-row class bound 2"),
    ("range-bonds", 4, "documented one-row class bound 4 at band width 4"),
)


def entry_text(name: str) -> str:
    ref = resources.files("gridcw.data").joinpath(f"{name}.delta")
    try:
        return ref.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputError(f"no catalog entry named {name!r}") from exc


def load_entry(name: str) -> CatalogEntry:
    for ename, bound, note in _ENTRIES:
        if ename == name:
            return CatalogEntry(name=name, spec=parse_spec(entry_text(name)),
                                expected_m_beta=bound, note=note)
    raise InputError(f"no catalog entry named {name!r}")


def all_entries() -> list[CatalogEntry]:
    return [load_entry(name) for name, _, _ in _ENTRIES]


def entry_names() -> list[str]:
    return [name for name, _, _ in _ENTRIES]
