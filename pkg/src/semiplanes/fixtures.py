"""Packaged reference data: representative tuples and their published invariants."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .binmat import parse_tuple_line

KNOWN_COUNT = 13


@dataclass(frozen=True)
class PlaneRecord:
    plane: str
    tuple: tuple[int, ...]
    at_order: int
    at_group: str | None
    orbits: tuple[tuple[tuple[int, int], ...], ...]
    sa: tuple[tuple[int, int], ...]
    zn: tuple[int, ...]
    aut: int | None = None
    constructions: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def known(self) -> bool:
        return self.aut is not None

    def orbits_sorted(self):
        """Profiles with terms sorted by orbit length, as produced by classify."""
        return tuple(tuple(sorted(p, key=lambda t: t[1])) for p in self.orbits)

    def sa_sorted(self):
        return tuple(sorted(self.sa, key=lambda t: t[1]))

    @property
    def orbits_consistent(self) -> bool:
        """Each profile covers exactly 65 points and every length divides |At|."""
        return all(sum(a * b for a, b in p) == 65 and all(self.at_order % b == 0 for _, b in p)
                   for p in self.orbits)


def data_path(name: str):
    return resources.files("semiplanes").joinpath("data").joinpath(name)


@lru_cache(maxsize=1)
def plane_records() -> dict[str, PlaneRecord]:
    raw = json.loads(data_path("planes.json").read_text())
    out = {}
    for r in raw:
        out[r["plane"]] = PlaneRecord(
            plane=r["plane"],
            tuple=tuple(r["tuple"]),
            at_order=r["at_order"],
            at_group=r.get("at_group"),
            orbits=tuple(tuple(tuple(p) for p in prof) for prof in r["orbits"]),
            sa=tuple(tuple(p) for p in r["sa"]),
            zn=tuple(r["zn"]),
            aut=r.get("aut"),
            constructions=r.get("constructions", {}),
        )
    return out


def labelled_tuples(name: str) -> list[tuple[str, tuple[int, ...]]]:
    """Read a packaged tuple file whose tuples are each preceded by a '# LABEL' comment."""
    out = []
    label = None
    for line in data_path(name).read_text().splitlines():
        s = line.strip()
        if s.startswith("#"):
            word = s[1:].strip()
            if word and " " not in word:
                label = word
            continue
        t = parse_tuple_line(s)
        if t is not None:
            out.append((label, t))
    return out


def known_tuples() -> list[tuple[str, tuple[int, ...]]]:
    return labelled_tuples("known.tuples")


def new_tuples() -> list[tuple[str, tuple[int, ...]]]:
    return labelled_tuples("new.tuples")
