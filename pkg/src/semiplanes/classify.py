"""Isomorphism and isotopy testing, S/A sums, autotopy groups and orbit profiles.

Isomorphism is decided by a canonical form: for every generating tuple of
minimal length, grow a basis from the identity and the generators by taking
products in a fixed order, and record the structure constants in that basis.
The lexicographically smallest record is a complete invariant, and the
tuples attaining it are in bijection with the automorphisms.

A plane is labelled by the smallest canonical form over all principal
isotopes of any coordinatizing semifield.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .binmat import BitMatrix
from .semifield import (
    PERMUTATION_NAMES,
    Isotopy,
    SemifieldTable,
    ZNTuple,
    nuclei_and_center,
    permuted_semifield,
    primitive_elements,
    primitivity_class,
)

# which isotopy component acts on each line of the fundamental triangle,
# in the reporting order (L_x, L_inf, L_y); fitted against the published profiles
LINE_COMPONENTS = ("G", "F", "H")


class ConsistencyError(RuntimeError):
    """An internal identity that must hold exactly did not."""


# -- isomorphisms ----------------------------------------------------------


@dataclass(frozen=True)
class IsoMap:
    """Additive bijection given by its action on all elements."""

    perm: tuple[int, ...]

    @property
    def matrix(self) -> BitMatrix:
        d = len(self.perm).bit_length() - 1
        return BitMatrix.from_columns([self.perm[1 << i] for i in range(d)], d)

    def __call__(self, x: int) -> int:
        return self.perm[x]


def isomorphisms(t1: SemifieldTable, t2: SemifieldTable) -> list[IsoMap]:
    if t1.order != t2.order:
        raise ValueError("tables of different order")
    maps = _kernels.iso_maps(t1.product, t1.identity, t2.product, t2.identity, t1.dim)
    return [IsoMap(tuple(int(v) for v in row)) for row in maps]


def is_isomorphism(m: IsoMap, t1: SemifieldTable, t2: SemifieldTable) -> bool:
    p = np.asarray(m.perm)
    return bool(np.array_equal(p[t1.product], t2.product[np.ix_(p, p)]))


def automorphism_count(t: SemifieldTable) -> int:
    return len(t.canonical()[2])


# -- principal isotopes ----------------------------------------------------


def principal_isotope(t: SemifieldTable, a: int, b: int) -> SemifieldTable:
    """x o y = r*s where r*b = x and a*s = y; identity a*b."""
    if a == 0 or b == 0:
        raise ValueError("principal isotope needs nonzero a and b")
    out = np.zeros_like(t.product)
    e = _kernels.isotope(t.product, a, b, out)
    return SemifieldTable(out, int(e))


def isotope_witness(t: SemifieldTable, a: int, b: int, psi: Sequence[int]) -> Isotopy:
    """Isotopy t -> target built from an isomorphism psi: D_{a,b} -> target."""
    T = t.product.astype(np.int64)
    psi = np.asarray(psi, dtype=np.int64)
    return Isotopy(F=psi[T[:, b]], G=psi[T[a, :]], H=psi)


@dataclass
class PlaneScan:
    """Canonical data of all (q-1)^2 principal isotopes of one semifield."""

    ks: np.ndarray
    forms: np.ndarray
    auts: np.ndarray
    q: int

    @classmethod
    def of(cls, t: SemifieldTable) -> "PlaneScan":
        ks, forms, auts = _kernels.plane_scan(t.product, t.dim)
        return cls(ks, forms, auts, t.order)

    def key(self, i: int) -> bytes:
        return bytes([int(self.ks[i])]) + self.forms[i].tobytes()

    def pair(self, i: int) -> tuple[int, int]:
        Q = self.q - 1
        return i // Q + 1, i % Q + 1

    @cached_property
    def classes(self) -> dict[bytes, int]:
        """Isomorphism class label -> |Aut|."""
        out: dict[bytes, int] = {}
        for i in range(len(self.ks)):
            out.setdefault(self.key(i), int(self.auts[i]))
        return out

    @cached_property
    def label(self) -> bytes:
        return min(self.classes)

    def indices_of(self, key: bytes) -> list[int]:
        return [i for i in range(len(self.ks)) if self.key(i) == key]


_scan_cache: dict[int, PlaneScan] = {}


def plane_scan(t: SemifieldTable) -> PlaneScan:
    h = hash(t)
    hit = _scan_cache.get(h)
    if hit is None:
        if len(_scan_cache) > 256:
            _scan_cache.clear()
        hit = _scan_cache[h] = PlaneScan.of(t)
    return hit


def plane_label(t: SemifieldTable) -> bytes:
    return plane_scan(t).label


@dataclass(frozen=True)
class IsotopyResult:
    isotopic: bool
    witness: Isotopy | None = None

    def __bool__(self) -> bool:
        return self.isotopic


def is_isotopic(t1: SemifieldTable, t2: SemifieldTable) -> IsotopyResult:
    """Albert reduction: t2 is isotopic to t1 iff it is isomorphic to a principal isotope of t1."""
    if t1.order != t2.order:
        return IsotopyResult(False)
    target = t2.label()
    scan = plane_scan(t1)
    if target not in scan.classes:
        return IsotopyResult(False)
    i = scan.indices_of(target)[0]
    a, b = scan.pair(i)
    iso = principal_isotope(t1, a, b)
    maps = isomorphisms(iso, t2)
    if not maps:
        raise ConsistencyError("canonical forms agree but no isomorphism was found")
    w = isotope_witness(t1, a, b, maps[0].perm)
    if not w.verify(t1.product, t2.product):
        raise ConsistencyError("isotopy witness failed verification")
    return IsotopyResult(True, w)


# -- S/A sums --------------------------------------------------------------


@dataclass(frozen=True)
class SADecomposition:
    terms: tuple[tuple[int, int], ...]  # (number of classes, |Aut|), sorted by |Aut|
    q: int

    @property
    def total(self) -> Fraction:
        return sum((Fraction(c, a) for c, a in self.terms), Fraction(0))

    @property
    def at_order(self) -> int:
        at = Fraction((self.q - 1) ** 2) / self.total
        if at.denominator != 1:
            raise ConsistencyError(f"|At| = {at} is not an integer")
        return int(at)

    @property
    def class_count(self) -> int:
        return sum(c for c, _ in self.terms)

    def __str__(self) -> str:
        return " + ".join(f"{c}/{a}" for c, a in self.terms)


def sa_decomposition(t: SemifieldTable) -> SADecomposition:
    counts = Counter(plane_scan(t).classes.values())
    terms = sorted(((n, a) for a, n in counts.items()), key=lambda p: p[1])
    return SADecomposition(tuple(terms), t.order)


# -- autotopy group --------------------------------------------------------


@dataclass(frozen=True)
class AutotopyTriple:
    F: tuple[int, ...]
    G: tuple[int, ...]
    H: tuple[int, ...]

    def holds(self, t: SemifieldTable) -> bool:
        return Isotopy(np.asarray(self.F), np.asarray(self.G), np.asarray(self.H)).verify(t.product, t.product)

    def compose(self, other: "AutotopyTriple") -> "AutotopyTriple":
        """self after other."""
        return AutotopyTriple(*(tuple(s[o] for o in oth) for s, oth in
                                ((self.F, other.F), (self.G, other.G), (self.H, other.H))))

    def inverse(self) -> "AutotopyTriple":
        def inv(p):
            out = [0] * len(p)
            for i, v in enumerate(p):
                out[v] = i
            return tuple(out)
        return AutotopyTriple(inv(self.F), inv(self.G), inv(self.H))

    @property
    def matrices(self) -> tuple[BitMatrix, BitMatrix, BitMatrix]:
        return tuple(IsoMap(p).matrix for p in (self.F, self.G, self.H))


def autotopy_arrays(t: SemifieldTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Components F, G, H of every autotopy as (|At|, q) arrays."""
    scan = plane_scan(t)
    own = t.label()
    Fs, Gs, Hs = [], [], []
    T = t.product.astype(np.int64)
    for i in scan.indices_of(own):
        a, b = scan.pair(i)
        iso = principal_isotope(t, a, b)
        maps = _kernels.iso_maps(iso.product, iso.identity, t.product, t.identity, t.dim)
        for psi in maps:
            Fs.append(psi[T[:, b]])
            Gs.append(psi[T[a, :]])
            Hs.append(psi)
    return np.array(Fs), np.array(Gs), np.array(Hs)


def autotopy_group(t: SemifieldTable) -> list[AutotopyTriple]:
    F, G, H = autotopy_arrays(t)
    return [AutotopyTriple(tuple(f.tolist()), tuple(g.tolist()), tuple(h.tolist())) for f, g, h in zip(F, G, H)]


# -- orbit profiles --------------------------------------------------------

OrbitProfile = tuple[tuple[int, int], ...]  # ((count, length), ...) sorted by length


def orbit_profile(perms: np.ndarray, q: int) -> OrbitProfile:
    """Orbits on the q affine points plus the fixed triangle vertex."""
    labels = _kernels.orbit_labels(np.ascontiguousarray(perms, dtype=np.int64), q)
    lengths = Counter(Counter(labels.tolist()).values())
    lengths[1] += 1
    return tuple((n, length) for length, n in sorted(lengths.items()))


def triangle_orbits(t: SemifieldTable, arrays=None) -> tuple[OrbitProfile, OrbitProfile, OrbitProfile]:
    F, G, H = autotopy_arrays(t) if arrays is None else arrays
    comp = {"F": F, "G": G, "H": H}
    return tuple(orbit_profile(comp[c], t.order) for c in LINE_COMPONENTS)


def format_profile(p: Iterable[Sequence[int]]) -> str:
    return " + ".join(f"{a}[{b}]" for a, b in p)


# -- S3 classes ------------------------------------------------------------


@dataclass(frozen=True)
class Hexagon:
    labels: tuple[bytes, ...]  # plane label per permutation, in PERMUTATION_NAMES order
    class_counts: tuple[int, ...] = ()  # isomorphism classes in each of those planes

    @property
    def partition(self) -> list[list[str]]:
        groups: dict[bytes, list[str]] = {}
        for name, lab in zip(PERMUTATION_NAMES, self.labels):
            groups.setdefault(lab, []).append(name)
        return sorted(groups.values(), key=lambda g: PERMUTATION_NAMES.index(g[0]))

    @property
    def plane_count(self) -> int:
        return len(set(self.labels))

    @property
    def class_label(self) -> bytes:
        return min(self.labels)


def s3_tables(t: SemifieldTable) -> list[SemifieldTable]:
    return [permuted_semifield(t, s) for s in PERMUTATION_NAMES]


def s3_class(t: SemifieldTable) -> Hexagon:
    scans = [plane_scan(u) for u in s3_tables(t)]
    return Hexagon(tuple(s.label for s in scans), tuple(len(s.classes) for s in scans))


# -- primitivity over a plane ----------------------------------------------


def primitive_coordinatizer(t: SemifieldTable) -> tuple[int, int] | None:
    """(a, b) of a principal isotope with both left and right primitive elements, or None."""
    right, left = primitive_elements(t)
    if right.any() and left.any():
        return (t.identity, t.identity)
    q = t.order
    for a in range(1, q):
        for b in range(1, q):
            iso = principal_isotope(t, a, b)
            r, l = primitive_elements(iso)
            if r.any() and l.any():
                return (a, b)
    return None


def one_sided_coordinatizer(t: SemifieldTable) -> tuple[int, int] | None:
    """(a, b) of a principal isotope with a primitive element on at least one side."""
    q = t.order
    for a in range(1, q):
        for b in range(1, q):
            r, l = primitive_elements(principal_isotope(t, a, b))
            if r.any() or l.any():
                return (a, b)
    return None


# -- class records ---------------------------------------------------------


@dataclass
class ClassRecord:
    plane: str
    at_order: int
    orbits: tuple[OrbitProfile, OrbitProfile, OrbitProfile]
    sa: tuple[tuple[int, int], ...]
    zn: ZNTuple
    primitivity: str
    hexagon: list[list[str]] = field(default_factory=list)
    aut: int | None = None
    iso_classes: int | None = None

    def to_dict(self) -> dict:
        out = {
            "plane": self.plane,
            "at_order": self.at_order,
            "orbits": [[list(p) for p in prof] for prof in self.orbits],
            "sa": [list(p) for p in self.sa],
            "zn": list(self.zn),
            "primitivity": self.primitivity,
            "hexagon": self.hexagon,
        }
        if self.aut is not None:
            out["aut"] = self.aut
        if self.iso_classes is not None:
            out["iso_classes"] = self.iso_classes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ClassRecord":
        return cls(
            plane=d["plane"],
            at_order=d["at_order"],
            orbits=tuple(tuple(tuple(p) for p in prof) for prof in d["orbits"]),
            sa=tuple(tuple(p) for p in d["sa"]),
            zn=ZNTuple(*d["zn"]),
            primitivity=d["primitivity"],
            hexagon=d.get("hexagon", []),
            aut=d.get("aut"),
            iso_classes=d.get("iso_classes"),
        )


def classify_plane(t: SemifieldTable, plane: str = "", with_hexagon: bool = True) -> ClassRecord:
    sa = sa_decomposition(t)
    arrays = autotopy_arrays(t)
    at = len(arrays[0])
    if at != sa.at_order:
        raise ConsistencyError(f"autotopy group has {at} elements, S/A sum gives {sa.at_order}")
    return ClassRecord(
        plane=plane,
        at_order=at,
        orbits=triangle_orbits(t, arrays),
        sa=sa.terms,
        zn=nuclei_and_center(t),
        primitivity=primitivity_class(t),
        hexagon=s3_class(t).partition if with_hexagon else [],
        aut=automorphism_count(t),
        iso_classes=sa.class_count,
    )


@dataclass(frozen=True)
class Summary:
    """Classification counts.

    ``iso_classes`` counts isomorphism classes of semifields in the
    representative plane of each S3-class (the plane of the first input
    tuple falling in that class). ``iso_classes_all_planes`` counts them
    over every plane of every hexagon.
    """

    s3_classes: int
    planes: int
    iso_classes: int
    iso_classes_all_planes: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.s3_classes, self.planes, self.iso_classes)


def hexagons_of(tables: Iterable[SemifieldTable], cache: dict | None = None) -> Iterator[Hexagon]:
    """S3-class of each table, reusing the hexagon of any plane already met."""
    cache = {} if cache is None else cache
    for t in tables:
        lab = plane_label(t)
        h = cache.get(lab)
        if h is None:
            h = s3_class(t)
            for other in h.labels:
                cache[other] = h
        yield h


def summarize_hexagons(hexagons: Iterable[Hexagon]) -> Summary:
    reps: dict[bytes, int] = {}
    planes: dict[bytes, int] = {}
    for h in hexagons:
        reps.setdefault(h.class_label, h.class_counts[0])
        for lab, n in zip(h.labels, h.class_counts):
            planes[lab] = n
    return Summary(len(reps), len(planes), sum(reps.values()), sum(planes.values()))


def summarize(tables: Iterable[SemifieldTable]) -> Summary:
    return summarize_hexagons(hexagons_of(tables))
