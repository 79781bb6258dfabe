"""Standard-basis search: candidate lists, partial bases, sieve extension and the oracle.

A standard basis (I, A2, ..., Ad) spans a space S of matrices whose nonzero
members are all invertible. The search fixes A2 to a companion matrix,
enumerates prefixes (I, A2, A3) up to the moves W -> P W Q that keep the
identity in the span, together with transposition, and then completes each
canonical prefix by sieving per-signature candidate lists.
"""

from __future__ import annotations

import json
import logging
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _searchk as K
from .binmat import BitMatrix, companion_matrix, poly_from_int
from .semifield import SemifieldTable

log = logging.getLogger(__name__)

WORKERS_ENV = "SEMIPLANES_WORKERS"
ORACLE_MAX_DIM = 4
SEARCH_DIMS = (4, 5, 6)

# the two degree-6 companion polynomials used for A2, in canonical order
FIXED_A2_POLYS_D6 = (0b1000011, 0b1101101)  # x^6+x+1, x^6+x^5+x^3+x^2+1


def poly_str(p: int) -> str:
    terms = []
    for k in range(p.bit_length() - 1, -1, -1):
        if p >> k & 1:
            terms.append("1" if k == 0 else "x" if k == 1 else f"x^{k}")
    return "+".join(terms)


def _polymulmod(a: int, b: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    return out


def is_primitive_poly(p: int) -> bool:
    d = p.bit_length() - 1
    if d < 1 or not p & 1:
        return False
    order = (1 << d) - 1
    x, acc = 2 if d > 1 else 1, 1
    for n in range(1, order + 1):
        acc = _polymulmod(acc, x, p)
        if acc == 1:
            return n == order
    return False


def primitive_polynomials(d: int) -> list[int]:
    return [p for p in range(1 << d, 1 << (d + 1)) if is_primitive_poly(p)]


def a2_polys(d: int, policy: str = "fixed") -> list[int]:
    """Companion polynomials for A2.

    ``fixed``: the two fixed polynomials at d = 6, all primitive ones below.
    ``primitive``: every primitive polynomial of degree d.
    """
    if policy == "fixed" and d == 6:
        return list(FIXED_A2_POLYS_D6)
    if policy in ("fixed", "primitive"):
        return sorted(primitive_polynomials(d), key=lambda p: K.code_of(to_colpacked(companion_matrix(poly_from_int(p))), d))
    raise ValueError(f"unknown A2 policy {policy!r}")


# -- packing ---------------------------------------------------------------


def to_colpacked(m: BitMatrix) -> int:
    out = 0
    for c in range(m.dim):
        out |= m.column(c + 1) << (m.dim * c)
    return out


def from_colpacked(pk: int, d: int) -> BitMatrix:
    mask = (1 << d) - 1
    return BitMatrix.from_columns([(pk >> (d * c)) & mask for c in range(d)], d)


# -- lists -----------------------------------------------------------------


@dataclass(frozen=True)
class CandidateList:
    signature: int  # first column as a vector int (only bits of e3..ed may be set)
    codes: np.ndarray

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, code: int) -> bool:
        i = np.searchsorted(self.codes, code)
        return bool(i < len(self.codes) and self.codes[i] == code)

    def matrices(self, d: int) -> Iterable[BitMatrix]:
        for c in self.codes:
            yield from_colpacked(int(K.from_code(int(c), self.signature, d)), d)


@dataclass
class ListSet:
    """All candidate lists for one A2, concatenated for the compiled sieve."""

    a2: BitMatrix
    d: int
    codes: np.ndarray
    offsets: np.ndarray  # offsets[sig] .. offsets[sig + 1] for sig in 0..2^d - 1

    def get(self, sig: int) -> CandidateList:
        return CandidateList(sig, self.codes[self.offsets[sig]:self.offsets[sig + 1]])

    def signatures(self) -> list[int]:
        return [s for s in range(1 << self.d) if s and not s & 3]

    def sizes(self) -> dict[int, int]:
        return {s: int(self.offsets[s + 1] - self.offsets[s]) for s in self.signatures()}

    def contains(self, sig: int, code: int) -> bool:
        return bool(K.in_list(self.codes, self.offsets, sig, code))


def build_lists(a2: BitMatrix, d: int | None = None) -> ListSet:
    """The 2^(d-2) - 1 lists L_sig for this A2."""
    d = a2.dim if d is None else d
    eye = BitMatrix.identity(d)
    if not ((a2.rank() == d) and (a2 + eye).rank() == d):
        raise ValueError("A2 and A2 + I must be invertible")
    pk = to_colpacked(a2)
    parts = []
    offsets = np.zeros((1 << d) + 1, dtype=np.int64)
    for sig in range(1 << d):
        if sig and not sig & 3:
            arr = K.build_list(pk, sig, d)
        else:
            arr = np.zeros(0, dtype=np.int32)
        parts.append(arr)
        offsets[sig + 1] = offsets[sig] + len(arr)
    return ListSet(a2, d, np.concatenate(parts), offsets)


# -- partial bases ---------------------------------------------------------


@dataclass(frozen=True, order=True)
class PartialBasis:
    a2_index: int
    a3_code: int
    a2_poly: int = field(compare=False)
    d: int = field(compare=False)

    @property
    def a2(self) -> BitMatrix:
        return companion_matrix(poly_from_int(self.a2_poly))

    @property
    def a3(self) -> BitMatrix:
        return from_colpacked(int(K.from_code(self.a3_code, 1 << 2, self.d)), self.d)

    @property
    def a2_code(self) -> int:
        return int(K.code_of(to_colpacked(self.a2), self.d))

    @property
    def mats(self) -> tuple[BitMatrix, BitMatrix, BitMatrix]:
        return (BitMatrix.identity(self.d), self.a2, self.a3)


def _prefix_inputs(polys: Sequence[int], d: int, lists: Sequence[ListSet] | None):
    allowed = np.array([to_colpacked(companion_matrix(poly_from_int(p))) for p in polys], dtype=np.int64)
    if lists is None:
        arrs = [K.build_list(int(a), 1 << 2, d) for a in allowed]
    else:
        arrs = [ls.codes[ls.offsets[4]:ls.offsets[5]] for ls in lists]
    offsets = np.zeros(len(arrs) + 1, dtype=np.int64)
    for i, a in enumerate(arrs):
        offsets[i + 1] = offsets[i] + len(a)
    codes = np.concatenate(arrs) if arrs else np.zeros(0, np.int64)
    return allowed, codes, offsets


def enumerate_partial_bases(polys: Sequence[int], d: int,
                            lists: Sequence[ListSet] | None = None) -> tuple[list[PartialBasis], np.ndarray]:
    """Canonical prefixes, one per equivalence class, with their orbit sizes."""
    allowed, codes, offsets = _prefix_inputs(polys, d, lists)
    reps, sizes = K.enumerate_prefixes(allowed, codes, offsets, d)
    out = [PartialBasis(int(j), int(c), polys[int(j)], d) for j, c in reps]
    return out, sizes


def brute_force_prefix_classes(polys: Sequence[int], d: int) -> int:
    """Independent class count: union-find under every move through GL(d, 2)."""
    if d > ORACLE_MAX_DIM:
        raise ValueError(f"brute force limited to d <= {ORACLE_MAX_DIM}")
    allowed, codes, offsets = _prefix_inputs(polys, d, None)
    inv = K.inv_table(d)
    gl = K.gl_elements(d, inv)
    roots = K.brute_prefix_classes(allowed, codes, offsets, d, gl)
    return len(set(roots.tolist()))


# -- extension -------------------------------------------------------------


def extend_to_full(p: PartialBasis, lists: ListSet) -> list[tuple[int, ...]]:
    """Every completion (A4..Ad) of a prefix, as full code tuples (A2..Ad).

    Lists are first cut down to the sets Q_sig of matrices compatible with
    A3; the remaining matrices are then sieved against those small sets.
    """
    d = p.d
    a2_code = int(K.code_of(to_colpacked(lists.a2), d))
    qcodes, qoff = K.admissible_sets(p.a3_code, lists.codes, lists.offsets, d)
    kbits = min(14, d * (d - 1))
    boff = K.bucket_offsets(qcodes, qoff, d, kbits)
    rows = K.complete(qcodes, qoff, boff, kbits, d)
    return [(a2_code, p.a3_code, *map(int, r)) for r in rows]


def tuple_is_valid(codes: Sequence[int], d: int) -> bool:
    from .semifield import StandardBasis
    return StandardBasis.from_codes(list(codes), d).is_valid()


# -- full search -----------------------------------------------------------


def default_workers() -> int:
    try:
        n = int(os.environ.get(WORKERS_ENV, "1"))
    except ValueError:
        n = 1
    return max(1, n)


@dataclass
class SearchConfig:
    d: int
    a2_policy: str = "fixed"
    workers: int = field(default_factory=default_workers)
    checkpoint_dir: Path | None = None
    resume: bool = False

    def __post_init__(self):
        if self.d not in SEARCH_DIMS:
            raise ValueError(f"search supports d in {SEARCH_DIMS}, got {self.d}")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if self.checkpoint_dir is not None:
            self.checkpoint_dir = Path(self.checkpoint_dir)


@dataclass
class SearchResult:
    d: int
    tuples: list[tuple[int, ...]]
    polys: list[int]
    list_sizes: list[dict[int, int]]
    prefixes: list[PartialBasis]
    elapsed: float = 0.0

    def prefix_counts(self) -> list[int]:
        return [sum(1 for p in self.prefixes if p.a2_index == j) for j in range(len(self.polys))]

    def manifest(self) -> dict:
        return {
            "d": self.d,
            "a2": [{"poly": poly_str(p), "code": int(K.code_of(to_colpacked(companion_matrix(poly_from_int(p))), self.d)),
                    "list_sizes": {str(s): n for s, n in sorted(sizes.items())},
                    "partial_bases": n}
                   for p, sizes, n in zip(self.polys, self.list_sizes, self.prefix_counts())],
            "partial_bases": len(self.prefixes),
            "tuples": len(self.tuples),
        }


# worker state inherited through fork
_WORK: dict = {}


def _work(idx: int) -> tuple[int, list[tuple[int, ...]]]:
    p = _WORK["prefixes"][idx]
    return idx, extend_to_full(p, _WORK["lists"][p.a2_index])


class Checkpoint:
    """Prefix list plus one append-only status file per prefix index."""

    def __init__(self, root: Path, d: int):
        self.root = Path(root)
        self.d = d
        self.status = self.root / "status"

    def init(self, prefixes: list[PartialBasis], resume: bool) -> None:
        self.status.mkdir(parents=True, exist_ok=True)
        path = self.root / "prefixes.txt"
        text = "".join(f"{p.a2_index} {p.a3_code}\n" for p in prefixes)
        if resume and path.exists():
            if path.read_text() != text:
                raise ValueError("checkpoint prefix list does not match this configuration")
        else:
            path.write_text(text)

    def _file(self, idx: int) -> Path:
        return self.status / f"{idx:07d}.txt"

    def load(self, idx: int) -> list[tuple[int, ...]] | None:
        """Tuples of the last complete attempt, or None if there is none."""
        f = self._file(idx)
        if not f.exists():
            return None
        lines = f.read_text().splitlines()
        if not lines or not lines[-1].startswith("done "):
            return None
        start = max((i for i, ln in enumerate(lines) if ln == "begin"), default=-1) + 1
        out = [tuple(int(v) for v in ln.split()) for ln in lines[start:-1] if ln.strip()]
        if int(lines[-1].split()[1]) != len(out):
            return None
        return out

    def store(self, idx: int, tuples: list[tuple[int, ...]]) -> None:
        with open(self._file(idx), "a") as fh:
            fh.write("begin\n")
            for t in tuples:
                fh.write(" ".join(map(str, t)) + "\n")
            fh.write(f"done {len(tuples)}\n")


def full_search(config: SearchConfig) -> SearchResult:
    t0 = time.monotonic()
    d = config.d
    polys = a2_polys(d, config.a2_policy)
    lists = [build_lists(companion_matrix(poly_from_int(p)), d) for p in polys]
    log.info("lists built: %s", [sum(ls.sizes().values()) for ls in lists])
    prefixes, _ = enumerate_partial_bases(polys, d, lists)
    log.info("%d partial bases", len(prefixes))
    results: dict[int, list[tuple[int, ...]]] = {}
    ck = Checkpoint(config.checkpoint_dir, d) if config.checkpoint_dir else None
    if ck:
        ck.init(prefixes, config.resume)
        if config.resume:
            for i in range(len(prefixes)):
                got = ck.load(i)
                if got is not None:
                    results[i] = got
    todo = [i for i in range(len(prefixes)) if i not in results]
    _WORK.update(prefixes=prefixes, lists=lists)
    if config.workers > 1 and len(todo) > 1:
        ctx = mp.get_context("fork")
        with ctx.Pool(config.workers) as pool:
            for idx, tuples in pool.imap_unordered(_work, todo, chunksize=1):
                results[idx] = tuples
                if ck:
                    ck.store(idx, tuples)
    else:
        for i in todo:
            _, tuples = _work(i)
            results[i] = tuples
            if ck:
                ck.store(i, tuples)
    _WORK.clear()
    merged = sorted({t for i in range(len(prefixes)) for t in results[i]})
    return SearchResult(d, merged, polys, [ls.sizes() for ls in lists], prefixes, time.monotonic() - t0)


# -- oracle ----------------------------------------------------------------


@dataclass
class OracleResult:
    d: int
    tuples: np.ndarray
    classes: list[tuple[bytes, int]]  # (plane label, number of standard bases in the class)

    @property
    def plane_labels(self) -> set[bytes]:
        return {lab for lab, _ in self.classes}


def oracle_search(d: int) -> OracleResult:
    """Enumerate every standard basis of order 2^d and split them into isotopy classes."""
    if d > ORACLE_MAX_DIM:
        raise ValueError(f"oracle refuses d = {d}; exhaustive enumeration is limited to d <= {ORACLE_MAX_DIM}")
    if d < 2:
        raise ValueError("oracle needs d >= 2")
    from . import _kernels
    from .classify import plane_label, principal_isotope

    inv = K.inv_table(d)
    tuples = K.all_standard_bases(d, inv)
    index = {tuple(row): i for i, row in enumerate(tuples.tolist())}
    assigned = np.full(len(tuples), -1, dtype=np.int64)
    classes: list[tuple[bytes, int]] = []
    q = 1 << d
    for i in range(len(tuples)):
        if assigned[i] >= 0:
            continue
        t = SemifieldTable.from_codes(tuples[i].tolist(), d)
        cid = len(classes)
        size = 0
        for a in range(1, q):
            for b in range(1, q):
                iso = principal_isotope(t, a, b)
                for row in _kernels.standard_bases(iso.product, iso.identity, d).tolist():
                    j = index.get(tuple(row))
                    if j is None:
                        raise RuntimeError("isotope basis missing from the exhaustive enumeration")
                    if assigned[j] < 0:
                        assigned[j] = cid
                        size += 1
        classes.append((plane_label(t), size))
    if sum(s for _, s in classes) != len(tuples):
        raise RuntimeError("isotopy orbits do not partition the enumeration")
    return OracleResult(d, tuples, classes)


def tuple_tables(tuples: Iterable[Sequence[int]], d: int) -> Iterable[SemifieldTable]:
    for t in tuples:
        yield SemifieldTable.from_codes(list(t), d)


def write_manifest(path: Path, result: SearchResult, summary=None) -> None:
    data = result.manifest()
    if summary is not None:
        data["classification"] = {"s3_classes": summary.s3_classes, "planes": summary.planes,
                                  "iso_classes": summary.iso_classes}
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    timing = Path(str(path) + ".timing")
    timing.write_text(json.dumps({"elapsed_seconds": round(result.elapsed, 3)}) + "\n")
