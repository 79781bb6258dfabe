"""Standard bases, 3-cubes, multiplication tables, nuclei and primitivity.

Conventions
-----------
Elements of a (pre)semifield of order ``q = 2**d`` are coordinate vectors,
stored as ints ``0..q-1`` (coordinate ``i`` in bit ``i - 1``). The basis
element ``x_i`` is ``1 << (i - 1)``.

A standard basis ``(A_1, ..., A_d)`` describes the semifield in which
``A_i`` is the matrix of *right* multiplication by ``x_i``; so
``x * y = (sum_i y_i A_i) x`` and ``x_1`` is the identity. This is the
orientation under which the published nuclei and transposition behaviour
of the order-64 tuples come out as stated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .binmat import BitMatrix, decode_matrix, encode_matrix, gf2_rank


class ZeroDivisorError(ValueError):
    """A product of two nonzero elements vanished."""


# -- standard bases --------------------------------------------------------


@dataclass(frozen=True)
class StandardBasis:
    dim: int
    mats: tuple[BitMatrix, ...]

    @classmethod
    def from_codes(cls, codes: Sequence[int], d: int | None = None) -> "StandardBasis":
        d = len(codes) + 1 if d is None else d
        if len(codes) != d - 1:
            raise ValueError(f"expected {d - 1} codes for d={d}")
        mats = [BitMatrix.identity(d)]
        mats += [decode_matrix(c, d, index=i) for i, c in enumerate(codes, start=2)]
        return cls(d, tuple(mats))

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(encode_matrix(m, i).code for i, m in enumerate(self.mats[1:], start=2))

    def combination(self, lam: int) -> BitMatrix:
        """sum of A_i over the set bits of ``lam`` (bit i-1 selects A_i)."""
        acc = BitMatrix.zero(self.dim)
        for i, m in enumerate(self.mats):
            if lam >> i & 1:
                acc = acc + m
        return acc

    def is_valid(self) -> bool:
        return check_standard_basis(self.mats)

    def table(self) -> "SemifieldTable":
        return SemifieldTable.from_basis(self)

    def transpose(self) -> "StandardBasis":
        return StandardBasis(self.dim, tuple(m.T for m in self.mats))


def check_standard_basis(mats: Sequence[BitMatrix]) -> bool:
    d = len(mats)
    if d == 0 or any(m.dim != d for m in mats):
        return False
    if mats[0] != BitMatrix.identity(d):
        return False
    for i, m in enumerate(mats):
        if m.column(1) != 1 << i:
            return False
    packed = [m.packed for m in mats]
    mask = (1 << d) - 1
    for lam in range(1, 1 << d):
        acc = 0
        for i in range(d):
            if lam >> i & 1:
                acc ^= packed[i]
        rows = [(acc >> (d * r)) & mask for r in range(d)]
        if gf2_rank(rows) != d:
            return False
    return True


# -- tables ----------------------------------------------------------------


def table_from_products(P: np.ndarray) -> np.ndarray:
    """Bilinear extension of basis products ``P[i, k] = x_{i+1} * x_{k+1}``."""
    d = P.shape[0]
    q = 1 << d
    rows = np.zeros((d, q), dtype=np.uint8)  # rows[i, y] = x_{i+1} * y
    for k in range(d):
        step = 1 << k
        rows[:, step:2 * step] = rows[:, :step] ^ P[:, k:k + 1].astype(np.uint8)
    T = np.zeros((q, q), dtype=np.uint8)
    for i in range(d):
        step = 1 << i
        T[step:2 * step] = T[:step] ^ rows[i]
    return T


@dataclass(eq=False)
class SemifieldTable:
    """Full multiplication table; ``product[x, y]`` is ``x * y``."""

    product: np.ndarray
    identity: int = 1
    _canon: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.product = np.ascontiguousarray(self.product, dtype=np.uint8)
        q = self.product.shape[0]
        if self.product.shape != (q, q) or q & (q - 1) or q < 2:
            raise ValueError("table must be square with power-of-two order")
        self.product.setflags(write=False)

    @property
    def order(self) -> int:
        return self.product.shape[0]

    @property
    def dim(self) -> int:
        return self.order.bit_length() - 1

    def mul(self, x: int, y: int) -> int:
        return int(self.product[x, y])

    def __eq__(self, other):
        if not isinstance(other, SemifieldTable):
            return NotImplemented
        return self.identity == other.identity and np.array_equal(self.product, other.product)

    def __hash__(self):
        return hash((self.identity, self.product.tobytes()))

    @classmethod
    def from_basis(cls, b: StandardBasis) -> "SemifieldTable":
        d = b.dim
        cols = [m.columns() for m in b.mats]
        # x_i * x_k = R_{x_k} x_i = column i of A_k
        P = np.array([[cols[k][i] for k in range(d)] for i in range(d)], dtype=np.int64)
        return cls(table_from_products(P), 1)

    @classmethod
    def from_codes(cls, codes: Sequence[int], d: int | None = None) -> "SemifieldTable":
        return cls.from_basis(StandardBasis.from_codes(codes, d))

    def canonical(self):
        """(k, form, generator tuples) from the canonical-form kernel, cached."""
        if self._canon is None:
            k, form, gens = _kernels.canon(self.product, self.identity, self.dim)
            self._canon = (int(k), form, gens)
        return self._canon

    def label(self) -> bytes:
        """Complete isomorphism invariant."""
        k, form, _ = self.canonical()
        return bytes([k]) + form.tobytes()

    def validate(self) -> None:
        """Raise ValueError unless the table is a semifield with the stored identity."""
        T = self.product
        q = self.order
        ar = np.arange(q)
        e = self.identity
        if not (np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar)):
            raise ValueError("identity element fails ex = xe = x")
        check_no_zero_divisors(T)
        # distributivity both sides
        for a in range(q):
            if not np.array_equal(T[a][ar[:, None] ^ ar[None, :]], T[a][:, None] ^ T[a][None, :]):
                raise ValueError("left distributive law fails")
            if not np.array_equal(T[:, a][ar[:, None] ^ ar[None, :]], T[:, a][:, None] ^ T[:, a][None, :]):
                raise ValueError("right distributive law fails")

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.product, self.product.T))

    def standard_basis(self) -> StandardBasis:
        """Standard basis in coordinates (identity, then smallest independent elements)."""
        d = self.dim
        basis = [self.identity]
        x = 1
        while len(basis) < d:
            if gf2_rank(basis + [x]) > len(basis):
                basis.append(x)
            x += 1
        B = np.array(basis, dtype=np.int64)
        coord = np.zeros(self.order, dtype=np.int64)
        _kernels.coord_map(B, d, coord)
        mats = []
        for i in range(d):
            cols = [int(coord[self.product[basis[c], basis[i]]]) for c in range(d)]
            mats.append(BitMatrix.from_columns(cols, d))
        return StandardBasis(d, tuple(mats))


def check_no_zero_divisors(T: np.ndarray) -> None:
    q = T.shape[0]
    nz = T[1:, 1:]
    if (nz == 0).any():
        x, y = np.argwhere(nz == 0)[0] + 1
        raise ZeroDivisorError(f"{x} * {y} = 0")
    # bilinear + no zero divisors already forces bijective rows; check anyway
    for row in T[1:]:
        if len(np.unique(row)) != q:
            raise ZeroDivisorError("left multiplication is not a bijection")


def loop_axioms_hold(t: SemifieldTable) -> bool:
    T = t.product
    q = t.order
    for a in range(1, q):
        if len(np.unique(T[a])) != q or len(np.unique(T[:, a])) != q:
            return False
    ar = np.arange(q)
    e = t.identity
    return bool(np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar))


# -- cubes -----------------------------------------------------------------

PERMUTATIONS: dict[str, tuple[int, int, int]] = {
    "1": (1, 2, 3),
    "(12)": (2, 1, 3),
    "(13)": (3, 2, 1),
    "(123)": (2, 3, 1),
    "(23)": (1, 3, 2),
    "(132)": (3, 1, 2),
}
PERMUTATION_NAMES = tuple(PERMUTATIONS)


def perm_name(sigma: Sequence[int]) -> str:
    for name, p in PERMUTATIONS.items():
        if tuple(sigma) == p:
            return name
    raise ValueError(f"not a permutation of (1, 2, 3): {sigma}")


def compose(tau: Sequence[int], sigma: Sequence[int]) -> tuple[int, int, int]:
    """(tau o sigma)(p) = tau(sigma(p))."""
    return tuple(tau[sigma[p] - 1] for p in range(3))


@dataclass(eq=False)
class Cube:
    """Structure constants: x_{i1} x_{i2} = sum_{i3} entries[i1, i2, i3] x_{i3} (0-based axes)."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.ascontiguousarray(self.entries, dtype=np.uint8)
        d = self.entries.shape[0]
        if self.entries.shape != (d, d, d):
            raise ValueError("cube must have shape (d, d, d)")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Cube):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def products(self) -> np.ndarray:
        weights = 1 << np.arange(self.dim)
        return (self.entries.astype(np.int64) * weights).sum(axis=2)

    def table(self) -> np.ndarray:
        return table_from_products(self.products())

    def slice_matrices(self) -> list[BitMatrix]:
        """Matrices of right multiplication by each basis element: entry (i3, i1) of slice i2."""
        d = self.dim
        return [BitMatrix.from_lists(self.entries[:, i2, :].T.tolist()) for i2 in range(d)]


def cube_from_products(P: np.ndarray) -> Cube:
    d = P.shape[0]
    bits = (P[:, :, None] >> np.arange(d)) & 1
    return Cube(bits.astype(np.uint8))


def cube_from_basis(b: StandardBasis) -> Cube:
    d = b.dim
    ent = np.zeros((d, d, d), dtype=np.uint8)
    for i2, m in enumerate(b.mats):
        ent[:, i2, :] = np.array(m.to_lists(), dtype=np.uint8).T
    return Cube(ent)


def cube_from_table(T: np.ndarray) -> Cube:
    """Cube with respect to the coordinate basis 1, 2, 4, ..."""
    q = T.shape[0]
    d = q.bit_length() - 1
    basis = 1 << np.arange(d)
    P = T[np.ix_(basis, basis)].astype(np.int64)
    return cube_from_products(P)


def apply_permutation(c: Cube, sigma: Sequence[int] | str) -> Cube:
    """Entry (i1, i2, i3) of the result is entry (i_s(1), i_s(2), i_s(3)) of ``c``."""
    if isinstance(sigma, str):
        sigma = PERMUTATIONS[sigma]
    s = [p - 1 for p in sigma]
    if sorted(s) != [0, 1, 2]:
        raise ValueError(f"not a permutation: {sigma}")
    # np.transpose(c, axes)[I] = c[J] with J[axes[k]] = I[k]; we need J[p] = I[s[p]]
    axes = [0, 0, 0]
    for p in range(3):
        axes[s[p]] = p
    return Cube(np.transpose(c.entries, axes))


# -- presemifield -> semifield ---------------------------------------------


@dataclass(frozen=True)
class Isotopy:
    """Triple of element permutations with H(x*y) = F(x) * G(y) (source product on the left)."""

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray

    def verify(self, src: np.ndarray, dst: np.ndarray) -> bool:
        lhs = self.H[src]
        rhs = dst[np.ix_(self.F, self.G)]
        return bool(np.array_equal(lhs, rhs))


def unit_isotope(T: np.ndarray, u: int | None = None) -> tuple[SemifieldTable, Isotopy]:
    """Semifield isotopic to the presemifield ``T`` with identity ``u*u``.

    New product of (x, y) is r*s where r*u = x and u*s = y. The witness maps
    the new table onto ``T``.
    """
    check_no_zero_divisors(T)
    q = T.shape[0]
    if u is None:
        u = 1
    rinv = np.empty(q, dtype=np.int64)
    linv = np.empty(q, dtype=np.int64)
    rinv[T[:, u]] = np.arange(q)
    linv[T[u, :]] = np.arange(q)
    new = T[np.ix_(rinv, linv)]
    e = int(T[u, u])
    return SemifieldTable(new, e), Isotopy(rinv, linv, np.arange(q))


def presemifield_to_semifield(c: Cube | np.ndarray, with_witness: bool = False):
    T = c.table() if isinstance(c, Cube) else np.asarray(c, dtype=np.uint8)
    t, w = unit_isotope(T)
    return (t, w) if with_witness else t


def permuted_semifield(t: SemifieldTable, sigma) -> SemifieldTable:
    """Semifield from the sigma-permuted cube of ``t`` (coordinate basis)."""
    return presemifield_to_semifield(apply_permutation(cube_from_table(t.product), sigma))


# -- nuclei ----------------------------------------------------------------


class ZNTuple(NamedTuple):
    z: int
    n: int
    nl: int
    nm: int
    nr: int


def nuclei_masks(t: SemifieldTable) -> dict[str, np.ndarray]:
    T = t.product.astype(np.intp)
    q = t.order
    # assoc[a, b, c] = ((ab)c == a(bc))
    ab_c = T[T[:, :, None], np.arange(q)[None, None, :]]
    a_bc = T[np.arange(q)[:, None, None], T[None, :, :]]
    assoc = ab_c == a_bc
    nl = assoc.all(axis=(1, 2))
    nm = assoc.all(axis=(0, 2))
    nr = assoc.all(axis=(0, 1))
    n = nl & nm & nr
    comm = (T == T.T).all(axis=1)
    return {"z": n & comm, "n": n, "nl": nl, "nm": nm, "nr": nr}


def nuclei_and_center(t: SemifieldTable) -> ZNTuple:
    m = nuclei_masks(t)
    return ZNTuple(*(int(m[k].sum()) for k in ("z", "n", "nl", "nm", "nr")))


# -- primitivity -----------------------------------------------------------


def primitive_elements(t: SemifieldTable) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks (right, left): right powers a, a*a, (a*a)*a, ...; left powers a*(a*a), ..."""
    T = t.product.astype(np.intp)
    q = t.order
    a = np.arange(q)
    out = []
    for side in ("right", "left"):
        seen = np.zeros((q, q), dtype=bool)
        p = a.copy()
        for _ in range(q - 1):
            seen[a, p] = True
            p = T[p, a] if side == "right" else T[a, p]
        mask = seen[:, 1:].all(axis=1)
        mask[0] = False
        out.append(mask)
    return out[0], out[1]


def primitivity_class(t: SemifieldTable) -> str:
    right, left = primitive_elements(t)
    r, l = bool(right.any()), bool(left.any())
    if r and l:
        return "two_sided"
    if l:
        return "left_only"
    if r:
        return "right_only"
    return "none"


def all_nonzero_combinations(d: int):
    return range(1, 1 << d)


def lambda_tuples(d: int):
    return itertools.product((0, 1), repeat=d)
