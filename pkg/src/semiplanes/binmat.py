"""Bit-packed square matrices over GF(2) and the 30-bit standard-basis encoding.

A :class:`BitMatrix` of dimension ``d`` stores one ``d``-bit word per row.
Entry ``(r, c)`` (1-indexed) lives in bit ``c - 1`` of ``rows[r - 1]``.
Column vectors use the same convention: coordinate ``i`` is bit ``i - 1``.

Encoded matrices follow the layout used for order-64 tuples, generalised to
any ``d``: bit ``j = d*(d - c) + (d - r)`` of the code holds entry ``(r, c)``
for columns ``c = 2..d``; column 1 is implied to be ``e_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MIN_DIM = 1
MAX_DIM = 6


class EncodingError(ValueError):
    """Raised when a matrix is not in standard-basis form for the requested index."""


def _check_dim(d: int) -> None:
    if not MIN_DIM <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} outside {MIN_DIM}..{MAX_DIM}")


def parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class BitMatrix:
    dim: int
    rows: tuple[int, ...]

    def __post_init__(self):
        _check_dim(self.dim)
        if len(self.rows) != self.dim:
            raise ValueError(f"expected {self.dim} rows, got {len(self.rows)}")
        mask = (1 << self.dim) - 1
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise ValueError(f"row {r:#x} wider than {self.dim} bits")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, d: int) -> "BitMatrix":
        return cls(d, tuple(1 << r for r in range(d)))

    @classmethod
    def zero(cls, d: int) -> "BitMatrix":
        return cls(d, (0,) * d)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "BitMatrix":
        d = len(entries)
        rows = []
        for row in entries:
            if len(row) != d:
                raise ValueError("matrix must be square")
            rows.append(sum((int(v) & 1) << c for c, v in enumerate(row)))
        return cls(d, tuple(rows))

    @classmethod
    def from_columns(cls, cols: Sequence[int], d: int | None = None) -> "BitMatrix":
        """Build from column vectors given as ints (bit i-1 = coordinate i)."""
        d = len(cols) if d is None else d
        rows = [0] * d
        for c, v in enumerate(cols):
            for r in range(d):
                if v >> r & 1:
                    rows[r] |= 1 << c
        return cls(d, tuple(rows))

    @classmethod
    def from_packed(cls, packed: int, d: int) -> "BitMatrix":
        mask = (1 << d) - 1
        return cls(d, tuple((packed >> (d * r)) & mask for r in range(d)))

    # -- accessors ----------------------------------------------------------

    def entry(self, r: int, c: int) -> int:
        """Entry at 1-indexed position (r, c)."""
        return self.rows[r - 1] >> (c - 1) & 1

    def column(self, c: int) -> int:
        """Column ``c`` (1-indexed) as a vector int."""
        bit = c - 1
        return sum(((row >> bit) & 1) << r for r, row in enumerate(self.rows))

    def columns(self) -> tuple[int, ...]:
        return tuple(self.column(c) for c in range(1, self.dim + 1))

    def to_lists(self) -> list[list[int]]:
        return [[row >> c & 1 for c in range(self.dim)] for row in self.rows]

    @property
    def packed(self) -> int:
        """All d*d bits in one int, row r at bit offset d*r."""
        out = 0
        for r, row in enumerate(self.rows):
            out |= row << (self.dim * r)
        return out

    # -- arithmetic ---------------------------------------------------------

    def _same_dim(self, other: "BitMatrix") -> None:
        if not isinstance(other, BitMatrix):
            raise TypeError(f"expected BitMatrix, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        self._same_dim(other)
        return BitMatrix(self.dim, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    __xor__ = __add__

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        self._same_dim(other)
        out = []
        for row in self.rows:
            acc = 0
            c = 0
            while row:
                if row & 1:
                    acc ^= other.rows[c]
                row >>= 1
                c += 1
            out.append(acc)
        return BitMatrix(self.dim, tuple(out))

    def apply(self, v: int) -> int:
        """Matrix-vector product ``M v`` with ``v`` a column-vector int."""
        out = 0
        for r, row in enumerate(self.rows):
            out |= parity(row & v) << r
        return out

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_columns(self.rows, self.dim)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def rank(self) -> int:
        return gf2_rank(self.rows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def inverse(self) -> "BitMatrix":
        d = self.dim
        aug = [row | (1 << (d + r)) for r, row in enumerate(self.rows)]
        for col in range(d):
            piv = next((i for i in range(col, d) if aug[i] >> col & 1), None)
            if piv is None:
                raise ValueError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            for i in range(d):
                if i != col and aug[i] >> col & 1:
                    aug[i] ^= aug[col]
        mask = (1 << d) - 1
        return BitMatrix(d, tuple((row >> d) & mask for row in aug))

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_lists())


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank of a set of bit vectors (any width) over GF(2)."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def is_invertible(m: BitMatrix) -> bool:
    return m.rank() == m.dim


def matrix_sum(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    return a + b


def matrix_product(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    return a @ b


# -- standard-basis encoding -----------------------------------------------


@dataclass(frozen=True, order=True)
class EncodedMatrix:
    index: int
    code: int


def code_bits(d: int) -> int:
    return d * (d - 1)


def bit_position(r: int, c: int, d: int) -> int:
    """Bit index holding entry (r, c), 1-indexed, c >= 2."""
    return d * (d - c) + (d - r)


def decode_matrix(e: EncodedMatrix | int, d: int = 6, index: int | None = None) -> BitMatrix:
    """Decode ``e`` into a matrix whose first column is ``e_index``.

    Accepts an :class:`EncodedMatrix` or a bare code together with ``index``.
    """
    if isinstance(e, EncodedMatrix):
        index, code = e.index, e.code
    else:
        code = e
        if index is None:
            raise TypeError("index is required when decoding a bare code")
    _check_dim(d)
    if not 1 <= index <= d:
        raise ValueError(f"index {index} outside 1..{d}")
    if not 0 <= code < 1 << code_bits(d):
        raise EncodingError(f"code {code} out of range for d={d}")
    rows = [0] * d
    rows[index - 1] = 1
    j = 0
    while code:
        if code & 1:
            r = d - (j % d)
            c = d - j // d
            rows[r - 1] |= 1 << (c - 1)
        code >>= 1
        j += 1
    return BitMatrix(d, tuple(rows))


def encode_matrix(m: BitMatrix, index: int) -> EncodedMatrix:
    d = m.dim
    if m.column(1) != 1 << (index - 1):
        raise EncodingError(f"column 1 is not e_{index}; matrix is not in standard-basis form")
    code = 0
    for r in range(1, d + 1):
        row = m.rows[r - 1]
        for c in range(2, d + 1):
            if row >> (c - 1) & 1:
                code |= 1 << bit_position(r, c, d)
    return EncodedMatrix(index, code)


def companion_matrix(poly: Sequence[int]) -> BitMatrix:
    """Companion matrix of a monic polynomial.

    ``poly`` lists coefficients from the constant term upwards, so
    ``x^2 + x + 1`` is ``[1, 1, 1]``. Columns 1..d-1 are ``e_2..e_d`` and the
    last column holds the low-order coefficients.
    """
    coeffs = [int(c) & 1 for c in poly]
    if len(coeffs) < 2 or coeffs[-1] != 1:
        raise ValueError("polynomial must be monic")
    d = len(coeffs) - 1
    _check_dim(d)
    cols = [1 << (c + 1) for c in range(d - 1)]
    cols.append(sum(coeffs[k] << k for k in range(d)))
    return BitMatrix.from_columns(cols, d)


def poly_from_int(p: int) -> list[int]:
    """Coefficient list (constant term first) of a polynomial packed as an int."""
    return [p >> k & 1 for k in range(p.bit_length())]


def parse_tuple_line(line: str, d: int = 6) -> tuple[int, ...] | None:
    """Parse one line of the tuple file format. Returns None for comments/blank."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    fields = text.split()
    if len(fields) != d - 1:
        if len(fields) < d - 1:
            raise ValueError(f"field A{len(fields) + 2} missing: expected {d - 1} integers, got {len(fields)}")
        raise ValueError(f"field A{d + 1} unexpected: expected {d - 1} integers, got {len(fields)}")
    out = []
    for pos, f in enumerate(fields):
        try:
            v = int(f)
        except ValueError:
            raise ValueError(f"field A{pos + 2} is not an integer: {f!r}") from None
        if not 0 <= v < 1 << code_bits(d):
            raise ValueError(f"field A{pos + 2} out of range: {v}")
        out.append(v)
    return tuple(out)


def format_tuple_line(codes: Sequence[int]) -> str:
    return " ".join(str(c) for c in codes)


def read_tuple_file(path, d: int = 6) -> list[tuple[int, ...]]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                t = parse_tuple_line(line, d)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            if t is not None:
                out.append(t)
    return out


def write_tuple_file(path, tuples: Iterable[Sequence[int]], header: str | None = None) -> None:
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for t in tuples:
            fh.write(format_tuple_line(t) + "\n")
