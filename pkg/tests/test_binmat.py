import itertools
import random

import numpy as np
import pytest

from semiplanes.binmat import (
    BitMatrix,
    EncodedMatrix,
    EncodingError,
    bit_position,
    companion_matrix,
    decode_matrix,
    encode_matrix,
    format_tuple_line,
    gf2_rank,
    is_invertible,
    parse_tuple_line,
    poly_from_int,
    read_tuple_file,
    write_tuple_file,
)


def cofactor_det(m):
    """Integer Laplace expansion, reduced mod 2."""
    n = len(m)
    if n == 1:
        return m[0][0] % 2
    total = 0
    for c in range(n):
        if m[0][c]:
            minor = [row[:c] + row[c + 1:] for row in m[1:]]
            total += cofactor_det(minor)
    return total % 2


def test_identity_and_zero():
    assert BitMatrix.identity(6).rank() == 6
    assert BitMatrix.zero(6).rank() == 0
    assert BitMatrix.zero(6).is_zero()


def test_invertibility_matches_cofactor_determinant_d4():
    rng = random.Random(7)
    for _ in range(400):
        rows = [[rng.randint(0, 1) for _ in range(4)] for _ in range(4)]
        m = BitMatrix.from_lists(rows)
        assert is_invertible(m) == bool(cofactor_det(rows))


def test_gl3_has_168_elements():
    count = sum(is_invertible(BitMatrix(3, rows)) for rows in itertools.product(range(8), repeat=3))
    assert count == 168


def test_inverse_and_product():
    rng = random.Random(1)
    eye = BitMatrix.identity(5)
    seen = 0
    while seen < 30:
        m = BitMatrix(5, tuple(rng.randrange(32) for _ in range(5)))
        if not is_invertible(m):
            with pytest.raises(ValueError):
                m.inverse()
            continue
        seen += 1
        assert m @ m.inverse() == eye
        assert m.inverse() @ m == eye


def test_matmul_matches_numpy():
    rng = random.Random(3)
    for _ in range(50):
        a = BitMatrix(6, tuple(rng.randrange(64) for _ in range(6)))
        b = BitMatrix(6, tuple(rng.randrange(64) for _ in range(6)))
        ref = (np.array(a.to_lists()) @ np.array(b.to_lists())) % 2
        assert (a @ b).to_lists() == ref.tolist()


def test_bit_layout():
    # entry (r, c) of column c >= 2 sits at bit d(d-c) + (d-r)
    assert bit_position(6, 6, 6) == 0
    assert bit_position(1, 2, 6) == 6 * 4 + 5
    m = decode_matrix(1 << bit_position(3, 4, 6), 6, index=2)
    assert m.column(1) == 1 << 1
    assert m.entry(3, 4) == 1
    assert sum(sum(r) for r in m.to_lists()) == 2


def test_decode_sets_first_column():
    for i in range(2, 7):
        assert decode_matrix(EncodedMatrix(i, 0)).column(1) == 1 << (i - 1)


def test_round_trip():
    rng = random.Random(11)
    for _ in range(200):
        i = rng.randint(2, 6)
        code = rng.randrange(1 << 30)
        assert encode_matrix(decode_matrix(code, 6, i), i).code == code


def test_encode_rejects_wrong_first_column():
    with pytest.raises(EncodingError):
        encode_matrix(BitMatrix.identity(6), 3)


def test_decode_rejects_out_of_range():
    with pytest.raises(EncodingError):
        decode_matrix(1 << 30, 6, 2)


def test_companion_matrix():
    c = companion_matrix(poly_from_int(0b1000011))  # x^6 + x + 1
    assert c.column(1) == 0b10
    assert c.column(6) == 0b11
    # x^63 = 1 and no smaller power is the identity
    eye = BitMatrix.identity(6)
    p, n = c, 1
    while p != eye:
        p, n = p @ c, n + 1
    assert n == 63


def test_gf2_rank():
    assert gf2_rank([1, 2, 3]) == 2
    assert gf2_rank([]) == 0


def test_tuple_lines(tmp_path):
    assert parse_tuple_line("  # comment") is None
    assert parse_tuple_line("1 2 3 4 5") == (1, 2, 3, 4, 5)
    with pytest.raises(ValueError, match="A6"):
        parse_tuple_line("1 2 3 4")
    with pytest.raises(ValueError, match="A3"):
        parse_tuple_line("1 x 3 4 5")
    assert format_tuple_line((1, 2, 3, 4, 5)) == "1 2 3 4 5"
    f = tmp_path / "t.tuples"
    write_tuple_file(f, [(1, 2, 3, 4, 5), (6, 7, 8, 9, 10)], header="two")
    assert read_tuple_file(f) == [(1, 2, 3, 4, 5), (6, 7, 8, 9, 10)]
    f.write_text("1 2 3 4 5\nbad\n")
    with pytest.raises(ValueError, match="line 2"):
        read_tuple_file(f)
