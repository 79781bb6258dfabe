import itertools

import numpy as np
import pytest

from semiplanes.binmat import BitMatrix, companion_matrix, poly_from_int
from semiplanes.presentations import GF4, GF64
from semiplanes.semifield import (
    PERMUTATION_NAMES,
    PERMUTATIONS,
    Cube,
    StandardBasis,
    SemifieldTable,
    ZeroDivisorError,
    apply_permutation,
    check_no_zero_divisors,
    check_standard_basis,
    compose,
    cube_from_basis,
    cube_from_table,
    loop_axioms_hold,
    nuclei_and_center,
    permuted_semifield,
    primitive_elements,
    primitivity_class,
    unit_isotope,
)


def field_basis(poly: int) -> StandardBasis:
    """Powers of a companion matrix: right multiplication by 1, x, ..., x^(d-1)."""
    c = companion_matrix(poly_from_int(poly))
    d = c.dim
    mats = [BitMatrix.identity(d)]
    for _ in range(d - 1):
        mats.append(mats[-1] @ c)
    return StandardBasis(d, tuple(mats))


def gf_table(f):
    q = f.order
    return np.array([[f.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.uint8)


def test_field_basis_is_standard():
    b = field_basis(0b1000011)
    assert b.is_valid()
    t = b.table()
    assert np.array_equal(t.product, gf_table(GF64))


def test_gf4_cube_by_hand():
    # basis 1, j with j^2 = j + 1
    b = field_basis(0b111)
    c = cube_from_basis(b)
    expected = np.zeros((2, 2, 2), dtype=np.uint8)
    expected[0, 0, 0] = 1  # 1*1 = 1
    expected[0, 1, 1] = 1  # 1*j = j
    expected[1, 0, 1] = 1  # j*1 = j
    expected[1, 1, 0] = expected[1, 1, 1] = 1  # j*j = 1 + j
    assert np.array_equal(c.entries, expected)
    assert np.array_equal(c.table(), gf_table(GF4))


def test_field_cube_symmetric_in_first_two_axes():
    c = cube_from_basis(field_basis(0b1011))
    assert apply_permutation(c, "(12)") == c
    assert apply_permutation(c, "(13)") != c


def test_field_plane_fixed_by_every_permutation():
    t = field_basis(0b1011).table()
    for name in PERMUTATION_NAMES:
        s = permuted_semifield(t, name)
        s.validate()
        assert s.label() == t.label()  # every isotope of a field of order 8 is the field


def test_cube_round_trip(plane_table):
    t = plane_table("V")
    assert np.array_equal(cube_from_table(t.product).table(), t.product)


def test_rejects_bad_basis():
    eye = BitMatrix.identity(3)
    assert not check_standard_basis([eye, eye, eye])
    b = field_basis(0b1011)
    # swapping a column breaks the first-column condition
    assert not check_standard_basis([b.mats[0], b.mats[2], b.mats[1]])


def test_exhaustive_d3_count():
    # all (A2, A3) standard bases at d = 3, compared with an independent count
    count = 0
    for c2 in itertools.product(range(8), repeat=2):
        a2 = BitMatrix.from_columns([2, *c2], 3)
        for c3 in itertools.product(range(8), repeat=2):
            a3 = BitMatrix.from_columns([4, *c3], 3)
            mats = [BitMatrix.identity(3), a2, a3]
            if check_standard_basis(mats):
                count += 1
                assert loop_axioms_hold(StandardBasis(3, tuple(mats)).table())
    # one plane (GF(8)); (8-2)(8-4) ordered bases divided by |Aut| = 3
    assert count == 8


def test_known_tuples_are_semifields(records):
    for label, rec in records.items():
        t = SemifieldTable.from_codes(list(rec.tuple))
        t.validate()


def test_standard_basis_round_trip(plane_table):
    t = plane_table("IV")
    b = t.standard_basis()
    assert b.is_valid()
    assert b.table().label() == t.label()


def test_zero_divisor_detection():
    T = np.zeros((4, 4), dtype=np.uint8)
    with pytest.raises(ZeroDivisorError):
        check_no_zero_divisors(T)


def test_unit_isotope_is_semifield(plane_table):
    t = plane_table("VI")
    for u in (1, 5, 33):
        s, iso = unit_isotope(t.product, u)
        s.validate()
        assert iso.verify(s.product, t.product)


def test_permutation_composition():
    random_cube = Cube(np.random.default_rng(0).integers(0, 2, (4, 4, 4)))
    for a, b in itertools.product(PERMUTATION_NAMES, repeat=2):
        lhs = apply_permutation(apply_permutation(random_cube, a), b)
        rhs = apply_permutation(random_cube, compose(PERMUTATIONS[b], PERMUTATIONS[a]))
        assert lhs == rhs


def test_transpose_permutation_gives_opposite_or_transposed(plane_table):
    t = plane_table("II")
    # the (12) image is the opposite semifield x*y -> y*x
    s = permuted_semifield(t, "(12)")
    assert np.array_equal(s.product, t.product.T)


def test_nuclei_of_field():
    t = field_basis(0b1000011).table()
    assert tuple(nuclei_and_center(t)) == (64, 64, 64, 64, 64)


def test_primitivity_of_field():
    t = field_basis(0b1000011).table()
    right, left = primitive_elements(t)
    assert right.sum() == left.sum() == 36  # phi(63)
    assert primitivity_class(t) == "two_sided"
