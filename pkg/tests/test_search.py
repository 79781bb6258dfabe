import itertools
import random

import numpy as np
import pytest

from semiplanes import _searchk as K
from semiplanes import search as S
from semiplanes.binmat import BitMatrix, companion_matrix, poly_from_int
from semiplanes.classify import plane_label, s3_tables
from semiplanes.semifield import SemifieldTable, StandardBasis


def labels_of(tuples, d):
    out = set()
    for t in tuples:
        for u in s3_tables(SemifieldTable.from_codes(list(t), d)):
            out.add(plane_label(u))
    return out


@pytest.fixture(scope="module")
def d4():
    return S.full_search(S.SearchConfig(4))


@pytest.fixture(scope="module")
def oracle4():
    return S.oracle_search(4)


def test_primitive_polynomials():
    assert S.primitive_polynomials(2) == [0b111]
    assert len(S.primitive_polynomials(4)) == 2
    assert len(S.primitive_polynomials(5)) == 6
    assert len(S.primitive_polynomials(6)) == 6
    assert S.a2_polys(6) == [0b1000011, 0b1101101]
    assert len(S.a2_polys(6, "primitive")) == 6
    with pytest.raises(ValueError):
        S.a2_polys(6, "bogus")


def test_colpacked_round_trip():
    rng = random.Random(2)
    for _ in range(50):
        m = BitMatrix(5, tuple(rng.randrange(32) for _ in range(5)))
        assert S.from_colpacked(S.to_colpacked(m), 5) == m


@pytest.mark.parametrize("d", [3, 4])
def test_lists_match_brute_force(d):
    eye = BitMatrix.identity(d)
    for p in S.a2_polys(d):
        a2 = companion_matrix(poly_from_int(p))
        ls = S.build_lists(a2, d)
        for sig in ls.signatures():
            brute = []
            for cols in itertools.product(range(1 << d), repeat=d - 1):
                b = BitMatrix.from_columns([sig, *cols], d)
                if all(m.rank() == d for m in (b, b + eye, b + a2, b + a2 + eye)):
                    brute.append(int(K.code_of(S.to_colpacked(b), d)))
            assert ls.get(sig).codes.tolist() == sorted(brute)
            # I + A2 itself never qualifies
            assert int(K.code_of(S.to_colpacked(a2 + eye), d)) not in ls.get(sig)


def test_build_lists_rejects_singular():
    with pytest.raises(ValueError):
        S.build_lists(BitMatrix.identity(4))


def test_sieve_matches_direct_test():
    d = 5
    a2 = companion_matrix(poly_from_int(S.a2_polys(d)[0]))
    ls = S.build_lists(a2, d)
    rng = np.random.default_rng(5)
    a3 = int(ls.get(4).codes[rng.integers(len(ls.get(4)))])
    cands = ls.get(8).codes
    kept = set(K.sieve(cands, np.array([a3], dtype=np.int64), np.array([4], dtype=np.int64), 8,
                       ls.codes, ls.offsets).tolist())
    a2c = S.to_colpacked(a2)
    a3m = int(K.from_code(a3, 4, d))
    eye = int(K.identity(d))
    for c in rng.choice(cands, 300, replace=False).tolist():
        b = int(K.from_code(c, 8, d))
        direct = all(K.is_inv(b ^ s, d) for s in (a3m, a3m ^ eye, a3m ^ a2c, a3m ^ a2c ^ eye))
        assert direct == (c in kept)


@pytest.mark.parametrize("d", [3, 4])
def test_prefix_classes_match_brute_force(d):
    polys = S.a2_polys(d)
    reps, sizes = S.enumerate_partial_bases(polys, d)
    assert len(reps) == S.brute_force_prefix_classes(polys, d)
    total = sum(len(S.build_lists(companion_matrix(poly_from_int(p)), d).get(4)) for p in polys)
    assert int(sizes.sum()) == total
    for p in reps:
        assert StandardBasis(d, p.mats).is_valid() if d == 3 else all(
            m.rank() == d for m in (p.a3, p.a3 + p.a2, p.a3 + BitMatrix.identity(d)))


def test_oracle_small_orders():
    for d in (2, 3):
        res = S.oracle_search(d)
        assert len(res.classes) == 1  # only the field
    with pytest.raises(ValueError):
        S.oracle_search(5)


def test_oracle_d4(oracle4):
    # (16-2)(16-4)(16-8) ordered bases per plane, divided by automorphisms
    assert len(oracle4.tuples) == sum(n for _, n in oracle4.classes)
    assert len(oracle4.classes) == 3


def test_search_sound(d4):
    for t in d4.tuples:
        assert S.tuple_is_valid(t, 4)


def test_search_matches_oracle(d4, oracle4):
    assert labels_of(d4.tuples, 4) == oracle4.plane_labels


def test_prefix_pruning_safety(d4, oracle4):
    # every oracle plane is reached from a prefix class the search kept
    found = labels_of(d4.tuples, 4)
    for lab in oracle4.plane_labels:
        assert lab in found


def test_extend_to_full_empty():
    d = 4
    p = S.PartialBasis(0, 0, S.a2_polys(d)[0], d)  # A3 with zero code is singular against I
    ls = S.build_lists(p.a2, d)
    assert 0 not in ls.get(4)
    assert S.extend_to_full(p, ls) == [] or all(S.tuple_is_valid(t, d) for t in S.extend_to_full(p, ls))


def test_determinism_and_workers(tmp_path):
    a = S.full_search(S.SearchConfig(4, workers=1))
    b = S.full_search(S.SearchConfig(4, workers=2))
    assert a.tuples == b.tuples
    assert a.manifest() == b.manifest()


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck"
    a = S.full_search(S.SearchConfig(4, checkpoint_dir=ck))
    files = sorted((ck / "status").iterdir())
    assert len(files) == len(a.prefixes)
    # drop one status file and truncate another, then resume
    files[0].unlink()
    files[1].write_text(files[1].read_text().rsplit("done", 1)[0])
    b = S.full_search(S.SearchConfig(4, checkpoint_dir=ck, resume=True))
    assert a.tuples == b.tuples
    store = S.Checkpoint(ck, 4)
    assert all(store.load(i) is not None for i in range(len(a.prefixes)))


def test_search_config_validation():
    with pytest.raises(ValueError):
        S.SearchConfig(7)
    with pytest.raises(ValueError):
        S.SearchConfig(4, workers=0)


def test_d5_finds_six_planes():
    r = S.full_search(S.SearchConfig(5))
    assert len(labels_of(r.tuples, 5)) == 6


def reference_completions(p, ls):
    """Direct sieve over the full lists, one level at a time (d = 5)."""
    a3 = np.array([p.a3_code], dtype=np.int64)
    s3 = np.array([4], dtype=np.int64)
    pool4 = K.sieve(ls.get(8).codes, a3, s3, 8, ls.codes, ls.offsets)
    out = []
    for c in pool4.tolist():
        span = np.array([p.a3_code, c, c ^ p.a3_code], dtype=np.int64)
        sigs = np.array([4, 8, 12], dtype=np.int64)
        for e in K.sieve(ls.get(16).codes, span, sigs, 16, ls.codes, ls.offsets).tolist():
            out.append((p.a2_code, p.a3_code, c, e))
    return sorted(out)


def test_completion_matches_reference_d5():
    polys = S.a2_polys(5)
    prefixes, _ = S.enumerate_partial_bases(polys, 5)
    ls = S.build_lists(companion_matrix(poly_from_int(polys[0])), 5)
    for p in prefixes[::40]:
        got = S.extend_to_full(p, ls)
        assert got == reference_completions(p, ls)
        assert all(S.tuple_is_valid(t, 5) for t in got)


@pytest.mark.slow
def test_plane_i_prefix_completion():
    # the prefix (I, A2, A3) of the field's listed tuple, with A2 = C(x^6+x^5+1)
    p = S.PartialBasis(0, 67639409, 0b1100001, 6)
    ls = S.build_lists(p.a2, 6)
    assert min(ls.sizes().values()) > 7_000_000
    assert p.a2_code == 135274593
    out = S.extend_to_full(p, ls)
    assert (135274593, 67639409, 33954937, 25632381, 566730623) in out
    assert all(S.tuple_is_valid(t, 6) for t in out[:20])
