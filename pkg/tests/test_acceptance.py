"""Acceptance criteria. Each test records one PASS/FAIL line, printed at the end of the run."""

import hashlib
import os
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from semiplanes import search as S
from semiplanes.classify import (
    classify_plane,
    isomorphisms,
    plane_label,
    primitive_coordinatizer,
    principal_isotope,
    s3_tables,
    summarize,
)
from semiplanes.cli import main
from semiplanes.fixtures import known_tuples, new_tuples, plane_records
from semiplanes.presentations import appendix_rules, rule_to_table, verify_appendix_entry
from semiplanes.semifield import SemifieldTable, StandardBasis, check_standard_basis, primitivity_class

from conftest import ACCEPTANCE, table_of

AUT = {"I": 6, "II": 1, "III": 1, "IV": 1, "V": 3, "VI": 3, "VII": 1, "VIII": 2, "IX": 1,
       "X": 1, "XI": 6, "XII": 6, "XIII": 1}
KNOWN_AT = [23814, 567, 49, 441, 42, 42, 14, 126, 42, 42, 18, 6, 3]
# |At| column of the 67 new rows as (value, multiplicity)
NEW_AT = [(63, 1), (21, 2), (15, 2), (14, 1), (9, 13), (7, 1), (6, 5), (5, 1), (3, 31), (2, 4), (1, 6)]
APPENDIX_SUBSET = ["XIV", "XV", "XXV", "XVII", "XXX", "XLV", "LXVI", "XIX", "LXXI", "LXXIV", "LXXX"]
LONG_RUN = os.environ.get("SEMIPLANES_LONG") == "1"


@contextmanager
def criterion(n, text):
    try:
        yield
    except BaseException:
        ACCEPTANCE.append((n, "FAIL", text))
        raise
    ACCEPTANCE.append((n, "PASS", text))


@pytest.fixture(scope="module")
def computed():
    """ClassRecords of all 80 representatives (without hexagons)."""
    return {label: classify_plane(table_of(label), label, with_hexagon=False) for label in plane_records()}


def test_c01_fixture_decode():
    with criterion(1, "80 fixture tuples pass the standard-basis check in under 1 s"):
        tuples = [t for _, t in known_tuples()] + [t for _, t in new_tuples()]
        assert len(tuples) == 80
        bases = [StandardBasis.from_codes(list(t)) for t in tuples]
        t0 = time.perf_counter()
        assert all(check_standard_basis(b.mats) for b in bases)
        assert time.perf_counter() - t0 < 1.0


def test_c02_automorphism_counts():
    with criterion(2, "automorphism counts of the 13 known planes"):
        got = {label: len(isomorphisms(table_of(label), table_of(label))) for label in AUT}
        assert got == AUT


def test_c03_sa_decomposition(computed, records):
    with criterion(3, "S/A decompositions and 63^2 = |At| * sum count/|Aut| for all 80"):
        for label, rec in records.items():
            got = computed[label]
            assert tuple(got.sa) == rec.sa_sorted(), label
            total = sum(Fraction(c, a) for c, a in got.sa)
            assert got.at_order * total == 3969, label
        v = computed["V"]
        assert sum(Fraction(c, a) for c, a in v.sa) == 92 + 1 + Fraction(4, 3) + Fraction(1, 6)


def test_c04_autotopy_orders(computed, records):
    with criterion(4, "|At| column for all 80"):
        known = [computed[label].at_order for label, _ in known_tuples()]
        assert known == KNOWN_AT
        new = sorted((computed[label].at_order for label, _ in new_tuples()), reverse=True)
        expected = [v for v, n in NEW_AT for _ in range(n)]
        assert new == expected
        for label, rec in records.items():
            assert computed[label].at_order == rec.at_order


def test_c05_nuclei(computed, records):
    with criterion(5, "ZN tuples for all 80"):
        for label, rec in records.items():
            assert tuple(computed[label].zn) == rec.zn, label


def test_c06_orbit_profiles(computed, records):
    with criterion(6, "orbit profiles for 79 rows; plane I structural checks"):
        for label, rec in records.items():
            got = computed[label].orbits
            if label == "I":
                for prof in got:
                    assert sum(n * ln for n, ln in prof) == 65
                    assert all(23814 % ln == 0 for _, ln in prof)
                assert computed[label].at_order == 23814
                print("plane I computed profile:", got)
                continue
            assert tuple(got) == rec.orbits_sorted(), label


def test_c07_primitivity(records):
    with criterion(7, "primitivity: XII none, XIII one-sided, 78 others primitive in their plane"):
        assert primitivity_class(table_of("XII")) == "none"
        assert primitivity_class(table_of("XIII")) in ("left_only", "right_only")
        for label in records:
            if label in ("XII", "XIII"):
                continue
            t = table_of(label)
            if primitivity_class(t) != "two_sided":
                ab = primitive_coordinatizer(t)
                assert ab is not None, label
                assert primitivity_class(principal_isotope(t, *ab)) == "two_sided"


def test_c08_known_summary():
    with criterion(8, "known fixtures classify to (13, 35, 3058)"):
        s = summarize(table_of(label) for label, _ in known_tuples())
        assert s.as_tuple() == (13, 35, 3058)


def test_c09_oracle_equivalence():
    with criterion(9, "order 16: search and oracle give the same isotopy classes; tuples sound"):
        res = S.full_search(S.SearchConfig(4))
        for t in res.tuples:
            assert S.tuple_is_valid(t, 4)
        found = {plane_label(u) for t in res.tuples for u in s3_tables(SemifieldTable.from_codes(list(t), 4))}
        assert found == S.oracle_search(4).plane_labels


def test_c10_appendix_subset(records):
    with criterion(10, f"appendix rules verify for {len(APPENDIX_SUBSET)} labels over all three types"):
        rules = appendix_rules()
        assert {rules[label].type_tag for label in APPENDIX_SUBSET} == {1, 2, 3}
        assert {"XIV", "XIX", "LXXI"} <= set(APPENDIX_SUBSET)
        for label in APPENDIX_SUBSET:
            assert verify_appendix_entry(label, rules).ok, label
            got = classify_plane(rule_to_table(rules[label]), label, with_hexagon=False)
            rec = records[label]
            assert got.at_order == rec.at_order
            assert tuple(got.sa) == rec.sa_sorted()
            assert tuple(got.zn) == rec.zn
            assert tuple(got.orbits) == rec.orbits_sorted()


@pytest.mark.skipif(not LONG_RUN, reason="multi-day run; set SEMIPLANES_LONG=1")
def test_c11_long_run():
    with criterion(11, "full d = 6 search: 399866 partial bases, 95877 tuples, (80, 332, 87714)"):
        res = S.full_search(S.SearchConfig(6))
        assert res.prefix_counts() == [377675, 22191]
        assert len(res.tuples) == 95877
        s = summarize(S.tuple_tables(res.tuples, 6))
        assert s.as_tuple() == (80, 332, 87714)


def test_c11_reported_when_skipped():
    if not LONG_RUN:
        ACCEPTANCE.append((11, "SKIP", "full d = 6 search not run (optional long run)"))


def _digest(paths):
    return [hashlib.sha256(p.read_bytes()).hexdigest() for p in paths]


def test_c12_determinism(tmp_path, capsys):
    with criterion(12, "repeated runs give byte-identical data files"):
        src = tmp_path / "known.tuples"
        src.write_text("".join(" ".join(map(str, t)) + "\n" for _, t in known_tuples()[:4]))
        digests = []
        for run in ("a", "b"):
            d = tmp_path / run
            d.mkdir()
            assert main(["search", "-d", "4", "-o", str(d / "s.tuples")]) == 0
            assert main(["search", "-d", "4", "--oracle", "-o", str(d / "o.tuples")]) == 0
            assert main(["classify", str(src), "-o", str(d / "c.jsonl"), "--summary", str(d / "c.json")]) == 0
            assert main(["decode", *map(str, known_tuples()[0][1])]) == 0
            digests.append(_digest([d / "s.tuples", d / "s.tuples.manifest.json", d / "o.tuples",
                                    d / "o.tuples.manifest.json", d / "c.jsonl", d / "c.json"]))
        capsys.readouterr()
        assert digests[0] == digests[1]
        w = tmp_path / "w"
        w.mkdir()
        assert main(["search", "-d", "4", "--workers", "2", "-o", str(w / "s.tuples")]) == 0
        assert _digest([w / "s.tuples", w / "s.tuples.manifest.json"]) == digests[0][:2]
