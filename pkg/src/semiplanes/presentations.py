"""Multiplication rules over GF(8)^2, GF(4)^3 and GF(64).

A rule lists, for each output coordinate, monomials ``j^e * x_s^(2^p) * a_t^(2^r)``.
Elements are flattened to integers coordinate-major, then by powers of j:
over GF(8)^2 the element ``(c1, c2)`` is ``c1 | c2 << 3`` where each ``c`` is
the bit vector of coefficients of ``1, j, j^2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable

import numpy as np

from .semifield import SemifieldTable, check_no_zero_divisors, unit_isotope


class RuleFormatError(ValueError):
    """A rule record could not be parsed."""


# -- fields ----------------------------------------------------------------


@dataclass(frozen=True)
class GF2k:
    """GF(2^k) presented as GF(2)[j] / (modulus); elements are coefficient bit vectors."""

    name: str
    k: int
    modulus: int  # includes the leading term

    @property
    def order(self) -> int:
        return 1 << self.k

    def mul(self, a: int, b: int) -> int:
        out = 0
        while b:
            if b & 1:
                out ^= a
            b >>= 1
            a <<= 1
            if a >> self.k & 1:
                a ^= self.modulus
        return out

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def power(self, a: int, n: int) -> int:
        out = 1
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    def frobenius_power(self, a: int, p: int) -> int:
        """a^(2^p)."""
        for _ in range(p % self.k):
            a = self.mul(a, a)
        return a

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.power(a, self.order - 2)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            n += 1
        return n

    @property
    def j(self) -> int:
        return 2

    @property
    def mul_table(self) -> np.ndarray:
        return _mul_table(self)

    @property
    def frob_table(self) -> np.ndarray:
        """frob_table[p, a] = a^(2^p), p = 0..k-1."""
        return _frob_table(self)


@lru_cache(maxsize=None)
def _mul_table(f: GF2k) -> np.ndarray:
    q = f.order
    return np.array([[f.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)


@lru_cache(maxsize=None)
def _frob_table(f: GF2k) -> np.ndarray:
    return np.array([[f.frobenius_power(a, p) for a in range(f.order)] for p in range(f.k)], dtype=np.int64)


GF4 = GF2k("GF(4)", 2, 0b111)
GF8 = GF2k("GF(8)", 3, 0b1011)
GF64 = GF2k("GF(64)", 6, 0b1000011)
FIELDS = {f.name: f for f in (GF4, GF8, GF64)}
# rule type -> (field, number of coordinates)
RULE_TYPES = {1: (GF8, 2), 2: (GF4, 3), 3: (GF64, 1)}


@dataclass(frozen=True)
class FieldElement:
    field: GF2k
    value: int

    def _check(self, other: "FieldElement") -> None:
        if other.field != self.field:
            raise ValueError(f"mixed fields {self.field.name} and {other.field.name}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.value ^ other.value)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def frobenius(self, p: int = 1) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius_power(self.value, p))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inverse(self.value))


# -- rules -----------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    j_exp: int
    x_slot: int
    x_frob: int
    a_slot: int
    a_frob: int

    def __str__(self) -> str:
        return f"j^{self.j_exp} * x_{self.x_slot}^(2^{self.x_frob}) * a_{self.a_slot}^(2^{self.a_frob})"


@dataclass(frozen=True)
class MultiplicationRule:
    label: str
    type_tag: int
    coords: tuple[tuple[Term, ...], ...]

    @property
    def field(self) -> GF2k:
        return RULE_TYPES[self.type_tag][0]

    @property
    def arity(self) -> int:
        return RULE_TYPES[self.type_tag][1]

    @property
    def dim(self) -> int:
        return self.field.k * self.arity

    def to_text(self) -> str:
        lines = [f"[{self.label}]", f"type {self.type_tag}", f"field {self.field.name}"]
        for i, terms in enumerate(self.coords, 1):
            lines.append(f"coord {i}: " + " + ".join(str(t) for t in terms))
        return "\n".join(lines) + "\n"


TERM_RE = re.compile(
    r"^j\^(\d+)\*x_(\d+)\^\(2\^(\d+)\)\*a_(\d+)\^\(2\^(\d+)\)$"
)


def parse_term(text: str) -> Term:
    m = TERM_RE.match(re.sub(r"\s+", "", text))
    if not m:
        raise RuleFormatError(f"malformed term {text.strip()!r}")
    return Term(*(int(g) for g in m.groups()))


def parse_rules(text: str) -> dict[str, MultiplicationRule]:
    rules: dict[str, MultiplicationRule] = {}
    label = None
    info: dict = {}

    def flush():
        if label is None:
            return
        if "type" not in info:
            raise RuleFormatError(f"{label}: missing type")
        typ = info["type"]
        fld, arity = RULE_TYPES[typ]
        if info.get("field", fld.name) != fld.name:
            raise RuleFormatError(f"{label}: field {info['field']} does not match type {typ}")
        coords = info.get("coords", {})
        if sorted(coords) != list(range(1, arity + 1)):
            raise RuleFormatError(f"{label}: expected coordinates 1..{arity}")
        for terms in coords.values():
            for t in terms:
                if not (1 <= t.x_slot <= arity and 1 <= t.a_slot <= arity):
                    raise RuleFormatError(f"{label}: slot out of range in {t}")
        rules[label] = MultiplicationRule(label, typ, tuple(tuple(coords[i]) for i in range(1, arity + 1)))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            flush()
            if not line.endswith("]"):
                raise RuleFormatError(f"line {lineno}: bad header {line!r}")
            label, info = line[1:-1].strip(), {}
            if label in rules:
                raise RuleFormatError(f"line {lineno}: duplicate label {label}")
            continue
        if label is None:
            raise RuleFormatError(f"line {lineno}: content before the first [label]")
        key, _, rest = line.partition(" ")
        if key == "type":
            t = int(rest)
            if t not in RULE_TYPES:
                raise RuleFormatError(f"line {lineno}: unknown type {t}")
            info["type"] = t
        elif key == "field":
            info["field"] = rest.strip()
        elif key == "coord":
            idx, _, body = rest.partition(":")
            terms = [parse_term(s) for s in body.split("+") if s.strip()]
            info.setdefault("coords", {})[int(idx)] = terms
        else:
            raise RuleFormatError(f"line {lineno}: unknown key {key!r}")
    flush()
    return rules


@lru_cache(maxsize=1)
def appendix_rules() -> dict[str, MultiplicationRule]:
    text = resources.files("semiplanes").joinpath("data/rules.txt").read_text()
    return parse_rules(text)


# -- evaluation ------------------------------------------------------------


def split_coords(rule: MultiplicationRule) -> np.ndarray:
    """coords[s, x] = field value of coordinate s+1 of the flattened element x."""
    k = rule.field.k
    xs = np.arange(1 << rule.dim)
    return np.stack([(xs >> (k * s)) & ((1 << k) - 1) for s in range(rule.arity)])


def rule_product(rule: MultiplicationRule) -> np.ndarray:
    """Raw table ``P[x, a] = x * a`` of the rule on flattened elements."""
    f = rule.field
    mt = f.mul_table
    fr = f.frob_table
    jp = [f.power(f.j, e) for e in range(f.order - 1)]
    c = split_coords(rule)
    q = 1 << rule.dim
    out = np.zeros((q, q), dtype=np.int64)
    for s, terms in enumerate(rule.coords):
        acc = np.zeros((q, q), dtype=np.int64)
        for t in terms:
            xv = fr[t.x_frob % f.k][c[t.x_slot - 1]]
            av = fr[t.a_frob % f.k][c[t.a_slot - 1]]
            prod = mt[xv[:, None], av[None, :]]
            acc ^= mt[jp[t.j_exp % (f.order - 1)], prod]
        out ^= acc << (f.k * s)
    return out.astype(np.uint8)


def is_biadditive(P: np.ndarray) -> bool:
    q = P.shape[0]
    ar = np.arange(q)
    xor = ar[:, None] ^ ar[None, :]
    for a in range(q):
        if not np.array_equal(P[xor, a], P[:, a][:, None] ^ P[:, a][None, :]):
            return False
        if not np.array_equal(P[a][xor], P[a][:, None] ^ P[a][None, :]):
            return False
    return True


def rule_to_table(rule: MultiplicationRule) -> SemifieldTable:
    """Semifield isotopic to the rule's presemifield (unit isotope at element 1).

    Raises ZeroDivisorError when the rule has zero divisors.
    """
    P = rule_product(rule)
    check_no_zero_divisors(P)
    t, _ = unit_isotope(P, 1)
    return t


def field_rule(f: GF2k = GF64) -> MultiplicationRule:
    """The plain field product x*a as a type-3 rule."""
    if f != GF64:
        raise ValueError("only GF(64) has a single-coordinate rule type")
    return MultiplicationRule("GF64", 3, ((Term(0, 1, 0, 1, 0),),))


@dataclass(frozen=True)
class AppendixCheck:
    label: str
    ok: bool
    message: str = ""


def verify_appendix_entry(label: str, rules: dict[str, MultiplicationRule] | None = None,
                          tuple_codes: Iterable[int] | None = None) -> AppendixCheck:
    """Check that the rule for ``label`` coordinatizes the same plane as its tuple."""
    from .classify import plane_label
    from .fixtures import plane_records
    from .semifield import ZeroDivisorError

    rules = appendix_rules() if rules is None else rules
    if label not in rules:
        return AppendixCheck(label, False, "no rule with this label")
    if tuple_codes is None:
        recs = plane_records()
        if label not in recs:
            return AppendixCheck(label, False, "no tuple with this label")
        tuple_codes = recs[label].tuple
    try:
        t_rule = rule_to_table(rules[label])
    except ZeroDivisorError as exc:
        return AppendixCheck(label, False, f"zero divisor: {exc}")
    t_tuple = SemifieldTable.from_codes(list(tuple_codes))
    if plane_label(t_rule) != plane_label(t_tuple):
        return AppendixCheck(label, False, "rule and tuple give different planes")
    return AppendixCheck(label, True)
