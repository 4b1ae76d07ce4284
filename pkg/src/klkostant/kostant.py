"""Kostant's problem for involutions of shapes (n-2,1,1) and (n-3,2,1).

Answers are left-cell invariant, so every permutation is first replaced by the
involution in its left cell.  Four consecutive patterns decide negativity on
the two shape families; elsewhere a pattern witness still proves negativity
but nothing proves positivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cells import _engine
from .hecke import get_table
from .laurent import LaurentPoly
from .symgroup import (
    Permutation,
    conjugate_by_w0,
    format_perm,
    from_word,
    is_involution,
    occurrences,
    transposition,
)
from .tableaux import dominance_leq, rsk, rsk_inverse, shape, syt_count, tableaux_of_shape

__all__ = [
    "NEGATIVE_PATTERNS",
    "KostantVerdict",
    "InvolutionType",
    "KahrstromReport",
    "TYPE_TAGS",
    "build_shape_n211",
    "classify_type",
    "build_type",
    "dual_type",
    "type_instances",
    "kostant_by_pattern",
    "type_verdict",
    "kahrstrom_check",
    "prop43_pairs",
    "count_negative",
    "negative_formula",
    "asymptotic_ratio",
    "first_witness",
]

NEGATIVE_PATTERNS: tuple[Permutation, ...] = (
    (2, 1, 4, 3),
    (1, 4, 3, 2, 5),
    (1, 5, 3, 6, 2, 4, 7),
    (1, 4, 6, 2, 5, 3, 7),
)

CITE_N211 = "Thm 4.11"
CITE_N321 = "Thm 5.8.2"
CITE_PATTERN = "consecutive pattern propagation [CM25-1, Thm 3.6]"
CITE_TYPE = {
    "1": "Prop Type1K",
    "2": "Prop Type2K",
    "3": "Prop Type3K",
    "4": "Prop Type4K",
    "5": "Prop Type5K",
    "6": "Prop Type6K",
    "7": "Prop Type7K",
}


@dataclass(frozen=True)
class KostantVerdict:
    status: str  # "Positive", "Negative" or "Unknown"
    witness: tuple[Permutation, int] | None = None
    citation: str | None = None

    def __post_init__(self):
        if self.status not in ("Positive", "Negative", "Unknown"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "Negative" and self.witness is None:
            raise ValueError("a negative verdict needs a witness")
        if self.status == "Positive" and not self.citation:
            raise ValueError("a positive verdict needs a citation")

    def witness_text(self) -> str | None:
        if self.witness is None:
            return None
        p, i = self.witness
        return f"{''.join(map(str, p))}@{i}"

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness_text(), "citation": self.citation}


def first_witness(z: Permutation) -> tuple[Permutation, int] | None:
    """First negative pattern (in list order) occurring consecutively in z, with its position."""
    for p in NEGATIVE_PATTERNS:
        occ = occurrences(z, p)
        if occ:
            return p, occ[0]
    return None


def _family(lam: tuple[int, ...], n: int) -> str | None:
    if n >= 3 and lam == (n - 2, 1, 1):
        return "n211"
    if n >= 5 and lam == (n - 3, 2, 1):
        return "n321"
    return None


def kostant_by_pattern(z: Permutation) -> KostantVerdict:
    z = tuple(z)
    P, Q = rsk(z)
    inv = rsk_inverse(Q, Q)
    fam = _family(shape(inv), len(z))
    w = first_witness(inv)
    if w is not None:
        cite = {"n211": CITE_N211, "n321": CITE_N321}.get(fam, CITE_PATTERN)
        return KostantVerdict("Negative", w, cite)
    if fam == "n211":
        return KostantVerdict("Positive", None, CITE_N211)
    if fam == "n321":
        return KostantVerdict("Positive", None, CITE_N321)
    return KostantVerdict("Unknown")


# ---------------------------------------------------------------------------
# Shape (n-2,1,1)


def build_shape_n211(i: int, j: int, n: int) -> Permutation:
    """The transposition (i-1, j), whose tableau has i and j alone in rows two and three."""
    if not (n >= 3 and 2 <= i < j <= n):
        raise ValueError(f"need 2 <= i < j <= n and n >= 3, got i={i}, j={j}, n={n}")
    return transposition(i - 1, j, n)


def prop43_pairs(n: int, i: int, j: int) -> list[tuple[Permutation, Permutation]]:
    """The pairs (x_k, y_k), k = 1..n-1, with x_k ~R s_{i-1}, y_k ~R s_{j-1} and x_k ~L y_k."""
    build_shape_n211(i, j, n)
    out = []
    for k in range(1, n):
        if k <= i - 1:
            xw = list(range(i - 1, k - 1, -1))
            yw = list(range(j - 1, k - 1, -1))
        elif k <= j - 1:
            xw = list(range(i - 1, k + 1))
            yw = list(range(j - 1, k - 1, -1))
        else:
            xw = list(range(i - 1, k + 1))
            yw = list(range(j - 1, k + 1))
        out.append((from_word(xw, n), from_word(yw, n)))
    return out


# ---------------------------------------------------------------------------
# Shape (n-3,2,1): the thirteen types

TYPE_TAGS = ("1", "2", "2*", "3", "3*", "4", "4*", "5", "5*", "6", "6*", "7", "7*")


@dataclass(frozen=True)
class InvolutionType:
    """A type tag with the tableau entries: i, j in the second row and k in the third."""

    tag: str
    n: int
    i: int
    j: int
    k: int

    @classmethod
    def make(cls, tag: str, n: int, i: int, j: int | None = None, k: int | None = None) -> "InvolutionType":
        """Fill in the entries that the tag determines from the free parameters."""
        derived = {
            "1": (i + 2, i + 1),
            "2": (i + 3, i + 2),
            "3": ((k or 0) + 1, k),
            "4": (i + 3, i + 1),
            "5": ((k or 0) + 2, k),
            "6": (j, i + 1),
            "7": (j, k),
            "2*": (i + 1, i + 2),
            "3*": (i + 1, k),
            "4*": (i + 2, i + 3),
            "5*": (i + 2, k),
            "6*": (j, (j or 0) + 1),
            "7*": (j, k),
        }
        if tag not in derived:
            raise ValueError(f"unknown type tag {tag!r}")
        dj, dk = derived[tag]
        if dj is None or dk is None:
            raise ValueError(f"type {tag} needs more parameters")
        if (j is not None and j != dj) or (k is not None and k != dk):
            raise ValueError(f"parameters j={j}, k={k} do not fit type {tag}")
        t = cls(tag, n, i, dj, dk)
        t.validate()
        return t

    def valid(self) -> bool:
        n, i, j, k = self.n, self.i, self.j, self.k
        rules = {
            "1": n >= 5 and 3 <= i <= n - 2 and (j, k) == (i + 2, i + 1),
            "2": n >= 5 and 2 <= i <= n - 3 and (j, k) == (i + 3, i + 2),
            "3": n >= 6 and 2 <= i <= n - 4 and i + 2 < k < n and j == k + 1,
            "4": n >= 5 and 2 <= i <= n - 3 and (j, k) == (i + 3, i + 1),
            "5": n >= 6 and 2 <= i <= n - 4 and i + 1 < k < n - 1 and j == k + 2,
            "6": n >= 6 and 2 <= i <= n - 4 and i + 3 < j <= n and k == i + 1,
            "7": n >= 7 and 2 <= i <= n - 5 and i + 1 < k < n and k + 2 < j <= n,
            "2*": n >= 5 and 3 <= i <= n - 2 and (j, k) == (i + 1, i + 2),
            "3*": n >= 6 and 3 <= i <= n - 3 and i + 2 < k <= n and j == i + 1,
            "4*": n >= 5 and 2 <= i <= n - 3 and (j, k) == (i + 2, i + 3),
            "5*": n >= 6 and 2 <= i <= n - 4 and i + 3 < k <= n and j == i + 2,
            "6*": n >= 6 and 2 <= i <= n - 4 and i + 2 < j < n and k == j + 1,
            "7*": n >= 7 and 2 <= i <= n - 5 and i + 2 < j < n and j + 1 < k <= n,
        }
        return rules[self.tag]

    def validate(self) -> None:
        if not self.valid():
            raise ValueError(f"parameters out of range for type {self.tag}: {self}")

    def params(self) -> dict[str, int]:
        return {"i": self.i, "j": self.j, "k": self.k}

    def to_json(self) -> dict:
        return {"tag": self.tag, "n": self.n, **self.params()}


def _cycles(t: InvolutionType) -> tuple[tuple[int, int], tuple[int, int]]:
    i, j, k = t.i, t.j, t.k
    return {
        "1": ((i - 2, i + 1), (i - 1, i + 2)),
        "2": ((i - 1, i + 2), (i + 1, i + 3)),
        "3": ((i - 1, k), (k - 1, k + 1)),
        "4": ((i - 1, i + 1), (i + 2, i + 3)),
        "5": ((i - 1, k), (k + 1, k + 2)),
        "6": ((i - 1, i + 1), (j - 1, j)),
        "7": ((i - 1, k), (j - 1, j)),
        "2*": ((i - 2, i), (i - 1, i + 2)),
        "3*": ((i - 2, i), (i - 1, k)),
        "4*": ((i - 1, i), (i + 1, i + 3)),
        "5*": ((i - 1, i), (i + 1, k)),
        "6*": ((i - 1, i), (j - 1, j + 1)),
        "7*": ((i - 1, i), (j - 1, k)),
    }[t.tag]


def build_type(t: InvolutionType) -> Permutation:
    t.validate()
    z = list(range(1, t.n + 1))
    for a, b in _cycles(t):
        z[a - 1], z[b - 1] = b, a
    return tuple(z)


def classify_type(z: Permutation) -> InvolutionType:
    z = tuple(z)
    n = len(z)
    if not is_involution(z):
        raise ValueError(f"{format_perm(z)} is not an involution")
    if _family(shape(z), n) != "n321":
        raise ValueError(f"{format_perm(z)} does not have shape (n-3,2,1)")
    T = rsk(z)[0]
    (i, j), (k,) = T[1], T[2]
    if k < j:
        if j == k + 1:
            tag = "1" if k == i + 1 else "2" if k == i + 2 else "3"
        elif j == k + 2:
            tag = "4" if k == i + 1 else "5"
        else:
            tag = "6" if k == i + 1 else "7"
    else:
        if j == i + 1:
            tag = "2*" if k == i + 2 else "3*"
        elif j == i + 2:
            tag = "4*" if k == i + 3 else "5*"
        else:
            tag = "6*" if k == j + 1 else "7*"
    t = InvolutionType(tag, n, i, j, k)
    t.validate()
    return t


def dual_type(t: InvolutionType) -> InvolutionType:
    """The type of w0 z w0."""
    return classify_type(conjugate_by_w0(build_type(t)))


def type_instances(n: int, tags: Iterable[str] = TYPE_TAGS) -> list[InvolutionType]:
    """Every valid instance of the given tags in S_n."""
    out = []
    for tag in tags:
        for i in range(2, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(i + 1, n + 1):
                    if k == j:
                        continue
                    t = InvolutionType(tag, n, i, j, k)
                    if t.valid():
                        out.append(t)
    return out


def _type_positive(t: InvolutionType) -> bool:
    n, i, j = t.n, t.i, t.j
    return {
        "1": True,
        "3": True,
        "3*": True,
        "7": True,
        "7*": True,
        "4": False,
        "4*": False,
        "5": False,
        "5*": False,
        "2": i in (2, n - 3),
        "2*": i in (3, n - 2),
        "6*": j + 1 == n,
        "6": i == 2,
    }[t.tag]


def type_verdict(t: InvolutionType) -> KostantVerdict:
    """Per-type answer; negative verdicts get the first pattern occurrence in the involution."""
    t.validate()
    cite = CITE_TYPE[t.tag.rstrip("*")]
    if _type_positive(t):
        return KostantVerdict("Positive", None, cite)
    w = first_witness(build_type(t))
    if w is None:
        raise AssertionError(f"type {t} is tabulated negative but shows no negative pattern")
    return KostantVerdict("Negative", w, cite)


# ---------------------------------------------------------------------------
# Kåhrström's condition


@dataclass
class KahrstromReport:
    z: Permutation
    holds: bool
    collisions: list[tuple[Permutation, Permutation]] = field(default_factory=list)
    cone_size: int = 0
    graded: bool = False
    exploratory: bool = False

    def to_json(self) -> dict:
        return {
            "z": format_perm(self.z),
            "holds": self.holds,
            "graded": self.graded,
            "cone_size": self.cone_size,
            "collisions": [[format_perm(x), format_perm(y)] for x, y in self.collisions],
            "exploratory": self.exploratory,
        }


def _freeze_product(prod: dict[int, LaurentPoly], graded: bool):
    if graded:
        return frozenset(prod.items())
    return frozenset((a, c.eval_at_one()) for a, c in prod.items() if c.eval_at_one())


def kahrstrom_check(z: Permutation, graded: bool = False) -> KahrstromReport:
    """Injectivity of x -> D_z C_x on the cone {x <=_R z}, graded or at v = 1."""
    z = tuple(z)
    if not is_involution(z):
        raise ValueError(f"{format_perm(z)} is not an involution")
    n = len(z)
    t = get_table(n)
    eng = _engine(z)
    zi = t.index[z]
    zl = t.ldes[zi]
    zshape = shape(z)
    buckets: dict = {}
    cone = 0
    for x in range(t.size):
        if t.ldes[x] & ~zl:
            continue
        xp = t.perms[x]
        if not dominance_leq(zshape, shape(xp)):
            continue
        prod = eng.product(x)
        if not prod:
            continue
        cone += 1
        buckets.setdefault(rsk(xp)[1], []).append(x)
    collisions = []
    for members in buckets.values():
        if len(members) < 2:
            continue
        seen: dict = {}
        for x in members:
            key = _freeze_product(eng.product(x), graded)
            for y in seen.get(key, []):
                collisions.append((t.perms[y], t.perms[x]))
            seen.setdefault(key, []).append(x)
    collisions.sort()
    exploratory = _family(zshape, n) == "n321"
    return KahrstromReport(z, not collisions, collisions, cone, graded, exploratory)


# ---------------------------------------------------------------------------
# Counting


def _family_shape(family: str, n: int) -> tuple[int, ...]:
    if family in ("11", "(1,1)"):
        if n < 1:
            raise ValueError("the (1,1) family needs a top row of length >= 1")
        return (n, 1, 1)
    if family in ("21", "(2,1)"):
        if n < 2:
            raise ValueError("the (2,1) family needs a top row of length >= 2")
        return (n, 2, 1)
    raise ValueError(f"unknown family {family!r}; expected 11 or 21")


def negative_formula(family: str, n: int) -> int:
    """Closed-form count of Kostant negative permutations of the family shape with top row n."""
    lam = _family_shape(family, n)
    if lam[1] == 1:
        return n * (n - 2) * (n + 1) // 2
    involutions = 2 * (n - 3) + 2 * (n - 1) + (n - 1) * (n - 2) + (n - 3) * (n - 2)
    return involutions * syt_count(lam)


def count_negative(family: str, n: int) -> tuple[int, int]:
    """(closed form, enumeration) for the number of Kostant negative permutations."""
    lam = _family_shape(family, n)
    negatives = 0
    for T in tableaux_of_shape(lam):
        z = rsk_inverse(T, T)
        if kostant_by_pattern(z).status == "Negative":
            negatives += 1
    return negative_formula(family, n), negatives * syt_count(lam)


def asymptotic_ratio(family: str, n: int) -> Fraction:
    """Proportion of Kostant negative permutations among all of the family shape."""
    lam = _family_shape(family, n)
    return Fraction(count_negative(family, n)[1], syt_count(lam) ** 2)
