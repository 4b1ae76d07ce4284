"""Young diagrams, standard tableaux and the Robinson-Schensted correspondence.

Partitions are tuples of positive parts in weakly decreasing order; tableaux
are tuples of rows (each row a tuple of entries).

>>> P, Q = rsk((5, 2, 3, 4, 1, 6, 7))
>>> P
((1, 3, 4, 6, 7), (2,), (5,))
>>> shape((5, 2, 3, 4, 1, 6, 7))
(5, 1, 1)
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from functools import lru_cache
from math import comb, factorial, gcd
from typing import Iterator, Sequence

from .symgroup import Permutation

Partition = tuple[int, ...]
Tableau = tuple[tuple[int, ...], ...]

__all__ = [
    "Partition",
    "Tableau",
    "partitions",
    "dominance_leq",
    "conjugate",
    "rsk",
    "rsk_inverse",
    "shape",
    "tableau_shape",
    "is_standard",
    "descents_from_tableau",
    "row_extend",
    "syt_count",
    "standard_tableaux",
    "a_value",
    "reading_word",
]


def _as_partition(lam: Sequence[int]) -> Partition:
    parts = tuple(int(a) for a in lam if a)
    if any(a < 0 for a in parts) or any(parts[k] < parts[k + 1] for k in range(len(parts) - 1)):
        raise ValueError(f"{tuple(lam)} is not a partition")
    return parts


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n, in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def dominance_leq(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """lam is dominated by mu (every partial sum of lam is at most that of mu)."""
    lam, mu = _as_partition(lam), _as_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError(f"partitions {lam} and {mu} have different sizes")
    a = b = 0
    for k in range(max(len(lam), len(mu))):
        a += lam[k] if k < len(lam) else 0
        b += mu[k] if k < len(mu) else 0
        if a > b:
            return False
    return True


def conjugate(lam: Sequence[int]) -> Partition:
    lam = _as_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for a in lam if a > j) for j in range(lam[0]))


def _insert(rows: list[list[int]], a: int) -> int:
    """Row-insert a; return the index of the row that grew."""
    r = 0
    while True:
        if r == len(rows):
            rows.append([a])
            return r
        row = rows[r]
        k = bisect_right(row, a)
        if k == len(row):
            row.append(a)
            return r
        a, row[k] = row[k], a
        r += 1


def _freeze(rows: list[list[int]]) -> Tableau:
    return tuple(tuple(r) for r in rows)


def rsk(x: Permutation) -> tuple[Tableau, Tableau]:
    """Insertion tableau P and recording tableau Q of x by row insertion of x(1), x(2), ..."""
    p_rows: list[list[int]] = []
    q_rows: list[list[int]] = []
    for step, a in enumerate(x, start=1):
        r = _insert(p_rows, a)
        if r == len(q_rows):
            q_rows.append([])
        q_rows[r].append(step)
    return _freeze(p_rows), _freeze(q_rows)


def tableau_shape(t: Sequence[Sequence[int]]) -> Partition:
    return tuple(len(r) for r in t if len(r))


def is_standard(t: Sequence[Sequence[int]]) -> bool:
    rows = [tuple(r) for r in t]
    entries = sorted(a for r in rows for a in r)
    if entries != list(range(1, len(entries) + 1)):
        return False
    if any(len(rows[k]) < len(rows[k + 1]) for k in range(len(rows) - 1)):
        return False
    for r in rows:
        if any(r[k] >= r[k + 1] for k in range(len(r) - 1)):
            return False
    for k in range(len(rows) - 1):
        if any(rows[k][c] >= rows[k + 1][c] for c in range(len(rows[k + 1]))):
            return False
    return True


def rsk_inverse(P: Sequence[Sequence[int]], Q: Sequence[Sequence[int]]) -> Permutation:
    """The permutation with insertion tableau P and recording tableau Q."""
    if tableau_shape(P) != tableau_shape(Q):
        raise ValueError(f"shape mismatch: {tableau_shape(P)} vs {tableau_shape(Q)}")
    if not (is_standard(P) and is_standard(Q)):
        raise ValueError("both tableaux must be standard")
    rows = [list(r) for r in P]
    where = {a: r for r, row in enumerate(Q) for a in row}
    n = sum(len(r) for r in rows)
    out = [0] * n
    for step in range(n, 0, -1):
        r = where[step]
        a = rows[r].pop()
        for rr in range(r - 1, -1, -1):
            row = rows[rr]
            # largest entry smaller than a gets bumped out
            k = bisect_right(row, a) - 1
            a, row[k] = row[k], a
        out[step - 1] = a
        if not rows[r]:
            rows.pop(r)
    return tuple(out)


def shape(x: Permutation) -> Partition:
    return tableau_shape(rsk(x)[0])


def descents_from_tableau(t: Sequence[Sequence[int]]) -> set[int]:
    """i such that i+1 sits in a strictly lower row than i."""
    row_of = {a: r for r, row in enumerate(t) for a in row}
    n = len(row_of)
    return {i for i in range(1, n) if row_of[i] < row_of[i + 1]}


def row_extend(fragment: Sequence[Sequence[int]], top_len: int, n: int | None = None) -> Tableau:
    """Prepend a top row of length top_len holding the entries of [n] missing from fragment."""
    rows = [tuple(r) for r in fragment if len(r)]
    used = {a for r in rows for a in r}
    if n is None:
        n = top_len + len(used)
    if top_len + len(used) != n:
        raise ValueError(f"a top row of length {top_len} does not complete a tableau of size {n}")
    top = tuple(a for a in range(1, n + 1) if a not in used)
    t = (top,) + tuple(rows)
    if not is_standard(t):
        raise ValueError(f"row extension {t} is not a standard tableau")
    return t


def syt_count(lam: Sequence[int]) -> int:
    """Number of standard tableaux of shape lam (hook length formula)."""
    lam = _as_partition(lam)
    n = sum(lam)
    conj = conjugate(lam)
    num, den = factorial(n), 1
    for r, row_len in enumerate(lam):
        for c in range(row_len):
            hook = (row_len - c - 1) + (conj[c] - r - 1) + 1
            den *= hook
            g = gcd(num, den)
            num, den = num // g, den // g
    if den != 1:
        raise ArithmeticError(f"hook length formula did not divide for {lam}")
    return num


def standard_tableaux(lam: Sequence[int]) -> Iterator[Tableau]:
    """All standard tableaux of shape lam, each filled by placing 1..n into corners."""
    lam = _as_partition(lam)
    n = sum(lam)

    def fill(rows: list[list[int]], a: int) -> Iterator[Tableau]:
        if a > n:
            yield _freeze(rows)
            return
        for r in range(len(lam)):
            if len(rows[r]) < lam[r] and (r == 0 or len(rows[r - 1]) > len(rows[r])):
                rows[r].append(a)
                yield from fill(rows, a + 1)
                rows[r].pop()

    yield from fill([[] for _ in lam], 1)


def a_value(lam: Sequence[int]) -> int:
    """Sum over columns of C(column length, 2)."""
    return sum(comb(c, 2) for c in conjugate(lam))


def reading_word(t: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Row reading word, bottom row first."""
    return tuple(itertools.chain.from_iterable(reversed([tuple(r) for r in t])))


@lru_cache(maxsize=None)
def _shape_class(n: int, lam: Partition) -> tuple[Tableau, ...]:
    return tuple(standard_tableaux(lam))


def tableaux_of_shape(lam: Sequence[int]) -> tuple[Tableau, ...]:
    lam = _as_partition(lam)
    return _shape_class(sum(lam), lam)
