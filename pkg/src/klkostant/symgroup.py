"""Permutations of [n] in one-line notation.

A permutation is a plain tuple ``(x(1), ..., x(n))``.  Products compose right
to left, ``(xy)(i) = x(y(i))``, so right multiplication by the simple
transposition ``s_i`` swaps the entries in positions ``i`` and ``i+1`` while
left multiplication swaps the values ``i`` and ``i+1``.

>>> compose(simple(1, 4), (3, 2, 4, 1))
(3, 1, 4, 2)
>>> compose((3, 2, 4, 1), simple(1, 4))
(2, 3, 4, 1)
"""

from __future__ import annotations

from typing import Iterable, Sequence

Permutation = tuple[int, ...]

__all__ = [
    "Permutation",
    "perm",
    "identity",
    "simple",
    "compose",
    "inverse",
    "length",
    "descents_right",
    "descents_left",
    "support",
    "reduced_word",
    "from_word",
    "bruhat_leq",
    "longest_element",
    "conjugate_by_w0",
    "pattern_at",
    "occurrences",
    "contains_pattern",
    "shift",
    "multi_shift",
    "coset_decompose",
    "is_compatible",
    "is_involution",
    "transposition",
    "format_perm",
    "parse_perm",
]


def perm(word: Iterable[int]) -> Permutation:
    """Validate a one-line word and return it as a permutation tuple."""
    x = tuple(int(a) for a in word)
    if sorted(x) != list(range(1, len(x) + 1)):
        raise ValueError(f"{x} is not a permutation of [1..{len(x)}]")
    return x


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def simple(i: int, n: int) -> Permutation:
    if not 1 <= i <= n - 1:
        raise ValueError(f"simple transposition s_{i} does not exist in S_{n}")
    x = list(range(1, n + 1))
    x[i - 1], x[i] = x[i], x[i - 1]
    return tuple(x)


def transposition(a: int, b: int, n: int) -> Permutation:
    """The transposition (a, b) in S_n."""
    if not (1 <= a <= n and 1 <= b <= n) or a == b:
        raise ValueError(f"invalid transposition ({a}, {b}) in S_{n}")
    x = list(range(1, n + 1))
    x[a - 1], x[b - 1] = b, a
    return tuple(x)


def _check_rank(x: Sequence[int], y: Sequence[int]) -> None:
    if len(x) != len(y):
        raise ValueError(f"rank mismatch: {len(x)} vs {len(y)}")


def compose(x: Permutation, y: Permutation) -> Permutation:
    """The product xy, i.e. i -> x(y(i))."""
    _check_rank(x, y)
    return tuple(x[b - 1] for b in y)


def inverse(x: Permutation) -> Permutation:
    out = [0] * len(x)
    for i, a in enumerate(x, start=1):
        out[a - 1] = i
    return tuple(out)


def is_involution(x: Permutation) -> bool:
    return all(x[a - 1] == i for i, a in enumerate(x, start=1))


def length(x: Permutation) -> int:
    """Number of inversions."""
    n = len(x)
    return sum(1 for i in range(n) for j in range(i + 1, n) if x[i] > x[j])


def descents_right(x: Permutation) -> set[int]:
    return {i for i in range(1, len(x)) if x[i - 1] > x[i]}


def descents_left(x: Permutation) -> set[int]:
    return descents_right(inverse(x))


def support(x: Permutation) -> set[int]:
    """Indices i such that x does not stabilise {1, ..., i}."""
    out = set()
    running_max = 0
    for i in range(1, len(x)):
        running_max = max(running_max, x[i - 1])
        if running_max != i:
            out.add(i)
    return out


def rmul_simple(x: Permutation, i: int) -> Permutation:
    """x * s_i (swap positions i, i+1)."""
    y = list(x)
    y[i - 1], y[i] = y[i], y[i - 1]
    return tuple(y)


def lmul_simple(i: int, x: Permutation) -> Permutation:
    """s_i * x (swap values i, i+1)."""
    return tuple(i + 1 if a == i else i if a == i + 1 else a for a in x)


def reduced_word(x: Permutation) -> list[int]:
    """A reduced word for x, built by stripping the smallest right descent.

    >>> reduced_word((3, 2, 4, 1))
    [1, 2, 3, 1]
    """
    letters = []
    y = list(x)
    while True:
        for i in range(1, len(y)):
            if y[i - 1] > y[i]:
                y[i - 1], y[i] = y[i], y[i - 1]
                letters.append(i)
                break
        else:
            break
    letters.reverse()
    return letters


def from_word(word: Iterable[int], n: int) -> Permutation:
    """The product s_{w1} s_{w2} ... in S_n."""
    y = list(range(1, n + 1))
    for i in word:
        if not 1 <= i <= n - 1:
            raise ValueError(f"letter s_{i} does not exist in S_{n}")
        y[i - 1], y[i] = y[i], y[i - 1]
    return tuple(y)


def bruhat_leq(x: Permutation, y: Permutation) -> bool:
    """Bruhat order by comparing sorted prefixes entrywise."""
    _check_rank(x, y)
    for i in range(1, len(x)):
        a = sorted(x[:i])
        b = sorted(y[:i])
        if any(p > q for p, q in zip(a, b)):
            return False
    return True


def longest_element(n: int) -> Permutation:
    return tuple(range(n, 0, -1))


def conjugate_by_w0(x: Permutation) -> Permutation:
    """w0 x w0: reverse positions and complement values."""
    n = len(x)
    return tuple(n + 1 - a for a in reversed(x))


def standardize(window: Sequence[int]) -> Permutation:
    order = sorted(window)
    rank = {a: k for k, a in enumerate(order, start=1)}
    return tuple(rank[a] for a in window)


def pattern_at(x: Permutation, m: int, i: int) -> Permutation:
    """The size-m pattern in the window starting at 1-based position i."""
    if m < 0 or not 1 <= i <= len(x) - m + 1:
        raise ValueError(f"window of size {m} at position {i} does not fit in rank {len(x)}")
    return standardize(x[i - 1 : i - 1 + m])


def occurrences(x: Permutation, p: Permutation) -> list[int]:
    m = len(p)
    if m > len(x):
        return []
    return [i for i in range(1, len(x) - m + 2) if standardize(x[i - 1 : i - 1 + m]) == p]


def contains_pattern(x: Permutation, p: Permutation) -> bool:
    return bool(occurrences(x, p))


def shift(x: Permutation, n: int, i: int) -> Permutation:
    """Embed x in S_n acting on positions i..i+m-1 (s_a -> s_{a+i-1})."""
    m = len(x)
    if not 1 <= m <= n or not 1 <= i <= n - m + 1:
        raise ValueError(f"cannot shift a rank-{m} permutation into S_{n} at position {i}")
    out = list(range(1, n + 1))
    for k, a in enumerate(x):
        out[i - 1 + k] = a + i - 1
    return tuple(out)


def multi_shift(
    xs: Sequence[Permutation], ms: Sequence[int], n: int, positions: Sequence[int]
) -> Permutation:
    """Product of shifts into pairwise disjoint windows."""
    if not (len(xs) == len(ms) == len(positions)):
        raise ValueError("multi_shift needs equally many permutations, sizes and positions")
    for x, m in zip(xs, ms):
        if len(x) != m:
            raise ValueError(f"permutation {x} does not have rank {m}")
    for k in range(len(xs) - 1):
        if positions[k + 1] <= positions[k] + ms[k] - 1:
            raise ValueError(f"windows at {positions[k]} and {positions[k + 1]} overlap")
    out = identity(n)
    for x, i in zip(xs, positions):
        out = compose(out, shift(x, n, i))
    return out


def coset_decompose(z: Permutation, m: int, i: int) -> tuple[Permutation, Permutation]:
    """Split z = x * shift(p) with p the window pattern and x increasing on the window."""
    p = pattern_at(z, m, i)
    window = sorted(z[i - 1 : i - 1 + m])
    x = z[: i - 1] + tuple(window) + z[i - 1 + m :]
    return x, p


def is_compatible(walk: Sequence[Permutation], word: Sequence[int]) -> bool:
    """Compatibility of a strong right Bruhat walk with a reduced word.

    For every k: z_k s_{i_k} < z_k, and z_k s_{i_{k-1}} > z_k, z_k s_{i_{k+1}} > z_k
    whenever those neighbouring letters exist.
    """
    if len(walk) != len(word) or not walk:
        raise ValueError("walk and word must be nonempty and of equal length")
    n = len(walk[0])
    if length(from_word(word, n)) != len(word):
        raise ValueError(f"word {list(word)} is not reduced")
    for a, b in zip(walk, walk[1:]):
        if len(b) != n or not any(rmul_simple(a, s) == b for s in range(1, n)):
            raise ValueError(f"{a} and {b} are not strong right Bruhat neighbours")

    def is_descent(z: Permutation, s: int) -> bool:
        return z[s - 1] > z[s]

    for k, z in enumerate(walk):
        if not is_descent(z, word[k]):
            return False
        for nb in (k - 1, k + 1):
            if 0 <= nb < len(word) and is_descent(z, word[nb]):
                return False
    return True


def format_perm(x: Permutation) -> str:
    return ",".join(str(a) for a in x)


def parse_perm(text: str, n: int | None = None) -> Permutation:
    """Parse "3,2,4,1" (one-line) or "w:1,2,1,3" (reduced word, rank n required).

    Compact one-line words such as "3241" are accepted for ranks below 10.
    """
    s = text.strip()
    if s.startswith("w:"):
        if n is None:
            raise ValueError("a reduced-word permutation needs an explicit rank")
        body = s[2:].strip()
        letters = [int(t) for t in body.split(",") if t.strip()] if body else []
        return from_word(letters, n)
    if "," in s:
        x = perm(int(t) for t in s.split(","))
    elif s.isdigit():
        x = perm(int(c) for c in s)
    else:
        raise ValueError(f"cannot parse permutation {text!r}")
    if n is not None and len(x) != n:
        raise ValueError(f"permutation {text!r} has rank {len(x)}, expected {n}")
    return x
