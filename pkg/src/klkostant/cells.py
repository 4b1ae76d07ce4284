"""Kazhdan-Lusztig preorders and cells of S_n.

``leq_R(x, w)`` holds when ``D_{w^-1} C_x`` is nonzero, and ``leq_L(x, w)`` is
``leq_R(x^-1, w^-1)``.  Before any Hecke computation the left test is cut
down: x splits into factors with disjoint interval supports, and a factor
living in a window of size m is tested against the size-m pattern of w in that
window.  Only the reduced instances reach a D-product.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .hecke import DProducts, _c_left_simple_idx, _c_right_simple_idx, get_table
from .laurent import ONE
from .symgroup import (
    Permutation,
    identity,
    inverse,
    is_involution,
    multi_shift,
    pattern_at,
    shift,
    support,
)
from .tableaux import Tableau, reading_word, rsk, rsk_inverse, tableau_shape, tableaux_of_shape

__all__ = [
    "CellId",
    "left_cell",
    "right_cell",
    "cell_members",
    "cell_involution",
    "leq_R",
    "leq_L",
    "leq_L_traced",
    "leq_closure_oracle",
    "leq_L_reduced",
    "leq_L_multi",
    "full_support_decompose",
    "support_components",
    "cell_poset",
    "poset_to_dot",
    "poset_to_json",
]


@dataclass(frozen=True)
class CellId:
    """A left cell (fixed recording tableau Q) or right cell (fixed insertion tableau P)."""

    kind: str
    tableau: Tableau

    def __post_init__(self):
        if self.kind not in ("left", "right"):
            raise ValueError(f"cell kind must be 'left' or 'right', not {self.kind!r}")

    @property
    def shape(self):
        return tableau_shape(self.tableau)


def left_cell(x: Permutation) -> CellId:
    return CellId("left", rsk(x)[1])


def right_cell(x: Permutation) -> CellId:
    return CellId("right", rsk(x)[0])


def cell_members(c: CellId) -> list[Permutation]:
    partners = tableaux_of_shape(c.shape)
    if c.kind == "left":
        out = [rsk_inverse(p, c.tableau) for p in partners]
    else:
        out = [rsk_inverse(c.tableau, q) for q in partners]
    return sorted(out)


def cell_involution(c: CellId) -> Permutation:
    return rsk_inverse(c.tableau, c.tableau)


# ---------------------------------------------------------------------------
# Preorders


@lru_cache(maxsize=64)
def _engine(z: Permutation) -> DProducts:
    t = get_table(len(z))
    return DProducts(t, t.index[z])


def _d_nonzero(z: Permutation, x: Permutation) -> bool:
    """D_z C_x != 0."""
    t = get_table(len(z))
    return bool(_engine(tuple(z)).product(t.index[tuple(x)]))


def _leq_L_direct(x: Permutation, w: Permutation) -> bool:
    # x <=_L w  iff  x^-1 <=_R w^-1  iff  D_w C_{x^-1} != 0
    return _d_nonzero(w, inverse(x))


def support_components(x: Permutation) -> list[tuple[Permutation, int]]:
    """Split x into factors on maximal intervals of its support.

    Returns (pattern, position) pairs; x is the product of the shifted patterns.
    """
    sup = sorted(support(x))
    out = []
    k = 0
    while k < len(sup):
        start = sup[k]
        while k + 1 < len(sup) and sup[k + 1] == sup[k] + 1:
            k += 1
        end = sup[k]
        m = end - start + 2
        out.append((pattern_at(x, m, start), start))
        k += 1
    return out


def full_support_decompose(y: Permutation) -> list[tuple[Permutation, int]]:
    """Write an involution as a product of shifted full-support involutions."""
    if not is_involution(y):
        raise ValueError(f"{y} is not an involution")
    return support_components(y)


def leq_L_traced(x: Permutation, z: Permutation) -> tuple[bool, list[str]]:
    """x <=_L z together with a log of the reductions applied."""
    if len(x) != len(z):
        raise ValueError("rank mismatch")
    x, z = tuple(x), tuple(z)
    n = len(x)
    trace: list[str] = []
    comps = support_components(x)
    if not comps:
        trace.append("identity is the minimum")
        return True, trace
    if len(comps) > 1:
        trace.append(
            "split into disjoint factors at positions " + ", ".join(str(i) for _, i in comps)
        )
    result = True
    for p, i in comps:
        m = len(p)
        if m < n:
            q = pattern_at(z, m, i)
            ok = _leq_L_direct(p, q)
            trace.append(
                f"window {i}..{i + m - 1}: {''.join(map(str, p))} vs pattern "
                f"{''.join(map(str, q))} in S_{m} -> {ok}"
            )
        else:
            ok = _leq_L_direct(p, z)
            trace.append(f"full support: D-product test in S_{n} -> {ok}")
        if not ok:
            result = False
            break
    return result, trace


def leq_L(x: Permutation, z: Permutation) -> bool:
    return leq_L_traced(x, z)[0]


def leq_R(x: Permutation, w: Permutation) -> bool:
    return leq_L(inverse(x), inverse(w))


def leq_L_reduced(x_small: Permutation, i: int, z: Permutation) -> bool:
    """shift(x_small, n, i) <=_L z, decided inside S_m against the pattern of z at i."""
    m = len(x_small)
    p = pattern_at(z, m, i)
    return leq_L(x_small, p)


def leq_L_multi(
    xs: Sequence[Permutation], ms: Sequence[int], positions: Sequence[int], z: Permutation
) -> bool:
    multi_shift(xs, ms, len(z), positions)  # validates sizes and window disjointness
    return all(leq_L_reduced(x, i, z) for x, i in zip(xs, positions))


def leq_closure_oracle(n: int, side: str = "right") -> set[tuple[Permutation, Permutation]]:
    """Preorder generated by "C_y occurs in C_x C_s" (right) or "in C_s C_x" (left).

    Brute force; limited to n <= 5.
    """
    if n > 5:
        raise ValueError("the closure oracle is limited to n <= 5")
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    t = get_table(n)
    succ: list[set[int]] = []
    for x in range(t.size):
        nbrs = {x}
        for i in range(1, n):
            if side == "right":
                prod = _c_right_simple_idx(t, {x: ONE}, i)
            else:
                prod = _c_left_simple_idx(t, i, {x: ONE})
            nbrs.update(prod)
        succ.append(nbrs)
    rel = set()
    for x in range(t.size):
        seen = {x}
        stack = [x]
        while stack:
            a = stack.pop()
            for b in succ[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        rel.update((t.perms[x], t.perms[y]) for y in seen)
    return rel


# ---------------------------------------------------------------------------
# Cell posets


@dataclass
class CellPoset:
    n: int
    kind: str
    cells: list[CellId]
    members: list[list[Permutation]]
    edges: list[tuple[int, int]]  # Hasse edges a -> b meaning cell a < cell b
    colours: list[dict[Permutation, str]] | None = None
    highlight: Permutation | None = None


def _cell_key(c: CellId):
    return (c.shape, reading_word(c.tableau))


def cell_poset(n: int, highlight: Permutation | None = None, kind: str = "left") -> CellPoset:
    """All left (or right) cells of S_n ordered by the KL preorder, Hasse diagram only."""
    leq = leq_L if kind == "left" else leq_R
    cells = set()
    for x in itertools.permutations(range(1, n + 1)):
        cells.add(left_cell(x) if kind == "left" else right_cell(x))
    cells = sorted(cells, key=_cell_key)
    reps = [cell_involution(c) for c in cells]
    k = len(cells)
    less = [[a != b and leq(reps[a], reps[b]) for b in range(k)] for a in range(k)]
    edges = []
    for a in range(k):
        for b in range(k):
            if less[a][b] and not any(less[a][c] and less[c][b] for c in range(k)):
                edges.append((a, b))
    members = [cell_members(c) for c in cells]
    colours = None
    if highlight is not None:
        highlight = tuple(highlight)
        if len(highlight) != n:
            raise ValueError("highlight permutation has the wrong rank")
        colours = [{p: ("teal" if leq(highlight, p) else "red") for p in ms} for ms in members]
    return CellPoset(n, kind, cells, members, edges, colours, highlight)


def _word(x: Permutation) -> str:
    return "".join(map(str, x)) if len(x) < 10 else ",".join(map(str, x))


def poset_to_dot(poset: CellPoset) -> str:
    lines = [f"digraph {poset.kind}_cells_S{poset.n} {{", "  rankdir=BT;", "  node [shape=box];"]
    for a, ms in enumerate(poset.members):
        if poset.colours is None:
            label = ", ".join(_word(p) for p in ms)
        else:
            parts = []
            for p in ms:
                text = _word(p)
                if poset.highlight is not None and p == poset.highlight:
                    text = f"<U>{text}</U>"
                parts.append(f'<FONT COLOR="{poset.colours[a][p]}">{text}</FONT>')
            label = ", ".join(parts)
        lines.append(f"  c{a} [label=<{{{label}}}>];" if poset.colours else f'  c{a} [label="{{{label}}}"];')
    for a, b in poset.edges:
        lines.append(f"  c{a} -> c{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def poset_to_json(poset: CellPoset) -> str:
    data = {
        "n": poset.n,
        "kind": poset.kind,
        "highlight": _word(poset.highlight) if poset.highlight else None,
        "cells": [
            {
                "id": a,
                "shape": list(c.shape),
                "tableau": [list(r) for r in c.tableau],
                "involution": _word(cell_involution(c)),
                "members": [
                    {"perm": _word(p), **({"colour": poset.colours[a][p]} if poset.colours else {})}
                    for p in poset.members[a]
                ],
            }
            for a, c in enumerate(poset.cells)
        ],
        "edges": [list(e) for e in poset.edges],
    }
    return json.dumps(data, indent=2)
