"""The Hecke algebra of S_n over Z[v, v^-1].

Three bases are supported: the standard basis ``T``, the Kazhdan-Lusztig basis
``C`` (normalised so that ``C_s = T_s + v T_e``) and its trace-dual ``D``.

KL polynomials are computed once per rank into a :class:`KLTable`.  The table
stores the classical polynomials ``P_{x,w}(q)`` only for pairs where ``x``
carries every left and right descent of ``w``; every other pair reduces to
such a pair by multiplying ``x`` upwards by descents of ``w``.  The
``p_{w,x}(v)`` coefficients in ``C_w = T_w + sum p_{w,x} T_x`` are recovered as
``v^(l(w)-l(x)) P_{x,w}(v^-2)``.

Tables are built lazily, published under a lock and never mutated afterwards,
so any number of threads may read them.  When a cache directory is configured
each rank is persisted to ``kl-rank<n>.txt``.
"""

from __future__ import annotations

import itertools
import json
import os
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .laurent import ONE, V, V_PLUS_VINV, ZERO, LaurentPoly, parse_laurent
from .symgroup import (
    Permutation,
    from_word,
    identity,
    inverse,
    is_compatible,
    is_involution,
    length,
    reduced_word,
)
from .tableaux import a_value, dominance_leq, shape

__all__ = [
    "HeckeElement",
    "KLTable",
    "RankCapExceeded",
    "CacheError",
    "configure",
    "settings",
    "get_table",
    "clear_tables",
    "t_mul_simple",
    "t_mul",
    "t_inverse_simple",
    "bar_element",
    "kl_c_basis",
    "kl_poly",
    "mu",
    "c_mul",
    "c_mul_rule",
    "c_mul_simple",
    "simple_c_mul",
    "c_to_t",
    "t_to_c",
    "trace",
    "d_in_t_basis",
    "t_to_d",
    "d_mul_simple",
    "d_mul_c",
    "d_mul_word",
    "km_certificate",
    "walk_identity",
    "HARD_RANK_CEILING",
    "get_table",
    "save_table",
    "clear_tables",
    "cache_stats",
    "configure",
    "settings",
]

HARD_RANK_CEILING = 9
CACHE_FORMAT = "klkostant-kl-cache v1"


class RankCapExceeded(ValueError):
    """Raised when a computation needs a KL table above the configured rank cap."""


class CacheError(RuntimeError):
    """A persisted KL table failed validation."""


@dataclass
class Settings:
    rank_cap: int = 8
    cache_dir: Path | None = None
    d_basis_rank_cap: int = 7


def _settings_from_env() -> Settings:
    s = Settings()
    cap = os.environ.get("KLKOSTANT_RANK_CAP")
    if cap:
        s.rank_cap = min(int(cap), HARD_RANK_CEILING)
    cache = os.environ.get("KLKOSTANT_CACHE_DIR")
    if cache:
        s.cache_dir = Path(cache)
    return s


_settings = _settings_from_env()


def settings() -> Settings:
    return _settings


def configure(rank_cap: int | None = None, cache_dir: str | Path | None | bool = False) -> Settings:
    """Update the rank cap and/or cache directory (pass ``cache_dir=None`` to disable persistence)."""
    if rank_cap is not None:
        if not 0 <= rank_cap <= HARD_RANK_CEILING:
            raise ValueError(f"rank cap must lie in [0, {HARD_RANK_CEILING}]")
        _settings.rank_cap = rank_cap
    if cache_dir is not False:
        _settings.cache_dir = Path(cache_dir) if cache_dir is not None else None
    return _settings


# ---------------------------------------------------------------------------
# Classical KL polynomial helpers (coefficient tuples in q)


def _padd_shift(acc: list[int], poly: Sequence[int], sh: int, factor: int) -> None:
    need = len(poly) + sh
    if len(acc) < need:
        acc.extend([0] * (need - len(acc)))
    for k, c in enumerate(poly):
        acc[k + sh] += factor * c


def _lowbit_table(bits: int) -> list[int]:
    return [((m & -m).bit_length() - 1) if m else -1 for m in range(1 << bits)]


class KLTable:
    """Kazhdan-Lusztig polynomials and mu-values for one symmetric group.

    Permutations are indexed by their position in ``perms`` (sorted by length,
    then lexicographically), so index 0 is the identity.
    """

    def __init__(self, n: int, *, build: bool = True):
        self.n = n
        perms = sorted(itertools.permutations(range(1, n + 1)), key=lambda p: (length(p), p))
        self.perms: list[Permutation] = perms
        self.index: dict[Permutation, int] = {p: k for k, p in enumerate(perms)}
        N = len(perms)
        self.size = N
        self.length = [length(p) for p in perms]
        self.rmul: list[list[int]] = []
        self.lmul: list[list[int]] = []
        for i in range(1, n):
            r, l = [], []
            for p in perms:
                q = list(p)
                q[i - 1], q[i] = q[i], q[i - 1]
                r.append(self.index[tuple(q)])
                l.append(self.index[tuple(i + 1 if a == i else i if a == i + 1 else a for a in p)])
            self.rmul.append(r)
            self.lmul.append(l)
        # bit i-1 stands for s_i
        self.rdes = [sum(1 << (i - 1) for i in range(1, n) if p[i - 1] > p[i]) for p in perms]
        self.ldes = [
            sum(1 << i for i in range(n - 1) if self.length[self.lmul[i][k]] < self.length[k])
            for k in range(N)
        ]
        self.inv = [self.index[inverse(p)] for p in perms]
        self._lowbit = _lowbit_table(max(n - 1, 0))
        self._P: list[dict[int, tuple[int, ...]]] = [dict() for _ in range(N)]
        self.mu_down: list[list[tuple[int, int]]] = [[] for _ in range(N)]
        self.mu_up: list[list[tuple[int, int]]] = [[] for _ in range(N)]
        if build:
            self._compute()
            self._derive_mu()

    # -- construction -------------------------------------------------------

    def _compute(self) -> None:
        N, rdes, ldes, length = self.size, self.rdes, self.ldes, self.length
        groups: dict[tuple[int, int], list[int]] = {}
        for k in range(N):
            groups.setdefault((ldes[k], rdes[k]), []).append(k)
        P = self._P
        P[0] = {0: (1,)}
        mu_lists: list[list[tuple[int, int]]] = [[] for _ in range(N)]
        for w in range(1, N):
            s = self._lowbit[rdes[w]]
            v = self.rmul[s][w]
            lw = length[w]
            L, R = ldes[w], rdes[w]
            cands = []
            for (gl, gr), members in groups.items():
                if gl & L == L and gr & R == R:
                    cands.extend(x for x in members if length[x] <= lw)
            corrections = [(z, m) for z, m in mu_lists[v] if rdes[z] >> s & 1]
            rs = self.rmul[s]
            Pw: dict[int, tuple[int, ...]] = {}
            for x in cands:
                a = self._lookup(rs[x], v)
                if a is None:
                    continue
                acc = list(a)
                b = self._lookup(x, v)
                if b is not None:
                    _padd_shift(acc, b, 1, 1)
                lx = length[x]
                for z, m in corrections:
                    if length[z] < lx:
                        continue
                    c = self._lookup(x, z)
                    if c is not None:
                        _padd_shift(acc, c, (lw - length[z]) // 2, -m)
                while acc and acc[-1] == 0:
                    acc.pop()
                Pw[x] = tuple(acc)
            P[w] = Pw
            mu_lists[w] = self._mu_list(w)

    def _mu_list(self, w: int) -> list[tuple[int, int]]:
        lw = self.length[w]
        found: dict[int, int] = {}
        for x, poly in self._P[w].items():
            d = lw - self.length[x]
            if d % 2 == 1:
                k = (d - 1) // 2
                if k < len(poly) and poly[k]:
                    found[x] = poly[k]
        for i in range(self.n - 1):
            if self.rdes[w] >> i & 1:
                found[self.rmul[i][w]] = 1
            if self.ldes[w] >> i & 1:
                found[self.lmul[i][w]] = 1
        return sorted(found.items())

    def _derive_mu(self) -> None:
        for w in range(self.size):
            self.mu_down[w] = self._mu_list(w)
        up: list[list[tuple[int, int]]] = [[] for _ in range(self.size)]
        for w in range(self.size):
            for x, m in self.mu_down[w]:
                up[x].append((w, m))
        self.mu_up = up

    # -- lookups ------------------------------------------------------------

    def _reduce(self, x: int, w: int) -> int:
        rd, ld = self.rdes[w], self.ldes[w]
        rdes, ldes, low = self.rdes, self.ldes, self._lowbit
        while True:
            m = rd & ~rdes[x]
            if m:
                x = self.rmul[low[m]][x]
                continue
            m = ld & ~ldes[x]
            if m:
                x = self.lmul[low[m]][x]
                continue
            return x

    def _lookup(self, x: int, w: int) -> tuple[int, ...] | None:
        """Classical P_{x,w}, or None when x is not below w in Bruhat order."""
        return self._P[w].get(self._reduce(x, w))

    def stored_pairs(self) -> int:
        return sum(len(d) for d in self._P)

    def leq(self, x: int, w: int) -> bool:
        """Bruhat order on indices."""
        return self._lookup(x, w) is not None

    def below(self, w: int) -> list[int]:
        lw = self.length[w]
        return [x for x in range(self.size) if self.length[x] <= lw and self.leq(x, w)]

    def p_poly(self, w: int, x: int) -> LaurentPoly:
        """p_{w,x}(v), the coefficient of T_x in C_w."""
        P = self._lookup(x, w)
        if P is None:
            return ZERO
        d = self.length[w] - self.length[x]
        return LaurentPoly({d - 2 * k: c for k, c in enumerate(P) if c})

    def mu_value(self, x: int, y: int) -> int:
        if self.length[x] < self.length[y]:
            x, y = y, x
        P = self._lookup(y, x)
        d = self.length[x] - self.length[y]
        if P is None or d % 2 == 0:
            return 0
        k = (d - 1) // 2
        return P[k] if k < len(P) else 0

    def is_descent_right(self, x: int, i: int) -> bool:
        return bool(self.rdes[x] >> (i - 1) & 1)

    # -- persistence --------------------------------------------------------

    def dump(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        words = [",".join(map(str, reduced_word(p))) or "e" for p in self.perms]
        count = self.stored_pairs()
        with open(tmp, "w", encoding="ascii") as fh:
            fh.write(f"{CACHE_FORMAT}\nrank {self.n}\nentries {count}\n")
            for w in range(self.size):
                for x in sorted(self._P[w]):
                    fh.write(f"{words[w]}\t{words[x]}\t{self.p_poly(w, x)}\n")
            fh.write("end\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: Path, n: int) -> "KLTable":
        table = cls(n, build=False)
        try:
            with open(path, encoding="ascii") as fh:
                lines = fh.read().split("\n")
            if lines[0] != CACHE_FORMAT or lines[1] != f"rank {n}":
                raise CacheError(f"{path}: header mismatch")
            count = int(lines[2].split()[1])
            body = lines[3 : 3 + count]
            if len(body) != count or lines[3 + count] != "end":
                raise CacheError(f"{path}: truncated record stream")

            def word_to_index(word: str) -> int:
                letters = [] if word == "e" else [int(t) for t in word.split(",")]
                p = from_word(letters, n)
                if len(letters) != table.length[table.index[p]]:
                    raise CacheError(f"{path}: non-reduced word {word}")
                return table.index[p]

            for line in body:
                ws, xs, poly = line.split("\t")
                w, x = word_to_index(ws), word_to_index(xs)
                p = parse_laurent(poly)
                d = table.length[w] - table.length[x]
                coeffs = [0] * (d // 2 + 1)
                for deg, c in p.terms():
                    if (d - deg) % 2 or not 0 <= (d - deg) // 2 < len(coeffs):
                        raise CacheError(f"{path}: polynomial {poly} out of range")
                    coeffs[(d - deg) // 2] = c
                while coeffs and coeffs[-1] == 0:
                    coeffs.pop()
                table._P[w][x] = tuple(coeffs)
        except (OSError, ValueError, IndexError, KeyError) as exc:
            raise CacheError(f"{path}: unreadable KL cache ({exc})") from exc
        if table._P[0] != {0: (1,)}:
            raise CacheError(f"{path}: identity record missing")
        table._derive_mu()
        return table


_tables: dict[int, KLTable] = {}
_tables_lock = threading.Lock()
_cache_events: list[str] = []


def _cache_path(n: int) -> Path | None:
    if _settings.cache_dir is None:
        return None
    return Path(_settings.cache_dir) / f"kl-rank{n}.txt"


def get_table(n: int) -> KLTable:
    """The KL table for S_n, building or loading it on first use."""
    if n > _settings.rank_cap:
        raise RankCapExceeded(f"rank {n} exceeds the configured rank cap {_settings.rank_cap}")
    table = _tables.get(n)
    if table is not None:
        return table
    with _tables_lock:
        table = _tables.get(n)
        if table is not None:
            return table
        path = _cache_path(n)
        if path is not None and path.exists():
            try:
                table = KLTable.load(path, n)
                _cache_events.append(f"loaded rank {n} from {path}")
            except CacheError as exc:
                _cache_events.append(f"discarded {path}: {exc}")
                path.unlink(missing_ok=True)
                table = None
        if table is None:
            table = KLTable(n)
            if path is not None:
                table.dump(path)
                _cache_events.append(f"wrote rank {n} to {path}")
        _tables[n] = table
        return table


def save_table(n: int) -> Path | None:
    """Persist the rank-n table if a cache directory is set and no file exists yet."""
    table = get_table(n)
    path = _cache_path(n)
    if path is None or path.exists():
        return path
    table.dump(path)
    _cache_events.append(f"wrote rank {n} to {path}")
    return path


def clear_tables(disk: bool = False) -> None:
    """Forget in-memory tables (and optionally the persisted files)."""
    with _tables_lock:
        _tables.clear()
        _c_products.clear()
        if disk and _settings.cache_dir is not None:
            for f in Path(_settings.cache_dir).glob("kl-rank*.txt"):
                f.unlink()


def cache_stats() -> dict:
    files = []
    if _settings.cache_dir is not None and Path(_settings.cache_dir).exists():
        for f in sorted(Path(_settings.cache_dir).glob("kl-rank*.txt")):
            files.append({"file": str(f), "bytes": f.stat().st_size})
    return {
        "cache_dir": str(_settings.cache_dir) if _settings.cache_dir else None,
        "rank_cap": _settings.rank_cap,
        "loaded_ranks": {n: _tables[n].stored_pairs() for n in sorted(_tables)},
        "files": files,
        "events": list(_cache_events),
    }


# ---------------------------------------------------------------------------
# Elements


BASES = ("T", "C", "D")


@dataclass(frozen=True)
class HeckeElement:
    """A sparse element of H_n written in one of the bases T, C or D."""

    rank: int
    basis: str
    terms: Mapping[Permutation, LaurentPoly] = field(default_factory=dict)

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        clean = {}
        for x, c in self.terms.items():
            if len(x) != self.rank:
                raise ValueError(f"{x} does not have rank {self.rank}")
            if isinstance(c, int):
                c = LaurentPoly.constant(c)
            if c:
                clean[tuple(x)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def basis_element(cls, basis: str, x: Permutation) -> "HeckeElement":
        return cls(len(x), basis, {tuple(x): ONE})

    def _check(self, other: "HeckeElement") -> None:
        if self.rank != other.rank or self.basis != other.basis:
            raise ValueError(
                f"cannot combine a rank-{self.rank} {self.basis}-element "
                f"with a rank-{other.rank} {other.basis}-element"
            )

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        self._check(other)
        out = dict(self.terms)
        for x, c in other.terms.items():
            out[x] = out.get(x, ZERO) + c
        return HeckeElement(self.rank, self.basis, out)

    def __neg__(self) -> "HeckeElement":
        return HeckeElement(self.rank, self.basis, {x: -c for x, c in self.terms.items()})

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        return self + (-other)

    def scale(self, c: LaurentPoly | int) -> "HeckeElement":
        return HeckeElement(self.rank, self.basis, {x: a * c for x, a in self.terms.items()})

    def coeff(self, x: Permutation) -> LaurentPoly:
        return self.terms.get(tuple(x), ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def eval_at_one(self) -> dict[Permutation, int]:
        """Image under v -> 1, with vanishing coefficients dropped."""
        out = {x: c.eval_at_one() for x, c in self.terms.items()}
        return {x: c for x, c in sorted(out.items()) if c}

    def map_coeffs(self, f) -> "HeckeElement":
        return HeckeElement(self.rank, self.basis, {x: f(c) for x, c in self.terms.items()})

    def sorted_terms(self) -> list[tuple[Permutation, LaurentPoly]]:
        return sorted(self.terms.items(), key=lambda t: (length(t[0]), t[0]))

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "rank": self.rank,
            "terms": [
                {"perm": ",".join(map(str, x)), "poly": str(c)} for x, c in self.sorted_terms()
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for x, c in self.sorted_terms():
            name = f"{self.basis}_{''.join(map(str, x)) if self.rank < 10 else ','.join(map(str, x))}"
            parts.append(name if c == ONE else f"({c}){name}")
        return " + ".join(parts)


def element_from_json(data: dict) -> HeckeElement:
    from .symgroup import parse_perm

    terms = {parse_perm(t["perm"]): parse_laurent(t["poly"]) for t in data["terms"]}
    return HeckeElement(int(data["rank"]), data["basis"], terms)


def _require(h: HeckeElement, basis: str) -> None:
    if h.basis != basis:
        raise ValueError(f"expected an element of the {basis} basis, got {h.basis}")


# ---------------------------------------------------------------------------
# Standard basis

_T_QUAD = LaurentPoly({-1: 1, 1: -1})  # v^-1 - v
_T_INV = LaurentPoly({1: 1, -1: -1})  # v - v^-1


def _t_mul_simple_raw(terms: Mapping[Permutation, LaurentPoly], i: int) -> dict:
    out: dict[Permutation, LaurentPoly] = {}
    for z, c in terms.items():
        zl = list(z)
        zl[i - 1], zl[i] = zl[i], zl[i - 1]
        zs = tuple(zl)
        if z[i - 1] > z[i]:
            out[z] = out.get(z, ZERO) + c * _T_QUAD
        out[zs] = out.get(zs, ZERO) + c
    return out


def t_mul_simple(h: HeckeElement, i: int) -> HeckeElement:
    """h * T_{s_i}."""
    _require(h, "T")
    if not 1 <= i < h.rank:
        raise ValueError(f"s_{i} does not exist in S_{h.rank}")
    return HeckeElement(h.rank, "T", _t_mul_simple_raw(h.terms, i))


def t_mul(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Product of two T-basis elements, expanding b along reduced words."""
    _require(a, "T")
    _require(b, "T")
    a._check(b)
    total: dict[Permutation, LaurentPoly] = {}
    for y, c in b.terms.items():
        cur: Mapping[Permutation, LaurentPoly] = a.terms
        for i in reduced_word(y):
            cur = _t_mul_simple_raw(cur, i)
        for x, d in cur.items():
            total[x] = total.get(x, ZERO) + d * c
    return HeckeElement(a.rank, "T", total)


def t_inverse_simple(i: int, n: int) -> HeckeElement:
    """T_{s_i}^{-1} = T_{s_i} + (v - v^-1) T_e."""
    if not 1 <= i < n:
        raise ValueError(f"s_{i} does not exist in S_{n}")
    from .symgroup import simple

    return HeckeElement(n, "T", {simple(i, n): ONE, identity(n): _T_INV})


def bar_element(h: HeckeElement) -> HeckeElement:
    """Bar involution: v -> v^-1 and T_x -> (T_{x^-1})^-1."""
    _require(h, "T")
    total: dict[Permutation, LaurentPoly] = {}
    e = identity(h.rank)
    for x, c in h.terms.items():
        cur: dict[Permutation, LaurentPoly] = {e: ONE}
        # (T_{x^-1})^-1 is the product of T_s^-1 along a reduced word of x
        for i in reduced_word(x):
            nxt = _t_mul_simple_raw(cur, i)
            for z, d in cur.items():
                nxt[z] = nxt.get(z, ZERO) + d * _T_INV
            cur = nxt
        cb = c.bar()
        for z, d in cur.items():
            total[z] = total.get(z, ZERO) + d * cb
    return HeckeElement(h.rank, "T", total)


def trace(h: HeckeElement) -> LaurentPoly:
    """Coefficient of T_e."""
    _require(h, "T")
    return h.coeff(identity(h.rank))


# ---------------------------------------------------------------------------
# Kazhdan-Lusztig basis


def kl_poly(x: Permutation, y: Permutation) -> LaurentPoly:
    """p_{x,y}: the coefficient of T_y in C_x (zero unless y <= x)."""
    if len(x) != len(y):
        raise ValueError("rank mismatch")
    t = get_table(len(x))
    return t.p_poly(t.index[tuple(x)], t.index[tuple(y)])


def mu(x: Permutation, y: Permutation) -> int:
    """The KL mu-function (symmetric; zero for incomparable pairs)."""
    if len(x) != len(y):
        raise ValueError("rank mismatch")
    t = get_table(len(x))
    return t.mu_value(t.index[tuple(x)], t.index[tuple(y)])


def kl_c_basis(x: Permutation) -> HeckeElement:
    """C_x written in the standard basis."""
    t = get_table(len(x))
    w = t.index[tuple(x)]
    return HeckeElement(t.n, "T", {t.perms[y]: t.p_poly(w, y) for y in t.below(w)})


def c_to_t(h: HeckeElement) -> HeckeElement:
    _require(h, "C")
    total = HeckeElement(h.rank, "T")
    for x, c in h.terms.items():
        total = total + kl_c_basis(x).scale(c)
    return total


def t_to_c(h: HeckeElement) -> HeckeElement:
    """Rewrite a T-element in the C basis by peeling off leading terms."""
    _require(h, "T")
    rest = dict(h.terms)
    out: dict[Permutation, LaurentPoly] = {}
    while rest:
        top = max(rest, key=lambda x: (length(x), x))
        c = rest[top]
        out[top] = c
        for y, p in kl_c_basis(top).terms.items():
            r = rest.get(y, ZERO) - p * c
            if r:
                rest[y] = r
            else:
                rest.pop(y, None)
    return HeckeElement(h.rank, "C", out)


def c_mul(x: Permutation, y: Permutation) -> dict[Permutation, LaurentPoly]:
    """C_x C_y expanded in the C basis, computed through the standard basis."""
    prod = t_mul(kl_c_basis(x), kl_c_basis(y))
    return dict(t_to_c(prod).terms)


def _c_right_simple_idx(t: KLTable, terms: Mapping[int, LaurentPoly], i: int) -> dict[int, LaurentPoly]:
    """(sum c_w C_w) * C_{s_i} on index-keyed C-coefficients."""
    out: dict[int, LaurentPoly] = {}
    bit = 1 << (i - 1)
    rs = t.rmul[i - 1]
    for w, c in terms.items():
        if t.rdes[w] & bit:
            out[w] = out.get(w, ZERO) + c * V_PLUS_VINV
            continue
        ws = rs[w]
        out[ws] = out.get(ws, ZERO) + c
        for x, m in t.mu_down[w]:
            if t.rdes[x] & bit:
                out[x] = out.get(x, ZERO) + c * m
    return {k: c for k, c in out.items() if c}


def _c_left_simple_idx(t: KLTable, i: int, terms: Mapping[int, LaurentPoly]) -> dict[int, LaurentPoly]:
    out: dict[int, LaurentPoly] = {}
    bit = 1 << (i - 1)
    ls = t.lmul[i - 1]
    for w, c in terms.items():
        if t.ldes[w] & bit:
            out[w] = out.get(w, ZERO) + c * V_PLUS_VINV
            continue
        sw = ls[w]
        out[sw] = out.get(sw, ZERO) + c
        for x, m in t.mu_down[w]:
            if t.ldes[x] & bit:
                out[x] = out.get(x, ZERO) + c * m
    return {k: c for k, c in out.items() if c}


def c_mul_simple(h: HeckeElement, i: int) -> HeckeElement:
    """h * C_{s_i} for h in the C basis."""
    _require(h, "C")
    t = get_table(h.rank)
    raw = _c_right_simple_idx(t, {t.index[x]: c for x, c in h.terms.items()}, i)
    return HeckeElement(h.rank, "C", {t.perms[k]: c for k, c in raw.items()})


def simple_c_mul(i: int, h: HeckeElement) -> HeckeElement:
    """C_{s_i} * h for h in the C basis."""
    _require(h, "C")
    t = get_table(h.rank)
    raw = _c_left_simple_idx(t, i, {t.index[x]: c for x, c in h.terms.items()})
    return HeckeElement(h.rank, "C", {t.perms[k]: c for k, c in raw.items()})


# memo of C_a C_y products keyed by (rank, a, y); values are immutable
_c_products: dict[tuple[int, int, int], dict[int, LaurentPoly]] = {}


def _c_product_idx(t: KLTable, a: int, y: int) -> dict[int, LaurentPoly]:
    key = (t.n, a, y)
    hit = _c_products.get(key)
    if hit is not None:
        return hit
    if y == 0:
        res = {a: ONE}
    else:
        s = t._lowbit[t.rdes[y]]
        y1 = t.rmul[s][y]
        # C_y = C_{y1} C_s - sum of mu-corrections
        res = _c_right_simple_idx(t, _c_product_idx(t, a, y1), s + 1)
        for u, m in t.mu_down[y1]:
            if t.rdes[u] >> s & 1:
                for k, c in _c_product_idx(t, a, u).items():
                    r = res.get(k, ZERO) - c * m
                    if r:
                        res[k] = r
                    else:
                        res.pop(k, None)
    _c_products[key] = res
    return res


def c_mul_rule(x: Permutation, y: Permutation) -> dict[Permutation, LaurentPoly]:
    """C_x C_y in the C basis via the C_w C_s multiplication rule."""
    t = get_table(len(x))
    raw = _c_product_idx(t, t.index[tuple(x)], t.index[tuple(y)])
    return {t.perms[k]: c for k, c in raw.items()}


# ---------------------------------------------------------------------------
# Dual KL basis


def d_in_t_basis(x: Permutation) -> HeckeElement:
    """D_x in the standard basis, solved from tau(D_x C_{y^-1}) = delta_{x,y}."""
    n = len(x)
    if n > _settings.d_basis_rank_cap:
        raise RankCapExceeded(f"D-basis expansion is capped at rank {_settings.d_basis_rank_cap}")
    t = get_table(n)
    xi = t.index[tuple(x)]
    d: dict[int, LaurentPoly] = {xi: ONE}
    for y in range(xi + 1, t.size):
        if not t.leq(xi, y):
            continue
        acc = ZERO
        for a, c in d.items():
            if t.length[a] < t.length[y]:
                acc = acc + c * t.p_poly(y, a)
        if acc:
            d[y] = -acc
    return HeckeElement(n, "T", {t.perms[k]: c for k, c in d.items()})


def t_to_d(h: HeckeElement) -> HeckeElement:
    """Coordinates in the D basis: [D_a](h) = tau(h C_{a^-1})."""
    _require(h, "T")
    t = get_table(h.rank)
    out = {}
    for a in t.perms:
        c = trace(t_mul(h, kl_c_basis(inverse(a))))
        if c:
            out[a] = c
    return HeckeElement(h.rank, "D", out)


def _d_right_simple_idx(t: KLTable, terms: Mapping[int, LaurentPoly], i: int) -> dict[int, LaurentPoly]:
    """(sum c_x D_x) * C_{s_i} by the dual-basis rule."""
    out: dict[int, LaurentPoly] = {}
    bit = 1 << (i - 1)
    rs = t.rmul[i - 1]
    for x, c in terms.items():
        if not t.rdes[x] & bit:
            continue
        out[x] = out.get(x, ZERO) + c * V_PLUS_VINV
        xs = rs[x]
        out[xs] = out.get(xs, ZERO) + c
        for y, m in t.mu_up[x]:
            if not t.rdes[y] & bit:
                out[y] = out.get(y, ZERO) + c * m
    return {k: c for k, c in out.items() if c}


def d_mul_simple(h: HeckeElement, i: int) -> HeckeElement:
    """h * C_{s_i} for h in the D basis."""
    _require(h, "D")
    if not 1 <= i < h.rank:
        raise ValueError(f"s_{i} does not exist in S_{h.rank}")
    t = get_table(h.rank)
    raw = _d_right_simple_idx(t, {t.index[x]: c for x, c in h.terms.items()}, i)
    return HeckeElement(h.rank, "D", {t.perms[k]: c for k, c in raw.items()})


def d_mul_word(z: Permutation, word: Sequence[int]) -> HeckeElement:
    """D_z C_{s_{w1}} C_{s_{w2}} ... in the D basis."""
    t = get_table(len(z))
    cur = {t.index[tuple(z)]: ONE}
    for i in word:
        cur = _d_right_simple_idx(t, cur, i)
    return HeckeElement(t.n, "D", {t.perms[k]: c for k, c in cur.items()})


class DProducts:
    """Memoised products D_z C_x for a fixed z, by recursion on x.

    With x = x1 s and l(x) = l(x1) + 1, the C_w C_s rule gives
    C_x = C_{x1} C_s - sum mu(u, x1) C_u over u < x1 with us < u, hence
    D_z C_x = (D_z C_{x1}) C_s - sum mu(u, x1) D_z C_u.
    """

    def __init__(self, table: KLTable, z: int):
        self.t = table
        self.z = z
        self._memo: dict[int, dict[int, LaurentPoly]] = {0: {z: ONE}}
        self._zr = table.rdes[z]

    def product(self, x: int) -> dict[int, LaurentPoly]:
        hit = self._memo.get(x)
        if hit is not None:
            return hit
        t = self.t
        if t.ldes[x] & ~self._zr:
            # some left descent s of x has D_z C_s = 0, and C_s C_x is a multiple of C_x
            res: dict[int, LaurentPoly] = {}
        else:
            s = t._lowbit[t.rdes[x]]
            x1 = t.rmul[s][x]
            res = _d_right_simple_idx(t, self.product(x1), s + 1)
            for u, m in t.mu_down[x1]:
                if t.rdes[u] >> s & 1:
                    for k, c in self.product(u).items():
                        r = res.get(k, ZERO) - c * m
                        if r:
                            res[k] = r
                        else:
                            res.pop(k, None)
        self._memo[x] = res
        return res

    def element(self, x: int) -> HeckeElement:
        t = self.t
        return HeckeElement(t.n, "D", {t.perms[k]: c for k, c in self.product(x).items()})


def _d_mul_c_duality(t: KLTable, z: int, x: int) -> dict[int, LaurentPoly]:
    """[D_a](D_z C_x) = [C_z](C_a C_{x^-1}) over a filtered candidate set."""
    xinv = t.inv[x]
    zperm = t.perms[z]
    zshape = shape(zperm)
    lz, lx = t.length[z], t.length[x]
    zl = t.ldes[z]
    out = {}
    for a in range(t.size):
        if t.ldes[a] & ~zl or t.length[a] < lz - lx:
            continue
        if not dominance_leq(zshape, shape(t.perms[a])):
            continue
        c = _c_product_idx(t, a, xinv).get(z)
        if c:
            out[a] = c
    return out


def d_mul_c(z: Permutation, x: Permutation, algorithm: str = "B") -> HeckeElement:
    """D_z C_x in the D basis.

    Algorithm "B" expands C_x through products of C_s (see :class:`DProducts`);
    algorithm "A" reads each coefficient off a C-basis product by duality.
    """
    if len(z) != len(x):
        raise ValueError("rank mismatch")
    t = get_table(len(z))
    zi, xi = t.index[tuple(z)], t.index[tuple(x)]
    if algorithm == "B":
        raw = DProducts(t, zi).product(xi)
    elif algorithm == "A":
        raw = _d_mul_c_duality(t, zi, xi)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return HeckeElement(t.n, "D", {t.perms[k]: c for k, c in raw.items()})


# ---------------------------------------------------------------------------
# Certificates


class InvariantViolation(AssertionError):
    """A computed value contradicts an identity that must hold."""


@dataclass(frozen=True)
class Certificate:
    verdict: str  # "Zero", "IndecomposableCertified" or "Inconclusive"
    degree: int
    coefficient: int
    product_nonzero: bool


def km_certificate(x: Permutation, z: Permutation) -> Certificate:
    """Indecomposability certificate from the coefficient of v^a(x) in [D_z](D_z C_x)."""
    if not is_involution(x):
        raise ValueError(f"{x} is not an involution")
    prod = d_mul_c(z, x)
    a = a_value(shape(x))
    d = prod.coeff(z).coeff_at(a)
    if bool(prod) != (d != 0):
        raise InvariantViolation(
            f"D_z C_x nonzero={bool(prod)} but the degree-{a} coefficient of D_z is {d}"
        )
    if not prod:
        verdict = "Zero"
    elif d == 1:
        verdict = "IndecomposableCertified"
    else:
        verdict = "Inconclusive"
    return Certificate(verdict, a, d, bool(prod))


def walk_identity(walk: Sequence[Permutation], word: Sequence[int]) -> bool:
    """Check D_{w_1} C_{s_{i_1}} ... C_{s_{i_l}} = D_{w_l} C_{s_{i_l}} != 0 for a compatible walk."""
    if not is_compatible(walk, word):
        raise ValueError("walk is not compatible with the word")
    lhs = d_mul_word(walk[0], word)
    rhs = d_mul_word(walk[-1], [word[-1]])
    return bool(rhs) and lhs == rhs
