"""Exact Laurent polynomials in one variable ``v`` with integer coefficients.

Coefficients are bounded to the signed 64-bit range; any operation whose
result leaves that range raises :class:`OverflowError` instead of wrapping.

>>> p = LaurentPoly({1: 1, -1: 1})
>>> str(p * p)
'v^2 + 2 + v^-2'
>>> str(p.bar())
'v + v^-1'
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

__all__ = [
    "LaurentPoly",
    "ZERO",
    "ONE",
    "V",
    "V_PLUS_VINV",
    "add",
    "mul",
    "bar",
    "coeff_at",
    "eval_at_one",
    "is_nonneg",
    "parse_laurent",
]

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)


def _checked(c: int) -> int:
    if c > INT64_MAX or c < INT64_MIN:
        raise OverflowError(f"coefficient {c} leaves the signed 64-bit range")
    return c


class LaurentPoly:
    """An element of Z[v, v^-1] stored as a sparse degree -> coefficient map."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c = {}
        if coeffs:
            for d, a in coeffs.items():
                if a:
                    c[int(d)] = _checked(int(a))
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict[int, int]) -> "LaurentPoly":
        # Trusted constructor: c has no zero entries and is not shared.
        p = object.__new__(cls)
        p._c = c
        p._hash = None
        return p

    @classmethod
    def constant(cls, a: int) -> "LaurentPoly":
        return cls({0: a})

    @classmethod
    def monomial(cls, degree: int, a: int = 1) -> "LaurentPoly":
        return cls({degree: a})

    # -- inspection ---------------------------------------------------------

    def terms(self) -> list[tuple[int, int]]:
        """(degree, coefficient) pairs in decreasing degree."""
        return sorted(self._c.items(), reverse=True)

    def degrees(self) -> list[int]:
        return sorted(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def max_degree(self) -> int | None:
        return max(self._c) if self._c else None

    def min_degree(self) -> int | None:
        return min(self._c) if self._c else None

    def coeff_at(self, i: int) -> int:
        return self._c.get(i, 0)

    def eval_at_one(self) -> int:
        return _checked(sum(self._c.values()))

    def is_nonneg(self) -> bool:
        return all(a > 0 for a in self._c.values())

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not other._c:
            return self
        if not self._c:
            return other
        c = dict(self._c)
        for d, a in other._c.items():
            s = c.get(d, 0) + a
            if s:
                c[d] = _checked(s)
            else:
                del c[d]
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw({d: _checked(-a) for d, a in self._c.items()})

    def __sub__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other: int) -> "LaurentPoly":
        return LaurentPoly.constant(other) - self

    def __mul__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return LaurentPoly._raw({d: _checked(a * other) for d, a in self._c.items()})
        if not self._c or not other._c:
            return ZERO
        c: dict[int, int] = {}
        for d1, a1 in self._c.items():
            for d2, a2 in other._c.items():
                d = d1 + d2
                c[d] = c.get(d, 0) + a1 * a2
        return LaurentPoly._raw({d: _checked(a) for d, a in c.items() if a})

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly._raw({d + k: a for d, a in self._c.items()})

    def bar(self) -> "LaurentPoly":
        return LaurentPoly._raw({-d: a for d, a in self._c.items()})

    # -- comparison and hashing --------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self._c == ({0: other} if other else {})
        if isinstance(other, LaurentPoly):
            return self._c == other._c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        if not self._c:
            return "0"
        out = []
        for d, a in self.terms():
            if d == 0:
                body = str(abs(a))
            else:
                mono = "v" if d == 1 else f"v^{d}"
                body = mono if abs(a) == 1 else f"{abs(a)}{mono}"
            if not out:
                out.append(("-" if a < 0 else "") + body)
            else:
                out.append(("- " if a < 0 else "+ ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"LaurentPoly('{self}')"


ZERO = LaurentPoly()
ONE = LaurentPoly({0: 1})
V = LaurentPoly({1: 1})
V_PLUS_VINV = LaurentPoly({1: 1, -1: 1})

_TERM = re.compile(r"^(\d*)(v(?:\^(-?\d+))?)?$")


def parse_laurent(text: str) -> LaurentPoly:
    """Inverse of ``str``: accepts the canonical form, e.g. ``"v^2 - 3 + v^-1"``."""
    s = text.replace(" ", "").replace("^-", "^~")
    if s in ("", "0"):
        return ZERO
    if s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, int] = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", s):
        m = _TERM.match(body.replace("~", "-"))
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse Laurent term {body!r} in {text!r}")
        a = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            d = int(m.group(3)) if m.group(3) is not None else 1
        else:
            d = 0
        coeffs[d] = coeffs.get(d, 0) + (a if sign == "+" else -a)
    return LaurentPoly(coeffs)


# Functional spellings of the ring operations.


def add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def bar(p: LaurentPoly) -> LaurentPoly:
    return p.bar()


def coeff_at(p: LaurentPoly, i: int) -> int:
    return p.coeff_at(i)


def eval_at_one(p: LaurentPoly) -> int:
    return p.eval_at_one()


def is_nonneg(p: LaurentPoly) -> bool:
    """True when every coefficient is non-negative (the zero polynomial included)."""
    return p.is_nonneg()


def poly_sum(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    total = ZERO
    for p in polys:
        total = total + p
    return total
