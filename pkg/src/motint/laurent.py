"""Finite Laurent polynomials in the uniformizer t with rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class LaurentConst:
    """``sum c_j t^j`` with finitely many nonzero coefficients.

    Used for centers, phase coefficients and evaluation points.  Instances
    are immutable and hashable.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        if isinstance(coeffs, Mapping):
            coeffs = coeffs.items()
        acc: dict[int, Fraction] = {}
        for e, c in coeffs:
            c = _frac(c)
            if c:
                acc[int(e)] = acc.get(int(e), Fraction(0)) + c
        self._items = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = hash(self._items)

    @classmethod
    def const(cls, c) -> "LaurentConst":
        return cls({0: c})

    @classmethod
    def monomial(cls, c, e: int) -> "LaurentConst":
        return cls({e: c})

    @property
    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return self._items

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._items)

    def coeff(self, e: int) -> Fraction:
        for k, c in self._items:
            if k == e:
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._items

    def __bool__(self) -> bool:
        return bool(self._items)

    def ord(self) -> int:
        if not self._items:
            raise ValueError("ord(0) is undefined")
        return self._items[0][0]

    def ac(self) -> Fraction:
        if not self._items:
            return Fraction(0)
        return self._items[0][1]

    def max_exp(self) -> int:
        return self._items[-1][0]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentConst.const(other)
        return isinstance(other, LaurentConst) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "LaurentConst") -> bool:
        return self._items < other._items

    def __add__(self, other) -> "LaurentConst":
        other = as_laurent(other)
        return LaurentConst(self._items + other._items)

    __radd__ = __add__

    def __neg__(self) -> "LaurentConst":
        return LaurentConst((e, -c) for e, c in self._items)

    def __sub__(self, other) -> "LaurentConst":
        return self + (-as_laurent(other))

    def __rsub__(self, other) -> "LaurentConst":
        return as_laurent(other) - self

    def __mul__(self, other) -> "LaurentConst":
        other = as_laurent(other)
        return LaurentConst(
            (e1 + e2, c1 * c2) for e1, c1 in self._items for e2, c2 in other._items
        )

    __rmul__ = __mul__

    def shift(self, m: int) -> "LaurentConst":
        """Multiply by t^m."""
        return LaurentConst((e + m, c) for e, c in self._items)

    def truncate_above(self, e_max: int) -> "LaurentConst":
        """Drop all exponents > e_max."""
        return LaurentConst((e, c) for e, c in self._items if e <= e_max)

    def truncate_below(self, e_min: int) -> "LaurentConst":
        """Keep only exponents < e_min."""
        return LaurentConst((e, c) for e, c in self._items if e < e_min)

    def is_monomial(self) -> bool:
        return len(self._items) == 1

    def rationals(self) -> list[Fraction]:
        return [c for _, c in self._items]

    def __repr__(self) -> str:
        return f"LaurentConst({format_laurent(self)})"

    def __str__(self) -> str:
        return format_laurent(self)


ZERO = LaurentConst()
ONE = LaurentConst.const(1)


def as_laurent(x) -> LaurentConst:
    if isinstance(x, LaurentConst):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentConst.const(x)
    raise TypeError(f"cannot interpret {x!r} as a Laurent constant")


def format_laurent(a: LaurentConst) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for e, c in a.items:
        cs = str(c)
        if "/" in cs:
            cs = f"({cs})"
        if e == 0:
            parts.append(cs)
        elif c == 1:
            parts.append(f"t^{e}" if e != 1 else "t")
        elif c == -1:
            parts.append(f"-t^{e}" if e != 1 else "-t")
        else:
            parts.append(f"{cs}*t^{e}" if e != 1 else f"{cs}*t")
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def laurent_to_json(a: LaurentConst) -> dict[str, str]:
    return {str(e): str(c) for e, c in a.items}


def laurent_from_json(d: Mapping[str, object]) -> LaurentConst:
    return LaurentConst({int(k): Fraction(str(v)) for k, v in d.items()})
