"""Exact rational helpers shared by every module.

Values are kept as ``int`` whenever they are integral and as
:class:`fractions.Fraction` otherwise; mixing the two is exact and keeps
the common all-integer path fast.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

Rational = Union[int, Fraction]


def q(x) -> Rational:
    """Normalize ``x`` to an exact rational (``int`` when integral).

    Accepts ints, Fractions and strings such as ``"-3/4"``. Floats are
    refused: nothing in this package is allowed to go through binary
    floating point.
    """
    t = type(x)
    if t is int:
        return x
    if t is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return q(Fraction(x.strip()))
    if isinstance(x, _RationalABC):
        return q(Fraction(x.numerator, x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def fmt(x: Rational) -> str:
    """Canonical text form: ``"p/q"`` in lowest terms, integers without ``/1``."""
    x = q(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


def parse(s: str) -> Rational:
    return q(s)


def is_integral(x: Rational) -> bool:
    return isinstance(q(x), int)
