"""Helpers that let forest sums run over any commutative-ring scalar.

Three realizations are used in practice: ``fractions.Fraction`` (exact),
``float``/``complex`` (Float64), and
:class:`forest_spectra.tropical_asymptotics.AsymptoticScalar`.  The generic
code only needs ``+``, ``*``, a zero and a one; these helpers supply the
latter two from a sample value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number


def one_like(x):
    if hasattr(x, "one") and not isinstance(x, Number):
        return x.one()
    if isinstance(x, Fraction):
        return Fraction(1)
    return type(x)(1)


def zero_like(x):
    if hasattr(x, "zero") and not isinstance(x, Number):
        return x.zero()
    if isinstance(x, Fraction):
        return Fraction(0)
    return type(x)(0)


def is_zero(x) -> bool:
    if hasattr(x, "is_zero") and not isinstance(x, Number):
        return x.is_zero()
    return x == 0


def signed(x, odd: bool):
    """Return ``-x`` when ``odd`` else ``x``."""
    return -x if odd else x


def to_fraction(value) -> Fraction:
    """Parse an int, a decimal literal or a ``"p/q"`` string exactly.

    Raises ``ValueError`` for anything that is not a finite rational.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite rational: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational: {value!r}") from None
    raise ValueError(f"not a rational: {value!r}")


def format_scalar(x):
    """JSON-friendly form: Fractions become ``"p/q"`` strings, complex become pairs."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        if x.imag == 0:
            return x.real
        return [x.real, x.imag]
    if isinstance(x, float):
        return x
    if isinstance(x, int):
        return x
    if hasattr(x, "to_json"):
        return x.to_json()
    return float(x)
