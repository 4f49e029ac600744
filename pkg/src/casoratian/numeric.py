"""Scalars and determinant engines.

Two arithmetic modes are supported.  ``"exact"`` uses :class:`fractions.Fraction`
and gives bit-exact results; ``"float"`` uses float64 and carries a conditioning
diagnostic with every determinant.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence, Union

import numpy as np

Scalar = Union[Fraction, float]
Matrix = Sequence[Sequence[Scalar]]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

BRUTEFORCE_MAX_ORDER = 5


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def parse_scalar(value) -> Fraction:
    """Parse ``"p/q"``, decimal strings, ints or Fractions into an exact rational.

    Floats are accepted and converted exactly (their binary value is kept).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a scalar")


def to_mode(value, mode: str) -> Scalar:
    """Convert a scalar into the representation used by ``mode``."""
    if check_mode(mode) == EXACT:
        if isinstance(value, float):
            raise TypeError("float value in exact mode")
        return Fraction(value)
    return float(value)


def format_scalar(value) -> str:
    """Deterministic text form: ``p/q`` for rationals, shortest repr for floats."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, Rational):
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _check_square(m: Matrix) -> int:
    order = len(m)
    if order < 1:
        raise ValueError("matrix order must be at least 1")
    for row in m:
        if len(row) != order:
            raise ValueError("matrix is not square")
    return order


def det_exact(m: Matrix) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers by their denominators' lcm, so the
    elimination runs entirely on Python ints and every intermediate value is
    itself a minor of the scaled matrix.
    """
    order = _check_square(m)
    rows: list[list[int]] = []
    scale = 1
    for row in m:
        fr = [Fraction(x) for x in row]
        den = math.lcm(*(x.denominator for x in fr))
        rows.append([x.numerator * (den // x.denominator) for x in fr])
        scale *= den

    sign = 1
    prev = 1
    for c in range(order - 1):
        if rows[c][c] == 0:
            for r in range(c + 1, order):
                if rows[r][c] != 0:
                    rows[c], rows[r] = rows[r], rows[c]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        piv = rows[c][c]
        for r in range(c + 1, order):
            rr = rows[r]
            rc = rr[c]
            pc = rows[c]
            for q in range(c + 1, order):
                # exact division is guaranteed by Sylvester's identity
                rr[q] = (piv * rr[q] - rc * pc[q]) // prev
            rr[c] = 0
        prev = piv
    return Fraction(sign * rows[-1][-1], scale)


class FloatDet(NamedTuple):
    """Float64 determinant with its LU diagnostics."""

    value: float
    growth: float
    """max |U_ij| / max |A_ij| for the partially pivoted factorization."""
    singular_column: int | None = None
    """Column at which an exactly zero pivot was met, if any."""


def det_float(m: Matrix) -> FloatDet:
    """Determinant via LU with partial pivoting, plus pivot growth."""
    order = _check_square(m)
    a = np.array(m, dtype=np.float64)
    amax = float(np.max(np.abs(a)))
    if amax == 0.0:
        return FloatDet(0.0, 1.0, 0)
    umax = amax
    sign = 1.0
    for c in range(order):
        p = c + int(np.argmax(np.abs(a[c:, c])))
        if a[p, c] == 0.0:
            return FloatDet(0.0, umax / amax, c)
        if p != c:
            a[[c, p]] = a[[p, c]]
            sign = -sign
        if c + 1 < order:
            factors = a[c + 1 :, c] / a[c, c]
            a[c + 1 :, c:] -= np.outer(factors, a[c, c:])
            umax = max(umax, float(np.max(np.abs(a[c + 1 :, c + 1 :]))))
    diag = np.diag(a)
    value = sign * float(np.prod(diag))
    return FloatDet(value, umax / amax, None)


def hadamard_ratio(m: Matrix, det: float) -> float:
    """Product of row 2-norms divided by |det| (>= 1; inf for det == 0).

    ``eps * hadamard_ratio`` estimates the relative error of a backward-stable
    determinant, so large values flag cancellation-dominated results.
    """
    norms = 1.0
    for row in m:
        norms *= math.sqrt(sum(float(x) ** 2 for x in row))
    if det == 0:
        return math.inf
    return norms / abs(float(det))


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def det_bruteforce(m: Matrix) -> Scalar:
    """Leibniz expansion over all permutations. Test oracle only."""
    order = _check_square(m)
    if order > BRUTEFORCE_MAX_ORDER:
        raise ValueError(f"det_bruteforce supports order <= {BRUTEFORCE_MAX_ORDER}, got {order}")
    total = 0
    for perm in itertools.permutations(range(order)):
        term = _perm_sign(perm)
        for row, col in enumerate(perm):
            term = term * m[row][col]
        total = total + term
    if isinstance(total, int):
        return Fraction(total)
    return total


def det(m: Matrix, mode: str) -> Scalar:
    """Determinant in the given mode; float mode drops the diagnostics."""
    if mode == EXACT:
        return det_exact(m)
    return det_float(m).value
