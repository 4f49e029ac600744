"""Exception types raised across the package."""

from __future__ import annotations


class CasoratianError(Exception):
    """Base class for all package errors."""


class TableRangeError(CasoratianError, IndexError):
    """A determinant or entry request falls outside the valid part of a table."""


class ZeroDenominator(CasoratianError, ZeroDivisionError):
    """A factor ``delta + u`` vanished while evaluating the dhLV map."""

    def __init__(self, k: int, n: int | None = None, factor: str = ""):
        self.k = k
        self.n = n
        self.factor = factor
        where = f"k={k}" if n is None else f"k={k}, n={n}"
        super().__init__(f"zero denominator at {where}" + (f": {factor}" if factor else ""))

    def payload(self) -> dict:
        return {"error": "ZeroDenominator", "k": self.k, "n": self.n, "factor": self.factor}


class ZeroCasorati(CasoratianError, ZeroDivisionError):
    """A Casorati determinant used as a divisor is zero (degenerate seed)."""

    def __init__(self, i: int, j: int, n: int | None = None):
        self.i = i
        self.j = j
        self.n = n
        super().__init__(f"C_{{{i},{j}}}^({n}) vanishes")

    def payload(self) -> dict:
        return {"error": "ZeroCasorati", "i": self.i, "j": self.j, "n": self.n}


class IdentityViolation(CasoratianError, AssertionError):
    """An exact identity that must hold bit-for-bit did not."""


class ConfigError(CasoratianError, ValueError):
    """An experiment configuration is incomplete or malformed."""


class ZeroTau(CasoratianError, ZeroDivisionError):
    """A tau function used as a divisor is zero."""

    def __init__(self, k: int, n: int | None = None):
        self.k = k
        self.n = n
        super().__init__(f"tau_{k}^({n}) vanishes")

    def payload(self) -> dict:
        return {"error": "ZeroTau", "k": self.k, "n": self.n}
