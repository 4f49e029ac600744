"""Hankel, Casorati, strided ``G`` and block tau determinants.

Index conventions (all 0-based inside matrices):

* ``H_j^(n)``     entry (p, q) = ``s^(n+p+q)``
* ``C_{k,j}^(n)`` entry (p, q) = ``a_{k+q}^(n+p)``
* ``G_{i,j}^(n)`` entry (p, q) = ``a_{i+M p+q}^(n)``
* ``tau_k^(n)``   block matrix, see :func:`tau_matrix`

Every family has value 1 at order 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import TableRangeError
from .numeric import EXACT, Scalar, det, to_mode
from .series import RECURRENCE, CoefficientTable


def _one(mode: str) -> Scalar:
    return to_mode(1, mode)


def hankel_matrix(series: Sequence[Scalar], j: int, n: int) -> list[list[Scalar]]:
    if j < 0 or n < 0:
        raise ValueError("j and n must be non-negative")
    if n + 2 * j - 2 >= len(series):
        raise TableRangeError(f"H_{j}^({n}) needs {n + 2 * j - 1} terms, series has {len(series)}")
    return [[series[n + p + q] for q in range(j)] for p in range(j)]


def hankel_det(series: Sequence[Scalar], j: int, n: int, mode: str = EXACT) -> Scalar:
    if j == 0:
        return _one(mode)
    m = hankel_matrix(series, j, n)
    return det([[to_mode(x, mode) for x in row] for row in m], mode)


def casorati_matrix(table: CoefficientTable, k: int, j: int, n: int) -> list[list[Scalar]]:
    if j < 0 or k < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    return [[table.a(k + q, n + p) for q in range(j)] for p in range(j)]


def casorati_det(table: CoefficientTable, k: int, j: int, n: int) -> Scalar:
    if j == 0:
        return _one(table.mode)
    return det(casorati_matrix(table, k, j, n), table.mode)


def g_matrix(table: CoefficientTable, i: int, j: int, n: int, M: int) -> list[list[Scalar]]:
    if j < 0 or i < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    if M < 1:
        raise ValueError("hungry degree M must be >= 1")
    return [[table.a(i + M * p + q, n) for q in range(j)] for p in range(j)]


def g_det(table: CoefficientTable, i: int, j: int, n: int, M: int) -> Scalar:
    if j == 0:
        return _one(table.mode)
    return det(g_matrix(table, i, j, n, M), table.mode)


def tau_split(k: int, M: int) -> tuple[int, int]:
    """Write ``k = i + j(M+1)`` with ``0 <= i <= M``; returns ``(i, j)``."""
    if k < 0:
        raise ValueError(f"tau index must be non-negative, got {k}")
    if M < 1:
        raise ValueError("hungry degree M must be >= 1")
    j, i = divmod(k, M + 1)
    return i, j


def tau_matrix(table: CoefficientTable, k: int, n: int, M: int) -> list[list[Scalar]]:
    """Assemble the block matrix of ``tau_k^(n)``, ``k = i + j(M+1)``.

    There are ``j`` block rows/columns of size ``M+1`` followed, when
    ``i > 0``, by one of size ``i``.  Block ``(p, q)`` is the (possibly
    rectangular) diagonal block ``tau_{pM+q, s}`` carrying
    ``a_{pM+q+t}^(n)`` at local position ``(t, t)`` for ``t < min(size_p, size_q)``
    and zeros elsewhere.  For ``i = 0`` this is the ``j x j`` grid
    ``tau_{pM+q, M}``; for ``i > 0`` the last block row and column are the
    ``tau_{., i-1}`` blocks.
    """
    i, j = tau_split(k, M)
    sizes = [M + 1] * j + ([i] if i else [])
    offsets = [sum(sizes[:p]) for p in range(len(sizes))]
    zero = to_mode(0, table.mode)
    mat = [[zero] * k for _ in range(k)]
    for p, (op, sp) in enumerate(zip(offsets, sizes)):
        for q, (oq, sq) in enumerate(zip(offsets, sizes)):
            for t in range(min(sp, sq)):
                mat[op + t][oq + t] = table.a(p * M + q + t, n)
    return mat


def tau(table: CoefficientTable, k: int, n: int, M: int, method: str = "direct") -> Scalar:
    """``tau_k^(n)`` by direct block determinant or by the ``G`` product."""
    if method == "product":
        return tau_from_g(table, k, n, M)
    if method != "direct":
        raise ValueError(f"unknown tau method {method!r}")
    tau_split(k, M)
    if k == 0:
        return _one(table.mode)
    return det(tau_matrix(table, k, n, M), table.mode)


def tau_from_g(table: CoefficientTable, k: int, n: int, M: int) -> Scalar:
    """``prod_{l<i} G_{l,j+1}^(n) * prod_{l=i..M} G_{l,j}^(n)``."""
    i, j = tau_split(k, M)
    value = _one(table.mode)
    for ell in range(M + 1):
        value = value * g_det(table, ell, j + 1 if ell < i else j, n, M)
    return value


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of one exact identity evaluation."""

    name: str
    passed: bool
    lhs: Scalar
    rhs: Scalar
    detail: str = ""


def check_tau_factorization(
    table: CoefficientTable, j: int, i: int, n: int, M: int
) -> IdentityCheck:
    """Compare the block determinant of ``tau_{i+j(M+1)}^(n)`` with its ``G`` product."""
    if not 0 <= i <= M:
        raise ValueError(f"need 0 <= i <= M, got i={i}, M={M}")
    k = i + j * (M + 1)
    lhs = tau(table, k, n, M, method="direct")
    rhs = tau_from_g(table, k, n, M)
    return IdentityCheck(
        "tau-factorization", lhs == rhs, lhs, rhs, f"k={k} (i={i}, j={j}), n={n}, M={M}"
    )


def check_g_equals_casorati(
    table: CoefficientTable, i: int, j: int, n: int, M: int
) -> IdentityCheck:
    """``G_{i,j}^(n) == C_{i,j}^(n)`` on a table obeying the evolution relation."""
    if table.provenance != RECURRENCE or table.M != M:
        raise ValueError("G = C holds only on recurrence tables built with the same M")
    # rows feeding the row reduction must obey the evolution relation
    last = min(n + max(j - 1, 0), table.N)
    for t in range(n, last):
        if any(r != 0 for r in table.evolution_residual(t)):
            raise ValueError(f"table violates the evolution relation between rows {t} and {t + 1}")
    lhs = g_det(table, i, j, n, M)
    rhs = casorati_det(table, i, j, n)
    return IdentityCheck("g-equals-casorati", lhs == rhs, lhs, rhs, f"i={i}, j={j}, n={n}, M={M}")


def casorati_sequence(table: CoefficientTable, k: int, j: int, n_values) -> list[Scalar]:
    return [casorati_det(table, k, j, n) for n in n_values]

