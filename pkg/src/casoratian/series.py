"""Coefficient families ``a_k^(n)``.

Two sources are supported.  A :class:`PoleModel` gives entries in closed form,
``a_k^(n) = sum_l c_{l,k} r_{l,k}^(n+k+1)`` (dominant poles plus an optional
tail of strictly smaller poles standing in for the remainder ``b_k^(n)``).  A
seed row plus a :class:`DeltaSchedule` gives entries by the time evolution

    a_k^(n+1) = a_{k+M}^(n) + sign * (delta^(n))^(M+1) * a_k^(n),

which drops ``M`` columns per step.  ``sign=+1`` is the convention under which
the Casorati determinants of the table solve the dhLV system; ``sign=-1`` is
kept for reproducing the minus-sign variant of the relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import TableRangeError
from .numeric import EXACT, Scalar, check_mode, parse_scalar, to_mode

POLES = "poles"
RECURRENCE = "recurrence"


@dataclass(frozen=True)
class DeltaSchedule:
    """Discretization parameters ``delta^(n)``.

    ``kind`` is one of ``"constant"`` (``value``), ``"sequence"`` (explicit
    ``values`` plus an optional declared ``limit``) or ``"harmonic"``
    (``base + scale / (n + offset)``, limit ``base``).
    """

    kind: str
    value: Fraction | None = None
    values: tuple[Fraction, ...] = ()
    limit: Fraction | None = None
    scale: Fraction | None = None
    offset: int = 1

    def __post_init__(self):
        if self.kind == "constant":
            if self.value is None:
                raise ValueError("constant schedule needs a value")
            object.__setattr__(self, "value", parse_scalar(self.value))
            object.__setattr__(self, "limit", self.value)
        elif self.kind == "sequence":
            if not self.values:
                raise ValueError("sequence schedule needs at least one value")
            object.__setattr__(self, "values", tuple(parse_scalar(v) for v in self.values))
            if self.limit is not None:
                object.__setattr__(self, "limit", parse_scalar(self.limit))
        elif self.kind == "harmonic":
            if self.value is None or self.scale is None:
                raise ValueError("harmonic schedule needs base value and scale")
            if self.offset < 1:
                raise ValueError("harmonic offset must be >= 1")
            object.__setattr__(self, "value", parse_scalar(self.value))
            object.__setattr__(self, "scale", parse_scalar(self.scale))
            object.__setattr__(self, "limit", self.value)
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def constant(cls, value) -> DeltaSchedule:
        return cls("constant", value=value)

    @classmethod
    def sequence(cls, values: Iterable, limit=None) -> DeltaSchedule:
        return cls("sequence", values=tuple(values), limit=limit)

    @classmethod
    def harmonic(cls, base, scale=1, offset: int = 1) -> DeltaSchedule:
        """``delta^(n) = base + scale / (n + offset)``."""
        return cls("harmonic", value=base, scale=scale, offset=offset)

    def exact(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError("time index must be non-negative")
        if self.kind == "constant":
            return self.value
        if self.kind == "harmonic":
            return self.value + self.scale / (n + self.offset)
        if n >= len(self.values):
            raise ValueError(f"delta schedule has no value for n={n} (length {len(self.values)})")
        return self.values[n]

    def at(self, n: int, mode: str = EXACT) -> Scalar:
        return to_mode(self.exact(n), mode)

    @property
    def has_limit(self) -> bool:
        return self.limit is not None

    def to_json(self) -> dict:
        from .numeric import format_scalar

        if self.kind == "constant":
            return {"kind": "constant", "value": format_scalar(self.value)}
        if self.kind == "harmonic":
            return {
                "kind": "harmonic",
                "base": format_scalar(self.value),
                "scale": format_scalar(self.scale),
                "offset": self.offset,
            }
        out = {"kind": "sequence", "values": [format_scalar(v) for v in self.values]}
        if self.limit is not None:
            out["limit"] = format_scalar(self.limit)
        return out


Rows = tuple[tuple[Fraction, ...], ...]


def _as_rows(value) -> Rows:
    """Normalize a scalar, a single row, or a list of rows into a tuple of rows."""
    if isinstance(value, (int, Fraction, str, float)):
        return ((parse_scalar(value),),)
    value = list(value)
    if not value:
        return ((),)
    if all(not isinstance(v, (list, tuple)) for v in value):
        return (tuple(parse_scalar(v) for v in value),)
    return tuple(tuple(parse_scalar(v) for v in row) for row in value)


@dataclass(frozen=True)
class PoleModel:
    """Poles and coefficients defining ``a_k^(n)`` column by column.

    Every field is a tuple of per-column rows; a field with a single row is
    broadcast to every column.  A coefficient row of length one is broadcast
    across that column's poles, so ``coefficients=1`` means ``c == 1``.
    """

    poles: Rows
    coefficients: Rows = ((Fraction(1),),)
    tail_poles: Rows = ((),)
    tail_coefficients: Rows = ((Fraction(1),),)
    width: int | None = field(init=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "poles", _as_rows(self.poles))
        object.__setattr__(self, "coefficients", _as_rows(self.coefficients))
        object.__setattr__(self, "tail_poles", _as_rows(self.tail_poles))
        object.__setattr__(self, "tail_coefficients", _as_rows(self.tail_coefficients))
        lengths = {
            len(f)
            for f in (self.poles, self.coefficients, self.tail_poles, self.tail_coefficients)
            if len(f) > 1
        }
        if len(lengths) > 1:
            raise ValueError(f"per-column fields disagree on the number of columns: {sorted(lengths)}")
        object.__setattr__(self, "width", lengths.pop() if lengths else None)
        for k in range(self.width or 1):
            self._validate_column(k)

    @classmethod
    def shared(cls, poles, coefficients=1, tail_poles=(), tail_coefficients=1) -> PoleModel:
        """Model with ``r_{l,k} = r_l`` for every column (the restricted case)."""
        return cls(
            poles=(tuple(poles),),
            coefficients=coefficients,
            tail_poles=(tuple(tail_poles),) if tail_poles else ((),),
            tail_coefficients=tail_coefficients,
        )

    @classmethod
    def per_column(cls, poles, coefficients=1, tail_poles=None, tail_coefficients=1) -> PoleModel:
        poles = [tuple(col) for col in poles]
        return cls(
            poles=tuple(poles) if len(poles) > 1 else (poles[0],),
            coefficients=coefficients,
            tail_poles=tail_poles if tail_poles is not None else ((),),
            tail_coefficients=tail_coefficients,
        )

    @staticmethod
    def _pick(rows: Rows, k: int) -> tuple[Fraction, ...]:
        return rows[0] if len(rows) == 1 else rows[k]

    @staticmethod
    def _expand(coeffs: tuple[Fraction, ...], count: int, what: str) -> tuple[Fraction, ...]:
        if len(coeffs) == 1 and count != 1:
            return coeffs * count
        if len(coeffs) != count:
            raise ValueError(f"{what}: {len(coeffs)} coefficients for {count} poles")
        return coeffs

    def _check_column(self, k: int) -> None:
        if k < 0 or (self.width is not None and k >= self.width):
            raise TableRangeError(f"column {k} outside pole model of width {self.width}")

    def column(self, k: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        """Dominant poles and coefficients of column ``k``."""
        self._check_column(k)
        poles = self._pick(self.poles, k)
        return poles, self._expand(self._pick(self.coefficients, k), len(poles), f"column {k}")

    def tail(self, k: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        """Tail poles and coefficients of column ``k`` (the remainder terms)."""
        self._check_column(k)
        poles = self._pick(self.tail_poles, k)
        if not poles:
            return (), ()
        return poles, self._expand(self._pick(self.tail_coefficients, k), len(poles), f"tail {k}")

    def all_poles(self, k: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        p, c = self.column(k)
        tp, tc = self.tail(k)
        return p + tp, c + tc

    def _validate_column(self, k: int) -> None:
        poles, coeffs = self.all_poles(k)
        if not self.column(k)[0]:
            raise ValueError(f"column {k} has no dominant poles")
        if any(r == 0 for r in poles):
            raise ValueError(f"column {k}: poles must be nonzero")
        if any(c == 0 for c in coeffs):
            raise ValueError(f"column {k}: coefficients must be nonzero")
        mods = [abs(r) for r in poles]
        if any(a <= b for a, b in zip(mods, mods[1:])):
            raise ValueError(f"column {k}: pole moduli must be strictly decreasing, got {poles}")

    @property
    def is_shared(self) -> bool:
        if len(self.poles) == 1:
            return True
        return all(row == self.poles[0] for row in self.poles)

    @property
    def has_tail(self) -> bool:
        return any(len(row) > 0 for row in self.tail_poles)

    def dominant_count(self, k: int = 0) -> int:
        return len(self.column(k)[0])

    def rho(self, k: int, j: int | None = None) -> Fraction:
        """Separating radius between the ``j``-th and ``(j+1)``-th pole moduli.

        ``(|r_j| + |r_{j+1}|) / 2`` when a further pole exists, else ``|r_j| / 2``.
        ``j`` defaults to the dominant count, giving the tail-separating radius.
        """
        poles, _ = self.all_poles(k)
        if j is None:
            j = self.dominant_count(k)
        if not 1 <= j <= len(poles):
            raise ValueError(f"j={j} outside 1..{len(poles)} for column {k}")
        if j < len(poles):
            return (abs(poles[j - 1]) + abs(poles[j])) / 2
        return abs(poles[j - 1]) / 2

    def to_json(self) -> dict:
        from .numeric import format_scalar

        def rows(rs: Rows):
            return [[format_scalar(x) for x in r] for r in rs]

        return {
            "poles": rows(self.poles),
            "coefficients": rows(self.coefficients),
            "tail_poles": rows(self.tail_poles),
            "tail_coefficients": rows(self.tail_coefficients),
        }


def coeff_from_poles(model: PoleModel, k: int, n: int, mode: str = EXACT) -> Scalar:
    """``a_k^(n)`` summed over dominant and tail poles of column ``k``.

    Evaluated exactly, then rounded once if ``mode`` is float.
    """
    if n < 0:
        raise ValueError("time index must be non-negative")
    poles, coeffs = model.all_poles(k)
    total = sum(c * r ** (n + k + 1) for r, c in zip(poles, coeffs))
    return to_mode(total, check_mode(mode))


def evolve_table(row: Sequence[Scalar], delta: Scalar, M: int, sign: int = 1) -> tuple[Scalar, ...]:
    """One time step of the coefficient evolution; output is ``M`` entries shorter."""
    if M < 1:
        raise ValueError("hungry degree M must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if len(row) < M + 1:
        raise ValueError(f"row of length {len(row)} cannot be evolved with M={M}")
    factor = sign * delta ** (M + 1)
    return tuple(row[k + M] + factor * row[k] for k in range(len(row) - M))


@dataclass(frozen=True)
class CoefficientTable:
    """Immutable grid of ``a_k^(n)``; ``rows[n][k]``.

    Recurrence tables shrink by ``M`` columns per row; every access outside
    the stored cells raises :class:`TableRangeError`.
    """

    rows: tuple[tuple[Scalar, ...], ...]
    mode: str
    provenance: str
    model: PoleModel | None = None
    M: int | None = None
    schedule: DeltaSchedule | None = None
    sign: int = 1

    @property
    def N(self) -> int:
        return len(self.rows) - 1

    def width(self, n: int) -> int:
        if not 0 <= n < len(self.rows):
            raise TableRangeError(f"row n={n} outside 0..{self.N}")
        return len(self.rows[n])

    def a(self, k: int, n: int) -> Scalar:
        if not 0 <= n < len(self.rows):
            raise TableRangeError(f"row n={n} outside 0..{self.N}")
        row = self.rows[n]
        if not 0 <= k < len(row):
            raise TableRangeError(f"a_{k}^({n}) outside valid columns 0..{len(row) - 1}")
        return row[k]

    def evolution_residual(self, n: int) -> list[Scalar]:
        """``a_k^(n+1) - (a_{k+M}^(n) + sign*delta^(M+1)*a_k^(n))`` for every stored k."""
        if self.provenance != RECURRENCE:
            raise ValueError("evolution relation is only defined for recurrence tables")
        expected = evolve_table(self.rows[n], self.schedule.at(n, self.mode), self.M, self.sign)
        return [x - y for x, y in zip(self.rows[n + 1], expected)]

    def satisfies_evolution(self) -> bool:
        return all(r == 0 for n in range(self.N) for r in self.evolution_residual(n))


def build_table(
    source: PoleModel | Sequence,
    K: int,
    N: int,
    mode: str = EXACT,
    *,
    M: int | None = None,
    schedule: DeltaSchedule | None = None,
    sign: int = 1,
) -> CoefficientTable:
    """Populate ``a_k^(n)`` for ``n = 0..N``.

    A :class:`PoleModel` source gives a rectangular ``(N+1) x K`` table.  A seed
    row (with ``M`` and ``schedule``) gives a recurrence table whose row ``n``
    has ``K - n*M`` columns.
    """
    check_mode(mode)
    if K < 1 or N < 0:
        raise ValueError("need K >= 1 and N >= 0")
    if isinstance(source, PoleModel):
        if source.width is not None and K > source.width:
            raise TableRangeError(f"pole model has {source.width} columns, K={K} requested")
        rows = tuple(
            tuple(coeff_from_poles(source, k, n, mode) for k in range(K)) for n in range(N + 1)
        )
        return CoefficientTable(rows, mode, POLES, model=source)

    if M is None or schedule is None:
        raise ValueError("recurrence tables need M and a delta schedule")
    seed = list(source)
    if len(seed) < K:
        raise ValueError(f"seed row has {len(seed)} entries, K={K} required")
    if K <= N * M:
        raise ValueError(f"K={K} too narrow for N={N} steps with M={M} (need K > N*M)")
    row = tuple(to_mode(parse_scalar(x) if mode == EXACT else x, mode) for x in seed[:K])
    rows = [row]
    for n in range(N):
        row = evolve_table(row, schedule.at(n, mode), M, sign)
        rows.append(row)
    return CoefficientTable(tuple(rows), mode, RECURRENCE, M=M, schedule=schedule, sign=sign)


def recurrence_from_poles(
    model: PoleModel,
    K: int,
    N: int,
    M: int,
    schedule: DeltaSchedule,
    mode: str = EXACT,
    sign: int = 1,
) -> CoefficientTable:
    """Recurrence table seeded with the pole row ``a_k^(0)``, k < K."""
    seed = [coeff_from_poles(model, k, 0, EXACT) for k in range(K)]
    table = build_table(seed, K, N, mode, M=M, schedule=schedule, sign=sign)
    return CoefficientTable(table.rows, mode, RECURRENCE, model, M, schedule, sign)


def shift_table(sequence: Sequence) -> CoefficientTable:
    """Table ``a_k^(n) = s^(n+k)`` of a single sequence (stride-1 pure shift)."""
    length = len(sequence)
    if length < 1:
        raise ValueError("empty sequence")
    return build_table(sequence, length, length - 1, EXACT, M=1, schedule=DeltaSchedule.constant(0))


def evolution_rates(poles: Sequence, M: int, delta, sign: int = 1) -> tuple[Fraction, ...]:
    """Per-step growth ``r^M + sign*delta^(M+1)`` of each shared pole under the evolution.

    With a shared-pole seed ``a_k^(0) = sum c_l r_l^(k+1)`` and constant delta,
    ``a_k^(n) = sum c_l r_l^(k+1) lambda_l^n``, so these are the time-direction poles.
    """
    d = parse_scalar(delta)
    return tuple(parse_scalar(r) ** M + sign * d ** (M + 1) for r in poles)
