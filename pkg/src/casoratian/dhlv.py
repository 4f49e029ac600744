"""Discrete hungry Lotka-Volterra system with hungry degree ``M``.

Interior variables are ``u_k^(n)``, ``k = 0 .. (M+1)m-M-1``; the ``M`` indices
on either side are identically zero.  One time step reads

    u_k^(n+1) = u_k^(n) * prod_{j=1..M} (delta^(n) + u_{k+j}^(n))
                        / prod_{j=1..M} (delta^(n+1) + u_{k-j}^(n+1)),

solved for increasing ``k``.  The auxiliary variable
``v_k = u_{k-M} * prod_{j=1..M} (delta + u_{k-M-j})``, ``k = M .. (M+1)m-1``,
links the system to Casorati determinants of a coefficient table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .determinants import casorati_det, tau
from .errors import TableRangeError, ZeroCasorati, ZeroDenominator, ZeroTau
from .numeric import EXACT, FLOAT, Scalar, check_mode, to_mode
from .series import CoefficientTable, DeltaSchedule, PoleModel, coeff_from_poles, build_table

ZERO_THRESHOLD = 1e-8
CONSTANT_REL_TOL = 1e-8
CROSS_CHECK_REL_TOL = 1e-6
DELTA_MIN = 1e-3
MONOTONE_SAMPLES = 5
MIN_TRAJECTORY = 10

TO_ZERO = "to_zero"
TO_CONSTANT = "to_constant"
UNCLASSIFIED = "unclassified"


def interior_size(M: int, m: int) -> int:
    return (M + 1) * m - M


@dataclass(frozen=True)
class DhlvState:
    """Snapshot ``u^(n)`` of the interior variables."""

    M: int
    m: int
    n: int
    u: tuple[Scalar, ...]

    def __post_init__(self):
        if self.M < 1 or self.m < 1:
            raise ValueError("need M >= 1 and m >= 1")
        if len(self.u) != interior_size(self.M, self.m):
            raise ValueError(
                f"expected {interior_size(self.M, self.m)} interior values, got {len(self.u)}"
            )

    def at(self, k: int) -> Scalar:
        """``u_k``, with the boundary zeros for ``-M <= k < 0`` and past the end."""
        size = len(self.u)
        if 0 <= k < size:
            return self.u[k]
        if -self.M <= k < 0 or size <= k < size + self.M:
            return 0 * self.u[0] if self.u else 0
        raise TableRangeError(f"u_{k} outside -{self.M}..{size + self.M - 1}")

    @classmethod
    def zeros(cls, M: int, m: int, n: int = 0, mode: str = EXACT) -> DhlvState:
        return cls(M, m, n, tuple(to_mode(0, mode) for _ in range(interior_size(M, m))))


@dataclass(frozen=True)
class AuxiliaryRow:
    """``v_k^(n)`` for ``k = M .. (M+1)m-1``; ``v[0]`` holds ``v_M``."""

    M: int
    m: int
    n: int
    v: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.v) != interior_size(self.M, self.m):
            raise ValueError(
                f"expected {interior_size(self.M, self.m)} auxiliary values, got {len(self.v)}"
            )

    @property
    def indices(self) -> range:
        return range(self.M, (self.M + 1) * self.m)

    def at(self, k: int) -> Scalar:
        if k not in self.indices:
            raise TableRangeError(f"v_{k} outside {self.M}..{(self.M + 1) * self.m - 1}")
        return self.v[k - self.M]


def dhlv_step(state: DhlvState, delta_n: Scalar, delta_next: Scalar) -> DhlvState:
    """Advance ``u^(n)`` to ``u^(n+1)``."""
    M = state.M
    new: list[Scalar] = []

    def new_at(k: int) -> Scalar:
        return new[k] if k >= 0 else 0 * delta_next

    for k in range(len(state.u)):
        num = state.u[k]
        for j in range(1, M + 1):
            num = num * (delta_n + state.at(k + j))
        den = 1
        for j in range(1, M + 1):
            factor = delta_next + new_at(k - j)
            if factor == 0:
                raise ZeroDenominator(k, state.n + 1, f"delta^(n+1) + u_{k - j}^(n+1)")
            den = den * factor
        new.append(num / den)
    return DhlvState(M, state.m, state.n + 1, tuple(new))


def v_from_u(state: DhlvState, delta: Scalar) -> AuxiliaryRow:
    M = state.M
    v = []
    for k in range(M, (M + 1) * state.m):
        value = state.at(k - M)
        for j in range(1, M + 1):
            value = value * (delta + state.at(k - M - j))
        v.append(value)
    return AuxiliaryRow(M, state.m, state.n, tuple(v))


def u_from_v(aux: AuxiliaryRow, delta: Scalar) -> DhlvState:
    """Invert :func:`v_from_u`: ``u_k = v_{k+M} / prod_l (delta + u_{k-l})``, increasing k."""
    M = aux.M
    u: list[Scalar] = []
    for k in range(len(aux.v)):
        den = 1
        for ell in range(1, M + 1):
            prev = u[k - ell] if k - ell >= 0 else 0 * delta
            factor = delta + prev
            if factor == 0:
                raise ZeroDenominator(k, aux.n, f"delta + u_{k - ell}")
            den = den * factor
        u.append(aux.at(k + M) / den)
    return DhlvState(M, aux.m, aux.n, tuple(u))


def required_width(M: int, m: int, n: int) -> int:
    """Seed width ``K`` needed to evaluate every determinant of ``v^(n)``."""
    return (M + 1) * m + n * M


def _check_table_range(table: CoefficientTable, M: int, m: int, n: int) -> None:
    if n + m - 1 > table.N:
        raise TableRangeError(f"v^({n}) needs table rows up to {n + m - 1}, table has {table.N}")
    need = (M + 1) * m
    if table.width(n) < need:
        raise TableRangeError(
            f"v^({n}) needs {need} columns at row {n} (K >= {required_width(M, m, n)}), "
            f"table has {table.width(n)}"
        )


def v_from_determinants(table: CoefficientTable, M: int, m: int, n: int) -> AuxiliaryRow:
    """``v^(n)`` from Casorati determinants of a recurrence table.

    ``v_{i+j(M+1)} = C_{i,j+1} C_{i+1,j-1} / (C_{i,j} C_{i+1,j})`` for
    ``i < M``, ``j >= 1``, and
    ``v_{M+j(M+1)} = C_{M,j+1} C_{0,j} / (C_{M,j} C_{0,j+1})``.
    """
    _check_table_range(table, M, m, n)
    cache: dict[tuple[int, int], Scalar] = {}

    def C(i: int, j: int) -> Scalar:
        if (i, j) not in cache:
            cache[(i, j)] = casorati_det(table, i, j, n)
        return cache[(i, j)]

    def ratio(num: Scalar, den_terms: Sequence[tuple[int, int]]) -> Scalar:
        den = 1
        for i, j in den_terms:
            if C(i, j) == 0:
                raise ZeroCasorati(i, j, n)
            den = den * C(i, j)
        return num / den

    v = []
    for k in range(M, (M + 1) * m):
        j, i = divmod(k, M + 1)
        if i == M:
            v.append(ratio(C(M, j + 1) * C(0, j), [(M, j), (0, j + 1)]))
        else:
            v.append(ratio(C(i, j + 1) * C(i + 1, j - 1), [(i, j), (i + 1, j)]))
    return AuxiliaryRow(M, m, n, tuple(v))


def v_from_tau(table: CoefficientTable, M: int, m: int, n: int, method: str = "direct") -> AuxiliaryRow:
    """``v_k^(n) = tau_{k+1} tau_{k-M} / (tau_k tau_{k-M+1})``."""
    _check_table_range(table, M, m, n)
    cache: dict[int, Scalar] = {}

    def T(k: int) -> Scalar:
        if k not in cache:
            cache[k] = tau(table, k, n, M, method=method)
        return cache[k]

    v = []
    for k in range(M, (M + 1) * m):
        for d in (k, k - M + 1):
            if T(d) == 0:
                raise ZeroTau(d, n)
        v.append(T(k + 1) * T(k - M) / (T(k) * T(k - M + 1)))
    return AuxiliaryRow(M, m, n, tuple(v))


def state_from_determinants(table: CoefficientTable, M: int, m: int, n: int) -> DhlvState:
    """``u^(n)`` reconstructed from the Casorati path."""
    return u_from_v(v_from_determinants(table, M, m, n), table.schedule.at(n, table.mode))


def dhlv_table(
    model: PoleModel,
    M: int,
    m: int,
    schedule: DeltaSchedule,
    n_max: int = 0,
    mode: str = EXACT,
) -> CoefficientTable:
    """Recurrence table seeded from ``model`` wide enough for ``v^(0..n_max)``.

    The seed should have exactly ``m`` shared poles and no tail: then
    ``C_{i,m+1}`` vanishes, which is what makes the right boundary zeros of the
    dhLV system consistent with the determinant solution.
    """
    K = required_width(M, m, n_max)
    N = n_max + m - 1
    seed = [coeff_from_poles(model, k, 0, EXACT) for k in range(K)]
    table = build_table(seed, K, N, mode, M=M, schedule=schedule)
    return CoefficientTable(table.rows, mode, table.provenance, model, M, schedule, table.sign)


def seed_from_poles(
    model: PoleModel, M: int, m: int, schedule: DeltaSchedule, mode: str = EXACT
) -> DhlvState:
    """``u^(0)`` via the determinant path, evaluated exactly, returned in ``mode``."""
    table = dhlv_table(model, M, m, schedule, 0, EXACT)
    state = state_from_determinants(table, M, m, 0)
    return DhlvState(M, m, 0, tuple(to_mode(x, mode) for x in state.u))


def simulate(
    state: DhlvState, schedule: DeltaSchedule, n_steps: int, mode: str | None = None
) -> list[tuple[DhlvState, AuxiliaryRow]]:
    """Trajectory ``[(u^(n), v^(n))]`` for ``n = state.n .. state.n + n_steps``."""
    if mode is not None:
        check_mode(mode)
        state = DhlvState(state.M, state.m, state.n, tuple(to_mode(x, mode) for x in state.u))
    mode = FLOAT if any(isinstance(x, float) for x in state.u) else EXACT
    out = [(state, v_from_u(state, schedule.at(state.n, mode)))]
    for _ in range(n_steps):
        n = state.n
        state = dhlv_step(state, schedule.at(n, mode), schedule.at(n + 1, mode))
        out.append((state, v_from_u(state, schedule.at(n + 1, mode))))
    return out


@dataclass
class ConvergenceReport:
    """Limit classification of every ``u`` and ``v`` index of a trajectory."""

    status: str
    u_classes: dict[int, str]
    v_classes: dict[int, str]
    c_hat: dict[int, float] = field(default_factory=dict)
    c_bar: dict[int, float] = field(default_factory=dict)
    cross_check: dict[int, float | None] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    decay_rates: dict[str, float] = field(default_factory=dict)
    detail: str = ""
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


def expected_pattern(M: int, m: int) -> tuple[dict[int, str], dict[int, str]]:
    """Limit classes predicted for ``u`` and ``v``: survivors at stride ``M+1``."""
    u = {k: TO_CONSTANT if k % (M + 1) == 0 else TO_ZERO for k in range(interior_size(M, m))}
    v = {k: TO_CONSTANT if k % (M + 1) == M else TO_ZERO for k in range(M, (M + 1) * m)}
    return u, v


def _classify(series: list[float], zero_threshold: float, const_tol: float) -> tuple[str, float]:
    """Class and residual of one scalar trajectory."""
    last = series[-1]
    tail = [abs(x) for x in series[-MONOTONE_SAMPLES:]]
    if abs(last) < zero_threshold and all(b <= a for a, b in zip(tail, tail[1:])):
        return TO_ZERO, abs(last)
    diff = abs(series[-1] - series[-2])
    if last != 0 and diff <= const_tol * abs(last):
        return TO_CONSTANT, diff / abs(last)
    return UNCLASSIFIED, diff


def _decay(series: list[float]) -> float:
    a, b = abs(series[-MONOTONE_SAMPLES]), abs(series[-1])
    if a == 0 or b == 0:
        return 0.0
    return math.exp(math.log(b / a) / (MONOTONE_SAMPLES - 1))


def convergence_check(
    trajectory: Sequence[tuple[DhlvState, AuxiliaryRow]],
    schedule: DeltaSchedule,
    tolerances: dict | None = None,
) -> ConvergenceReport:
    """Compare a trajectory's limits with the survive/vanish pattern.

    ``u_{j(M+1)}`` and ``v_{M+j(M+1)}`` should settle on nonzero constants, all
    other indices should vanish, and the ``u`` limits should equal the ``v``
    limits divided by ``delta^M``.
    """
    tol = {
        "zero_threshold": ZERO_THRESHOLD,
        "constant_rel_tol": CONSTANT_REL_TOL,
        "cross_check_rel_tol": CROSS_CHECK_REL_TOL,
        "delta_min": DELTA_MIN,
    }
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")
        tol.update(tolerances)
    if len(trajectory) < MIN_TRAJECTORY:
        raise ValueError(f"trajectory needs at least {MIN_TRAJECTORY} states, got {len(trajectory)}")
    M, m = trajectory[0][0].M, trajectory[0][0].m
    exp_u, exp_v = expected_pattern(M, m)

    report = ConvergenceReport("INCONCLUSIVE", {}, {}, tolerances=tol)
    for k in exp_u:
        series = [float(s.u[k]) for s, _ in trajectory]
        cls, res = _classify(series, tol["zero_threshold"], tol["constant_rel_tol"])
        report.u_classes[k] = cls
        report.residuals[f"u{k}"] = res
        if cls == TO_ZERO:
            report.decay_rates[f"u{k}"] = _decay(series)
    for k in exp_v:
        series = [float(a.at(k)) for _, a in trajectory]
        cls, res = _classify(series, tol["zero_threshold"], tol["constant_rel_tol"])
        report.v_classes[k] = cls
        report.residuals[f"v{k}"] = res
        if cls == TO_ZERO:
            report.decay_rates[f"v{k}"] = _decay(series)

    final_u, final_v = trajectory[-1]
    if all(x == 0 for x in final_u.u) and all(x == 0 for x in final_v.v):
        report.status = "PASS"
        report.detail = "zero state (vacuous)"
        return report
    if not schedule.has_limit:
        report.status = "OUT_OF_SCOPE"
        report.detail = "delta schedule declares no limit"
        return report

    delta = float(schedule.limit)
    for j in range(m):
        c_hat = float(final_v.at(M + j * (M + 1)))
        c_bar = float(final_u.u[j * (M + 1)])
        report.c_hat[j] = c_hat
        report.c_bar[j] = c_bar
        if abs(delta) < tol["delta_min"] or c_bar == 0:
            report.cross_check[j] = None
        else:
            report.cross_check[j] = abs(c_hat / delta**M / c_bar - 1)

    if any(c == UNCLASSIFIED for c in (*report.u_classes.values(), *report.v_classes.values())):
        bad = [f"u{k}" for k, c in report.u_classes.items() if c == UNCLASSIFIED]
        bad += [f"v{k}" for k, c in report.v_classes.items() if c == UNCLASSIFIED]
        report.detail = f"not settled by n={final_u.n}: {', '.join(bad)}"
        return report

    mismatches = [f"u{k}" for k in exp_u if report.u_classes[k] != exp_u[k]]
    mismatches += [f"v{k}" for k in exp_v if report.v_classes[k] != exp_v[k]]
    cross_bad = [
        j for j, e in report.cross_check.items() if e is not None and e > tol["cross_check_rel_tol"]
    ]
    if mismatches or cross_bad:
        report.status = "FAIL"
        parts = []
        if mismatches:
            parts.append(f"pattern mismatch at {', '.join(mismatches)}")
        if cross_bad:
            parts.append(f"c_bar != c_hat/delta^M for j={cross_bad}")
        report.detail = "; ".join(parts)
        return report
    report.status = "PASS"
    return report
