"""Growth rates and error decay of Casorati determinant sequences.

For a pole table, ``C_{k,j}^(n) ~ c * rate^n * (1 + O(q^n))``.  The fits here
measure ``rate`` from consecutive ratios, measure ``log q`` as a least-squares
slope, and compare both against the values implied by the pole model.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

from .determinants import casorati_det, casorati_matrix
from .errors import IdentityViolation
from .numeric import EXACT, Scalar, det_exact, det_float, hadamard_ratio
from .series import POLES, CoefficientTable, PoleModel, build_table

TOL_RATE = 1e-3
TOL_SLOPE_FACTOR = 0.15
TOL_TIE = 0.05
NOISE_FLOOR_FACTOR = 1e3
MAX_REL_ERROR = 1e-8
DEFAULT_WINDOW = 5

PASS = "PASS"
FAIL = "FAIL"
DEGENERATE = "DEGENERATE"
NEAR_TIE = "NEAR-TIE"
INCONCLUSIVE = "INCONCLUSIVE"

EPS = float(np.finfo(np.float64).eps)


def default_tolerances() -> dict:
    return {
        "tol_rate": TOL_RATE,
        "tol_slope_factor": TOL_SLOPE_FACTOR,
        "tol_tie": TOL_TIE,
        "noise_floor_factor": NOISE_FLOOR_FACTOR,
        "max_rel_error": MAX_REL_ERROR,
        "window": DEFAULT_WINDOW,
    }


def _exact_root(q: Fraction, w: int) -> Fraction | None:
    """``q**(1/w)`` if it is rational, else None (``q > 0``)."""
    num, ok_n = gmpy2.iroot(gmpy2.mpz(q.numerator), w)
    den, ok_d = gmpy2.iroot(gmpy2.mpz(q.denominator), w)
    if ok_n and ok_d:
        return Fraction(int(num), int(den))
    return None


def ratio_estimate(seq: Sequence[Scalar], window: int) -> Scalar:
    """Geometric mean of ``|s^(n+1)/s^(n)|`` over the trailing ``window`` ratios.

    The sign is that of the last ratio.  Exact input whose mean is rational
    comes back as an exact Fraction.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(seq) < window + 1:
        raise ValueError(f"need {window + 1} samples, got {len(seq)}")
    tail = list(seq[-(window + 1) :])
    if any(s == 0 for s in tail):
        raise ZeroDivisionError("zero entry inside the ratio window")
    sign = 1 if (tail[-1] > 0) == (tail[-2] > 0) else -1
    if all(isinstance(s, (int, Fraction)) for s in tail):
        total = abs(Fraction(tail[-1]) / Fraction(tail[0]))
        root = _exact_root(total, window)
        if root is not None:
            return sign * root
    logs = [math.log(abs(float(b / a) if isinstance(a, float) or isinstance(b, float)
                         else float(Fraction(b) / Fraction(a))))
            for a, b in zip(tail, tail[1:])]
    return sign * math.exp(sum(logs) / window)


@dataclass
class AsymptoticFit:
    """Observed vs. predicted growth of ``C_{k,j}^(n)``."""

    theorem: str
    k: int
    j: int
    n_max: int
    observed_rate: Scalar
    theoretical_rate: Scalar
    error_slope: float
    theoretical_slope: float
    constant_estimate: Scalar
    status: str
    rate_error: float = math.nan
    slope_samples: int = 0
    detail: str = ""
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass(frozen=True)
class _Sample:
    n: int
    value: Scalar
    trusted: bool


def _samples(table: CoefficientTable, k: int, j: int, n_max: int, max_rel_error: float) -> list[_Sample]:
    out = []
    for n in range(n_max + 1):
        if table.mode == EXACT:
            out.append(_Sample(n, casorati_det(table, k, j, n), True))
            continue
        m = casorati_matrix(table, k, j, n)
        fd = det_float(m)
        if fd.singular_column is not None:
            out.append(_Sample(n, 0.0, False))
            continue
        est = EPS * j * fd.growth * hadamard_ratio(m, fd.value)
        out.append(_Sample(n, fd.value, est <= max_rel_error))
    return out


def _least_squares_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return float(slope)


def _aitken(s0, s1, s2):
    denom = s2 - 2 * s1 + s0
    if denom == 0:
        return s2
    return s2 - (s2 - s1) ** 2 / denom


def _fit(
    theorem: str,
    table: CoefficientTable,
    k: int,
    j: int,
    n_max: int,
    rate: Scalar,
    theoretical_slope: float,
    tol: dict,
    detail: str = "",
) -> AsymptoticFit:
    window = int(tol["window"])
    if window < 3:
        raise ValueError("window length must be >= 3")
    samples = _samples(table, k, j, n_max, tol["max_rel_error"])
    fit = AsymptoticFit(
        theorem, k, j, n_max, math.nan, rate, math.nan, theoretical_slope, math.nan,
        INCONCLUSIVE, detail=detail, tolerances=dict(tol),
    )
    zero_at = [s.n for s in samples if s.trusted and s.value == 0]
    if zero_at:
        fit.status = DEGENERATE
        fit.detail = f"C_{{{k},{j}}}^(n) vanishes at n={zero_at[:5]}"
        return fit

    # longest trailing run of trustworthy samples
    run = 0
    for s in reversed(samples):
        if not s.trusted:
            break
        run += 1
    trailing = samples[len(samples) - run :]
    if run < window + 1:
        fit.detail = (detail + "; " if detail else "") + (
            f"only {run} trailing samples pass the float conditioning check"
        )
        return fit

    values = [s.value for s in trailing]
    fit.observed_rate = ratio_estimate(values, window)
    fit.rate_error = abs(float(fit.observed_rate) / float(rate) - 1)

    exact = table.mode == EXACT
    scaled = [
        (s.n, Fraction(s.value) / Fraction(rate) ** s.n if exact else s.value / float(rate) ** s.n)
        for s in trailing
    ]
    fit.constant_estimate = scaled[-1][1]
    c_ref = _aitken(scaled[-3][1], scaled[-2][1], scaled[-1][1])

    half = math.ceil(n_max / 2)
    floor = tol["noise_floor_factor"] * EPS
    xs, ys = [], []
    for n, s in scaled:
        if n <= n_max - half:
            continue
        err = abs(float(s / c_ref - 1))
        if math.isfinite(err) and err > floor:
            xs.append(n)
            ys.append(math.log(err))
    fit.slope_samples = len(xs)
    fit.error_slope = _least_squares_slope(xs, ys) if len(xs) >= 2 else -math.inf

    rate_ok = fit.rate_error < tol["tol_rate"]
    if theoretical_slope == -math.inf:
        slope_ok = fit.error_slope == -math.inf
    else:
        slope_ok = fit.error_slope <= theoretical_slope + tol["tol_slope_factor"] * abs(theoretical_slope)
    fit.status = PASS if rate_ok and slope_ok else FAIL
    return fit


def _merged_tolerances(overrides: dict | None) -> dict:
    tol = default_tolerances()
    if overrides:
        unknown = set(overrides) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")
        tol.update(overrides)
    return tol


def _require_pole_table(table: CoefficientTable) -> PoleModel:
    if table.provenance != POLES or table.model is None:
        raise ValueError("asymptotic fits need a pole-provenance table")
    return table.model


def _column_rho(model: PoleModel, col: int, j: int) -> Fraction:
    count = len(model.all_poles(col)[0])
    return model.rho(col, min(j, count))


def verify_theorem2(
    table: CoefficientTable,
    k: int,
    j: int,
    n_max: int,
    tolerances: dict | None = None,
) -> AsymptoticFit:
    """Fit ``C_{k,j}^(n)`` against the rate ``r_1 ... r_j`` of a shared-pole model."""
    model = _require_pole_table(table)
    tol = _merged_tolerances(tolerances)
    if not model.is_shared:
        raise ValueError("verify_theorem2 needs a shared-pole model")
    if j < 1 or j > model.dominant_count(k):
        raise ValueError(f"j={j} must lie in 1..{model.dominant_count(k)} (dominant poles)")
    poles = model.column(k)[0]
    rate = math.prod(poles[:j], start=Fraction(1))
    slope = max(
        math.log(_column_rho(model, k + ell, j) / abs(poles[j - 1])) for ell in range(j)
    )
    return _fit("theorem2", table, k, j, n_max, rate, slope, tol)


@dataclass(frozen=True)
class KappaGroup:
    """All kappa-tuples sharing one exponential rate, with their summed constant."""

    rate: Fraction
    constant: Fraction
    tuples: tuple[tuple[int, ...], ...]


def _column_poles(model: PoleModel, col: int, j: int):
    poles, coeffs = model.all_poles(col)
    return poles[: min(j, len(poles))], coeffs[: min(j, len(poles))]


def kappa_constant(model: PoleModel, k: int, kappa: Sequence[int]) -> Fraction:
    """``c_{kappa_1..kappa_j}``: the n-independent determinant factor of a D-term.

    ``kappa`` is 1-based; entry (p, q) is ``c r^(k+q+1+p)`` for pole ``kappa_q``
    of column ``k+q``.
    """
    j = len(kappa)
    cols = [model.all_poles(k + q) for q in range(j)]
    mat = [
        [cols[q][1][kappa[q] - 1] * cols[q][0][kappa[q] - 1] ** (k + q + 1 + p) for q in range(j)]
        for p in range(j)
    ]
    return det_exact(mat)


def kappa_groups(model: PoleModel, k: int, j: int) -> list[KappaGroup]:
    """Exponential rates of the dominant-pole expansion, largest modulus first.

    Tuples range over the first ``j`` poles of each column.  Groups whose
    constants cancel to zero are dropped.
    """
    per_col = [_column_poles(model, k + q, j)[0] for q in range(j)]
    groups: dict[Fraction, list] = {}
    for kappa in itertools.product(*(range(1, len(p) + 1) for p in per_col)):
        rate = math.prod((per_col[q][kappa[q] - 1] for q in range(j)), start=Fraction(1))
        c = kappa_constant(model, k, kappa)
        entry = groups.setdefault(rate, [Fraction(0), []])
        entry[0] += c
        entry[1].append(kappa)
    out = [KappaGroup(r, c, tuple(ts)) for r, (c, ts) in groups.items() if c != 0]
    out.sort(key=lambda g: (-abs(g.rate), -g.rate))
    return out


def verify_theorem1(
    table: CoefficientTable,
    k: int,
    j: int,
    n_max: int,
    tolerances: dict | None = None,
) -> AsymptoticFit:
    """Fit ``C_{k,j}^(n)`` for per-column poles against the dominant kappa-tuple.

    The predicted error slope is the worse of the remainder terms of the
    dominant tuple and the ratio to the next surviving tuple rate.
    """
    model = _require_pole_table(table)
    tol = _merged_tolerances(tolerances)
    if j < 1:
        raise ValueError("j must be >= 1")
    groups = kappa_groups(model, k, j)
    if not groups:
        return AsymptoticFit(
            "theorem1", k, j, n_max, math.nan, math.nan, math.nan, math.nan, math.nan,
            DEGENERATE, detail="every kappa-tuple constant vanishes", tolerances=tol,
        )
    dom = groups[0]
    slopes = []
    for kappa in dom.tuples:
        for q in range(j):
            col = k + q
            r = model.all_poles(col)[0][kappa[q] - 1]
            slopes.append(math.log(_column_rho(model, col, j) / abs(r)))
    if len(groups) > 1:
        slopes.append(math.log(abs(groups[1].rate) / abs(dom.rate)))
    slope = max(slopes)
    detail = f"dominant kappa-tuples {list(dom.tuples)}"
    if len(groups) > 1 and abs(dom.rate) / abs(groups[1].rate) < 1 + tol["tol_tie"]:
        fit = _fit("theorem1", table, k, j, n_max, dom.rate, slope, tol, detail)
        fit.status = NEAR_TIE
        fit.detail = f"{detail}; next rate {groups[1].rate} within tie tolerance"
        return fit
    return _fit("theorem1", table, k, j, n_max, dom.rate, slope, tol, detail)


def expand_casorati_terms(
    table: CoefficientTable, k: int, j: int, n: int
) -> list[tuple[tuple[int, ...], Fraction]]:
    """Every ``D_{k,kappa}^(n)`` of a tail-free model, checked against ``C_{k,j}^(n)``.

    Raises :class:`IdentityViolation` if the terms do not sum to the Casorati
    determinant or a term differs from ``c_kappa * (prod r)^n``.
    """
    model = _require_pole_table(table)
    if table.mode != EXACT:
        raise ValueError("term expansion needs an exact table")
    if model.has_tail:
        raise ValueError("term expansion needs a tail-free model")
    if not 1 <= j <= 4:
        raise ValueError("term expansion supports 1 <= j <= 4")
    cols = [model.all_poles(k + q) for q in range(j)]
    terms = []
    for kappa in itertools.product(*(range(1, len(c[0]) + 1) for c in cols)):
        picks = [(cols[q][0][kappa[q] - 1], cols[q][1][kappa[q] - 1]) for q in range(j)]
        mat = [[c * r ** (n + k + q + 1 + p) for q, (r, c) in enumerate(picks)] for p in range(j)]
        value = det_exact(mat)
        closed = kappa_constant(model, k, kappa) * math.prod((r for r, _ in picks), start=Fraction(1)) ** n
        if value != closed:
            raise IdentityViolation(f"D-term {kappa} = {value} but c_kappa * rate^n = {closed}")
        terms.append((kappa, value))
    total = sum((v for _, v in terms), Fraction(0))
    expected = casorati_det(table, k, j, n)
    if total != expected:
        raise IdentityViolation(f"sum of D-terms {total} != C_{{{k},{j}}}^({n}) = {expected}")
    return terms


def pole_table(model: PoleModel, k_max: int, j_max: int, n_max: int, mode: str = EXACT) -> CoefficientTable:
    """Pole table wide and tall enough for ``C_{k,j}^(n)``, k <= k_max, j <= j_max, n <= n_max."""
    return build_table(model, k_max + j_max, n_max + j_max - 1, mode)
