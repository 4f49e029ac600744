"""Experiment runners: each returns a :class:`RunResult` ready for serialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .asymptotics import (
    PASS,
    AsymptoticFit,
    expand_casorati_terms,
    pole_table,
    verify_theorem1,
    verify_theorem2,
)
from .config import ASYMPTOTIC_TOLERANCES, CONVERGENCE_TOLERANCES, ExperimentConfig
from .determinants import casorati_det, check_g_equals_casorati, check_tau_factorization
from .dhlv import (
    MIN_TRAJECTORY,
    DhlvState,
    convergence_check,
    dhlv_step,
    dhlv_table,
    seed_from_poles,
    simulate,
    u_from_v,
    v_from_determinants,
    v_from_tau,
    v_from_u,
)
from .errors import CasoratianError
from .numeric import EXACT, format_scalar, to_mode

ERROR = "ERROR"
SKIPPED = "SKIPPED"
OUT_OF_SCOPE = "OUT_OF_SCOPE"


def render(value):
    """JSON-ready form of a scalar or nested container; scalars become strings."""
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    if value is None or isinstance(value, (str, bool)):
        return value
    return format_scalar(value)


@dataclass
class Check:
    name: str
    status: str = PASS
    lhs: object = None
    rhs: object = None
    tolerance: object = "0"
    detail: str = ""
    asserted: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "lhs": render(self.lhs),
            "rhs": render(self.rhs),
            "tolerance": render(self.tolerance),
            "detail": self.detail,
            "asserted": self.asserted,
        }
        out.update(render(self.extra))
        return out


@dataclass
class RunResult:
    config_echo: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    fits: list[AsymptoticFit] = field(default_factory=list)
    csv_header: list[str] = field(default_factory=lambda: ["n"])
    csv_rows: list[list] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status == PASS for c in self.checks if c.asserted) and all(
            f.status == PASS for f in self.fits
        )


def fit_to_json(fit: AsymptoticFit) -> dict:
    return {
        "indices": {"k": fit.k, "j": fit.j},
        "theorem": fit.theorem,
        "n_max": fit.n_max,
        "observed_rate": render(fit.observed_rate),
        "theoretical_rate": render(fit.theoretical_rate),
        "rate_error": render(fit.rate_error),
        "error_slope": render(fit.error_slope),
        "theoretical_slope": render(fit.theoretical_slope),
        "constant_estimate": render(fit.constant_estimate),
        "slope_samples": fit.slope_samples,
        "status": fit.status,
        "detail": fit.detail,
        "tolerances": render(fit.tolerances),
    }


def _error_payload(exc: Exception) -> dict:
    if hasattr(exc, "payload"):
        return exc.payload()
    return {"error": type(exc).__name__, "message": str(exc)}


class _Aggregate:
    """Folds many exact instances of one identity into a single check."""

    def __init__(self, name: str):
        self.check = Check(name)
        self.count = 0

    def add(self, ok: bool, lhs, rhs, where: str) -> None:
        self.count += 1
        if self.check.status != PASS:
            return
        self.check.lhs, self.check.rhs = lhs, rhs
        if not ok:
            self.check.status = "FAIL"
            self.check.detail = f"first mismatch at {where}"

    def fail(self, exc: Exception, where: str) -> None:
        if self.check.status == PASS:
            self.check.status = ERROR
            self.check.detail = f"{exc} at {where}"
            self.check.extra["error"] = _error_payload(exc)

    def done(self) -> Check:
        if self.check.status == PASS:
            self.check.detail = f"{self.count} instances agree exactly"
        return self.check


def identity_checks(cfg: ExperimentConfig) -> tuple[list[Check], list[str], list[list]]:
    """The five exact identity checks on a recurrence table, plus the ``u``/``v`` CSV rows."""
    M, m, n_max, delta = cfg.M, cfg.m, cfg.n_max, cfg.delta
    table = dhlv_table(cfg.model, M, m, delta, n_max + 1, EXACT)
    lemma2 = _Aggregate("lemma2")
    taus = _Aggregate("tau-factorization")
    g_eq_c = _Aggregate("g-equals-casorati")
    round_trip = _Aggregate("round-trip")
    step = _Aggregate("step-consistency")

    states: dict[int, DhlvState] = {}
    auxes = {}
    for n in range(n_max + 2):
        where = f"n={n}"
        try:
            aux = v_from_determinants(table, M, m, n)
            auxes[n] = aux
            states[n] = u_from_v(aux, delta.at(n))
        except CasoratianError as exc:
            lemma2.fail(exc, where)
            round_trip.fail(exc, where)
            step.fail(exc, where)
            continue
        if n > n_max:
            continue
        try:
            by_tau = v_from_tau(table, M, m, n)
            lemma2.add(by_tau.v == aux.v, list(aux.v), list(by_tau.v), where)
        except CasoratianError as exc:
            lemma2.fail(exc, where)
        back = v_from_u(states[n], delta.at(n))
        round_trip.add(back.v == aux.v, list(aux.v), list(back.v), where)
        for jj in range(m + 1):
            for i in range(M + 1):
                c = check_tau_factorization(table, jj, i, n, M)
                taus.add(c.passed, c.lhs, c.rhs, c.detail)
        for i in range(M + 1):
            for jj in range(m + 1):
                c = check_g_equals_casorati(table, i, jj, n, M)
                g_eq_c.add(c.passed, c.lhs, c.rhs, c.detail)

    for n in range(n_max + 1):
        if n not in states or n + 1 not in states:
            continue
        where = f"n={n}"
        try:
            stepped = dhlv_step(states[n], delta.at(n), delta.at(n + 1))
            step.add(stepped.u == states[n + 1].u, list(states[n + 1].u), list(stepped.u), where)
        except CasoratianError as exc:
            step.fail(exc, where)

    size = len(next(iter(states.values())).u) if states else 0
    header = ["n"] + [f"u{k}" for k in range(size)] + [f"v{k}" for k in range(M, M + size)]
    rows = [[n, *states[n].u, *auxes[n].v] for n in sorted(states)]
    checks = [lemma2.done(), taus.done(), g_eq_c.done(), round_trip.done(), step.done()]
    return checks, header, rows


def _subset(tol: dict, keys) -> dict:
    return {k: v for k, v in tol.items() if k in keys}


def run_fits(
    cfg: ExperimentConfig, n_max: int, mode: str
) -> tuple[list[AsymptoticFit], list[str], list[list]]:
    """Rate fits on determinants of the pole table evaluated in ``mode``; the fit runs in floats."""
    model = cfg.model
    k_max = max(k for k, _ in cfg.fits)
    j_max = max(j for _, j in cfg.fits)
    table = pole_table(model, k_max, j_max, n_max, mode)
    tol = _subset(cfg.tolerances, ASYMPTOTIC_TOLERANCES)
    fits = []
    for k, j in cfg.fits:
        if model.is_shared and j <= model.dominant_count(k):
            fits.append(verify_theorem2(table, k, j, n_max, tol))
        else:
            fits.append(verify_theorem1(table, k, j, n_max, tol))
    header = ["n"] + [f"C_{k}_{j}" for k, j in cfg.fits]
    rows = [
        [n, *(casorati_det(table, k, j, n) for k, j in cfg.fits)]
        for n in range(n_max + 1)
    ]
    return fits, header, rows


def term_checks(cfg: ExperimentConfig) -> list[Check]:
    """Sum of kappa-terms equals the Casorati determinant, for tail-free models and j <= 4."""
    model = cfg.model
    if model.has_tail:
        return []
    k_max = max(k for k, _ in cfg.fits)
    j_max = max(j for _, j in cfg.fits)
    table = pole_table(model, k_max, j_max, 2, EXACT)
    agg = _Aggregate("term-decomposition")
    for k, j in cfg.fits:
        if j > 4:
            continue
        for n in range(3):
            where = f"k={k}, j={j}, n={n}"
            try:
                terms = expand_casorati_terms(table, k, j, n)
            except CasoratianError as exc:
                agg.fail(exc, where)
                continue
            total = sum((v for _, v in terms), Fraction(0))
            expected = casorati_det(table, k, j, n)
            agg.add(total == expected, total, expected, where)
    return [agg.done()] if agg.count or agg.check.status != PASS else []


def convergence_entry(cfg: ExperimentConfig, state: DhlvState, steps: int):
    """Simulate ``steps`` steps and classify the limits; returns the check and CSV."""
    M, m = state.M, state.m
    trajectory = simulate(state, cfg.delta, steps, cfg.mode)
    size = len(state.u)
    header = ["n"] + [f"u{k}" for k in range(size)] + [f"v{k}" for k in range(M, M + size)]
    rows = [[s.n, *s.u, *a.v] for s, a in trajectory]
    tol = _subset(cfg.tolerances, CONVERGENCE_TOLERANCES)
    if len(trajectory) < MIN_TRAJECTORY:
        check = Check("convergence", SKIPPED, asserted=False,
                      detail=f"needs at least {MIN_TRAJECTORY} states, have {len(trajectory)}")
        return check, header, rows
    rep = convergence_check(trajectory, cfg.delta, tol)
    delta = cfg.delta.limit
    scaled = {}
    if delta is not None and delta != 0:
        scaled = {j: c / float(delta) ** M for j, c in rep.c_hat.items()}
    check = Check(
        "convergence",
        rep.status,
        lhs=rep.c_bar,
        rhs=scaled,
        tolerance=rep.tolerances,
        detail=rep.detail or f"survive/vanish pattern matches for M={M}, m={m}",
        asserted=rep.status != OUT_OF_SCOPE,
        extra={
            "u_classes": rep.u_classes,
            "v_classes": rep.v_classes,
            "cross_check": rep.cross_check,
            "decay_rates": rep.decay_rates,
        },
    )
    return check, header, rows


def _initial_state(cfg: ExperimentConfig) -> DhlvState:
    if cfg.seed is not None:
        return DhlvState(cfg.M, cfg.m, 0, tuple(to_mode(x, cfg.mode) for x in cfg.seed))
    return seed_from_poles(cfg.model, cfg.M, cfg.m, cfg.delta, cfg.mode)


def _seed_error(cfg: ExperimentConfig, exc: Exception) -> RunResult:
    check = Check("seed", ERROR, detail=str(exc), extra={"error": _error_payload(exc)})
    return RunResult(cfg.echo(), [check])


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    result = RunResult(cfg.echo())
    kind = cfg.experiment
    if kind == "verify-identities":
        result.checks, result.csv_header, result.csv_rows = identity_checks(cfg)
    elif kind == "asymptotics":
        result.fits, result.csv_header, result.csv_rows = run_fits(cfg, cfg.n_max, cfg.mode)
        if cfg.mode == EXACT:
            result.checks = term_checks(cfg)
    elif kind == "simulate":
        try:
            state = _initial_state(cfg)
        except CasoratianError as exc:
            return _seed_error(cfg, exc)
        check, result.csv_header, result.csv_rows = convergence_entry(cfg, state, cfg.n_max)
        result.checks = [check]
    else:
        checks, _, _ = identity_checks(cfg)
        try:
            state = _initial_state(cfg)
        except CasoratianError as exc:
            bad = _seed_error(cfg, exc)
            bad.checks = checks + bad.checks
            return bad
        check, result.csv_header, result.csv_rows = convergence_entry(cfg, state, cfg.sim_steps)
        result.checks = checks + [check]
        result.fits, _, _ = run_fits(cfg, cfg.fit_n_max, EXACT)
    return result
