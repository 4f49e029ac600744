"""Experiment configuration: JSON in, validated :class:`ExperimentConfig` out."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .numeric import EXACT, FLOAT, MODES, format_scalar, parse_scalar
from .series import DeltaSchedule, PoleModel

ASYMPTOTIC_TOLERANCES = (
    "tol_rate", "tol_slope_factor", "tol_tie", "noise_floor_factor", "max_rel_error", "window",
)
CONVERGENCE_TOLERANCES = ("zero_threshold", "constant_rel_tol", "cross_check_rel_tol", "delta_min")

KINDS = ("verify-identities", "asymptotics", "simulate", "full-pipeline")

REQUIRED = {
    "verify-identities": ("M", "m", "n_max", "model", "delta"),
    "asymptotics": ("n_max", "model", "fits"),
    "simulate": ("M", "m", "n_max", "delta"),
    "full-pipeline": ("M", "m", "n_max", "model", "delta"),
}

DEFAULT_FITS = ((0, 1), (0, 2))
DEFAULT_SIM_STEPS = 200
DEFAULT_FIT_N_MAX = 40


@dataclass
class ExperimentConfig:
    experiment: str
    mode: str = EXACT
    M: int | None = None
    m: int | None = None
    n_max: int | None = None
    model: PoleModel | None = None
    seed: tuple | None = None
    delta: DeltaSchedule | None = None
    fits: tuple[tuple[int, int], ...] = ()
    sim_steps: int = DEFAULT_SIM_STEPS
    fit_n_max: int = DEFAULT_FIT_N_MAX
    tolerances: dict = field(default_factory=dict)
    report_name: str = "report.json"
    csv_name: str = "trajectory.csv"
    out_dir: str | None = None
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Normalized, JSON-ready view of the configuration."""
        out = {"experiment": self.experiment, "mode": self.mode}
        for key in ("M", "m", "n_max"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.model is not None:
            out["model"] = self.model.to_json()
        if self.seed is not None:
            out["seed"] = [format_scalar(x) for x in self.seed]
        if self.delta is not None:
            out["delta"] = self.delta.to_json()
        if self.fits:
            out["fits"] = [{"k": k, "j": j} for k, j in self.fits]
        if self.experiment == "full-pipeline":
            out["sim_steps"] = self.sim_steps
            out["fit_n_max"] = self.fit_n_max
        out["tolerances"] = dict(self.tolerances)
        return out


def _int(raw: dict, key: str, minimum: int) -> int | None:
    if key not in raw:
        return None
    value = raw[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{key!r} must be an integer >= {minimum}, got {value!r}")
    return value


def parse_delta(raw) -> DeltaSchedule:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("'delta' must be an object with a 'kind'")
    kind = raw["kind"]
    try:
        if kind == "constant":
            return DeltaSchedule.constant(parse_scalar(raw["value"]))
        if kind == "harmonic":
            return DeltaSchedule.harmonic(
                parse_scalar(raw["base"]), parse_scalar(raw.get("scale", 1)), int(raw.get("offset", 1))
            )
        if kind == "sequence":
            limit = raw.get("limit")
            return DeltaSchedule.sequence(
                [parse_scalar(v) for v in raw["values"]],
                parse_scalar(limit) if limit is not None else None,
            )
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad delta schedule {raw!r}: {exc}") from exc
    raise ConfigError(f"unknown delta kind {kind!r}")


def parse_model(raw) -> PoleModel:
    if not isinstance(raw, dict) or "poles" not in raw:
        raise ConfigError("'model' must be an object with 'poles'")
    unknown = set(raw) - {"poles", "coefficients", "tail_poles", "tail_coefficients"}
    if unknown:
        raise ConfigError(f"unknown model keys {sorted(unknown)}")
    try:
        return PoleModel(
            poles=raw["poles"],
            coefficients=raw.get("coefficients", 1),
            tail_poles=raw.get("tail_poles", []),
            tail_coefficients=raw.get("tail_coefficients", 1),
        )
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad pole model: {exc}") from exc


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate every field the chosen experiment needs before any computation."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    kind = raw.get("experiment")
    if kind not in KINDS:
        raise ConfigError(f"'experiment' must be one of {KINDS}, got {kind!r}")
    missing = [key for key in REQUIRED[kind] if key not in raw]
    if kind == "simulate" and "model" not in raw and "seed" not in raw:
        missing.append("model|seed")
    if missing:
        raise ConfigError(f"{kind} config is missing {missing}")

    cfg = ExperimentConfig(experiment=kind, raw=raw)
    cfg.mode = raw.get("mode", FLOAT if kind in ("simulate", "full-pipeline") else EXACT)
    if cfg.mode not in MODES:
        raise ConfigError(f"'mode' must be one of {MODES}")
    cfg.M = _int(raw, "M", 1)
    cfg.m = _int(raw, "m", 1)
    cfg.n_max = _int(raw, "n_max", 0)
    if "model" in raw:
        cfg.model = parse_model(raw["model"])
    if "seed" in raw:
        if kind != "simulate":
            raise ConfigError("'seed' is only accepted by simulate")
        if "model" in raw:
            raise ConfigError("give either 'model' or 'seed', not both")
        try:
            cfg.seed = tuple(parse_scalar(x) for x in raw["seed"])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad seed: {exc}") from exc
        size = (cfg.M + 1) * cfg.m - cfg.M
        if len(cfg.seed) != size:
            raise ConfigError(f"seed needs (M+1)m-M = {size} values, got {len(cfg.seed)}")
    if "delta" in raw:
        cfg.delta = parse_delta(raw["delta"])
    if "fits" in raw:
        try:
            cfg.fits = tuple((int(f["k"]), int(f["j"])) for f in raw["fits"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad fits list: {exc}") from exc
        if any(k < 0 or j < 1 for k, j in cfg.fits):
            raise ConfigError("fits need k >= 0 and j >= 1")
        if kind == "asymptotics" and not cfg.fits:
            raise ConfigError("asymptotics needs at least one fit")
    elif kind == "full-pipeline":
        cfg.fits = DEFAULT_FITS
    cfg.sim_steps = _int(raw, "sim_steps", 0) or DEFAULT_SIM_STEPS
    cfg.fit_n_max = _int(raw, "fit_n_max", 0) or DEFAULT_FIT_N_MAX
    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown = set(tol) - set(ASYMPTOTIC_TOLERANCES) - set(CONVERGENCE_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
    cfg.tolerances = dict(tol)
    out = raw.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("'output' must be an object")
    cfg.report_name = out.get("report", cfg.report_name)
    cfg.csv_name = out.get("csv", cfg.csv_name)
    cfg.out_dir = out.get("dir")
    if kind == "verify-identities" and cfg.mode != EXACT:
        raise ConfigError("verify-identities runs in exact mode only")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
