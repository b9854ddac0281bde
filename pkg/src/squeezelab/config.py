"""Scenario configuration files (TOML).

A config looks like::

    [model]
    name = "squeezing"          # reference | squeezing | optical | table
    params = { omega = 1.0, s0 = 2.0, t_star = 1.0, g = 1.0, c = 2.0 }
    # table = "coeffs.csv"      # only for name = "table"

    [scenario]
    t_star = 1.0
    beta = "1.0,0.5"            # complex numbers are "re,im"
    split = "example_symmetric"
    horizon = [0.001, 2.0]      # optional
    rel_tol = 1e-10             # optional

    [initial]                   # optional, used by `simulate`
    kind = "privileged"         # privileged | coherent | vacuum | thermal | gaussian

    [entropy]
    epsilon = 1e-3

    [secure]
    eavesdrop_times = [0.7, 1.3]

    [oracle]                    # optional, used by `validate`
    N = 40
    dt = 1e-3
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .algebra import SPLIT_STRATEGIES
from .errors import ConfigError
from .gaussian import GaussianState, coherent, thermal, vacuum
from .model import (
    QdeCoefficients,
    load_table_model,
    make_optical_model,
    make_reference_model,
    make_squeezing_model,
)

__all__ = ["ScenarioConfig", "load_config", "parse_config", "parse_complex", "MODEL_NAMES"]

MODEL_NAMES = ("reference", "squeezing", "optical", "table")
INITIAL_KINDS = ("privileged", "coherent", "vacuum", "thermal", "gaussian")

_MODEL_PARAMS = {
    "reference": {"omega", "g", "c", "t_min"},
    "squeezing": {"omega", "s0", "t_star", "g", "c", "t_min"},
    "optical": {"gamma", "nbar", "t_min"},
    "table": {"hbar", "t_min"},
}


def parse_complex(value: Any, key: str = "value") -> complex:
    """Parse ``"re,im"`` (or a bare real number) into a complex number."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if isinstance(value, str):
        parts = value.split(",")
        try:
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected a complex number written as 're,im', got {value!r}")


def _require(section: dict, key: str, where: str) -> Any:
    if key not in section:
        raise ConfigError(f"missing required key '{where}.{key}'")
    return section[key]


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ScenarioConfig:
    model_name: str
    model_params: dict
    t_star: float
    beta: complex = 0j
    split: str = "example_symmetric"
    horizon: tuple[float, float] | None = None
    rel_tol: float = 1e-10
    epsilon: float = 1e-3
    eavesdrop_times: tuple[float, ...] = ()
    initial: dict = field(default_factory=lambda: {"kind": "privileged"})
    oracle_n: int = 40
    oracle_dt: float = 1e-3
    table_path: Path | None = None
    sha256: str = ""

    def build_model(self) -> QdeCoefficients:
        p = dict(self.model_params)
        try:
            if self.model_name == "reference":
                return make_reference_model(**p)
            if self.model_name == "squeezing":
                return make_squeezing_model(**p)
            if self.model_name == "optical":
                return make_optical_model(**p)
            return load_table_model(self.table_path, **p)
        except ValueError as exc:
            raise ConfigError(f"model.params: {exc}") from exc

    def time_window(self, coeffs: QdeCoefficients) -> tuple[float, float]:
        if self.horizon is not None:
            return self.horizon
        hi = 2.0 * self.t_star
        if math.isfinite(coeffs.t_max):
            hi = min(hi, coeffs.t_max)
        return coeffs.t_min, hi

    def check_times(self, coeffs: QdeCoefficients, times, key: str) -> None:
        lo, hi = self.time_window(coeffs)
        for t in times:
            if not lo <= t <= hi:
                raise ConfigError(f"{key}: time {t} outside [{lo}, {hi}]")

    def initial_state(self, coeffs: QdeCoefficients, traj=None) -> GaussianState:
        from .channels import privileged_state

        init = self.initial
        kind = init.get("kind", "privileged")
        hbar = coeffs.hbar
        if kind == "privileged":
            return privileged_state(coeffs, self.t_star, self.beta, self.split, traj)
        if kind == "coherent":
            return coherent(parse_complex(init.get("alpha", "0,0"), "initial.alpha"), hbar)
        if kind == "vacuum":
            return vacuum(hbar)
        if kind == "thermal":
            return thermal(_number(init.get("nbar", 0.0), "initial.nbar"), hbar)
        mean = _require(init, "mean", "initial")
        cov = _require(init, "cov", "initial")
        try:
            return GaussianState(mean, cov, hbar)
        except ValueError as exc:
            raise ConfigError(f"initial: {exc}") from exc


def parse_config(data: dict, base_dir: Path | None = None, sha256: str = "") -> ScenarioConfig:
    """Validate a decoded config mapping."""
    model = _require(data, "model", "")
    if not isinstance(model, dict):
        raise ConfigError("[model] must be a table")
    name = _require(model, "name", "model")
    if name not in MODEL_NAMES:
        raise ConfigError(f"model.name: unknown model {name!r}; choose from {MODEL_NAMES}")
    params = dict(model.get("params", {}))
    unknown = set(params) - _MODEL_PARAMS[name]
    if unknown:
        raise ConfigError(f"model.params: unknown keys {sorted(unknown)} for model {name!r}")
    params = {k: _number(v, f"model.params.{k}") for k, v in params.items()}
    table_path = None
    if name == "table":
        table_path = Path(_require(model, "table", "model"))
        if base_dir is not None and not table_path.is_absolute():
            table_path = base_dir / table_path

    scen = _require(data, "scenario", "")
    t_star = _number(_require(scen, "t_star", "scenario"), "scenario.t_star")
    if not t_star > 0:
        raise ConfigError("scenario.t_star must be positive")
    if name == "squeezing":
        params.setdefault("t_star", t_star)
    split = scen.get("split", "example_symmetric")
    if split not in SPLIT_STRATEGIES:
        raise ConfigError(f"scenario.split: unknown strategy {split!r}; choose from {SPLIT_STRATEGIES}")
    horizon = scen.get("horizon")
    if horizon is not None:
        if not (isinstance(horizon, list) and len(horizon) == 2):
            raise ConfigError("scenario.horizon must be a two-element list [lo, hi]")
        horizon = (_number(horizon[0], "scenario.horizon"), _number(horizon[1], "scenario.horizon"))
        if not 0 <= horizon[0] < t_star < horizon[1]:
            raise ConfigError("scenario.horizon must bracket t_star")
    rel_tol = _number(scen.get("rel_tol", 1e-10), "scenario.rel_tol")
    if not 1e-12 <= rel_tol <= 1e-4:
        raise ConfigError("scenario.rel_tol must lie in [1e-12, 1e-4]")

    ent = data.get("entropy", {})
    epsilon = _number(ent.get("epsilon", 1e-3), "entropy.epsilon")
    if not epsilon > 0:
        raise ConfigError("entropy.epsilon must be positive")

    sec = data.get("secure", {})
    eaves = tuple(_number(t, "secure.eavesdrop_times") for t in sec.get("eavesdrop_times", ()))
    if any(t == t_star for t in eaves):
        raise ConfigError("secure.eavesdrop_times must differ from scenario.t_star")

    initial = dict(data.get("initial", {"kind": "privileged"}))
    if initial.get("kind", "privileged") not in INITIAL_KINDS:
        raise ConfigError(f"initial.kind: unknown kind {initial.get('kind')!r}; choose from {INITIAL_KINDS}")

    oracle = data.get("oracle", {})
    oracle_n = oracle.get("N", 40)
    if isinstance(oracle_n, bool) or not isinstance(oracle_n, int) or not 8 <= oracle_n <= 200:
        raise ConfigError("oracle.N must be an integer in [8, 200]")
    oracle_dt = _number(oracle.get("dt", 1e-3), "oracle.dt")
    if not 0 < oracle_dt <= 0.1:
        raise ConfigError("oracle.dt must lie in (0, 0.1]")

    cfg = ScenarioConfig(
        model_name=name,
        model_params=params,
        t_star=t_star,
        beta=parse_complex(scen.get("beta", 0.0), "scenario.beta"),
        split=split,
        horizon=horizon,
        rel_tol=rel_tol,
        epsilon=epsilon,
        eavesdrop_times=eaves,
        initial=initial,
        oracle_n=oracle_n,
        oracle_dt=oracle_dt,
        table_path=table_path,
        sha256=sha256,
    )
    coeffs = cfg.build_model()
    cfg.check_times(coeffs, [t_star, *eaves], "scenario")
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a TOML config; the digest of the raw bytes is kept for provenance."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: not valid TOML ({exc})") from exc
    return parse_config(data, path.parent, hashlib.sha256(raw).hexdigest())
