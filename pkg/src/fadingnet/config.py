"""Flat key-value run configuration.

A config file is TOML (or JSON) with only top-level scalar keys plus the
``n_grid`` list, for example::

    dist = "rayleigh"
    mu = 1.0
    n_grid = [1000, 10000]
    trials = 200
    seed = 7
    zeta_rule = "scaled"
    zeta_value = 0.1
    zeta_shape = "log_n_over_n"

Flags override file values; ``FADINGNET_SEED`` is consulted only when
neither supplies a seed.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .asymptotics import TheoremParams
from .distributions import ChannelModel, DomainError
from .experiments import M_RULES, ZETA_RULES, ZETA_SHAPES, ExperimentConfig, MRule, ZetaRule

SEED_ENV = "FADINGNET_SEED"

DEFAULTS = {
    "beta": 1.0,
    "n0": 1.0,
    "k_const": 1.5,
    "delta1": 0.05,
    "delta2": 0.05,
    "delta3": 0.05,
    "m_min": 1,
    "m_rule": "solver",
    "zeta_rule": "zero",
    "count_unexpected": True,
}

KEYS = {
    "dist", "mu", "alpha", "n_grid", "trials", "seed",
    "m_rule", "m_value", "m_exponent",
    "zeta_rule", "zeta_value", "zeta_shape", "zeta_exponent",
    "beta", "n0", "k_const", "delta1", "delta2", "delta3", "m_min", "count_unexpected",
}
REQUIRED = ("dist", "n_grid", "trials", "seed")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class UnknownKeyError(ConfigError):
    pass


class MissingKeyError(ConfigError):
    pass


class InvalidValueError(ConfigError):
    pass


def load_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"no such file {path}")
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a key-value table")
    return data


def merge(file_values: dict, overrides: dict, env=None) -> dict:
    """Flags over file; a ``None`` override deletes the key."""
    out = dict(file_values)
    for k, v in overrides.items():
        if v is None:
            out.pop(k, None)
        else:
            out[k] = v
    env = os.environ if env is None else env
    if "seed" not in out and env.get(SEED_ENV):
        try:
            out["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise InvalidValueError("seed", f"{SEED_ENV}={env[SEED_ENV]!r} is not an integer") from None
    return out


def parse_config(path=None, overrides=None, env=None) -> ExperimentConfig:
    values = load_file(path) if path is not None else {}
    return config_from_mapping(merge(values, overrides or {}, env))


def _number(d, key, kind=float, positive=False):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidValueError(key, f"expected a number, got {v!r}")
    if kind is int:
        if isinstance(v, float) and not v.is_integer():
            raise InvalidValueError(key, f"expected an integer, got {v!r}")
        v = int(v)
    elif not math.isfinite(v):
        raise InvalidValueError(key, f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise InvalidValueError(key, f"must be positive, got {v!r}")
    return kind(v)


def _choice(d, key, options):
    v = d[key]
    if v not in options:
        raise InvalidValueError(key, f"must be one of {', '.join(options)}, got {v!r}")
    return v


def config_from_mapping(d: dict) -> ExperimentConfig:
    """Validate a flat mapping and build the resolved config."""
    unknown = sorted(set(d) - KEYS)
    if unknown:
        raise UnknownKeyError(unknown[0], "unknown key")
    for key in REQUIRED:
        if key not in d:
            raise MissingKeyError(key, "required")
    d = {**DEFAULTS, **d}

    dist = _choice(d, "dist", ("rayleigh", "pareto"))
    if dist == "rayleigh":
        if "alpha" in d:
            raise InvalidValueError("alpha", "not a rayleigh parameter")
        model = ChannelModel.rayleigh(_number({"mu": d.get("mu", 1.0)}, "mu", positive=True))
    else:
        if "mu" in d:
            raise InvalidValueError("mu", "derived from alpha for pareto gains")
        if "alpha" not in d:
            raise MissingKeyError("alpha", "required for pareto gains")
        alpha = _number(d, "alpha")
        if not alpha > 1:
            raise InvalidValueError("alpha", f"must exceed 1, got {alpha}")
        if alpha <= 2 and d["m_rule"] == "solver":
            raise InvalidValueError("alpha", f"alpha must exceed 2 for the solver m rule, got {alpha}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = ChannelModel.pareto(alpha)

    grid = d["n_grid"]
    if isinstance(grid, (int, float)) and not isinstance(grid, bool):
        grid = [grid]
    if not isinstance(grid, list) or not grid:
        raise InvalidValueError("n_grid", "expected a nonempty list of integers")
    ns = [_number({"n_grid": v}, "n_grid", int) for v in grid]
    if any(n < 2 for n in ns):
        raise InvalidValueError("n_grid", "every n must be at least 2")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidValueError("n_grid", "must be strictly ascending")

    trials = _number(d, "trials", int)
    if trials < 1:
        raise InvalidValueError("trials", "must be at least 1")
    seed = _number(d, "seed", int)
    if not 0 <= seed < 2**64:
        raise InvalidValueError("seed", "must be a 64-bit unsigned integer")

    m_kind = _choice(d, "m_rule", M_RULES)
    m_value = _number(d, "m_value") if "m_value" in d else None
    m_exp = _number(d, "m_exponent") if "m_exponent" in d else None
    if m_kind != "solver" and m_value is None:
        raise MissingKeyError("m_value", f"required for m_rule={m_kind}")
    if m_kind == "c_power" and m_exp is None:
        raise MissingKeyError("m_exponent", "required for m_rule=c_power")
    try:
        m_rule = MRule(m_kind, m_value, m_exp)
    except DomainError as exc:
        raise InvalidValueError("m_value", str(exc)) from None

    z_kind = _choice(d, "zeta_rule", ZETA_RULES)
    if z_kind == "zero":
        zeta_rule = ZetaRule()
    else:
        if "zeta_value" not in d:
            raise MissingKeyError("zeta_value", f"required for zeta_rule={z_kind}")
        z_value = _number(d, "zeta_value")
        shape = None
        if z_kind == "scaled":
            if "zeta_shape" not in d:
                raise MissingKeyError("zeta_shape", "required for zeta_rule=scaled")
            shape = _choice(d, "zeta_shape", ZETA_SHAPES)
        z_exp = _number(d, "zeta_exponent") if "zeta_exponent" in d else None
        try:
            zeta_rule = ZetaRule(z_kind, z_value, shape, z_exp)
        except DomainError as exc:
            raise InvalidValueError("zeta_value", str(exc)) from None

    beta = _number(d, "beta")
    if not beta > 0:
        raise InvalidValueError("beta", f"must be positive, got {beta}")
    n0 = _number(d, "n0", positive=True)
    k_const = _number(d, "k_const")
    if not k_const > 1:
        raise InvalidValueError("k_const", f"must exceed 1, got {k_const}")
    deltas = {}
    for key in ("delta1", "delta2", "delta3"):
        v = _number(d, key)
        if not 0 <= v < 1:
            raise InvalidValueError(key, f"must lie in [0, 1), got {v}")
        deltas[key] = v
    m_min = _number(d, "m_min", int)
    if m_min < 1:
        raise InvalidValueError("m_min", "must be at least 1")
    cu = d["count_unexpected"]
    if isinstance(cu, str) and cu in ("on", "off"):
        cu = cu == "on"
    if not isinstance(cu, bool):
        raise InvalidValueError("count_unexpected", f"expected on/off or a boolean, got {cu!r}")

    params = TheoremParams(beta=beta, k_const=k_const, m_min=m_min, **deltas)
    return ExperimentConfig(
        model=model, n_grid=tuple(ns), trials=trials, seed=seed, m_rule=m_rule,
        zeta_rule=zeta_rule, beta=beta, n0=n0, params=params, count_unexpected=cu,
    )
