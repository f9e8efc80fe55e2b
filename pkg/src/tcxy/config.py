"""Flat ``key = value`` run configuration files.

One assignment per line, ``#`` starts a comment. Values are numbers
(scientific notation and simple arithmetic with ``pi`` allowed, e.g.
``pi/3``), comma-separated lists, ``true``/``false`` or bare words.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .freefermion import SECTORS, XYParams
from .hamiltonians import SystemParams

EXPERIMENTS = ("dynamics", "qfi-sweep", "phase-scan", "gamma-scan", "validity", "oracle-check")
UNIT_FLAGS = ("angular", "over-2pi")

# config key -> SystemParams / XYParams field
PARAM_KEYS = {
    "omega0": "omega0",
    "omega_a": "omega_a",
    "g": "g",
    "lambda": "lam",
    "gamma": "gamma",
    "h": "h",
    "n_spins": "n_spins",
    "n_bar": "n_bar",
    "alpha_phase": "alpha_phase",
    "theta": "theta",
    "phi": "phi",
    "varphi": "varphi",
    "fock_cutoff": "fock_cutoff",
}
FREQUENCY_KEYS = {"omega0", "omega_a", "g", "lambda", "h"}
INTEGER_KEYS = {"n_spins", "fock_cutoff", "sweep_count", "n_times"}
LIST_KEYS = {"sweep_values", "series_values", "oracle_n", "oracle_gamma", "oracle_h"}
OTHER_KEYS = {
    "experiment",
    "units",
    "sector",
    "output_path",
    "t",
    "t_max",
    "n_times",
    "threshold",
    "tolerance",
    "sweep_axis",
    "sweep_min",
    "sweep_max",
    "sweep_count",
    "sweep_scale",
    "sweep_values",
    "sweep_include_zero",
    "series_axis",
    "series_values",
    "oracle_n",
    "oracle_gamma",
    "oracle_h",
}
WORD_KEYS = {"experiment", "units", "sector", "output_path", "sweep_axis", "sweep_scale", "series_axis"}

DEFAULTS = {
    "omega0": 0.0,
    "omega_a": 0.0,
    "g": 0.0,
    "lambda": 1.0,
    "gamma": 1.0,
    "h": 0.0,
    "n_spins": 4,
    "n_bar": 0.0,
    "alpha_phase": 0.0,
    "theta": math.pi / 2,
    "phi": 0.0,
    "varphi": 0.0,
    "fock_cutoff": None,
}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "inf": math.inf}


def _eval_number(text: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    return ev(ast.parse(text.strip(), mode="eval"))


@dataclass
class SweepSpec:
    axis: str
    values: list

    @property
    def count(self) -> int:
        return len(self.values)


@dataclass
class RunConfig:
    experiment: str | None
    values: dict
    lines: dict = field(default_factory=dict)
    source: str | None = None

    # ---- typed accessors ----
    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def unit_flag(self) -> str:
        return self.values.get("units", "angular")

    @property
    def sector(self) -> str:
        return self.values.get("sector", "paper")

    @property
    def output_path(self) -> str | None:
        return self.values.get("output_path")

    def _scale(self, key: str) -> float:
        return 2.0 * math.pi if self.unit_flag == "over-2pi" and key in FREQUENCY_KEYS else 1.0

    def resolved(self, key: str, value=None):
        """Parameter value in internal (angular) units."""
        v = self.values.get(key, DEFAULTS.get(key)) if value is None else value
        if v is None:
            return None
        if key in INTEGER_KEYS:
            return int(v)
        return float(v) * self._scale(key)

    def params(self, **overrides) -> SystemParams:
        """SystemParams with config values, then ``overrides`` (config keys, config units)."""
        vals = {k: self.resolved(k) for k in PARAM_KEYS}
        for k, v in overrides.items():
            vals[k] = self.resolved(k, v)
        try:
            xy = XYParams(vals["lambda"], vals["gamma"], vals["h"], vals["n_spins"])
            return SystemParams(
                omega0=vals["omega0"],
                omega_a=vals["omega_a"],
                g=vals["g"],
                xy=xy,
                n_bar=vals["n_bar"],
                alpha_phase=vals["alpha_phase"],
                theta=vals["theta"],
                phi=vals["phi"],
                varphi=vals["varphi"],
                fock_cutoff=vals["fock_cutoff"],
            )
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc

    def sweep(self) -> SweepSpec | None:
        v = self.values
        axis = v.get("sweep_axis")
        if axis is None:
            return None
        if axis not in PARAM_KEYS:
            raise ConfigurationError(
                f"sweep axis must name a model parameter ({', '.join(PARAM_KEYS)}), got {axis!r}",
                key="sweep_axis",
                line=self.lines.get("sweep_axis"),
            )
        if "sweep_values" in v:
            values = [float(x) for x in v["sweep_values"]]
        else:
            for key in ("sweep_min", "sweep_max", "sweep_count"):
                if key not in v:
                    raise ConfigurationError("missing sweep bound", key=key)
            lo, hi, count = float(v["sweep_min"]), float(v["sweep_max"]), int(v["sweep_count"])
            scale = v.get("sweep_scale", "linear")
            if count < 2:
                raise ConfigurationError("sweep_count must be >= 2", key="sweep_count", line=self.lines.get("sweep_count"))
            if scale == "log":
                if lo <= 0 or hi <= 0:
                    raise ConfigurationError(
                        "log sweeps need sweep_min > 0", key="sweep_min", line=self.lines.get("sweep_min")
                    )
                values = np.logspace(math.log10(lo), math.log10(hi), count).tolist()
            elif scale == "linear":
                values = np.linspace(lo, hi, count).tolist()
            else:
                raise ConfigurationError(
                    f"sweep_scale must be linear or log, got {scale!r}", key="sweep_scale", line=self.lines.get("sweep_scale")
                )
        if v.get("sweep_include_zero", False) and 0.0 not in values:
            values = [0.0, *values]
        if axis in INTEGER_KEYS:
            values = [int(round(x)) for x in values]
        return SweepSpec(axis, sorted(values))

    def manifest_params(self) -> dict:
        """All resolved model parameters in angular units."""
        out = {}
        for k in PARAM_KEYS:
            out[k] = self.resolved(k)
        return out


def _parse_value(key: str, raw: str, lineno: int):
    raw = raw.strip()
    try:
        if key in WORD_KEYS:
            if not raw:
                raise ValueError(raw)
            return raw
        if key == "sweep_include_zero":
            if raw.lower() not in ("true", "false"):
                raise ValueError(raw)
            return raw.lower() == "true"
        if key in LIST_KEYS:
            items = [x for x in (s.strip() for s in raw.split(",")) if x]
            return [_eval_number(x) for x in items]
        if key == "fock_cutoff" and raw.lower() in ("auto", "none"):
            return None
        value = _eval_number(raw)
        if key in INTEGER_KEYS:
            if float(value) != int(value):
                raise ValueError(raw)
            return int(value)
        return float(value)
    except (ValueError, SyntaxError, ZeroDivisionError, TypeError):
        raise ConfigurationError(f"cannot parse value {raw!r}", key=key, line=lineno) from None


def parse_config(text: str, source: str | None = None) -> RunConfig:
    values: dict = {}
    lines: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"expected 'key = value', got {stripped!r}", line=lineno)
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in PARAM_KEYS and key not in OTHER_KEYS:
            raise ConfigurationError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigurationError("duplicate key", key=key, line=lineno)
        values[key] = _parse_value(key, raw, lineno)
        lines[key] = lineno
    cfg = RunConfig(values.get("experiment"), values, lines, source)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    v, ln = cfg.values, cfg.lines
    if cfg.experiment is not None and cfg.experiment not in EXPERIMENTS:
        raise ConfigurationError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}", key="experiment", line=ln.get("experiment")
        )
    if cfg.unit_flag not in UNIT_FLAGS:
        raise ConfigurationError(f"units must be one of {', '.join(UNIT_FLAGS)}", key="units", line=ln.get("units"))
    if cfg.sector not in SECTORS:
        raise ConfigurationError(f"sector must be one of {', '.join(SECTORS)}", key="sector", line=ln.get("sector"))
    if "n_times" in v and v["n_times"] < 2:
        raise ConfigurationError("n_times must be >= 2", key="n_times", line=ln.get("n_times"))
    if "series_axis" in v and v["series_axis"] not in PARAM_KEYS:
        raise ConfigurationError("series axis must name a model parameter", key="series_axis", line=ln.get("series_axis"))
    cfg.sweep()


def bundled_configs() -> list[str]:
    return sorted(p.name for p in resources.files("tcxy.configs").iterdir() if p.name.endswith(".cfg"))


def load_config(path: str | Path) -> RunConfig:
    """Read a config file; bare names of shipped configs (``fig2``, ``fig2.cfg``) also resolve."""
    p = Path(path)
    if p.is_file():
        return parse_config(p.read_text(encoding="utf-8"), str(p))
    name = p.name if p.name.endswith(".cfg") else p.name + ".cfg"
    res = resources.files("tcxy.configs") / name
    if str(path) in (p.name, name.removesuffix(".cfg")) and res.is_file():
        return parse_config(res.read_text(encoding="utf-8"), f"builtin:{name}")
    raise ConfigurationError(f"config file not found: {path}")
