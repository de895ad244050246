"""JSON run configuration: strict parsing, defaults and conversion to solver objects."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .physmap import DomainError, RockFluidParams, reduce
from .pde_solver import (
    SchemeConfig,
    StopRule,
    make_custom,
    make_nonsymmetric,
    make_selfsimilar_ic,
    make_smoothed_block,
)

CONFIG_VERSION = 1
PRESETS = ("figure1", "figure3", "figure4")

_TOP_KEYS = {
    "version",
    "c",
    "rock",
    "scheme",
    "N",
    "dt",
    "ic",
    "stop",
    "snapshot_every",
    "snapshot_times",
    "record_every",
    "on_stability",
    "output_dir",
    "run_id",
}
_IC_KEYS = {
    "smoothed_block": ({"height", "x_L0", "x_R0", "w"}, {"edge"}),
    "nonsymmetric": (set(), set()),
    "selfsimilar": ({"B", "t0"}, {"t_start", "x0"}),
    "custom": ({"x", "h"}, set()),
}
_STOP_KEYS = {"max_time", "min_halfwidth", "min_height"}


class ConfigError(ValueError):
    pass


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return float(value)


def _check_keys(data, allowed, where, required=()):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(data) - set(allowed) - set(required)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(required) - set(data)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


@dataclass
class RunConfig:
    c: float
    ic: dict
    rock: dict | None = None
    scheme: str = "explicit"
    N: int = 202
    dt: float | None = None
    stop: dict = field(default_factory=dict)
    snapshot_every: int = 0
    snapshot_times: list = field(default_factory=list)
    record_every: int = 1
    on_stability: str = "stop"
    output_dir: str | None = None
    run_id: str = "run"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        _check_keys(data, _TOP_KEYS, "config", required=("version", "ic"))
        if data["version"] != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {data['version']!r} (expected {CONFIG_VERSION})")
        has_c, has_rock = "c" in data, "rock" in data
        if has_c == has_rock:
            raise ConfigError("give exactly one of 'c' and 'rock' (physical parameters), not both or neither")
        rock = None
        if has_rock:
            try:
                rock_params = RockFluidParams.from_dict(data["rock"])
            except (TypeError, DomainError) as exc:
                raise ConfigError(f"rock: {exc}") from exc
            rock = dict(data["rock"])
            c = reduce(rock_params).c
        else:
            c = _number(data["c"], "c")

        ic = data["ic"]
        if not isinstance(ic, dict) or ic.get("kind") not in _IC_KEYS:
            raise ConfigError(f"ic.kind must be one of {sorted(_IC_KEYS)}")
        required, optional = _IC_KEYS[ic["kind"]]
        _check_keys(ic, optional | {"kind"}, "ic", required=required)

        stop = data.get("stop", {})
        _check_keys(stop, _STOP_KEYS, "stop")
        for key, value in stop.items():
            _number(value, f"stop.{key}")

        kw = {}
        for key in ("scheme", "on_stability", "output_dir", "run_id"):
            if key in data:
                if not isinstance(data[key], str) and not (key == "output_dir" and data[key] is None):
                    raise ConfigError(f"{key} must be a string")
                kw[key] = data[key]
        for key in ("N", "snapshot_every", "record_every"):
            if key in data:
                if isinstance(data[key], bool) or not isinstance(data[key], int):
                    raise ConfigError(f"{key} must be an integer")
                kw[key] = data[key]
        if "snapshot_times" in data:
            times = data["snapshot_times"]
            if not isinstance(times, list):
                raise ConfigError("snapshot_times must be a list of numbers")
            kw["snapshot_times"] = [_number(v, "snapshot_times") for v in times]
        if data.get("dt") is not None:
            kw["dt"] = _number(data["dt"], "dt")
            if kw["dt"] <= 0:
                raise ConfigError(f"dt must be positive, got {kw['dt']}")
        cfg = cls(c=c, ic=dict(ic), rock=rock, stop=dict(stop), **kw)
        cfg.scheme_config()  # validates the numerical settings
        cfg.initial_condition()
        return cfg

    def scheme_config(self) -> SchemeConfig:
        try:
            return SchemeConfig(
                scheme=self.scheme,
                dt=self.dt,
                N=self.N,
                stop=StopRule(**self.stop),
                snapshot_every=self.snapshot_every,
                snapshot_times=tuple(self.snapshot_times),
                record_every=self.record_every,
                on_stability=self.on_stability,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def initial_condition(self):
        ic = dict(self.ic)
        kind = ic.pop("kind")
        try:
            if kind == "smoothed_block":
                return make_smoothed_block(**ic)
            if kind == "nonsymmetric":
                return make_nonsymmetric()
            if kind == "selfsimilar":
                return make_selfsimilar_ic(c=self.c, **ic)
            return make_custom(ic["x"], ic["h"])
        except (DomainError, TypeError) as exc:
            raise ConfigError(f"ic: {exc}") from exc

    def resolved(self) -> dict:
        """Full config with defaults filled in; loads back to the same run."""
        sc = self.scheme_config()
        out = {"version": CONFIG_VERSION}
        if self.rock is not None:
            out["rock"] = self.rock
        else:
            out["c"] = self.c
        out.update(
            scheme=sc.scheme,
            N=sc.N,
            dt=sc.dt,
            ic=self.ic,
            stop={"max_time": sc.stop.max_time, "min_halfwidth": sc.stop.min_halfwidth, "min_height": sc.stop.min_height},
            snapshot_every=sc.snapshot_every,
            snapshot_times=list(sc.snapshot_times),
            record_every=sc.record_every,
            on_stability=sc.on_stability,
            output_dir=self.output_dir,
            run_id=self.run_id,
        )
        return out


def load_config(path) -> RunConfig:
    """Read a config file, or the ``config`` block of a run manifest."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if isinstance(data, dict) and "manifest_version" in data:
        data = data.get("config")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return RunConfig.from_dict(data)


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    text = resources.files("collapse_sim").joinpath("presets", f"{name}.json").read_text()
    return RunConfig.from_dict(json.loads(text))
