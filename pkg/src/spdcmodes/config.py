"""Run configuration: TOML file plus flag overrides, validated and hashed."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError

DEFAULTS = {
    "pump": {"p": 0, "ell": 0, "waist": 1.0},
    "waist_ratio": 0.2,
    "hygg_waist_ratio": 0.1,
    "p_range": [0, 1, 2, 3],
    "ell_range": [-4, -3, -2, -1, 0, 1, 2, 3, 4, 5],
    "grid": {"size": 256, "extent": 8.0},
    "fiber": {"sigma": 0.05},
    "noise": {"seed": 0, "mean_counts": 1e4, "dark": 0.0},
    "hologram": {"size": 512, "period": 8.0, "pixel_pitch": 8e-6, "p": 0, "ell": 1, "waist_px": 0.0},
    "correlate": {"ell_s": [0]},
    "tomo": {"ell_i": 1},
    "calibrate": {"modes": [[0, -1], [0, 0], [0, 1]]},
    "output": {"dir": "out", "formats": ["csv"]},
}

FORMATS = ("csv", "json")


def _merge(base: dict, over: dict, path="") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where!r} must be a table")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _positive(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
        raise ConfigError(f"{name} must be a positive number, got {v!r}")


def _int(name, v, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {v}")


def _int_list(name, v, minimum=None):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{name} must be a non-empty list")
    for x in v:
        _int(name, x, minimum)


def validate(cfg: dict) -> dict:
    _int("pump.p", cfg["pump"]["p"], 0)
    _int("pump.ell", cfg["pump"]["ell"])
    _positive("pump.waist", cfg["pump"]["waist"])
    _positive("waist_ratio", cfg["waist_ratio"])
    _positive("hygg_waist_ratio", cfg["hygg_waist_ratio"])
    _int_list("p_range", cfg["p_range"], 0)
    _int_list("ell_range", cfg["ell_range"])
    _int("grid.size", cfg["grid"]["size"], 8)
    _positive("grid.extent", cfg["grid"]["extent"])
    _positive("fiber.sigma", cfg["fiber"]["sigma"])
    _int("noise.seed", cfg["noise"]["seed"], 0)
    _positive("noise.mean_counts", cfg["noise"]["mean_counts"])
    d = cfg["noise"]["dark"]
    if isinstance(d, bool) or not isinstance(d, (int, float)) or d < 0:
        raise ConfigError(f"noise.dark must be non-negative, got {d!r}")
    h = cfg["hologram"]
    _int("hologram.size", h["size"], 8)
    _positive("hologram.period", h["period"])
    _positive("hologram.pixel_pitch", h["pixel_pitch"])
    _int("hologram.p", h["p"], 0)
    _int("hologram.ell", h["ell"])
    if not isinstance(h["waist_px"], (int, float)) or h["waist_px"] < 0:
        raise ConfigError("hologram.waist_px must be >= 0 (0 selects the default)")
    _int_list("correlate.ell_s", cfg["correlate"]["ell_s"])
    _int("tomo.ell_i", cfg["tomo"]["ell_i"])
    modes = cfg["calibrate"]["modes"]
    if not isinstance(modes, list) or not modes:
        raise ConfigError("calibrate.modes must be a non-empty list of [p, ell] pairs")
    for m in modes:
        if not isinstance(m, list) or len(m) != 2:
            raise ConfigError(f"calibrate.modes entry {m!r} is not a [p, ell] pair")
        _int("calibrate.modes p", m[0], 0)
        _int("calibrate.modes ell", m[1])
    fmts = cfg["output"]["formats"]
    if isinstance(fmts, str):
        fmts = cfg["output"]["formats"] = [fmts]
    if not fmts or any(f not in FORMATS for f in fmts):
        raise ConfigError(f"output.formats must be drawn from {FORMATS}, got {fmts!r}")
    if not isinstance(cfg["output"]["dir"], str) or not cfg["output"]["dir"]:
        raise ConfigError("output.dir must be a non-empty string")
    return cfg


def load(path=None, overrides: dict | None = None) -> dict:
    """Defaults, then the TOML file at ``path``, then ``overrides``; validated."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            data = tomllib.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        cfg = _merge(cfg, data)
    if overrides:
        cfg = _merge(cfg, overrides)
    return validate(cfg)


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON form, output directory excluded."""
    body = copy.deepcopy(dict(cfg))
    body["output"].pop("dir", None)
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class RunConfig(dict):
    """Validated configuration mapping with its hash."""

    @classmethod
    def load(cls, path=None, overrides: dict | None = None) -> "RunConfig":
        return cls(load(path, overrides))

    @property
    def hash(self) -> str:
        return config_hash(self)
