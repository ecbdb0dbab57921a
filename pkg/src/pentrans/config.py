"""INI run configs for the sweep subcommands.

A config holds one model section (``[kuramoto]`` or ``[vicsek]``) and an
optional ``[detector]`` section. Every key is checked against the section's
schema and unknown keys or sections are errors. Unset keys keep the dataclass
defaults. Example::

    [kuramoto]
    n = 50
    k_grid = 0, 1, 3, 5
    master_seed = 7

    [detector]
    window = 1.0
    tolerance = 0.05
"""

from __future__ import annotations

import configparser
from dataclasses import replace
from pathlib import Path

from .sweep import Detector, KuramotoSweep, VicsekSweep


class ConfigError(ValueError):
    pass


def _floats(raw: str) -> tuple:
    items = [x.strip() for x in raw.split(",") if x.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(x) for x in items)


def _optional_float(raw: str):
    return None if raw.strip().lower() in ("", "none", "auto") else float(raw)


KURAMOTO_KEYS = {
    "n": int, "k_grid": _floats, "t_max": float, "dt": float, "realizations": int,
    "edge_prob": float, "master_seed": int, "phi_window": int,
}
VICSEK_KEYS = {
    "n": int, "box": float, "v0": float, "r_int": float, "eta_grid": _floats, "dt": float,
    "steps": int, "realizations": int, "master_seed": int, "distance_mode": str,
    "noise_span": float, "update": str,
}
DETECTOR_KEYS = {
    "window": _optional_float, "tolerance": float, "p0": float, "stride": int,
    "statistic": str, "tau": float,
}
MODELS = {"kuramoto": (KuramotoSweep, KURAMOTO_KEYS), "vicsek": (VicsekSweep, VICSEK_KEYS)}

def _parse_section(section, schema: dict, where: str) -> dict:
    out = {}
    for key, raw in section.items():
        if key not in schema:
            raise ConfigError(f"{where}: unknown key {key!r} (allowed: {', '.join(sorted(schema))})")
        try:
            out[key] = schema[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {raw!r} ({exc})") from None
    return out


def parse_config(text: str, model: str, source: str = "<config>"):
    """Build a sweep config for ``model`` from INI text."""
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}")
    cls, schema = MODELS[model]
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    extra = set(parser.sections()) - {model, "detector"}
    if extra:
        raise ConfigError(f"{source}: unexpected section(s) {sorted(extra)}; expected [{model}] and [detector]")
    values = _parse_section(parser[model], schema, f"{source} [{model}]") if parser.has_section(model) else {}
    det = _parse_section(parser["detector"], DETECTOR_KEYS, f"{source} [detector]") if parser.has_section("detector") else {}
    try:
        cfg = cls(**values)
        cfg = replace(cfg, detector=replace(cfg.detector, **det))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def parse_detector(text: str, source: str = "<config>") -> Detector:
    """Detector settings from INI text holding only a ``[detector]`` section."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    extra = set(parser.sections()) - {"detector"}
    if extra:
        raise ConfigError(f"{source}: unexpected section(s) {sorted(extra)}; expected [detector]")
    det = _parse_section(parser["detector"], DETECTOR_KEYS, f"{source} [detector]") if parser.has_section("detector") else {}
    try:
        return Detector(**det)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_detector(path) -> Detector:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path}: config file not found")
    return parse_detector(path.read_text(), str(path))


def load_config(path, model: str):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path}: config file not found")
    return parse_config(path.read_text(), model, str(path))


def dump_config(cfg) -> str:
    """INI text that ``parse_config`` maps back to ``cfg``."""
    model = cfg.model
    _, schema = MODELS[model]
    lines = [f"[{model}]"]
    for key in schema:
        lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    lines.append("")
    lines.append("[detector]")
    for key in DETECTOR_KEYS:
        lines.append(f"{key} = {_fmt(getattr(cfg.detector, key))}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)
