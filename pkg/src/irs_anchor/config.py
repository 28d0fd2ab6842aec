"""Plain-text ``key = value`` experiment configuration files.

One entry per line; ``#`` starts a comment. Vectors are comma separated
(``bs_position_m = 50, 0, 20``); several positions are separated by ``;``.
Keys carry their unit as a suffix. Unknown keys are rejected.
"""
from __future__ import annotations

import math
from pathlib import Path

from .errors import ConfigError
from .harness import ExperimentConfig
from .model import PathLossModel, SystemGeometry


def _int(v):
    try:
        f = float(v)
    except ValueError:
        raise ConfigError(f"expected an integer, got {v!r}") from None
    if not f.is_integer():
        raise ConfigError(f"expected an integer, got {v!r}")
    return int(f)


def _float(v):
    try:
        return float(v)
    except ValueError:
        raise ConfigError(f"expected a number, got {v!r}") from None


def _bool(v):
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


def _vec3(v):
    parts = [_float(x) for x in v.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated coordinates, got {v!r}")
    return tuple(parts)


def _positions(v):
    return tuple(_vec3(item) for item in v.split(";") if item.strip())


def _names(v):
    return tuple(x.strip() for x in v.split(",") if x.strip())


def _grid(v):
    return tuple(_float(x) for x in v.split(",") if x.strip())


# key -> (section, field name, parser)
KEYS = {
    "m": ("exp", "M", _int),
    "n": ("exp", "N", _int),
    "k": ("exp", "K", _int),
    "p_online_dbm": ("exp", "p_online_dbm", _float),
    "p_offline_dbm": ("exp", "p_offline_dbm", _float),
    "noise_power_dbm": ("exp", "noise_power_dbm", _float),
    "trials": ("exp", "trials", _int),
    "master_seed": ("exp", "master_seed", _int),
    "schemes": ("exp", "schemes", _names),
    "sweep_axis": ("exp", "sweep_axis", str.strip),
    "sweep_grid": ("exp", "sweep_grid", _grid),
    "t_bs_slots": ("exp", "T_bs", _int),
    "t_su_slots": ("exp", "T_su", _int),
    "theta_rad": ("exp", "theta", _float),
    "noise_off": ("exp", "noise_off", _bool),
    "genie_direct": ("exp", "genie_direct", _bool),
    "shared_noise": ("exp", "shared_noise", _bool),
    "strict_reference_row": ("exp", "strict_reference_row", _bool),
    "max_failure_rate": ("exp", "max_failure_rate", _float),
    "bs_position_m": ("geo", "bs_position", _vec3),
    "irs_center_m": ("geo", "irs_center", _vec3),
    "irs_rows": ("geo", "irs_rows", _int),
    "irs_cols": ("geo", "irs_cols", _int),
    "element_spacing_m": ("geo", "element_spacing", _float),
    "anchor1_position_m": ("geo", "anchor1_position", _vec3),
    "anchor2_position_m": ("geo", "anchor2_position", _vec3),
    "anchor_los_position_m": ("geo", "anchor_los_position", _vec3),
    "user_positions_m": ("geo", "user_positions", _positions),
    "user_center_m": ("geo", "user_center", _vec3),
    "user_radius_m": ("geo", "user_radius", _float),
    "reference_gain_db": ("pl", "reference_gain_db", _float),
    "reference_distance_m": ("pl", "reference_distance", _float),
    "exponent_nlos": ("pl", "exponent_nlos", _float),
    "exponent_los": ("pl", "exponent_los", _float),
    "wavelength_m": ("pl", "carrier_wavelength", _float),
}


def parse_config(text, source="<string>"):
    sections = {"exp": {}, "geo": {}, "pl": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        section, name, parse = KEYS[key]
        try:
            sections[section][name] = parse(value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None

    exp = sections["exp"]
    try:
        pathloss = PathLossModel(**sections["pl"])
        geo = sections["geo"]
        n = exp.get("N")
        if "irs_rows" in geo or "irs_cols" in geo or n is None:
            geometry = SystemGeometry(**geo)
        else:
            geometry = SystemGeometry.for_elements(n, **geo)
        exp.setdefault("N", geometry.n_elements)
        return ExperimentConfig(geometry=geometry, pathloss=pathloss, **exp)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def dump_config(config: ExperimentConfig):
    """Render a config in the file format (round-trips through parse_config)."""
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return "-inf" if v == -math.inf else repr(v)
        if isinstance(v, tuple):
            if v and isinstance(v[0], tuple):
                return "; ".join(fmt(x) for x in v)
            return ", ".join(fmt(x) for x in v)
        return str(v)

    objs = {"exp": config, "geo": config.geometry, "pl": config.pathloss}
    lines = []
    for key, (section, name, _) in KEYS.items():
        value = getattr(objs[section], name)
        if value is None or value == ():
            continue
        lines.append(f"{key} = {fmt(value)}")
    return "\n".join(lines) + "\n"
