"""Scenario files: schema, merging, overrides and sweep expansion.

A scenario is a YAML mapping with the sections ``mac``, ``nc``, ``links``,
``traffic``, ``sim``, ``phy`` and an optional ``sweep``. Values resolve as
defaults < preset < file < ``--set`` < ``--seed``. A sweep maps dotted keys
(``nc.queue_size``, ``links.power.B``, ``phy.snr_db``) to lists of values; the
runs are the cartesian product, each repeated ``sim.repetitions`` times with
consecutive seeds.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass
from pathlib import Path

import yaml

from ..macsim.config import ConfigError, MacConfig
from ..phynec.exchange import PhyConfigError, PhyScenario

# (section, key) -> MacConfig field
MAC_FIELDS = {
    ("mac", "access"): "access",
    ("mac", "relay_access"): "relay_access",
    ("mac", "rate_bps"): "rate_bps",
    ("mac", "packet_bytes"): "packet_bytes",
    ("mac", "slot_us"): "slot_us",
    ("mac", "sifs_us"): "sifs_us",
    ("mac", "difs_us"): "difs_us",
    ("mac", "cw_min"): "cw_min",
    ("mac", "cw_max"): "cw_max",
    ("mac", "retry_limit"): "retry_limit",
    ("mac", "guard_us"): "guard_us",
    ("nc", "enabled"): "nc",
    ("nc", "queue_size"): "queue_size",
    ("nc", "buffer_size"): "buffer_size",
    ("nc", "send_buffer_size"): "send_buffer_size",
    ("nc", "counter_bits"): "counter_bits",
    ("links", "loss"): "link_loss",
    ("links", "power"): "power",
    ("links", "operating_snr_db"): "operating_snr_db",
    ("traffic", "model"): "traffic",
    ("traffic", "arrival_rate_pps"): "arrival_rate_pps",
    ("sim", "duration_s"): "duration_s",
    ("sim", "warmup"): "warmup",
}
MAPPING_KEYS = {("links", "loss"), ("links", "power")}
SIM_EXTRA = {"seed": 1, "repetitions": 1, "trace": False}
PHY_SCHEMES = ("3-step:optimal", "3-step:gray", "4-step")
PHY_DEFAULTS = {
    "task": "throughput",          # "throughput" | "constellation"
    "traffic": "asymmetric",
    "scheme": "3-step:optimal",
    "snr_db": 10.0,
    "n_exchanges": 3,
    "code_n": 1152,
    "code_seed": 2024,
    "max_iter": 50,
    "estimate_channel": True,
    "random_phase": True,
}
SECTIONS = ("mac", "nc", "links", "traffic", "sim", "phy", "sweep")


def default_tree() -> dict:
    base = MacConfig()
    tree: dict = {s: {} for s in SECTIONS}
    for (section, key), fname in MAC_FIELDS.items():
        tree[section][key] = copy.deepcopy(getattr(base, fname))
    tree["sim"].update(SIM_EXTRA)
    tree["phy"].update(PHY_DEFAULTS)
    return tree


def _allowed(section: str, key: str) -> bool:
    if section == "sim":
        return (section, key) in MAC_FIELDS or key in SIM_EXTRA
    if section == "phy":
        return key in PHY_DEFAULTS
    return (section, key) in MAC_FIELDS


def check_path(path: str) -> list[str]:
    parts = path.split(".")
    if len(parts) < 2 or parts[0] not in SECTIONS or parts[0] == "sweep":
        raise ConfigError(f"unknown config key {path!r}")
    section, key = parts[0], parts[1]
    if not _allowed(section, key):
        raise ConfigError(f"unknown config key {path!r}")
    if len(parts) > 3 or (len(parts) == 3 and (section, key) not in MAPPING_KEYS):
        raise ConfigError(f"unknown config key {path!r}")
    return parts


def merge(tree: dict, update: dict | None, origin: str = "config") -> dict:
    """Deep-merge ``update`` into a copy of ``tree``, rejecting unknown keys."""
    out = copy.deepcopy(tree)
    if not update:
        return out
    if not isinstance(update, dict):
        raise ConfigError(f"{origin}: top level must be a mapping")
    for section, body in update.items():
        if section not in SECTIONS:
            raise ConfigError(f"{origin}: unknown section {section!r}")
        if body is None:
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"{origin}: section {section!r} must be a mapping")
        if section == "sweep":
            for path, values in body.items():
                check_path(path)
                if not isinstance(values, list) or not values:
                    raise ConfigError(f"{origin}: sweep {path!r} needs a non-empty list")
                out["sweep"][path] = list(values)
            continue
        for key, value in body.items():
            if not _allowed(section, key):
                raise ConfigError(f"{origin}: unknown key {section}.{key}")
            if (section, key) in MAPPING_KEYS:
                if not isinstance(value, dict):
                    raise ConfigError(f"{origin}: {section}.{key} must be a mapping")
                out[section][key] = {**out[section][key], **value}
            else:
                out[section][key] = value
    return out


def set_path(tree: dict, path: str, value) -> dict:
    parts = check_path(path)
    out = copy.deepcopy(tree)
    node = out[parts[0]]
    if len(parts) == 3:
        node = node.setdefault(parts[1], {})
    node[parts[-1]] = value
    return out


def parse_assignment(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"--set {key}: cannot parse {raw!r}") from exc
    return key.strip(), value


def load_file(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fp:
            data = yaml.safe_load(fp)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return data or {}


def resolve(preset: dict | None = None, path: str | None = None,
            assignments: list[str] | None = None, seed: int | None = None) -> dict:
    tree = merge(default_tree(), preset, "preset")
    if path:
        tree = merge(tree, load_file(path), str(path))
    for text in assignments or []:
        key, value = parse_assignment(text)
        if key.startswith("sweep."):
            sweep_key = key[len("sweep."):]
            check_path(sweep_key)
            if not isinstance(value, list) or not value:
                raise ConfigError(f"sweep {sweep_key!r} needs a non-empty list")
            tree["sweep"][sweep_key] = value
        else:
            tree = set_path(tree, key, value)
    if seed is not None:
        tree["sim"]["seed"] = seed
    reps = tree["sim"]["repetitions"]
    if not isinstance(reps, int) or reps < 1:
        raise ConfigError("sim.repetitions must be a positive integer")
    if not isinstance(tree["sim"]["seed"], int) or tree["sim"]["seed"] < 0:
        raise ConfigError("sim.seed must be a non-negative integer")
    return tree


@dataclass(frozen=True)
class Run:
    index: int
    point: dict            # swept key -> value
    seed: int
    tree: dict


def expand(tree: dict) -> list[Run]:
    keys = sorted(tree["sweep"])
    grids = [tree["sweep"][k] for k in keys]
    runs = []
    base_seed = tree["sim"]["seed"]
    for combo in itertools.product(*grids) if keys else [()]:
        t = tree
        for k, v in zip(keys, combo):
            t = set_path(t, k, v)
        for r in range(tree["sim"]["repetitions"]):
            runs.append(Run(len(runs), dict(zip(keys, combo)), base_seed + r, t))
    return runs


def mac_config(tree: dict, seed: int) -> MacConfig:
    kwargs = {fname: copy.deepcopy(tree[s][k]) for (s, k), fname in MAC_FIELDS.items()}
    kwargs["seed"] = seed
    try:
        return MacConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def phy_scenario(tree: dict, seed: int) -> PhyScenario:
    p = tree["phy"]
    scheme = p["scheme"]
    if scheme not in PHY_SCHEMES:
        raise ConfigError(f"phy.scheme must be one of {PHY_SCHEMES}, got {scheme!r}")
    exchange, _, labeling = scheme.partition(":")
    try:
        return PhyScenario(
            traffic=p["traffic"],
            labeling=labeling or "optimal",
            exchange=exchange,
            snr_db=float(p["snr_db"]),
            n_exchanges=int(p["n_exchanges"]),
            code_n=int(p["code_n"]),
            code_seed=int(p["code_seed"]),
            max_iter=int(p["max_iter"]),
            seed=seed,
            estimate_channel=bool(p["estimate_channel"]),
            random_phase=bool(p["random_phase"]),
        )
    except (PhyConfigError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
