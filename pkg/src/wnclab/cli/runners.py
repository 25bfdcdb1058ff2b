"""Execute resolved scenarios and write CSV/JSON artifacts."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..macsim import collect_metrics, simulate
from ..ncmac import dump_jsonl
from ..phynec.channel import evm
from ..phynec.exchange import constellation_dump, run_phy_exchange
from .config import Run, expand, mac_config, phy_scenario

NODE_COLUMNS = ["throughput", "loss_rate", "uplink_loss", "avg_delay", "originated", "delivered", "decoded", "passthrough"]


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fp:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(payload, fp, indent=2, sort_keys=True, default=_jsonable)
        fp.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(round(v, 9))
    return str(v)


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# -- MAC ----------------------------------------------------------------------

def _mac_job(args) -> dict:
    run, trace_dir = args
    cfg = mac_config(run.tree, run.seed)
    trace = simulate(cfg)
    if trace_dir is not None:
        with open(Path(trace_dir) / f"trace_{run.index:04d}.jsonl", "w", encoding="utf-8") as fp:
            dump_jsonl(trace, fp)
    return collect_metrics(trace, cfg.warmup).to_dict()


def run_mac(tree: dict, out: Path, jobs: int = 1) -> dict:
    runs = expand(tree)
    # build every config first so that invalid values fail before any simulation
    configs = [mac_config(r.tree, r.seed) for r in runs]
    out.mkdir(parents=True, exist_ok=True)
    trace_dir = out if tree["sim"]["trace"] else None
    results = _map(_mac_job, [(r, trace_dir) for r in runs], jobs)

    keys = sorted(tree["sweep"])
    run_rows, node_rows, records = [], [], []
    for run, cfg, m in zip(runs, configs, results):
        point = [_fmt(run.point[k]) for k in keys]
        run_rows.append([run.index, run.seed, *point, cfg.access, _fmt(cfg.nc), cfg.queue_size,
                         _fmt(m["throughput"]), _fmt(m["avg_delay"]), _fmt(m["avg_delay_norm"]),
                         _fmt(m["loss_rate"]), m["misdecodes"]])
        for node, nm in sorted(m["per_node"].items()):
            node_rows.append([run.index, run.seed, *point, node, *(_fmt(nm[c]) for c in NODE_COLUMNS)])
        records.append({"run": run.index, "seed": run.seed, "point": run.point, "metrics": m})

    _write_csv(out / "mac_runs.csv",
               ["run", "seed", *keys, "access", "nc", "queue_size", "throughput", "delay", "delay_norm", "loss", "misdecodes"],
               run_rows)
    _write_csv(out / "mac_nodes.csv", ["run", "seed", *keys, "node", *NODE_COLUMNS], node_rows)
    summary = {"version": __version__, "command": "mac-sim", "config": tree,
               "runs": records, "means": _means(records, keys)}
    _write_json(out / "mac_summary.json", summary)
    return summary


def _means(records: list[dict], keys: list[str]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    for rec in records:
        groups.setdefault(tuple(json.dumps(rec["point"][k]) for k in keys), []).append(rec)
    out = []
    for _, recs in sorted(groups.items()):
        ms = [r["metrics"] for r in recs]
        out.append({
            "point": recs[0]["point"],
            "seeds": [r["seed"] for r in recs],
            "throughput": float(np.mean([m["throughput"] for m in ms])),
            "avg_delay_norm": float(np.mean([m["avg_delay_norm"] for m in ms])),
            "loss_rate": float(np.mean([m["loss_rate"] for m in ms])),
            "per_node": {
                n: {c: float(np.mean([m["per_node"][n][c] for m in ms])) for c in ("throughput", "loss_rate", "uplink_loss")}
                for n in ("A", "B")
            },
        })
    return out


# -- PHY ----------------------------------------------------------------------

def _phy_job(run: Run) -> dict:
    return run_phy_exchange(phy_scenario(run.tree, run.seed)).to_dict()


def run_phy(tree: dict, out: Path, jobs: int = 1) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    if tree["phy"]["task"] == "constellation":
        return _run_constellation(tree, out)
    if tree["phy"]["task"] != "throughput":
        from ..macsim.config import ConfigError
        raise ConfigError("phy.task must be 'throughput' or 'constellation'")
    runs = expand(tree)
    for r in runs:
        phy_scenario(r.tree, r.seed)
    results = _map(_phy_job, runs, jobs)
    rows = []
    for run, m in zip(runs, results):
        rows.append((
            m["traffic"], m["exchange"], m["labeling"], m["snr_db"], run.seed,
            [_fmt(m["snr_db"]), m["traffic"], m["exchange"], m["labeling"], run.seed,
             _fmt(m["throughput"]), _fmt(m["flow_throughput"]["A->B"]), _fmt(m["flow_throughput"]["B->A"]),
             _fmt(m["ber"]), _fmt(m["fer"]), m["blocks"]],
        ))
    rows.sort(key=lambda r: r[:5])
    _write_csv(out / "phy.csv",
               ["snr_db", "traffic", "scheme", "labeling", "seed", "throughput", "throughput_ab", "throughput_ba", "ber", "fer", "blocks"],
               [r[-1] for r in rows])
    summary = {"version": __version__, "command": "phy-sim", "config": tree,
               "runs": [{"run": r.index, "seed": r.seed, "point": r.point, "metrics": m} for r, m in zip(runs, results)]}
    _write_json(out / "phy_summary.json", summary)
    return summary


def _run_constellation(tree: dict, out: Path) -> dict:
    snr = float(tree["phy"]["snr_db"])
    seed = tree["sim"]["seed"]
    y, x = constellation_dump(snr, seed=seed)
    _write_csv(out / "iq.csv", ["i", "q", "ref_i", "ref_q"],
               [[_fmt(float(a.real)), _fmt(float(a.imag)), _fmt(float(b.real)), _fmt(float(b.imag))] for a, b in zip(y, x)])
    summary = {"version": __version__, "command": "phy-sim", "config": tree,
               "snr_db": snr, "evm": evm(y, x), "cells": int(y.size)}
    _write_json(out / "iq_summary.json", summary)
    return summary
