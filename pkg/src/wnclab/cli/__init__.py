"""Command-line scenario runner.

Exit status: 0 on success, 2 for configuration errors (unknown keys, invalid
values, bad presets), 3 when a run fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from ..macsim.config import ConfigError
from ..phynec.labeling import SearchBudgetError, search_optimal_labeling
from . import presets
from .config import resolve
from .runners import run_mac, run_phy

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="YAML scenario file")
    p.add_argument("--preset", metavar="NAME", help="start from a named preset")
    p.add_argument("--seed", type=int, metavar="U64", help="base seed (overrides sim.seed)")
    p.add_argument("--set", dest="assignments", action="append", default=[], metavar="KEY=VALUE",
                   help="override one value, e.g. nc.queue_size=8 (repeatable)")
    p.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wnclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    mac = sub.add_parser("mac-sim", help="run the MAC-layer simulator")
    _add_run_flags(mac)
    phy = sub.add_parser("phy-sim", help="run PHY exchanges or a constellation dump")
    _add_run_flags(phy)

    lab = sub.add_parser("search-labeling", help="exhaustive relay labeling search")
    lab.add_argument("--order", "-M", type=int, default=8, help="constellation order (4 or 8)")
    lab.add_argument("--split", type=int, nargs=2, metavar=("NA", "NB"), default=None,
                     help="bits known by sink A and sink B (default: 1 and log2(M)-1)")

    pre = sub.add_parser("presets", help="list presets or show one as YAML")
    pre.add_argument("name", nargs="?", help="preset to show")
    return parser


def _preset_tree(name: str | None, command: str) -> dict | None:
    if name is None:
        return None
    entry = presets.get(name)
    if entry["command"] != command:
        raise ConfigError(f"preset {name!r} belongs to '{entry['command']}', not '{command}'")
    return entry["tree"]


def _cmd_run(args, command: str) -> int:
    tree = resolve(_preset_tree(args.preset, command), args.config, args.assignments, args.seed)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    out = Path(args.out)
    runner = run_mac if command == "mac-sim" else run_phy
    summary = runner(tree, out, args.jobs)
    n = len(summary.get("runs", [])) or 1
    print(f"{command}: {n} run(s) written to {out}")
    return 0


def _cmd_search(args) -> int:
    M = args.order
    if M > 8:
        raise SearchBudgetError(f"exhaustive search limited to M <= 8, got {M}")
    if M not in (4, 8):
        raise ConfigError("search-labeling supports M = 4 or 8")
    k = M.bit_length() - 1
    split = tuple(args.split) if args.split else (1, k - 1)
    res = search_optimal_labeling(M, split)
    print(f"M={M} split={split[0]},{split[1]}  ({res.evaluated} labelings searched, word 0 fixed at 0 deg)")
    print("label  point  angle_deg")
    for label, point, angle in res.table():
        print(f"{label:>5}  {point:>5}  {angle:9.1f}")
    s = res.score
    print(f"objective: primary={s.primary:.6f} secondary={s.secondary:.6f} "
          f"mean_nearest={s.mean_nearest:.6f} neighbour_hamming={s.neighbour_hamming:.4f}")
    print(f"min intra-subset distance: sink A={s.sink_a:.6f} sink B={s.sink_b:.6f}")
    return 0


def _cmd_presets(args) -> int:
    if args.name is None:
        for name, entry in sorted(presets.PRESETS.items()):
            print(f"{name:<20} {entry['command']:<8} {entry['description']}")
        return 0
    entry = presets.get(args.name)
    print(f"# {entry['description']}\n# run with: wnclab {entry['command']} --preset {args.name}")
    print(yaml.safe_dump(entry["tree"], sort_keys=True), end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("mac-sim", "phy-sim"):
            return _cmd_run(args, args.command)
        if args.command == "search-labeling":
            return _cmd_search(args)
        return _cmd_presets(args)
    except (ConfigError, SearchBudgetError) as exc:
        print(f"wnclab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure during a run maps to one exit code
        print(f"wnclab: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
