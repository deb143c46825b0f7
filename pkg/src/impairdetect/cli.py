"""Command-line entry point.

    impairdetect gen-data    --n-normal 100 --n-induced 99 --seed 7 --out d.csv
    impairdetect train-eval  --data d.csv --k 5 --seed 7 [--presets "Boosted Trees,Fine Tree"]
    impairdetect plot-export --data d.csv [--preset "Boosted Trees"]
    impairdetect simulate    --scenario s.json [--expect-alert | --expect-no-alert]

Exit status: 0 success, 1 runtime failure or unmet expectation, 2 usage error.
Every run ends by writing a manifest.json listing the files it produced.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bracelet import FileSink, load_scenario, run_decision_loop
from .dataset import GeneratorConfig, generate_synthetic, load_csv, save_csv
from .evaluation import (PARALLEL_HEADER, SCATTER_HEADER, cross_validate, export_parallel_coords,
                         export_scatter, leaderboard_csv, leaderboard_text, run_leaderboard,
                         stratified_kfold, table_csv)
from .presets import DEFAULT_PRESETS, get_preset


class UsageError(Exception):
    pass


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def _run_dir(args, subcommand) -> Path:
    tag = args.tag or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    d = Path(args.out_dir) / subcommand / tag
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write(path: Path, text: str, outputs: list):
    path.write_text(text, encoding="utf-8", newline="\n")
    outputs.append(str(path))


def _write_manifest(path: Path, subcommand, config, seed, outputs):
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "outputs": outputs,
        "version": __version__,
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_presets(values):
    if not values:
        return list(DEFAULT_PRESETS)
    names = [n.strip() for v in values for n in v.split(",") if n.strip()]
    try:
        return [get_preset(n).name for n in names]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def cmd_gen_data(args) -> int:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    overrides = {"n_normal": args.n_normal, "n_induced": args.n_induced, "seed": args.seed,
                 "overlap_fraction": args.overlap}
    base.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = GeneratorConfig(**base)
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid generator config: {exc}") from None
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    ds = generate_synthetic(cfg, name=out.stem)
    save_csv(ds, out)
    n0, n1 = ds.class_counts()
    print(f"wrote {len(ds)} samples ({n0} normal, {n1} induced) to {out}")
    _write_manifest(Path(f"{out}.manifest.json"), "gen-data", dataclasses.asdict(cfg), cfg.seed, [str(out)])
    return 0


def cmd_train_eval(args) -> int:
    presets = _parse_presets(args.presets)
    ds = load_csv(args.data)
    run = _run_dir(args, "train-eval")
    reports = run_leaderboard(ds, presets, k=args.k, seed=args.seed,
                              stratified=not args.no_stratify, jobs=args.jobs)
    outputs: list[str] = []
    text = leaderboard_text(reports)
    _write(run / "leaderboard.txt", text, outputs)
    _write(run / "leaderboard.csv", leaderboard_csv(reports), outputs)
    (run / "reports").mkdir(exist_ok=True)
    for r in reports:
        _write(run / "reports" / f"{_slug(r.classifier)}.json", json.dumps(r.to_dict(), indent=2) + "\n", outputs)
    winner = next(r for r in reports if r.winner)
    _write(run / "scatter.csv", table_csv(SCATTER_HEADER, export_scatter(ds)), outputs)
    _write(run / "parallel_coords.csv",
           table_csv(PARALLEL_HEADER, export_parallel_coords(ds, winner.predictions)), outputs)
    print(text, end="")
    print(f"best: {winner.classifier} ({100 * winner.accuracy:.1f}%)")
    config = {"data": str(args.data), "presets": presets, "k": args.k,
              "stratified": not args.no_stratify}
    _write_manifest(run / "manifest.json", "train-eval", config, args.seed, outputs)
    return 0


def cmd_plot_export(args) -> int:
    name = _parse_presets([args.preset])[0]
    ds = load_csv(args.data)
    run = _run_dir(args, "plot-export")
    plan = stratified_kfold(ds, args.k, args.seed)
    report = cross_validate(ds, name, plan, args.seed)
    outputs: list[str] = []
    _write(run / "scatter.csv", table_csv(SCATTER_HEADER, export_scatter(ds)), outputs)
    _write(run / "parallel_coords.csv",
           table_csv(PARALLEL_HEADER, export_parallel_coords(ds, report.predictions)), outputs)
    config = {"data": str(args.data), "preset": name, "k": args.k}
    _write_manifest(run / "manifest.json", "plot-export", config, args.seed, outputs)
    return 0


def cmd_simulate(args) -> int:
    try:
        cfg = load_scenario(args.scenario)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: malformed scenario {args.scenario}: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    run = _run_dir(args, "simulate")
    outputs: list[str] = []
    sink_path = Path(args.sink) if args.sink else run / "alerts.txt"
    if not args.sink:
        sink_path.write_text("", encoding="utf-8")
    result = run_decision_loop(cfg, sink=FileSink(sink_path))
    outputs.append(str(sink_path))
    _write(run / "step_log.csv", result.log_csv(), outputs)
    if result.alert:
        print(sink_path.read_text(encoding="utf-8").splitlines()[-1])
    else:
        print(f"no alert over {len(result.log)} windows")
    _write_manifest(run / "manifest.json", "simulate", cfg.to_dict(), cfg.seed, outputs)
    if args.expect_alert and result.alert is None:
        print("expected an alert, none fired", file=sys.stderr)
        return 1
    if args.expect_no_alert and result.alert is not None:
        print("expected no alert, one fired", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="impairdetect", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def out_flags(sp):
        sp.add_argument("--out-dir", default="out", help="root for out/<subcommand>/<tag>/")
        sp.add_argument("--tag", help="run directory name (default: UTC timestamp)")

    g = sub.add_parser("gen-data", help="write a synthetic BAC/PulseRate/Target CSV")
    g.add_argument("--n-normal", type=int)
    g.add_argument("--n-induced", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--overlap", type=float, help="share of induced subjects drawn like normals")
    g.add_argument("--config", help="JSON object of generator settings; flags override it")
    g.add_argument("--out", required=True, help="CSV path to write")
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train-eval", help="cross-validate presets and write the leaderboard")
    t.add_argument("--data", required=True)
    t.add_argument("--k", type=int, default=5)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--presets", action="append", help="comma-separated preset names (repeatable)")
    t.add_argument("--no-stratify", action="store_true", help="plain shuffled k-fold")
    t.add_argument("--jobs", type=int, default=1, help="worker processes for presets")
    out_flags(t)
    t.set_defaults(func=cmd_train_eval)

    x = sub.add_parser("plot-export", help="write scatter and parallel-coordinates CSVs")
    x.add_argument("--data", required=True)
    x.add_argument("--preset", default="Boosted Trees")
    x.add_argument("--k", type=int, default=5)
    x.add_argument("--seed", type=int, default=0)
    out_flags(x)
    x.set_defaults(func=cmd_plot_export)

    s = sub.add_parser("simulate", help="run the bracelet decision loop for one scenario")
    s.add_argument("--scenario", required=True, help="scenario JSON file")
    s.add_argument("--seed", type=int, help="override the scenario seed")
    s.add_argument("--sink", help="append alerts to this file instead of the run directory")
    e = s.add_mutually_exclusive_group()
    e.add_argument("--expect-alert", action="store_true")
    e.add_argument("--expect-no-alert", action="store_true")
    out_flags(s)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
