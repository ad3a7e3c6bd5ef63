"""Command-line entry point.

Subcommands: train, eval, baseline, trace, bench, validate, summarize.
Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from collections import deque
from dataclasses import replace

import numpy as np

from .baselines.base_stock import BaseStockPolicy, default_z0, optimize_base_stock
from .baselines.random_policy import RandomPolicy
from .config import (
    ConfigError,
    ExperimentConfig,
    config_hash,
    dump_resolved,
    resolve_with_overrides,
)
from .env.trace import write_trace_file
from .harness.bench import DEFAULT_PRODUCT_SWEEP, bench_step
from .harness.evaluate import evaluate_policy, run_episode
from .harness.metrics import BENCH_COLUMNS, METRIC_COLUMNS, CsvLog
from .harness.train import eval_seed_list, run_experiment
from .rl.agents import AgentTeam, TeamPolicy
from .rl.checkpoint import CheckpointMismatch, load_checkpoint

USAGE_ERROR = 1
CONFIG_ERROR = 2
RUNTIME_ERROR = 3

COMPONENT_NAMES = ("revenue", "holding_cost", "procurement_cost", "unfulfilled_penalty")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="echelon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, variant=False):
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a resolved config entry (dotted path)",
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        if variant:
            p.add_argument("--variant", help="override the configured variant tag")

    p = sub.add_parser("train", help="train a variant and log per-episode metrics")
    add_common(p, variant=True)
    p.add_argument("--episodes", type=int, help="override the training episode budget")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("eval", help="evaluate a policy on fixed seeds")
    add_common(p, variant=True)
    p.add_argument("--episodes", type=int, default=20)
    p.add_argument("--checkpoint", help="trained checkpoint to evaluate")
    p.add_argument("--z-file", help="base_stock.json from the baseline command")
    p.add_argument("--policy", choices=("random", "bsp"), default="random",
                   help="fallback policy when no checkpoint or z-file is given")
    p.add_argument("--out", help="directory for per-seed eval.csv (optional)")

    p = sub.add_parser("baseline", help="tune base-stock targets by direct search")
    add_common(p)
    p.add_argument("--episodes", type=int, default=20,
                   help="tuning episodes per objective evaluation")
    p.add_argument("--max-sweeps", type=int, default=200)
    p.add_argument("--ftol", type=float, default=1e-6)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("trace", help="dump one greedy episode to CSV")
    add_common(p, variant=True)
    p.add_argument("--checkpoint", help="trained checkpoint to trace")
    p.add_argument("--z-file", help="base_stock.json from the baseline command")
    p.add_argument("--policy", choices=("random", "bsp"), default="random")
    p.add_argument("--out", required=True, help="trace CSV path")

    p = sub.add_parser("bench", help="measure simulator step latency across scales")
    add_common(p)
    p.add_argument("--products", default=",".join(str(k) for k in DEFAULT_PRODUCT_SWEEP),
                   help="comma-separated product counts to sweep")
    p.add_argument("--steps", type=int, default=1000, help="timed steps per scale")
    p.add_argument("--reference", action="store_true",
                   help="time the scalar reference path instead of the vectorized one")
    p.add_argument("--out", help="directory for bench.csv (optional)")

    p = sub.add_parser("validate", help="check a config file and echo it resolved")
    p.add_argument("--config", required=True, help="YAML config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")

    p = sub.add_parser("summarize", help="summarize training output directories")
    p.add_argument("dirs", nargs="+", help="output directories from train runs")

    return parser


def _load(args) -> ExperimentConfig:
    exp = resolve_with_overrides(args.config, args.set)
    if getattr(args, "variant", None):
        exp = replace(exp, run=replace(exp.run, variant=args.variant))
    return exp


def _policy_for(args, exp: ExperimentConfig, seed: int):
    cfg = exp.chain
    if getattr(args, "checkpoint", None):
        team = AgentTeam(cfg, exp.run.variant, exp.ppo, seed=0)
        load_checkpoint(args.checkpoint, exp.run.variant, config_hash(cfg), team.nets)
        return TeamPolicy(team), f"checkpoint:{args.checkpoint}"
    if getattr(args, "z_file", None):
        with open(args.z_file, "r", encoding="utf-8") as fh:
            z = np.asarray(json.load(fh)["z"], dtype=np.float64)
        return BaseStockPolicy(cfg, z), f"base-stock:{args.z_file}"
    if args.policy == "bsp":
        return BaseStockPolicy(cfg, default_z0(cfg)), "base-stock:default"
    return RandomPolicy(cfg, seed), "random"


def _cmd_train(args) -> int:
    exp = _load(args)
    if args.episodes is not None:
        exp = replace(exp, run=replace(exp.run, episodes=args.episodes))
    progress = None
    if not args.quiet:
        progress = lambda ep, ret: print(f"episodes={ep} eval_mean_return={ret:.3f}")
    result = run_experiment(exp, args.seed, args.out, progress=progress)
    if not args.quiet:
        print(
            f"trained {result.variant} for {result.episodes} episodes: "
            f"rolling_mean_100={result.final_rolling_mean:.3f} "
            f"eval_mean_return={result.eval_mean_return:.3f} "
            f"eval_stockout_rate={result.eval_stockout_rate:.4f}"
        )
        print(f"outputs in {result.out_dir}")
    return 0


def _cmd_eval(args) -> int:
    exp = _load(args)
    policy, label = _policy_for(args, exp, args.seed)
    seeds = eval_seed_list(args.seed, args.episodes)
    report = evaluate_policy(exp.chain, policy, seeds)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "eval.csv")
        columns = ("seed", "episode_return", "stockout_rate") + COMPONENT_NAMES
        with open(path, "w", encoding="utf-8", newline="") as fh:
            log = CsvLog(fh, columns)
            for s, ret, so, comp in zip(
                report.seeds, report.returns, report.stockout_rates, report.components
            ):
                log.row(seed=s, episode_return=ret, stockout_rate=so, **comp)
        if not args.quiet:
            print(f"wrote {path}")
    breakdown = " ".join(
        f"{name}={report.mean_component(name):.3f}" for name in COMPONENT_NAMES
    )
    print(
        f"{label}: episodes={len(seeds)} mean_return={report.mean_return:.3f} "
        f"return_std={report.std_return:.3f} "
        f"stockout_rate={report.mean_stockout_rate:.4f}"
    )
    print(f"  {breakdown}")
    return 0


def _cmd_baseline(args) -> int:
    exp = _load(args)
    cfg = exp.chain
    tune_rng = np.random.default_rng(np.random.SeedSequence([args.seed, 2]))
    tune_seeds = [int(s) for s in tune_rng.integers(0, 2**31, size=args.episodes)]
    fit = optimize_base_stock(
        cfg, tune_seeds, ftol=args.ftol, max_sweeps=args.max_sweeps
    )
    eval_seeds = eval_seed_list(args.seed, exp.run.eval_episodes)
    report = evaluate_policy(cfg, BaseStockPolicy(cfg, fit.z), eval_seeds)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "base_stock.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "z": fit.z.tolist(),
                "tune_mean_return": fit.mean_return,
                "eval_mean_return": report.mean_return,
                "eval_stockout_rate": report.mean_stockout_rate,
                "sweeps": fit.search.sweeps,
                "evaluations": fit.search.evaluations,
                "cached_evals": fit.cached_evals,
                "converged": fit.search.converged,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    if not args.quiet:
        print(f"tuned z:\n{fit.z}")
        print(
            f"tune_mean_return={fit.mean_return:.3f} "
            f"eval_mean_return={report.mean_return:.3f}"
        )
        print(f"wrote {path}")
    return 0


def _cmd_trace(args) -> int:
    exp = _load(args)
    policy, label = _policy_for(args, exp, args.seed)
    policy_seed = int(np.random.SeedSequence([args.seed, 0x5EED]).generate_state(1)[0])
    tables, total = run_episode(exp.chain, policy, args.seed, policy_seed=policy_seed)
    write_trace_file(args.out, exp.chain, tables)
    if not args.quiet:
        print(f"{label}: episode_return={total:.3f}")
        print(f"wrote {args.out}")
    return 0


def _cmd_bench(args) -> int:
    exp = _load(args)
    try:
        sweep = tuple(int(k) for k in args.products.split(","))
    except ValueError:
        raise ConfigError(f"--products must be comma-separated integers, got '{args.products}'")
    rows = bench_step(
        exp.chain, sweep, min_steps=args.steps, seed=args.seed, reference=args.reference
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "bench.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            log = CsvLog(fh, BENCH_COLUMNS)
            for r in rows:
                log.row(
                    num_products=r.num_products,
                    num_stores=r.num_stores,
                    steps=r.steps,
                    median_step_seconds=r.median_step_seconds,
                )
        if not args.quiet:
            print(f"wrote {path}")
    for r in rows:
        print(
            f"K={r.num_products:<5d} N={r.num_stores} steps={r.steps} "
            f"median_step={r.median_step_seconds * 1e3:.4f} ms"
        )
    return 0


def _cmd_validate(args) -> int:
    exp = resolve_with_overrides(args.config, args.set)
    sys.stdout.write(dump_resolved(exp))
    return 0


def _read_metrics_rows(path: str) -> list[dict]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            rows = list(reader)
    except OSError as exc:
        raise RuntimeError(f"cannot read {path}: {exc}") from exc
    if header is None:
        return []
    missing = [c for c in METRIC_COLUMNS if c not in header]
    if missing:
        raise RuntimeError(f"{path} is missing column(s): {', '.join(missing)}")
    return rows


def _cmd_summarize(args) -> int:
    for d in args.dirs:
        path = os.path.join(d, "metrics.csv")
        rows = _read_metrics_rows(path)
        if not rows:
            print(f"{d}: 0 episodes")
            continue
        window: deque[float] = deque(maxlen=100)
        best = -math.inf
        try:
            for row in rows:
                window.append(float(row["episode_return"]))
                best = max(best, math.fsum(window) / len(window))
            final = math.fsum(window) / len(window)
            means = {
                name: math.fsum(float(r[name]) for r in rows) / len(rows)
                for name in COMPONENT_NAMES + ("stockouts",)
            }
        except (ValueError, KeyError) as exc:
            raise RuntimeError(f"corrupt metrics in {path}: {exc}") from exc
        print(f"{d}: {len(rows)} episodes")
        print(f"  final_rolling_mean_100={final!r}")
        print(f"  best_rolling_mean_100={best!r}")
        print(
            "  mean_components:"
            + "".join(f" {name}={means[name]!r}" for name in COMPONENT_NAMES)
        )
        print(f"  mean_stockouts_per_episode={means['stockouts']!r}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "baseline": _cmd_baseline,
    "trace": _cmd_trace,
    "bench": _cmd_bench,
    "validate": _cmd_validate,
    "summarize": _cmd_summarize,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except CheckpointMismatch as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    except Exception as exc:  # noqa: BLE001 - map any runtime failure to exit 3
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
