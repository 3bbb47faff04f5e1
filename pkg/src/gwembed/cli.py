"""Command-line experiment runner.

Commands
--------
embed     one dataset, one method -> embedding.csv, loss.csv, metrics.json [, SVGs]
compare   method x dataset grid from a JSON file -> compare.csv, compare.md
lr-study  GW-MDS with lr in {0.1, 0.01} x init in {randn, pca} -> loss files + SVG

Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import svg
from .config import (DATASETS, INITS, METHODS, METRICS, NORMALIZATIONS, ConfigError,
                     ExperimentConfig, load_config_file)
from .errors import DataError, NumericalError
from .evaluation import distance_scatter
from .metrics import pairwise_euclidean
from .runner import run

log = logging.getLogger("gwembed")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
LR_STUDY_RATES = (0.1, 0.01)
LR_STUDY_INITS = ("randn", "pca")

# CLI flag -> config field
_FLAG_FIELDS = {
    "dataset": "dataset", "n": "n", "noise": "noise", "path": "path",
    "max_items": "max_items", "subsample": "subsample", "data_seed": "data_seed",
    "normalize": "normalize", "method": "method", "dim": "target_dim", "metric": "metric",
    "k": "k", "init": "init", "lr": "learning_rate", "max_iters": "max_outer_iters",
    "fw_max_iters": "fw_max_iters", "fw_tol": "fw_tol", "tol": "convergence_tol",
    "mds_max_iters": "mds_max_iters", "seed": "seed",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_config_flags(p: argparse.ArgumentParser, with_method: bool = True) -> None:
    p.add_argument("--config", help="flat JSON file with config fields")
    p.add_argument("--dataset", choices=DATASETS)
    p.add_argument("--path", help="input file for --dataset idx/csv")
    p.add_argument("--n", type=int, help="sample count for generated datasets")
    p.add_argument("--noise", type=float)
    p.add_argument("--max-items", type=int)
    p.add_argument("--subsample", type=int, help="random subset size (seeded)")
    p.add_argument("--data-seed", type=int)
    p.add_argument("--normalize", choices=NORMALIZATIONS)
    if with_method:
        p.add_argument("--method", choices=METHODS)
        p.add_argument("--init", choices=INITS)
        p.add_argument("--lr", type=float)
    p.add_argument("--metric", choices=METRICS)
    p.add_argument("--k", type=int, help="neighbours for geodesic distances")
    p.add_argument("--dim", type=int, help="target dimension")
    p.add_argument("--max-iters", type=int, help="GW-MDS outer iterations")
    p.add_argument("--fw-max-iters", type=int)
    p.add_argument("--fw-tol", type=float)
    p.add_argument("--tol", type=float, help="GW-MDS convergence tolerance")
    p.add_argument("--mds-max-iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gwembed", description="Gromov-Wasserstein MDS experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("embed", help="embed one dataset with one method")
    _add_config_flags(p)
    p.add_argument("--svg", action="store_true", help="also write scatter.svg and distscatter.svg")
    p = sub.add_parser("compare", help="method x dataset grid of Pearson correlations")
    _add_config_flags(p)
    p.add_argument("--grid", help="JSON grid file (methods, datasets, seeds + base fields)")
    p = sub.add_parser("lr-study", help="learning-rate x initialisation loss curves")
    _add_config_flags(p, with_method=False)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {field: getattr(args, flag) for flag, field in _FLAG_FIELDS.items()
            if getattr(args, flag, None) is not None}


def _layered(args: argparse.Namespace, base: Optional[dict] = None) -> dict:
    """Built-in defaults < config file < base dict < command-line flags."""
    merged = {}
    if args.config:
        merged.update(load_config_file(args.config))
    if base:
        merged.update(base)
    merged.update(_overrides(args))
    return merged


def _fmt(x: float) -> str:
    return repr(float(x))


def write_embedding_csv(path: Path, coords: np.ndarray) -> None:
    d = coords.shape[1]
    lines = ["id," + ",".join(f"y{j + 1}" for j in range(d))]
    lines += [f"{i}," + ",".join(_fmt(v) for v in row) for i, row in enumerate(coords)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_loss_csv(path: Path, trace) -> None:
    lines = ["iter,cost"] + [f"{i},{_fmt(c)}" for i, c in trace]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serialisable: {type(o)}")


def cmd_embed(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_dict(_layered(args))
    res = run(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    coords = np.asarray(res.embedding.coords)
    write_embedding_csv(out / "embedding.csv", coords)
    if res.config.method in ("gwmds", "mds"):
        write_loss_csv(out / "loss.csv", res.embedding.loss_trace)
    (out / "metrics.json").write_text(json.dumps(res.metrics, indent=2, default=_json_default) + "\n",
                                      encoding="utf-8")
    if args.svg:
        if coords.shape[1] >= 2:
            text = svg.scatter_svg(coords[:, 0], coords[:, 1], colors=res.color,
                                   title=f"{res.config.method} on {res.config.dataset}",
                                   xlabel="y1", ylabel="y2")
        else:
            text = svg.scatter_svg(coords[:, 0], np.zeros(len(coords)), colors=res.color,
                                   title=f"{res.config.method} on {res.config.dataset}", xlabel="y1")
        (out / "scatter.svg").write_text(text, encoding="utf-8")
        pairs = np.array(distance_scatter(res.dist_x, pairwise_euclidean(coords)))
        (out / "distscatter.svg").write_text(
            svg.scatter_svg(pairs[:, 0], pairs[:, 1], title="pairwise distances",
                            xlabel="d_X", ylabel="d_Y", diagonal=True), encoding="utf-8")
    print(f"{res.config.method} on {res.config.dataset}: pearson={res.metrics['pearson']:.6f} "
          f"stress={res.metrics['stress']:.6g} -> {out}")
    return EXIT_OK


def _grid_cell(task):
    """Run every seed of one (method, dataset) cell; failures are recorded, not raised."""
    method, dataset_label, cfg_dicts = task
    values, errors = [], []
    for cfg_dict in cfg_dicts:
        try:
            values.append(run(ExperimentConfig.from_dict(cfg_dict)).metrics["pearson"])
        except (DataError, NumericalError, ConfigError, OSError) as exc:
            errors.append(f"seed {cfg_dict.get('seed')}: {exc}")
    return method, dataset_label, values, errors


def _workers() -> int:
    raw = os.environ.get("GWEMBED_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"GWEMBED_THREADS must be an integer, got {raw!r}") from None
    return n if n > 0 else (os.cpu_count() or 1)


def cmd_compare(args: argparse.Namespace) -> int:
    grid = load_config_file(args.grid) if args.grid else {}
    methods = grid.pop("methods", [])
    datasets = grid.pop("datasets", [])
    seeds = grid.pop("seeds", None)
    if not methods or not datasets:
        raise UsageError("the grid needs non-empty 'methods' and 'datasets' lists")
    base = _layered(args, grid)
    if seeds is None:
        seeds = [base.get("seed", 0)]

    tasks, labels = [], []
    for ds in datasets:
        ds_over = {"dataset": ds} if isinstance(ds, str) else dict(ds)
        label = ds_over.pop("label", ds_over.get("dataset"))
        labels.append(label)
        for m in methods:
            cfgs = []
            for s in seeds:
                d = {**base, **ds_over, "method": m, "seed": s}
                ExperimentConfig.from_dict(d)  # fail fast on usage errors
                cfgs.append(d)
            tasks.append((m, label, cfgs))

    workers = min(_workers(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grid_cell, tasks))
    else:
        results = [_grid_cell(t) for t in tasks]

    cells = {(m, ds): (vals, errs) for m, ds, vals, errs in results}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_lines = ["method,dataset,mean,sd,runs,failed,errors"]
    md = ["| Method | " + " | ".join(labels) + " |", "|---" * (len(labels) + 1) + "|"]
    for m in methods:
        row = []
        for ds in labels:
            vals, errs = cells[(m, ds)]
            mean = float(np.mean(vals)) if vals else float("nan")
            sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            err_txt = "; ".join(errs).replace('"', "'")
            csv_lines.append(f'{m},{ds},{_fmt(mean)},{_fmt(sd)},{len(vals)},{len(errs)},"{err_txt}"')
            if not vals:
                row.append("failed")
            elif len(seeds) > 1:
                row.append(f"{mean:.4f} ± {sd:.4f}")
            else:
                row.append(f"{mean:.4f}")
        md.append(f"| {m} | " + " | ".join(row) + " |")
    (out / "compare.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    (out / "compare.md").write_text("\n".join(md) + "\n", encoding="utf-8")
    print("\n".join(md))
    return EXIT_OK


def cmd_lr_study(args: argparse.Namespace) -> int:
    base = {"dataset": "scurve", "n": 300, **_layered(args), "method": "gwmds"}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    curves, summary = {}, []
    for lr in LR_STUDY_RATES:
        for init in LR_STUDY_INITS:
            res = run(ExperimentConfig.from_dict({**base, "learning_rate": lr, "init": init}))
            name = f"lr{lr}_{init}"
            write_loss_csv(out / f"loss_{name}.csv", res.embedding.loss_trace)
            curves[f"lr={lr} {init}"] = [c for _, c in res.embedding.loss_trace]
            summary.append({"learning_rate": lr, "init": init,
                            "initial_cost": res.metrics["initial_cost"],
                            "final_cost": res.metrics["final_cost"],
                            "iterations": res.metrics["iterations"],
                            "pearson": res.metrics["pearson"]})
    (out / "loss_curves.svg").write_text(
        svg.line_chart_svg(curves, title="GW-MDS loss curves"), encoding="utf-8")
    (out / "summary.json").write_text(
        json.dumps({"runs": summary, "config": ExperimentConfig.from_dict(base).resolved().to_dict()},
                   indent=2, default=_json_default) + "\n", encoding="utf-8")
    for s in summary:
        print(f"lr={s['learning_rate']:<5} init={s['init']:<6} initial={s['initial_cost']:.6g} "
              f"final={s['final_cost']:.6g} iters={s['iterations']}")
    return EXIT_OK


COMMANDS = {"embed": cmd_embed, "compare": cmd_compare, "lr-study": cmd_lr_study}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        if "disconnected" in str(exc):
            print("hint: increase --k to connect the neighbour graph", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
