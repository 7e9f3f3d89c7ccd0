"""Command-line experiment driver.

Subcommands::

    weakstrong generate --config exp.cfg --out runs/   # train/test datasets
    weakstrong run      --config exp.cfg --out runs/   # sessions -> results.csv
    weakstrong plot     --out runs/                    # SVG figures
    weakstrong report   --out runs/ [--budget 7 --beta 0]

Exit codes: 0 success, 2 config error, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import cpd, experiment
from .annotator import AnnotatorConfig, annotate
from .cpd import Strategy
from .evalmodels import DegenerateTraining
from .loop import LoopConfig, initial_model
from .protonet import probability_curve, read_model
from .synthgen import DatasetSpec
from .svg import Axes, Canvas, line_chart
from .timeline import merge_positive

log = logging.getLogger("weakstrong")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _config(args) -> experiment.ExperimentConfig:
    cfg = experiment.load_config(args.config)
    return cfg.with_seed(args.seed) if args.seed else cfg


# -- generate ---------------------------------------------------------------------


def cmd_generate(cfg: experiment.ExperimentConfig, out: Path, force: bool = False) -> list[Path]:
    existing = [p for name in cfg.datasets for p in experiment.dataset_dirs(out, name) if p.exists()]
    if existing and not force:
        raise CliError(f"{existing[0]} exists; pass --force to overwrite", EXIT_CONFIG)
    for p in existing:
        shutil.rmtree(p)
    return experiment.materialize(cfg, out)


# -- run ----------------------------------------------------------------------------

_worker_cfg: experiment.ExperimentConfig | None = None
_worker_out: Path | None = None
_worker_data: dict = {}


def _init_worker(cfg, out):
    global _worker_cfg, _worker_out
    _worker_cfg, _worker_out = cfg, out
    _worker_data.clear()


def _run_task(point):
    name, strategy, B, beta, seed = point
    if name not in _worker_data:
        _worker_data[name] = experiment.load_pair(_worker_out, name)
    train, test = _worker_data[name]
    return experiment.run_point(_worker_cfg, name, train, test, strategy, B, beta, seed, _worker_out)


def cmd_run(cfg: experiment.ExperimentConfig, out: Path, force: bool = False, jobs: int = 1) -> Path:
    """Run every grid point not yet in ``results.csv`` and append its metric rows."""
    results = out / "results.csv"
    missing = [n for n in cfg.datasets if not all(p.exists() for p in experiment.dataset_dirs(out, n))]
    if missing:
        log.info("generating missing datasets: %s", ", ".join(missing))
        experiment.materialize(dataclasses.replace(cfg, datasets={n: cfg.datasets[n] for n in missing}), out)
    if force and results.exists():
        results.unlink()
    done = {
        experiment.point_key(r["dataset"], r["strategy"], r["B"], r["beta"], r["gamma"], r["seed"])
        for r in experiment.read_results(results)
    }
    todo = [p for p in cfg.grid() if experiment.point_key(p[0], p[1], p[2], p[3], cfg.gamma, p[4]) not in done]
    log.info("%d grid points to run (%d already present)", len(todo), len(cfg.grid()) - len(todo))

    try:
        if jobs > 1:
            with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(cfg, out)) as pool:
                outcomes = list(pool.map(_run_task, todo))
        else:
            _init_worker(cfg, out)
            outcomes = [_run_task(p) for p in todo]
    except DegenerateTraining as exc:
        raise CliError(f"degenerate annotations: {exc}", EXIT_DEGENERATE) from None

    rows = []
    for point, metrics in zip(todo, outcomes):
        if metrics is None:
            continue
        name, strategy, B, beta, seed = point
        rows += experiment.format_result_rows(experiment.point_key(name, strategy, B, beta, cfg.gamma, seed), metrics)
    out.mkdir(parents=True, exist_ok=True)
    fresh = not results.exists() or results.stat().st_size == 0
    # single writer, grid order: output is independent of --jobs
    with results.open("a") as fh:
        fh.write(experiment.results_text(rows, header=fresh))
    return results


# -- plot ---------------------------------------------------------------------------


def cmd_plot(results: Path, out: Path, dataset: str | None = None, recording: str | None = None, B: int = 7) -> list[Path]:
    rows = experiment.read_results(results)
    if not rows:
        raise CliError(f"no result rows in {results}", EXIT_DEGENERATE)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    titles = {
        "train_f1s": "Annotation F1s",
        "test_f1s_protonet": "Test F1s (ProtoNet)",
        "test_f1s_mlp": "Test F1s (MLP)",
    }
    data_root = results.parent / "data"
    names = sorted({r["dataset"] for r in rows})
    meta = data_root / names[0] / "train" / "meta"
    b_suff = DatasetSpec.from_meta(meta.read_text()).b_suff if meta.exists() else None
    for metric, title in titles.items():
        for beta, series in sorted(experiment.aggregate(rows, metric).items()):
            path = out / f"{metric}_beta{beta:g}.svg"
            path.write_text(
                line_chart(series, f"{title}, beta={beta:g}", "queries per recording B", "F1s", shade_from=b_suff)
            )
            written.append(path)
    dataset = dataset or names[0]
    if (data_root / dataset / "train" / "meta").exists():
        written.append(plot_snapshot(results.parent, dataset, recording, B, out))
    return written


def plot_snapshot(root: Path, dataset: str, recording: str | None, B: int, out: Path) -> Path:
    """Per-recording view of how A-CPD, F-CPD and FIX cut one recording into queries."""
    train, _ = experiment.load_pair(root, dataset)
    rec = next((r for r in train if r.id == recording), None) if recording else train[0]
    if rec is None:
        raise CliError(f"no recording {recording!r} in {dataset}", EXIT_CONFIG)
    blob = sorted((root / "sessions" / dataset).glob(f"ACPD_B{B}_beta0_seed*/model.proto"))
    model = read_model(blob[0]) if blob else initial_model(train, LoopConfig(Strategy.ACPD, B))
    T = rec.duration
    prob = probability_curve(model, rec.stream)
    panels = [
        ("A-CPD", cpd.acpd_curve(prob, rec.stream.hop), prob),
        ("F-CPD", cpd.fcpd_curve(rec.stream, rec.stream.hop), None),
        ("FIX", None, None),
    ]
    canvas = Canvas(760, 150 * len(panels) + 40)
    for k, (name, curve, p) in enumerate(panels):
        ax = Axes(canvas, (60, 30 + 150 * k, 660, 100), (0.0, T), (0.0, 1.0))
        for ev in rec.ground_truth:
            canvas.rect(ax.px(ev.start), ax.y0, ax.px(ev.end) - ax.px(ev.start), ax.h, "#2ca02c", 0.25)
        if name == "A-CPD":
            queries = cpd.acpd_queries(model, rec.stream, B, T)
        elif name == "F-CPD":
            queries = cpd.fcpd_queries(rec.stream, B, T)
        else:
            queries = cpd.fix_queries(T, B)
        ann = annotate(queries, rec.ground_truth, AnnotatorConfig(), np.random.default_rng(0))
        for ev in merge_positive(ann):
            canvas.rect(ax.px(ev.start), ax.y0 + ax.h * 0.8, ax.px(ev.end) - ax.px(ev.start), ax.h * 0.2, "#d62728", 0.5)
        if p is not None:
            ax.series(p.timestamps, p.values, "#ff7f0e")
        if curve is not None:
            top = max(float(curve.values.max()), 1e-12)
            ax.series(curve.timestamps, curve.values / top, "#1f77b4")
            for i, _ in cpd.find_peaks(curve):
                t = curve.timestamps[i]
                if t in queries.boundaries():
                    canvas.marker(ax.px(t), ax.py(curve.values[i] / top), "#d62728")
        for t in queries.boundaries():
            canvas.line(ax.px(t), ax.y0, ax.px(t), ax.y0 + ax.h, "#d62728", 1.0, dash="4,3")
        ax.frame([0, T / 4, T / 2, 3 * T / 4, T] if k == len(panels) - 1 else [], [0, 1], title=f"{name}, B={B}")
    path = out / f"snapshot_{dataset}_{rec.id}.svg"
    path.write_text(canvas.render())
    return path


# -- report -------------------------------------------------------------------------


def cmd_report(results: Path, B: int = 7, beta: float = 0.0, stream=None) -> str:
    stream = stream or sys.stdout
    rows = experiment.read_results(results)
    if not rows:
        raise CliError(f"no result rows in {results}", EXIT_DEGENERATE)
    tab = experiment.table(rows, B, beta)
    datasets = sorted({d for d, _ in tab})
    order = [s.value for s in Strategy if any(k[1] == s.value for k in tab)]
    cols = [("train_f1s", "F1s"), ("train_f1e", "F1e"), ("test_f1s_protonet", "proto"), ("test_f1s_mlp", "mlp")]
    lines = [f"B={B} beta={beta:g}"]
    header = f"{'strategy':<9}" + "".join(f"| {d:<27}" for d in datasets)
    sub = f"{'':<9}" + "".join("| " + " ".join(f"{c:>6}" for _, c in cols) + " " for _ in datasets)
    lines += [header, sub, "-" * len(sub)]
    for s in order:
        cells = []
        for d in datasets:
            m = tab.get((d, s))
            cells.append("| " + " ".join(f"{m[k]:6.3f}" if m and k in m else f"{'-':>6}" for k, _ in cols) + " ")
        lines.append(f"{s:<9}" + "".join(cells))
    text = "\n".join(lines) + "\n"
    stream.write(text)
    return text


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakstrong", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="experiment config file")
        p.add_argument("--out", type=Path, default=Path("runs"), help="output directory")
        p.add_argument("--seed", type=int, default=0, help="offset added to dataset and session seeds")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    p = common(sub.add_parser("generate", help="materialize train/test datasets"))
    p.add_argument("--force", action="store_true", help="overwrite existing datasets")
    p = common(sub.add_parser("run", help="run the experiment grid"))
    p.add_argument("--force", action="store_true", help="discard existing results.csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p = common(sub.add_parser("plot", help="emit SVG figures from results.csv"))
    p.add_argument("--dataset", default=None, help="dataset for the recording snapshot")
    p.add_argument("--recording", default=None, help="recording id for the snapshot")
    p.add_argument("--budget", type=int, default=7)
    p = common(sub.add_parser("report", help="print the annotation-quality table"))
    p.add_argument("--budget", type=int, default=7)
    p.add_argument("--beta", type=float, default=0.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "generate":
            for path in cmd_generate(_config(args), args.out, args.force):
                print(path)
        elif args.command == "run":
            print(cmd_run(_config(args), args.out, args.force, args.jobs))
        elif args.command == "plot":
            for path in cmd_plot(args.out / "results.csv", args.out / "figures", args.dataset, args.recording, args.budget):
                print(path)
        elif args.command == "report":
            cmd_report(args.out / "results.csv", args.budget, args.beta)
    except experiment.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
