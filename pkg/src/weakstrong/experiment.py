"""Experiment grid: configs, per-point scoring and the results CSV."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .annotator import AnnotatorConfig
from .cpd import Strategy, UnsupportedBudget, b_suff
from .evalmodels import TrainConfig, build_training_set, evaluate_model, train_mlp, train_protonet_eval
from .loop import LoopConfig, SessionResult, run_session
from .metrics import event_f1, pooled, segment_f1
from .synthgen import Dataset, DatasetSpec, PRESETS, generate_dataset, load_dataset, save_dataset
from .timeline import merge_positive

RESULT_COLUMNS = ["dataset", "strategy", "B", "beta", "gamma", "seed", "metric", "value"]
METRICS = ["train_f1s", "train_f1e", "test_f1s_protonet", "test_f1s_mlp"]


class ConfigError(ValueError):
    pass


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


@dataclass
class ExperimentConfig:
    datasets: dict[str, DatasetSpec] = field(default_factory=lambda: dict(PRESETS))
    strategies: list[Strategy] = field(default_factory=lambda: list(Strategy))
    budgets: list[int] = field(default_factory=lambda: [3, 5, 7, 9, 11])
    betas: list[float] = field(default_factory=lambda: [0.0, 0.2])
    gamma: float = 0.5
    n_seeds: int = 10
    base_seed: int = 0
    n_pretrain_pos: int = 32
    n_pretrain_neg: int = 32
    save_annotations: bool = True
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if not (self.datasets and self.strategies and self.budgets and self.betas):
            raise ConfigError("dataset, strategy, budget and beta lists must be non-empty")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be >= 1")

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.n_seeds)]

    def grid(self) -> list[tuple[str, Strategy, int, float, int]]:
        return [
            (name, strategy, B, beta, seed)
            for name in self.datasets
            for strategy in self.strategies
            for B in self.budgets
            for beta in self.betas
            for seed in self.seeds()
        ]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Shift dataset and session seeds by ``seed``."""
        datasets = {k: dataclasses.replace(v, seed=v.seed + seed) for k, v in self.datasets.items()}
        return dataclasses.replace(self, datasets=datasets, base_seed=self.base_seed + seed)


_SPEC_FIELDS = {f.name: f for f in dataclasses.fields(DatasetSpec)}
_TRAIN_FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}


def _coerce(template, value: str):
    if isinstance(template, tuple):
        return tuple(float(v) for v in _split(value))
    if isinstance(template, bool):
        return _parse_bool(value)
    if isinstance(template, int):
        return int(value)
    if isinstance(template, float):
        return float(value)
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config with ``[section]`` headers.

    Sections: ``[datasets]`` (``presets``, plus any dataset field applied to
    every preset), ``[preset.NAME]`` (per-preset dataset fields),
    ``[experiment]`` and ``[train]``.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    try:
        kwargs = {}
        shared = {}
        names = list(PRESETS)
        if parser.has_section("datasets"):
            for key, value in parser.items("datasets"):
                if key == "presets":
                    names = _split(value)
                elif key in _SPEC_FIELDS:
                    shared[key] = value
                else:
                    raise ConfigError(f"[datasets]: unknown key {key!r}")
        datasets = {}
        for name in names:
            base = PRESETS.get(name, DatasetSpec(class_id=name))
            overrides = dict(shared)
            section = f"preset.{name}"
            if parser.has_section(section):
                overrides.update(parser.items(section))
            for key in overrides:
                if key not in _SPEC_FIELDS:
                    raise ConfigError(f"[{section}]: unknown key {key!r}")
            typed = {k: _coerce(getattr(base, k), v) for k, v in overrides.items()}
            datasets[name] = dataclasses.replace(base, **typed)
        kwargs["datasets"] = datasets

        if parser.has_section("experiment"):
            exp = dict(parser.items("experiment"))
            handlers = {
                "strategies": lambda v: [Strategy(s.upper().replace("-", "")) for s in _split(v)],
                "budgets": lambda v: [int(b) for b in _split(v)],
                "betas": lambda v: [float(b) for b in _split(v)],
                "gamma": float,
                "n_seeds": int,
                "seed": int,
                "n_pretrain_pos": int,
                "n_pretrain_neg": int,
                "save_annotations": _parse_bool,
            }
            for key, value in exp.items():
                if key not in handlers:
                    raise ConfigError(f"[experiment]: unknown key {key!r}")
                kwargs["base_seed" if key == "seed" else key] = handlers[key](value)

        if parser.has_section("train"):
            train = {}
            for key, value in parser.items("train"):
                if key not in _TRAIN_FIELDS:
                    raise ConfigError(f"[train]: unknown key {key!r}")
                train[key] = _coerce(_TRAIN_FIELDS[key].default, value)
            kwargs["train"] = TrainConfig(**train)
        for section in parser.sections():
            if section not in ("datasets", "experiment", "train") and not section.startswith("preset."):
                raise ConfigError(f"unknown section [{section}]")
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)


# -- datasets on disk -------------------------------------------------------------


def dataset_dirs(out: Path, name: str) -> tuple[Path, Path]:
    return out / "data" / name / "train", out / "data" / name / "test"


def materialize(cfg: ExperimentConfig, out: Path) -> list[Path]:
    written = []
    for name, spec in cfg.datasets.items():
        train_dir, test_dir = dataset_dirs(out, name)
        save_dataset(generate_dataset(spec), train_dir)
        save_dataset(generate_dataset(spec.test_spec()), test_dir)
        written += [train_dir, test_dir]
    return written


def load_pair(out: Path, name: str) -> tuple[Dataset, Dataset]:
    train_dir, test_dir = dataset_dirs(out, name)
    return load_dataset(train_dir), load_dataset(test_dir)


# -- scoring ------------------------------------------------------------------------


def annotation_scores(session: SessionResult, data: Dataset) -> tuple[float, float]:
    """Pooled segment and event F1 of the derived strong labels against ground truth."""
    strong = {rid: merge_positive(ann) for rid, ann in session.annotations.items()}
    seg = pooled(segment_f1(strong[r.id], r.ground_truth) for r in data)
    ev = pooled(event_f1(strong[r.id], r.ground_truth) for r in data)
    return seg.f1, ev.f1


def session_dir(out: Path, name: str, strategy: Strategy, B: int, beta: float, seed: int) -> Path:
    return out / "sessions" / name / f"{strategy.value}_B{B}_beta{beta:g}_seed{seed}"


def run_point(
    cfg: ExperimentConfig,
    name: str,
    train: Dataset,
    test: Dataset,
    strategy: Strategy,
    B: int,
    beta: float,
    seed: int,
    out: Path | None = None,
) -> list[tuple[str, float]] | None:
    """Run one grid point; ``None`` when ORC cannot honour the budget."""
    if strategy is Strategy.ORC and B < max(b_suff(r.ground_truth) for r in train):
        return None
    loop_cfg = LoopConfig(
        strategy,
        B,
        AnnotatorConfig(cfg.gamma, beta, seed),
        seed,
        cfg.n_pretrain_pos,
        cfg.n_pretrain_neg,
    )
    try:
        session = run_session(train, loop_cfg)
    except UnsupportedBudget:
        return None
    if out is not None and cfg.save_annotations:
        session.save(session_dir(out, name, strategy, B, beta, seed), loop_cfg)
    f1s, f1e = annotation_scores(session, train)
    X, y = build_training_set(session, train)
    proto = train_protonet_eval(X, y)
    mlp = train_mlp(X, y, dataclasses.replace(cfg.train, seed=seed))
    return [
        ("train_f1s", f1s),
        ("train_f1e", f1e),
        ("test_f1s_protonet", evaluate_model(proto, test).f1),
        ("test_f1s_mlp", evaluate_model(mlp, test).f1),
    ]


# -- results CSV ---------------------------------------------------------------------


def point_key(name: str, strategy, B, beta, gamma, seed) -> tuple[str, str, str, str, str, str]:
    strategy = strategy.value if isinstance(strategy, Strategy) else str(strategy)
    return (name, strategy, str(int(B)), f"{float(beta):g}", f"{float(gamma):g}", str(int(seed)))


def format_result_rows(key: tuple, metrics: list[tuple[str, float]]) -> list[list[str]]:
    return [list(key) + [metric, f"{value:.6f}"] for metric, value in metrics]


def read_results(path: str | Path) -> list[dict[str, str]]:
    path = Path(path)
    if not path.exists():
        return []
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def results_text(rows: list[list[str]], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(RESULT_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def aggregate(rows: list[dict[str, str]], metric: str) -> dict[float, dict[str, list[tuple[int, float]]]]:
    """Mean ``metric`` per (beta, strategy, B), averaged over datasets and seeds.

    Returns ``{beta: {strategy: [(B, mean), ...]}}`` with budgets ascending.
    """
    acc: dict[tuple[float, str, int], list[float]] = defaultdict(list)
    for row in rows:
        if row["metric"] == metric:
            acc[(float(row["beta"]), row["strategy"], int(row["B"]))].append(float(row["value"]))
    out: dict[float, dict[str, list[tuple[int, float]]]] = defaultdict(lambda: defaultdict(list))
    for (beta, strategy, B), values in sorted(acc.items()):
        out[beta][strategy].append((B, float(np.mean(values))))
    return {b: dict(s) for b, s in out.items()}


def table(rows: list[dict[str, str]], B: int, beta: float) -> dict[tuple[str, str], dict[str, float]]:
    """Mean of every metric per (dataset, strategy) at one budget and noise level."""
    acc: dict[tuple[str, str], dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if int(row["B"]) == B and abs(float(row["beta"]) - beta) < 1e-12:
            acc[(row["dataset"], row["strategy"])][row["metric"]].append(float(row["value"]))
    return {k: {m: float(np.mean(v)) for m, v in metrics.items()} for k, metrics in acc.items()}
