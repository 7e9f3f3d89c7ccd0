"""Synthetic recordings at the embedding level.

Each recording is a ground-truth :class:`~weakstrong.timeline.EventList`
paired with a stream of window embeddings. A window overlapping target events
for a fraction ``rho`` of its length is drawn as::

    mu_bg + rho * separation * mu_class + noise_sigma * N(0, I)

The unit directions ``mu_bg``, ``mu_class`` and the pre-training direction
``mu_disjoint`` depend only on ``class_id``, so a train set and its test set
(same class, different seed) share the same embedding geometry.
"""

from __future__ import annotations

import dataclasses
import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .timeline import EventList, read_events, write_events

EMB_MAGIC = b"EMB1"
TEST_SEED_OFFSET = 10_000

_DIRECTION_STREAM = 0
_RECORDING_STREAM = 1
_PRETRAIN_STREAM = 2


@dataclass(frozen=True)
class DatasetSpec:
    n_recordings: int = 300
    duration: float = 30.0
    events_per_recording: int = 3
    event_duration_range: tuple[float, float] = (0.5, 4.0)
    min_event_gap: float = 1.0
    embedding_dim: int = 16
    window_len: float = 1.0
    hop: float = 0.25
    class_id: str = "default"
    separation: float = 2.0
    noise_sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "event_duration_range", tuple(float(x) for x in self.event_duration_range))
        lo, hi = self.event_duration_range
        if self.n_recordings < 1:
            raise ValueError("n_recordings must be >= 1")
        if self.events_per_recording < 1:
            raise ValueError("events_per_recording must be >= 1")
        if not 0 < lo <= hi:
            raise ValueError(f"bad event_duration_range {self.event_duration_range}")
        if self.min_event_gap < 0:
            raise ValueError("min_event_gap must be >= 0")
        if not math.isclose(self.hop, self.window_len / 4):
            raise ValueError(f"hop must equal window_len / 4, got {self.hop} for L={self.window_len}")
        if self.window_len > self.duration:
            raise ValueError("window longer than recording")
        if self.separation <= 0 or self.noise_sigma <= 0:
            raise ValueError("separation and noise_sigma must be positive")
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be >= 1")
        M = self.events_per_recording
        # Equality is feasible: events and gaps then tile the recording exactly.
        if self.duration < M * hi + (M + 1) * self.min_event_gap:
            raise ValueError(
                f"cannot place {M} events of up to {hi} s with {self.min_event_gap} s gaps in {self.duration} s"
            )

    @property
    def n_windows(self) -> int:
        return int(math.floor((self.duration - self.window_len) / self.hop + 1e-9)) + 1

    @property
    def b_suff(self) -> int:
        return 2 * self.events_per_recording + 1

    def test_spec(self) -> "DatasetSpec":
        return dataclasses.replace(self, seed=self.seed + TEST_SEED_OFFSET)

    def to_meta(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(repr(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_meta(cls, text: str) -> "DatasetSpec":
        raw = {}
        for line in text.splitlines():
            if line.strip():
                key, _, value = line.partition("=")
                raw[key.strip()] = value.strip()
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in raw:
                continue
            value = raw[f.name]
            if f.name == "event_duration_range":
                kwargs[f.name] = tuple(float(v) for v in value.split(","))
            elif f.name == "class_id":
                kwargs[f.name] = value
            elif isinstance(f.default, int):
                kwargs[f.name] = int(value)
            else:
                kwargs[f.name] = float(value)
        return cls(**kwargs)


# Invented stand-ins for three target classes: short calls (A), medium (B) and
# long events (C). Only L and the hop rule come from the method itself. The
# noise level is below the DatasetSpec default so that background windows of a
# recording stay similar in cosine terms, as real pretrained embeddings do; at
# noise_sigma=0.5 in 16 dimensions the noise norm exceeds the background norm.
PRESETS: dict[str, DatasetSpec] = {
    "classA": DatasetSpec(class_id="classA", event_duration_range=(0.3, 1.5), noise_sigma=0.10, seed=101),
    "classB": DatasetSpec(class_id="classB", event_duration_range=(0.5, 2.5), noise_sigma=0.10, seed=202),
    "classC": DatasetSpec(class_id="classC", event_duration_range=(1.0, 3.5), noise_sigma=0.12, seed=303),
}


def preset(name: str, **overrides) -> DatasetSpec:
    try:
        base = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return dataclasses.replace(base, **overrides)


@dataclass(frozen=True)
class Directions:
    background: np.ndarray
    target: np.ndarray
    disjoint: np.ndarray


def class_seed(class_id: str) -> int:
    return zlib.crc32(class_id.encode("utf-8"))


def directions(spec: DatasetSpec) -> Directions:
    """Unit direction vectors for background, target class and the disjoint pre-training class."""
    rng = np.random.default_rng([class_seed(spec.class_id), _DIRECTION_STREAM])
    vecs = rng.standard_normal((3, spec.embedding_dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return Directions(background=vecs[0], target=vecs[1], disjoint=vecs[2])


@dataclass(frozen=True, eq=False)
class EmbeddingStream:
    vectors: np.ndarray
    window_len: float
    hop: float
    timestamps: np.ndarray = field(default=None)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D array (windows x dim)")
        object.__setattr__(self, "vectors", vectors)
        expected = self.window_len / 2 + np.arange(len(vectors)) * self.hop
        if self.timestamps is None:
            object.__setattr__(self, "timestamps", expected)
        else:
            ts = np.asarray(self.timestamps, dtype=np.float64)
            if ts.shape != (len(vectors),) or not np.allclose(ts, expected, atol=1e-9):
                raise ValueError("timestamps must be window_len/2 + i*hop")
            object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def window_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        half = self.window_len / 2
        return self.timestamps - half, self.timestamps + half


@dataclass(frozen=True, eq=False)
class Recording:
    id: str
    ground_truth: EventList
    stream: EmbeddingStream

    @property
    def duration(self) -> float:
        return self.ground_truth.duration


@dataclass(eq=False)
class Dataset:
    spec: DatasetSpec
    recordings: list[Recording]

    def __len__(self) -> int:
        return len(self.recordings)

    def __iter__(self):
        return iter(self.recordings)

    def __getitem__(self, i):
        return self.recordings[i]


def overlap_fraction(centers: np.ndarray, gt: EventList, window_len: float) -> np.ndarray:
    """Fraction of each window ``[c - L/2, c + L/2]`` covered by events."""
    centers = np.asarray(centers, dtype=np.float64)
    lo = centers - window_len / 2
    hi = centers + window_len / 2
    covered = np.zeros_like(centers)
    for ev in gt:
        covered += np.clip(np.minimum(hi, ev.end) - np.maximum(lo, ev.start), 0.0, None)
    return np.clip(covered / window_len, 0.0, 1.0)


def _embed(rho: np.ndarray, dirs: Directions, spec: DatasetSpec, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal((len(rho), spec.embedding_dim))
    mean = dirs.background[None, :] + (rho * spec.separation)[:, None] * dirs.target[None, :]
    # float32 round trip so in-memory streams equal what the .emb files hold
    return (mean + spec.noise_sigma * noise).astype(np.float32).astype(np.float64)


def embed_window(t_center: float, gt: EventList, spec: DatasetSpec, rng: np.random.Generator) -> np.ndarray:
    half = spec.window_len / 2
    if t_center - half < -1e-9 or t_center + half > gt.duration + 1e-9:
        raise ValueError(f"window centred at {t_center} falls outside [0, {gt.duration}]")
    rho = overlap_fraction(np.array([t_center]), gt, spec.window_len)
    return _embed(rho, directions(spec), spec, rng)[0]


def place_events(spec: DatasetSpec, rng: np.random.Generator) -> EventList:
    """Draw event durations uniformly, then spread the free slack uniformly over the gaps."""
    M = spec.events_per_recording
    lo, hi = spec.event_duration_range
    durations = rng.uniform(lo, hi, size=M)
    slack = spec.duration - durations.sum() - (M + 1) * spec.min_event_gap
    if slack < -1e-12:
        raise ValueError("infeasible event packing")
    # sorted uniforms split the slack into M+1 gap extensions (flat Dirichlet)
    cuts = np.sort(rng.uniform(0.0, max(slack, 0.0), size=M))
    extra = np.diff(np.concatenate([[0.0], cuts]))
    pairs = []
    t = 0.0
    for d, x in zip(durations, extra):
        t += spec.min_event_gap + x
        start = round(t, 6)
        end = round(t + d, 6)
        pairs.append((start, end))
        t += d
    return EventList.from_pairs(pairs, spec.duration)


def generate_recording(spec: DatasetSpec, index: int, dirs: Directions | None = None) -> Recording:
    dirs = directions(spec) if dirs is None else dirs
    rng = np.random.default_rng([spec.seed, _RECORDING_STREAM, index])
    gt = place_events(spec, rng)
    centers = spec.window_len / 2 + np.arange(spec.n_windows) * spec.hop
    rho = overlap_fraction(centers, gt, spec.window_len)
    vectors = _embed(rho, dirs, spec, rng)
    stream = EmbeddingStream(vectors, spec.window_len, spec.hop)
    return Recording(f"rec{index:04d}", gt, stream)


def generate_dataset(spec: DatasetSpec) -> Dataset:
    """Generate ``spec.n_recordings`` recordings; recording ``i`` depends only on ``(seed, i)``."""
    dirs = directions(spec)
    return Dataset(spec, [generate_recording(spec, i, dirs) for i in range(spec.n_recordings)])


def pretraining_set(spec: DatasetSpec, n_pos: int, n_neg: int) -> tuple[np.ndarray, np.ndarray]:
    """Labeled vectors from a class disjoint from the target, used to initialize prototypes.

    Returns ``(pos, neg)``: ``pos`` are fully-active windows of the disjoint
    class, ``neg`` are background-only windows.
    """
    if n_pos < 1 or n_neg < 1:
        raise ValueError("pre-training needs at least one vector per class")
    dirs = directions(spec)
    rng = np.random.default_rng([spec.seed, _PRETRAIN_STREAM])
    K = spec.embedding_dim
    pos = dirs.background + spec.separation * dirs.disjoint + spec.noise_sigma * rng.standard_normal((n_pos, K))
    neg = dirs.background + spec.noise_sigma * rng.standard_normal((n_neg, K))
    return pos, neg


# -- persistence --------------------------------------------------------------


def write_emb(path: str | Path, stream: EmbeddingStream) -> None:
    rows, K = stream.vectors.shape
    header = EMB_MAGIC + struct.pack("<IIf", K, rows, stream.hop)
    Path(path).write_bytes(header + stream.vectors.astype("<f4").tobytes())


def read_emb(path: str | Path, window_len: float) -> EmbeddingStream:
    data = Path(path).read_bytes()
    if data[:4] != EMB_MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    K, rows, hop = struct.unpack("<IIf", data[4:16])
    body = np.frombuffer(data, dtype="<f4", offset=16)
    if body.size != K * rows:
        raise ValueError(f"{path}: expected {K * rows} floats, found {body.size}")
    return EmbeddingStream(body.reshape(rows, K).astype(np.float64), window_len, float(hop))


def save_dataset(dataset: Dataset, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "meta").write_text(dataset.spec.to_meta())
    for rec in dataset:
        write_events(directory / f"{rec.id}.events", rec.ground_truth)
        write_emb(directory / f"{rec.id}.emb", rec.stream)
    return directory


def load_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    spec = DatasetSpec.from_meta((directory / "meta").read_text())
    recordings = []
    for events_path in sorted(directory.glob("*.events")):
        rid = events_path.stem
        gt = read_events(events_path, spec.duration)
        stream = read_emb(directory / f"{rid}.emb", spec.window_len)
        recordings.append(Recording(rid, gt, stream))
    if len(recordings) != spec.n_recordings:
        raise ValueError(f"{directory}: meta lists {spec.n_recordings} recordings, found {len(recordings)}")
    return Dataset(spec, recordings)
