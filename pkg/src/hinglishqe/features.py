"""Join code-mixing metrics with precomputed language-model features.

Feature vector layout (fixed per run): scaled metrics (21) || pll_delta (1)
|| english embedding (E) || hindi embedding (E) || synthetic embedding (E).
Only the metric segment is standard-score scaled; scaler statistics come
from the training split alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import DataFormatError
from .metrics import METRIC_FEATURE_NAMES, MetricVector, metric_feature_values

N_METRIC_FEATURES = len(METRIC_FEATURE_NAMES)  # 21

FEATURES_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureRecord:
    id: str
    embedding_english: np.ndarray
    embedding_hindi: np.ndarray
    embedding_synthetic: np.ndarray
    pll_synthetic: float
    pll_human: tuple[float, ...]

    def __post_init__(self):
        dims = {
            self.embedding_english.shape,
            self.embedding_hindi.shape,
            self.embedding_synthetic.shape,
        }
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise DataFormatError(
                f"record {self.id!r}: embeddings must be 1-D vectors of equal dimension"
            )
        if len(self.pll_human) < 1:
            raise DataFormatError(f"record {self.id!r}: pll_human must be non-empty")
        values = [self.pll_synthetic, *self.pll_human]
        if not all(math.isfinite(v) for v in values):
            raise DataFormatError(f"record {self.id!r}: non-finite PLL value")

    @property
    def embedding_dim(self) -> int:
        return self.embedding_english.shape[0]


@dataclass(frozen=True)
class ScalerParams:
    mean: np.ndarray    # length 21, canonical metric order
    stddev: np.ndarray  # length 21; zero variance stored as 1.0

    def __post_init__(self):
        if self.mean.shape != (N_METRIC_FEATURES,) or self.stddev.shape != (N_METRIC_FEATURES,):
            raise ValueError("scaler params must cover the 21 metric features")
        if np.any(self.stddev <= 0):
            raise ValueError("scaler stddev must be positive")


@dataclass(frozen=True)
class FeatureVector:
    id: str
    values: np.ndarray
    layout: dict  # segment name -> (start, end)


def feature_layout(embedding_dim: int) -> dict:
    e = embedding_dim
    return {
        "metrics": (0, N_METRIC_FEATURES),
        "pll_delta": (N_METRIC_FEATURES, N_METRIC_FEATURES + 1),
        "embedding_english": (N_METRIC_FEATURES + 1, N_METRIC_FEATURES + 1 + e),
        "embedding_hindi": (N_METRIC_FEATURES + 1 + e, N_METRIC_FEATURES + 1 + 2 * e),
        "embedding_synthetic": (N_METRIC_FEATURES + 1 + 2 * e, N_METRIC_FEATURES + 1 + 3 * e),
    }


def feature_dim(embedding_dim: int) -> int:
    return N_METRIC_FEATURES + 1 + 3 * embedding_dim


def pll_delta(record: FeatureRecord) -> float:
    """Synthetic-sentence PLL minus the mean PLL of the human references."""
    return record.pll_synthetic - sum(record.pll_human) / len(record.pll_human)


def fit_scaler(metric_vectors: list[MetricVector]) -> ScalerParams:
    """Per-feature mean and population stddev over the 21 metric features."""
    if not metric_vectors:
        raise ValueError("fit_scaler requires at least one metric vector")
    matrix = np.array([metric_feature_values(mv) for mv in metric_vectors], dtype=np.float64)
    mean = matrix.mean(axis=0)
    stddev = matrix.std(axis=0)  # population
    stddev = np.where(stddev == 0.0, 1.0, stddev)
    return ScalerParams(mean=mean, stddev=stddev)


def apply_scaler(params: ScalerParams, mv: MetricVector) -> np.ndarray:
    x = np.array(metric_feature_values(mv), dtype=np.float64)
    return (x - params.mean) / params.stddev


def assemble_features(mv: MetricVector, fr: FeatureRecord, params: ScalerParams) -> FeatureVector:
    """Concatenate scaled metrics, PLL delta, and the three embeddings."""
    if mv.id != fr.id:
        raise DataFormatError(f"id mismatch: metrics {mv.id!r} vs features {fr.id!r}")
    layout = feature_layout(fr.embedding_dim)
    values = np.concatenate([
        apply_scaler(params, mv),
        [pll_delta(fr)],
        fr.embedding_english.astype(np.float64),
        fr.embedding_hindi.astype(np.float64),
        fr.embedding_synthetic.astype(np.float64),
    ])
    return FeatureVector(id=mv.id, values=values, layout=layout)


def parse_features(path: str) -> tuple[int, list[FeatureRecord]]:
    """Parse a features file; returns (embedding_dim, records).

    First line is a header {version, embedding_dim}; each following line is
    one record keyed by instance id.
    """
    records: list[FeatureRecord] = []
    seen: set[str] = set()
    embedding_dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"{path}:{lineno}: malformed JSON ({e.msg})") from e
            if embedding_dim is None:
                if "embedding_dim" not in obj:
                    raise DataFormatError(
                        f"{path}:{lineno}: first line must be a header with embedding_dim"
                    )
                if obj.get("version") != FEATURES_FORMAT_VERSION:
                    raise DataFormatError(
                        f"{path}:{lineno}: unsupported features format version "
                        f"{obj.get('version')!r}"
                    )
                embedding_dim = int(obj["embedding_dim"])
                if embedding_dim < 1:
                    raise DataFormatError(f"{path}:{lineno}: embedding_dim must be >= 1")
                continue
            try:
                rec = FeatureRecord(
                    id=str(obj["id"]),
                    embedding_english=np.array(obj["embedding_english"], dtype=np.float64),
                    embedding_hindi=np.array(obj["embedding_hindi"], dtype=np.float64),
                    embedding_synthetic=np.array(obj["embedding_synthetic"], dtype=np.float64),
                    pll_synthetic=float(obj["pll_synthetic"]),
                    pll_human=tuple(float(v) for v in obj["pll_human"]),
                )
            except KeyError as e:
                raise DataFormatError(f"{path}:{lineno}: missing field {e.args[0]!r}") from e
            except DataFormatError as e:
                raise DataFormatError(f"{path}:{lineno}: {e}") from e
            if rec.embedding_dim != embedding_dim:
                raise DataFormatError(
                    f"{path}:{lineno}: embedding dimension {rec.embedding_dim} "
                    f"does not match header {embedding_dim}"
                )
            if rec.id in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    if embedding_dim is None:
        raise DataFormatError(f"{path}: missing header line")
    return embedding_dim, records
