"""Model-lifecycle service: append-only sample ingestion, threshold-triggered
retraining with versioned model persistence, and prediction against the active
record.

State lives in one directory: ``samples.jsonl`` (append-only ingest log),
``record_vNNNNNN.json`` (one self-describing file per model version), and
``search_log_vN.csv`` (the grid-search log backing each version). Retraining
is deterministic given the service seed, so replaying an identical ingest log
reproduces byte-identical records; the creation timestamp comes from an
injectable clock to keep that property testable.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import CLASSES, KnnModel, LdaModel, LogisticModel, knn_predict, lda_discriminant, lda_predict, lr_predict
from .core_data import (
    BiomarkerVector,
    DataError,
    Dataset,
    LabeledSample,
    NormalizationParams,
    OcdClass,
    normalize_apply,
    normalize_dataset,
    normalize_fit,
    serialize_dataset_csv,
    parse_dataset_csv,
)
from .honn import HyperGrid, SearchError, grid_search, search_log_csv
from .neural import ActivationKind, NetworkModel, nn_predict

FORMAT_VERSION = 1
DEFAULT_THRESHOLD = 30


class ServiceError(RuntimeError):
    pass


class NotReadyError(ServiceError):
    """No trained model is available yet."""


def _norm_to_dict(p: NormalizationParams) -> dict:
    return {"mins": list(p.mins), "maxs": list(p.maxs), "n1": p.n1, "n2": p.n2}


def _norm_from_dict(d: dict) -> NormalizationParams:
    return NormalizationParams(tuple(d["mins"]), tuple(d["maxs"]), d["n1"], d["n2"])


def network_params(model: NetworkModel, weights) -> dict:
    return {
        "layer_sizes": list(model.layer_sizes),
        "activation": model.activation.value,
        "weights": [w.tolist() for w in weights],
    }


def logistic_params(model: LogisticModel) -> dict:
    return {"betas": {c.name: list(model.betas[c]) for c in CLASSES}}


def lda_params(model: LdaModel) -> dict:
    return {
        "priors": list(model.priors),
        "means": [list(m) for m in model.means],
        "variances": list(model.variances),
    }


def knn_params(model: KnnModel) -> dict:
    return {"k": model.k, "training_csv": serialize_dataset_csv(model.training)}


@dataclass(frozen=True)
class ModelRecord:
    version: int
    created_at: float
    kind: str  # LR | LDA | KNN | ANN | HONN
    params: dict
    normalization: NormalizationParams
    metadata: dict

    def to_json(self) -> str:
        doc = {
            "format_version": FORMAT_VERSION,
            "version": self.version,
            "created_at": self.created_at,
            "kind": self.kind,
            "params": self.params,
            "normalization": _norm_to_dict(self.normalization),
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ModelRecord":
        doc = json.loads(text)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ServiceError(f"unsupported record format {doc.get('format_version')!r}")
        return cls(
            version=doc["version"],
            created_at=doc["created_at"],
            kind=doc["kind"],
            params=doc["params"],
            normalization=_norm_from_dict(doc["normalization"]),
            metadata=doc["metadata"],
        )


def record_predict(record: ModelRecord, x: BiomarkerVector) -> tuple[OcdClass, dict[str, float]]:
    """Normalize with the record's stored parameters and classify with its model.

    Scores are model-native: renormalized sigmoid probabilities for LR, the
    discriminant values for LDA, vote fractions for KNN, and the raw output
    units for networks.
    """
    z = normalize_apply(record.normalization, x)
    p = record.params
    if record.kind == "LR":
        model = LogisticModel(
            betas={c: tuple(p["betas"][c.name]) for c in CLASSES}, metadata={}
        )
        cls, probs = lr_predict(model, z)
        return cls, {c.name: probs[c] for c in CLASSES}
    if record.kind == "LDA":
        model = LdaModel(
            priors=tuple(p["priors"]),
            means=tuple(tuple(m) for m in p["means"]),
            variances=tuple(p["variances"]),
        )
        return lda_predict(model, z), {
            c.name: lda_discriminant(model, z, c) for c in CLASSES
        }
    if record.kind == "KNN":
        model = KnnModel(parse_dataset_csv(p["training_csv"]), p["k"])
        cls = knn_predict(model, z)
        d = np.linalg.norm(model.training.features() - z.as_array(), axis=1)
        order = sorted(range(len(d)), key=lambda i: (d[i], i))[: model.k]
        votes = {c.name: 0.0 for c in CLASSES}
        for i in order:
            votes[model.training[i].label.name] += 1.0 / model.k
        return cls, votes
    if record.kind in ("ANN", "HONN"):
        model = NetworkModel(tuple(p["layer_sizes"]), ActivationKind(p["activation"]))
        weights = [np.asarray(w, dtype=float) for w in p["weights"]]
        cls, y = nn_predict(model, weights, z)
        return cls, {c.name: float(y[int(c) - 1]) for c in CLASSES}
    raise ServiceError(f"unknown model kind {record.kind!r}")


def grid_config_hash(grid: HyperGrid) -> str:
    doc = {
        "activations": [a.value for a in grid.activations],
        "step_sizes": list(grid.step_sizes),
        "epoch_list": list(grid.epoch_list),
        "unit_range": list(grid.unit_range),
        "hidden_layer_counts": list(grid.hidden_layer_counts),
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def stratified_split(data: Dataset, seed: int, train_fraction: float = 2 / 3):
    """Seeded per-class shuffle, then the leading fraction of each class goes
    to the training side."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    labels = data.labels()
    for c in CLASSES:
        idx = np.flatnonzero(labels == int(c))
        idx = idx[rng.permutation(len(idx))]
        cut = max(1, int(round(len(idx) * train_fraction)))
        cut = min(cut, len(idx) - 1) if len(idx) > 1 else cut
        train_idx.extend(int(i) for i in idx[:cut])
        test_idx.extend(int(i) for i in idx[cut:])
    return data.subset(sorted(train_idx)), data.subset(sorted(test_idx))


class OcdService:
    """Directory-backed sample store plus retraining and prediction.

    Ingestion is serialized through a lock; the active record is swapped
    atomically after training completes, so concurrent predictions always see
    one whole version.
    """

    def __init__(
        self,
        store_dir,
        grid: HyperGrid | None = None,
        threshold: int = DEFAULT_THRESHOLD,
        seed: int = 0,
        clock=time.time,
    ):
        if threshold < 1:
            raise ServiceError("retrain threshold must be >= 1")
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.grid = grid if grid is not None else HyperGrid()
        self.threshold = threshold
        self.seed = seed
        self.clock = clock
        self._lock = threading.Lock()
        self._samples: list[LabeledSample] = []
        self._active: ModelRecord | None = None
        self._load()

    @property
    def samples_path(self) -> Path:
        return self.store_dir / "samples.jsonl"

    def _record_path(self, version: int) -> Path:
        return self.store_dir / f"record_v{version:06d}.json"

    def _load(self) -> None:
        if self.samples_path.exists():
            for line in self.samples_path.read_text().splitlines():
                if line.strip():
                    self._samples.append(_sample_from_dict(json.loads(line)))
        versions = sorted(
            int(p.stem.split("_v")[1]) for p in self.store_dir.glob("record_v*.json")
        )
        if versions:
            self._active = ModelRecord.from_json(
                self._record_path(versions[-1]).read_text()
            )

    # -- ingestion ---------------------------------------------------------

    def ingest_sample(self, sample: LabeledSample) -> int:
        with self._lock:
            with self.samples_path.open("a") as fh:
                fh.write(json.dumps(_sample_to_dict(sample), sort_keys=True) + "\n")
            self._samples.append(sample)
            return len(self._samples)

    @property
    def sample_count(self) -> int:
        return len(self._samples)

    @property
    def samples_since_training(self) -> int:
        trained = self._active.metadata["dataset_size"] if self._active else 0
        return len(self._samples) - trained

    # -- training ----------------------------------------------------------

    def maybe_retrain(self, force: bool = False) -> ModelRecord | None:
        with self._lock:
            if not force and self.samples_since_training < self.threshold:
                return None
            snapshot = Dataset(tuple(self._samples))
            version = (self._active.version if self._active else 0) + 1
            try:
                record = self._train_version(snapshot, version)
            except (SearchError, DataError) as e:
                raise ServiceError(f"retraining failed: {e}") from e
            self._record_path(version).write_text(record.to_json())
            self._active = record
            return record

    def _train_version(self, snapshot: Dataset, version: int) -> ModelRecord:
        split_seed = int(np.random.SeedSequence([self.seed, version, 0]).generate_state(1)[0])
        search_seed = int(np.random.SeedSequence([self.seed, version, 1]).generate_state(1)[0])
        tp_raw, td_raw = stratified_split(snapshot, split_seed)
        params = normalize_fit(tp_raw)
        result = grid_search(
            normalize_dataset(params, tp_raw),
            normalize_dataset(params, td_raw),
            self.grid,
            seed=search_seed,
        )
        if result.best_index < 0:
            raise ServiceError("all grid-search candidates failed to train")
        log_name = f"search_log_v{version}.csv"
        (self.store_dir / log_name).write_text(search_log_csv(result.log))
        return ModelRecord(
            version=version,
            created_at=float(self.clock()),
            kind="HONN",
            params=network_params(result.best_model, result.best_weights),
            normalization=params,
            metadata={
                "dataset_size": len(snapshot),
                "seed": self.seed,
                "grid_config_hash": grid_config_hash(self.grid),
                "search_log": log_name,
                "best_test_accuracy": result.best_accuracy,
            },
        )

    # -- serving -----------------------------------------------------------

    @property
    def active_record(self) -> ModelRecord | None:
        return self._active

    def predict(self, x: BiomarkerVector) -> dict:
        record = self._active
        if record is None:
            raise NotReadyError("no trained model available")
        cls, scores = record_predict(record, x)
        return {"class": cls.name, "scores": scores, "model_version": record.version}

    def model_info(self) -> dict:
        record = self._active
        if record is None:
            raise NotReadyError("no trained model available")
        info = {
            "version": record.version,
            "created_at": record.created_at,
            "kind": record.kind,
            "metadata": dict(record.metadata),
        }
        if "layer_sizes" in record.params:
            info["topology"] = "-".join(str(n) for n in record.params["layer_sizes"])
            info["activation"] = record.params["activation"]
        return info


def _sample_to_dict(s: LabeledSample) -> dict:
    d = {name.lower(): v for name, v in zip(("SD", "GP", "CAT", "MAL", "SC"), s.features.values())}
    d["label"] = s.label.name
    if s.provenance:
        d["provenance"] = list(s.provenance)
    return d


def _sample_from_dict(d: dict) -> LabeledSample:
    features = BiomarkerVector(d["sd"], d["gp"], d["cat"], d["mal"], d["sc"])
    return LabeledSample(features, OcdClass.from_name(d["label"]), tuple(d.get("provenance", ())))
