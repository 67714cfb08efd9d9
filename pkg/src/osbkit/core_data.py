"""Domain types, CSV dataset format, min-max normalization, and fold planning.

Everything here is shared by the classifiers, the evaluation harness, and the
service. All types are immutable after construction; operations are pure
functions of their inputs plus an explicit seed.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np

N_FEATURES = 5
FEATURE_NAMES = ("SD", "GP", "CAT", "MAL", "SC")
CSV_HEADER = "SD,GP,CAT,MAL,SC,label"
PROVENANCE_COLUMNS = ("hospital_id", "lab_id", "timestamp")


class DataError(ValueError):
    """Raised for malformed datasets, rows, or normalization inputs."""


class OcdClass(enum.IntEnum):
    """Three-way diagnosis label with fixed integer codes (used for CM indexing)."""

    HI = 1
    GAI = 2
    OAI = 3

    @classmethod
    def from_name(cls, name: str) -> "OcdClass":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise DataError(f"unknown class label {name!r}") from None


@dataclass(frozen=True)
class BiomarkerVector:
    """The five oxidative-stress biomarker readings of one individual."""

    sd: float
    gp: float
    cat: float
    mal: float
    sc: float

    def __post_init__(self):
        for name, v in zip(FEATURE_NAMES, self.values()):
            if not math.isfinite(v):
                raise DataError(f"biomarker {name} is not finite: {v!r}")

    def values(self) -> tuple[float, float, float, float, float]:
        return (self.sd, self.gp, self.cat, self.mal, self.sc)

    def as_array(self) -> np.ndarray:
        return np.array(self.values(), dtype=float)

    @classmethod
    def from_array(cls, a) -> "BiomarkerVector":
        a = np.asarray(a, dtype=float)
        if a.shape != (N_FEATURES,):
            raise DataError(f"expected {N_FEATURES} features, got shape {a.shape}")
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class LabeledSample:
    features: BiomarkerVector
    label: OcdClass
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if any(not p for p in self.provenance):
            raise DataError("provenance entries must be non-empty")


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of labeled samples."""

    samples: tuple[LabeledSample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i) -> LabeledSample:
        return self.samples[i]

    def features(self) -> np.ndarray:
        """(N, 5) feature matrix in sample order."""
        return np.array([s.features.values() for s in self.samples], dtype=float).reshape(
            len(self.samples), N_FEATURES
        )

    def labels(self) -> np.ndarray:
        """(N,) integer class codes in sample order."""
        return np.array([int(s.label) for s in self.samples], dtype=int)

    def class_counts(self) -> dict[OcdClass, int]:
        counts = {c: 0 for c in OcdClass}
        for s in self.samples:
            counts[s.label] += 1
        return counts

    def subset(self, indices) -> "Dataset":
        return Dataset(tuple(self.samples[i] for i in indices))


def parse_dataset_csv(text: str | bytes) -> Dataset:
    """Parse the dataset CSV format (header SD,GP,CAT,MAL,SC,label).

    Optional extra provenance columns after the label are preserved verbatim.
    Raises DataError naming the 1-based line number for any malformed row.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if not lines:
        raise DataError("empty input: missing header line")
    header = [c.strip() for c in lines[0].split(",")]
    if [c.upper() for c in header[: N_FEATURES + 1]] != list(FEATURE_NAMES) + ["LABEL"]:
        raise DataError(f"line 1: bad header {lines[0]!r}, expected {CSV_HEADER!r}")
    n_cols = len(header)
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != n_cols and len(cells) != N_FEATURES + 1:
            raise DataError(f"line {lineno}: expected {n_cols} columns, got {len(cells)}")
        try:
            feats = [float(c) for c in cells[:N_FEATURES]]
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric feature value") from None
        try:
            vec = BiomarkerVector(*feats)
            label = OcdClass.from_name(cells[N_FEATURES])
        except DataError as e:
            raise DataError(f"line {lineno}: {e}") from None
        provenance = tuple(cells[N_FEATURES + 1 :])
        samples.append(LabeledSample(vec, label, provenance))
    return Dataset(tuple(samples))


def serialize_dataset_csv(dataset: Dataset) -> str:
    """Inverse of parse_dataset_csv; floats rendered with 17 significant digits."""
    has_prov = any(s.provenance for s in dataset)
    header = CSV_HEADER
    if has_prov:
        header += "," + ",".join(PROVENANCE_COLUMNS)
    out = io.StringIO()
    out.write(header + "\n")
    for s in dataset:
        cells = [f"{v:.17g}" for v in s.features.values()] + [s.label.name]
        if has_prov:
            prov = list(s.provenance) + [""] * (len(PROVENANCE_COLUMNS) - len(s.provenance))
            cells += prov
        out.write(",".join(cells) + "\n")
    return out.getvalue()


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature observed extremes plus the target range [n1, n2]."""

    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    n1: float = 0.0
    n2: float = 1.0

    def __post_init__(self):
        if len(self.mins) != N_FEATURES or len(self.maxs) != N_FEATURES:
            raise DataError("normalization params need one (min, max) per feature")
        if not self.n1 < self.n2:
            raise DataError(f"target range requires n1 < n2, got [{self.n1}, {self.n2}]")
        if any(lo > hi for lo, hi in zip(self.mins, self.maxs)):
            raise DataError("per-feature min must not exceed max")


def normalize_fit(dataset: Dataset, n1: float = 0.0, n2: float = 1.0) -> NormalizationParams:
    """Record per-feature extremes of the dataset for min-max scaling to [n1, n2]."""
    if len(dataset) == 0:
        raise DataError("cannot fit normalization on an empty dataset")
    x = dataset.features()
    return NormalizationParams(
        mins=tuple(float(v) for v in x.min(axis=0)),
        maxs=tuple(float(v) for v in x.max(axis=0)),
        n1=float(n1),
        n2=float(n2),
    )


def normalize_apply(params: NormalizationParams, x: BiomarkerVector) -> BiomarkerVector:
    """Min-max scale one vector. A constant (min == max) feature maps to the
    range midpoint, keeping it uninformative without dividing by zero."""
    out = []
    for v, lo, hi in zip(x.values(), params.mins, params.maxs):
        if hi == lo:
            out.append((params.n1 + params.n2) / 2.0)
        else:
            out.append(params.n1 + (params.n2 - params.n1) * (v - lo) / (hi - lo))
    return BiomarkerVector(*out)


def normalize_dataset(params: NormalizationParams, dataset: Dataset) -> Dataset:
    return Dataset(
        tuple(
            LabeledSample(normalize_apply(params, s.features), s.label, s.provenance)
            for s in dataset
        )
    )


@dataclass(frozen=True)
class FoldPlan:
    """k disjoint index lists partitioning {0..n-1}, sizes differing by at most 1."""

    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def __post_init__(self):
        all_idx = sorted(i for f in self.folds for i in f)
        n = len(all_idx)
        if self.k != len(self.folds):
            raise DataError("fold count does not match k")
        if all_idx != list(range(n)):
            raise DataError("folds must partition 0..N-1 exactly")
        sizes = [len(f) for f in self.folds]
        if max(sizes) - min(sizes) > 1:
            raise DataError("fold sizes must differ by at most 1")


def make_folds(n: int, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle of 0..n-1 split into k nearly equal folds."""
    if k < 2 or k > n:
        raise DataError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    parts = np.array_split(perm, k)
    return FoldPlan(k=k, folds=tuple(tuple(int(i) for i in p) for p in parts), seed=seed)
