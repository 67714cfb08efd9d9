"""Deterministic synthetic biomarker dataset generator: three Gaussian
clusters in 5-D with diagonal covariance and controllable separation.

Stands in for clinical data in tests and demos. Two presets are shipped:
``separable`` (class means 6 pooled stds apart) and ``overlapping``
(1.5 stds apart).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_data import BiomarkerVector, DataError, Dataset, LabeledSample, N_FEATURES, OcdClass


@dataclass(frozen=True)
class SynthSpec:
    means: tuple[tuple[float, ...], ...]  # one 5-vector per class (HI, GAI, OAI)
    stds: tuple[float, ...]  # shared per-feature stds
    counts: tuple[int, int, int]
    seed: int = 0

    def __post_init__(self):
        if len(self.means) != 3 or any(len(m) != N_FEATURES for m in self.means):
            raise DataError("need one 5-dimensional mean per class")
        if len(self.stds) != N_FEATURES or any(s <= 0 for s in self.stds):
            raise DataError("per-feature stds must be 5 positive values")
        if any(c < 1 for c in self.counts):
            raise DataError("per-class counts must be >= 1")


def generate(spec: SynthSpec) -> Dataset:
    """Draw the requested per-class sample counts, class-major, from one
    seeded generator."""
    rng = np.random.default_rng(spec.seed)
    stds = np.asarray(spec.stds)
    samples = []
    for cls, mean, count in zip(OcdClass, spec.means, spec.counts):
        draws = rng.normal(np.asarray(mean), stds, size=(count, N_FEATURES))
        samples.extend(
            LabeledSample(BiomarkerVector.from_array(row), cls) for row in draws
        )
    return Dataset(tuple(samples))


def _simplex_means(separation: float) -> tuple[tuple[float, ...], ...]:
    """Three 5-D means pairwise `separation` apart (equilateral triangle in the
    first two coordinates)."""
    h = separation * math.sqrt(3.0) / 2.0
    return (
        (0.0, 0.0, 0.0, 0.0, 0.0),
        (separation, 0.0, 0.0, 0.0, 0.0),
        (separation / 2.0, h, 0.0, 0.0, 0.0),
    )


PRESETS = {
    "separable": SynthSpec(
        means=_simplex_means(6.0), stds=(1.0,) * N_FEATURES, counts=(60, 60, 60), seed=0
    ),
    "overlapping": SynthSpec(
        means=_simplex_means(1.5), stds=(1.0,) * N_FEATURES, counts=(60, 60, 60), seed=0
    ),
}


def preset(name: str, seed: int | None = None) -> SynthSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise DataError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    if seed is not None:
        spec = SynthSpec(spec.means, spec.stds, spec.counts, seed)
    return spec
