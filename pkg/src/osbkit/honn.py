"""Hyperparameter grid search over activation, step size, epoch count, and
topology (0-2 hidden layers, 3-15 units per layer), keeping the first
candidate that strictly beats the incumbent accuracy.

Each candidate trains from its own seed derived from (search seed, candidate
index), so candidates can be evaluated in any order, or concurrently, without
changing the result.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .core_data import Dataset
from .neural import ActivationKind, NetworkError, NetworkModel, TrainConfig, WeightSet, nn_predict, train

DEFAULT_UNIT_RANGE = (3, 15)
DEFAULT_STEP_SIZES = (0.001, 0.005, 0.01)
DEFAULT_EPOCH_LIST = (2000, 5000, 10000)


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class HyperGrid:
    activations: tuple[ActivationKind, ...] = tuple(ActivationKind)
    step_sizes: tuple[float, ...] = DEFAULT_STEP_SIZES
    epoch_list: tuple[int, ...] = DEFAULT_EPOCH_LIST
    unit_range: tuple[int, int] = DEFAULT_UNIT_RANGE
    hidden_layer_counts: tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if not (self.activations and self.step_sizes and self.epoch_list):
            raise SearchError("activation, step-size, and epoch lists must be non-empty")
        if self.unit_range[0] > self.unit_range[1]:
            raise SearchError(f"bad unit range {self.unit_range}")
        if any(c not in (0, 1, 2) for c in self.hidden_layer_counts):
            raise SearchError("hidden layer counts must be within {0, 1, 2}")


@dataclass(frozen=True)
class CandidateLog:
    index: int
    activation: ActivationKind
    rho: float
    epochs: int
    topology: tuple[int, ...]
    accuracy: float
    seconds: float
    error: str | None = None


@dataclass(frozen=True)
class SearchResult:
    best_model: NetworkModel
    best_weights: WeightSet
    best_accuracy: float
    best_index: int
    log: tuple[CandidateLog, ...]


def candidate_topologies(grid: HyperGrid) -> list[tuple[int, ...]]:
    """Topologies in traversal order: (5,3), then (5,i,3) with i ascending,
    then (5,i,j,3) with j as the outer loop and i as the inner loop."""
    lo, hi = grid.unit_range
    units = range(lo, hi + 1)
    out = []
    for layers in grid.hidden_layer_counts:
        if layers == 0:
            out.append((5, 3))
        elif layers == 1:
            out.extend((5, i, 3) for i in units)
        else:
            out.extend((5, i, j, 3) for j in units for i in units)
    return out


def model_accuracy_test(model: NetworkModel, weights: WeightSet, td: Dataset) -> float:
    """Fraction of test samples whose predicted class equals the true label."""
    if len(td) == 0:
        raise SearchError("test dataset must be non-empty")
    x = td.features()
    hits = sum(
        1 for i, s in enumerate(td) if nn_predict(model, weights, x[i])[0] == s.label
    )
    return hits / len(td)


def candidate_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def grid_search(tp: Dataset, td: Dataset, grid: HyperGrid, seed: int = 0) -> SearchResult:
    """Train and evaluate every (activation, rho, epochs, topology) combination.

    A candidate replaces the incumbent only when its test accuracy is strictly
    greater, so the earliest of equally good candidates wins. A candidate whose
    training diverges is logged with accuracy 0 and the search continues.
    """
    if len(tp) == 0 or len(td) == 0:
        raise SearchError("training and test datasets must be non-empty")
    topologies = candidate_topologies(grid)
    log: list[CandidateLog] = []
    best_model = NetworkModel((5, 3), grid.activations[0])
    best_weights: WeightSet = []
    best_accuracy = 0.0
    best_index = -1
    index = 0
    for f in grid.activations:
        for rho in grid.step_sizes:
            for epochs in grid.epoch_list:
                for topo in topologies:
                    model = NetworkModel(topo, f)
                    cfg = TrainConfig(
                        rho=rho, epochs=epochs, seed=candidate_seed(seed, index)
                    )
                    start = time.perf_counter()
                    error = None
                    try:
                        weights, _ = train(model, tp, cfg)
                        accuracy = model_accuracy_test(model, weights, td)
                    except NetworkError as e:
                        weights, accuracy, error = [], 0.0, str(e)
                    seconds = time.perf_counter() - start
                    log.append(
                        CandidateLog(index, f, rho, epochs, topo, accuracy, seconds, error)
                    )
                    if accuracy > best_accuracy:
                        best_model, best_weights = model, weights
                        best_accuracy, best_index = accuracy, index
                    index += 1
    return SearchResult(
        best_model=best_model,
        best_weights=best_weights,
        best_accuracy=best_accuracy,
        best_index=best_index,
        log=tuple(log),
    )


def search_log_csv(log, include_timing: bool = True) -> str:
    """Export the candidate log as CSV. Timing can be dropped for byte-exact
    comparison of two runs (wall time is the only nondeterministic column)."""
    out = io.StringIO()
    header = "index,activation,rho,epochs,topology,accuracy"
    out.write(header + (",seconds\n" if include_timing else "\n"))
    for rec in log:
        topo = "-".join(str(n) for n in rec.topology)
        row = (
            f"{rec.index},{rec.activation.value},{rec.rho!r},{rec.epochs},"
            f"{topo},{rec.accuracy!r}"
        )
        out.write(row + (f",{rec.seconds:.6f}\n" if include_timing else "\n"))
    return out.getvalue()
