#!/usr/bin/env python3
"""Run the hyperparameter grid search on a synthetic preset and show the
candidate leaderboard.

Trains every (activation, step size, epochs, topology) combination of a
reduced grid on a stratified 2:1 split and prints the ten best candidates
plus the winner's details.

Usage:
    python3 scripts/grid_search_demo.py [separable|overlapping] [seed]
"""

import sys
import time

sys.path.insert(0, "src")

from osbkit.core_data import normalize_dataset, normalize_fit
from osbkit.honn import HyperGrid, grid_search
from osbkit.neural import ActivationKind
from osbkit.service import stratified_split
from osbkit.synthgen import generate, preset

GRID = HyperGrid(
    activations=(ActivationKind.LOGISTIC, ActivationKind.TANH),
    step_sizes=(0.005, 0.01),
    epoch_list=(1000,),
    unit_range=(3, 8),
    hidden_layer_counts=(0, 1),
)


def main():
    preset_name = sys.argv[1] if len(sys.argv) > 1 else "separable"
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    data = generate(preset(preset_name, seed))
    tp_raw, td_raw = stratified_split(data, seed)
    params = normalize_fit(tp_raw)
    tp, td = normalize_dataset(params, tp_raw), normalize_dataset(params, td_raw)

    n_candidates = (
        len(GRID.activations) * len(GRID.step_sizes) * len(GRID.epoch_list)
        * (1 + (GRID.unit_range[1] - GRID.unit_range[0] + 1))
    )
    print(f"preset={preset_name} train={len(tp)} test={len(td)} candidates={n_candidates}")
    start = time.monotonic()
    result = grid_search(tp, td, GRID, seed=seed)
    print(f"search took {time.monotonic() - start:.1f}s\n")

    print(f"{'rank':<6}{'topology':<12}{'activation':<12}{'rho':<8}{'epochs':<8}{'accuracy':>9}")
    ranked = sorted(result.log, key=lambda rec: (-rec.accuracy, rec.index))
    for rank, rec in enumerate(ranked[:10], start=1):
        topo = "-".join(str(n) for n in rec.topology)
        print(f"{rank:<6}{topo:<12}{rec.activation.value:<12}{rec.rho:<8}{rec.epochs:<8}{rec.accuracy:>9.4f}")
    print(
        f"\nwinner: candidate {result.best_index} "
        f"topology {result.best_model.topology_string()} "
        f"test accuracy {result.best_accuracy:.4f}"
    )


if __name__ == "__main__":
    main()
