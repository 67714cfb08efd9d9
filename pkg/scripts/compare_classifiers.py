#!/usr/bin/env python3
"""Cross-validated comparison of all classifiers on a synthetic preset.

Runs repeated k-fold cross-validation for logistic regression, LDA, KNN, a
fixed-topology network, and the grid-search winner, then prints one metrics
row per classifier.

Usage:
    python3 scripts/compare_classifiers.py [separable|overlapping] [seed]
"""

import sys
import time

sys.path.insert(0, "src")

from osbkit.evaluation import cross_validate
from osbkit.honn import HyperGrid
from osbkit.neural import ActivationKind
from osbkit.synthgen import generate, preset
from osbkit.trainers import (
    honn_winner_trainer,
    make_knn_trainer,
    make_lda_trainer,
    make_lr_trainer,
    make_network_trainer,
)

REDUCED_GRID = HyperGrid(
    activations=(ActivationKind.LOGISTIC,),
    step_sizes=(0.005,),
    epoch_list=(2000,),
    unit_range=(3, 8),
    hidden_layer_counts=(0, 1, 2),
)


def main():
    preset_name = sys.argv[1] if len(sys.argv) > 1 else "overlapping"
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    data = generate(preset(preset_name, seed))
    print(f"preset={preset_name} seed={seed} N={len(data)}  (3-fold x 3 repeats)")

    classifiers = [
        ("LR", make_lr_trainer()),
        ("LDA", make_lda_trainer()),
        ("KNN", make_knn_trainer()),
        ("ANN 5-6-3", make_network_trainer(topology=(5, 6, 3), rho=0.005, epochs=2000)),
        ("GRID WINNER", honn_winner_trainer(data, REDUCED_GRID, seed=seed)),
    ]
    header = f"{'classifier':<14}{'overall_acc':>12}{'precision':>11}{'recall':>9}{'f1':>9}{'secs':>8}"
    print(header)
    print("-" * len(header))
    for name, trainer in classifiers:
        start = time.monotonic()
        mean = cross_validate(trainer, data, k=3, repeats=3, seed=seed).mean
        secs = time.monotonic() - start
        print(
            f"{name:<14}{mean['overall_accuracy']:>12.4f}{mean['precision']:>11.4f}"
            f"{mean['recall']:>9.4f}{mean['f1']:>9.4f}{secs:>8.1f}"
        )


if __name__ == "__main__":
    main()
