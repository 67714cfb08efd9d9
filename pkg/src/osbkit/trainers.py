"""Adapters that plug the individual classifiers into the cross-validation
harness, plus the two-stage flow where a grid search picks a network
configuration that is then re-trained per round.
"""

from __future__ import annotations

from .classical import KnnModel, knn_predict, lda_fit, lda_predict, lr_predict, lr_train
from .core_data import Dataset, normalize_dataset, normalize_fit
from .evaluation import Trainer
from .honn import HyperGrid, grid_search
from .neural import ActivationKind, NetworkModel, TrainConfig, nn_predict, train
from .service import stratified_split


def make_lr_trainer(rho: float = 0.005, eps: float = 1e-8, max_iter: int = 2000) -> Trainer:
    def trainer(data: Dataset, seed: int):
        model = lr_train(data, rho=rho, eps=eps, max_iter=max_iter, seed=seed)
        return lambda x: lr_predict(model, x)[0]

    return trainer


def make_lda_trainer() -> Trainer:
    def trainer(data: Dataset, seed: int):
        model = lda_fit(data)
        return lambda x: lda_predict(model, x)

    return trainer


def make_knn_trainer(k: int = 5) -> Trainer:
    def trainer(data: Dataset, seed: int):
        model = KnnModel(data, min(k, len(data)))
        return lambda x: knn_predict(model, x)

    return trainer


def make_network_trainer(
    topology: tuple[int, ...] = (5, 6, 3),
    activation: ActivationKind = ActivationKind.LOGISTIC,
    rho: float = 0.005,
    epochs: int = 10000,
) -> Trainer:
    def trainer(data: Dataset, seed: int):
        model = NetworkModel(topology, activation)
        weights, _ = train(model, data, TrainConfig(rho=rho, epochs=epochs, seed=seed))
        return lambda x: nn_predict(model, weights, x)[0]

    return trainer


def honn_winner_trainer(data: Dataset, grid: HyperGrid, seed: int = 0) -> Trainer:
    """Run the grid search once on a stratified 2:1 split of `data` and return
    a trainer for the winning configuration (topology, activation, rho, epochs).
    """
    tp_raw, td_raw = stratified_split(data, seed)
    params = normalize_fit(tp_raw)
    result = grid_search(
        normalize_dataset(params, tp_raw), normalize_dataset(params, td_raw), grid, seed=seed
    )
    winner = result.log[result.best_index]
    return make_network_trainer(
        topology=winner.topology,
        activation=winner.activation,
        rho=winner.rho,
        epochs=winner.epochs,
    )
