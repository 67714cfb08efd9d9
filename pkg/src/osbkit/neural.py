"""Feedforward network with configurable topology and hidden activation,
trained by per-sample stochastic gradient descent on the squared-error energy.

Weights for layer l are stored as a (n_{l-1}+1, n_l) matrix whose row 0 holds
the biases (constant input y_0 = 1). The output layer always uses the logistic
activation so the one-hot targets in {0,1} are attainable; hidden layers use
the configured activation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core_data import BiomarkerVector, Dataset, N_FEATURES, OcdClass

N_OUTPUTS = 3


class NetworkError(RuntimeError):
    pass


class ActivationKind(enum.Enum):
    LOGISTIC = "Logistic"
    TANH = "Tanh"
    ARCTAN = "ArcTan"
    SOFTPLUS = "Softplus"


def activation_eval(kind: ActivationKind, v):
    """Return (y, dy/dv) for the activation, elementwise and overflow-safe."""
    v = np.asarray(v, dtype=float)
    if kind is ActivationKind.LOGISTIC:
        y = 1.0 / (1.0 + np.exp(-np.clip(v, -500, 500)))
        return y, y * (1.0 - y)
    if kind is ActivationKind.TANH:
        y = np.tanh(v)
        return y, 1.0 - y * y
    if kind is ActivationKind.ARCTAN:
        return np.arctan(v), 1.0 / (1.0 + v * v)
    if kind is ActivationKind.SOFTPLUS:
        y = np.logaddexp(0.0, v)
        return y, 1.0 / (1.0 + np.exp(-np.clip(v, -500, 500)))
    raise NetworkError(f"unknown activation {kind!r}")


@dataclass(frozen=True)
class NetworkModel:
    """Layer sizes (5, ..., 3) plus the hidden-layer activation kind."""

    layer_sizes: tuple[int, ...]
    activation: ActivationKind = ActivationKind.LOGISTIC

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2 or any(n < 1 for n in sizes):
            raise NetworkError(f"bad topology {sizes}")
        if sizes[0] != N_FEATURES or sizes[-1] != N_OUTPUTS:
            raise NetworkError(f"topology must run from {N_FEATURES} inputs to {N_OUTPUTS} outputs")

    @property
    def n_layers(self) -> int:
        """Number of computational layers L (excluding the input layer)."""
        return len(self.layer_sizes) - 1

    def topology_string(self) -> str:
        return "-".join(str(n) for n in self.layer_sizes)


WeightSet = list  # list of np.ndarray, one (n_{l-1}+1, n_l) matrix per layer


def check_shapes(model: NetworkModel, weights: WeightSet) -> None:
    sizes = model.layer_sizes
    if len(weights) != model.n_layers:
        raise NetworkError(f"expected {model.n_layers} weight matrices, got {len(weights)}")
    for l, w in enumerate(weights, start=1):
        want = (sizes[l - 1] + 1, sizes[l])
        if w.shape != want:
            raise NetworkError(f"layer {l} weights have shape {w.shape}, expected {want}")


@dataclass(frozen=True)
class TrainConfig:
    rho: float = 0.005
    epochs: int = 10000
    seed: int = 0
    init_std: float = 0.1

    def __post_init__(self):
        if self.rho <= 0 or self.epochs < 1 or self.init_std < 0:
            raise NetworkError("rho > 0, epochs >= 1, init_std >= 0 required")


def init_weights(model: NetworkModel, seed, init_std: float = 0.1) -> WeightSet:
    """Draw every weight (biases included) i.i.d. Normal(0, init_std^2)."""
    rng = np.random.default_rng(seed)
    sizes = model.layer_sizes
    return [
        rng.normal(0.0, init_std, size=(sizes[l - 1] + 1, sizes[l]))
        for l in range(1, len(sizes))
    ]


def _layer_activation(model: NetworkModel, layer: int) -> ActivationKind:
    # Output layer is always logistic so one-hot targets stay reachable.
    return ActivationKind.LOGISTIC if layer == model.n_layers else model.activation


def forward(model: NetworkModel, weights: WeightSet, x) -> tuple[list, list]:
    """Run the network on one input, returning (outputs, pre-activations) per layer.

    outputs[0] is the input itself; outputs[l] and pre_acts[l-1] belong to
    computational layer l.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape != (N_FEATURES,):
        raise NetworkError(f"input must have {N_FEATURES} entries, got shape {x.shape}")
    check_shapes(model, weights)
    outputs = [x]
    pre_acts = []
    for l, w in enumerate(weights, start=1):
        v = w[0] + outputs[-1] @ w[1:]
        y, _ = activation_eval(_layer_activation(model, l), v)
        pre_acts.append(v)
        outputs.append(y)
    return outputs, pre_acts


def backprop_gradients(model: NetworkModel, weights: WeightSet, x, t) -> list:
    """Gradients of the error energy E = 1/2 sum((t - y_L)^2) w.r.t. every weight.

    Local gradients: gamma_L = (t - y_L) * psi'(v_L) at the output layer,
    gamma_l = psi'(v_l) * (W_{l+1} gamma_{l+1}) backward through the hidden
    layers; dE/dw_ji = -gamma_i * y_j with y_0 = 1 for the bias row.
    """
    t = np.asarray(t, dtype=float).ravel()
    if t.shape != (N_OUTPUTS,) or sorted(t) != [0.0, 0.0, 1.0]:
        raise NetworkError(f"target must be a one-hot 3-vector, got {t!r}")
    outputs, pre_acts = forward(model, weights, x)
    gammas = [None] * model.n_layers
    for l in range(model.n_layers, 0, -1):
        _, dpsi = activation_eval(_layer_activation(model, l), pre_acts[l - 1])
        if l == model.n_layers:
            gammas[l - 1] = (t - outputs[-1]) * dpsi
        else:
            gammas[l - 1] = dpsi * (weights[l][1:] @ gammas[l])
    grads = []
    for l in range(1, model.n_layers + 1):
        y_prev = np.concatenate([[1.0], outputs[l - 1]])
        grads.append(-np.outer(y_prev, gammas[l - 1]))
    return grads


def sample_error_energy(model: NetworkModel, weights: WeightSet, x, t) -> float:
    outputs, _ = forward(model, weights, x)
    xi = np.asarray(t, dtype=float) - outputs[-1]
    return float(0.5 * np.sum(xi * xi))


def one_hot(label: OcdClass) -> np.ndarray:
    t = np.zeros(N_OUTPUTS)
    t[int(label) - 1] = 1.0
    return t


def batch_error_energy(model: NetworkModel, weights: WeightSet, x_all, t_all) -> float:
    """Mean per-sample error energy over a whole feature matrix."""
    y = np.asarray(x_all, dtype=float)
    for l, w in enumerate(weights, start=1):
        v = w[0] + y @ w[1:]
        y, _ = activation_eval(_layer_activation(model, l), v)
    xi = np.asarray(t_all, dtype=float) - y
    return float(0.5 * np.sum(xi * xi) / len(y))


def _slow_epoch(model, weights, x_all, t_all, perm, rho):
    for pos, m in enumerate(perm):
        grads = backprop_gradients(model, weights, x_all[m], t_all[m])
        for w, g in zip(weights, grads):
            w -= rho * g
        if not all(np.all(np.isfinite(w)) for w in weights):
            return pos
    return -1


def train(model: NetworkModel, data: Dataset, cfg: TrainConfig) -> tuple[WeightSet, list[float]]:
    """SGD training per the configured epoch count.

    Each epoch visits all samples once in a freshly shuffled seeded order and
    applies one weight update per sample; after each epoch the mean error
    energy over the whole dataset is appended to the trace. The per-sample
    loop runs through the numba kernel when available.
    """
    if len(data) == 0:
        raise NetworkError("cannot train on an empty dataset")
    from ._fastpath import run_epoch

    ss = np.random.SeedSequence(cfg.seed)
    init_ss, shuffle_ss = ss.spawn(2)
    weights = init_weights(model, init_ss, cfg.init_std)
    check_shapes(model, weights)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    x_all = data.features()
    t_all = np.array([one_hot(s.label) for s in data])
    trace = []
    for epoch in range(1, cfg.epochs + 1):
        perm = shuffle_rng.permutation(len(data))
        if run_epoch is not None:
            fail = run_epoch(weights, x_all, t_all, perm, cfg.rho, model.activation.value)
        else:
            fail = _slow_epoch(model, weights, x_all, t_all, perm, cfg.rho)
        if fail >= 0:
            raise NetworkError(
                f"weights became non-finite at epoch {epoch}, sample index {int(perm[fail])}"
            )
        trace.append(batch_error_energy(model, weights, x_all, t_all))
    return weights, trace


def nn_predict(model: NetworkModel, weights: WeightSet, x) -> tuple[OcdClass, np.ndarray]:
    """Argmax over the three output units; ties go to the lowest class code."""
    if isinstance(x, BiomarkerVector):
        x = x.as_array()
    outputs, _ = forward(model, weights, x)
    y = outputs[-1]
    return OcdClass(int(np.argmax(y)) + 1), y
