"""The three baseline classifiers: logistic regression trained by full-batch
gradient ascent on the log-likelihood, linear discriminant analysis with a
shared diagonal covariance, and k-nearest neighbor with explicit tie rules.

All of them expect normalized features (gradient ascent and the Euclidean
distance are scale-sensitive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_data import BiomarkerVector, Dataset, N_FEATURES, OcdClass

CLASSES = (OcdClass.HI, OcdClass.GAI, OcdClass.OAI)


class TrainingError(RuntimeError):
    """Raised when training preconditions fail or the optimizer diverges."""


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _design(x: np.ndarray) -> np.ndarray:
    """Prepend the constant-1 intercept column."""
    x = np.atleast_2d(x)
    return np.hstack([np.ones((x.shape[0], 1)), x])


def log_likelihood(beta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Binary log-likelihood l(beta) = sum(y*log p + (1-y)*log(1-p))."""
    z = _design(x) @ beta
    # log p = -log(1+e^-z), log(1-p) = -z - log(1+e^-z)
    return float(np.sum(y * z - np.logaddexp(0.0, z)))


def log_likelihood_gradient(beta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    s = _design(x)
    p = _sigmoid(s @ beta)
    return s.T @ (y - p)


def lr_train_binary(
    x: np.ndarray,
    y: np.ndarray,
    rho: float = 0.005,
    eps: float = 1e-8,
    max_iter: int = 50000,
    seed: int = 0,
) -> tuple[np.ndarray, dict]:
    """Estimate the coefficient vector of a binary logistic model.

    Gradient-ascent updates beta <- beta + rho * grad l(beta) until the step
    norm drops below eps or max_iter is reached. Returns (beta, metadata).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if rho <= 0 or eps <= 0:
        raise TrainingError("rho and eps must be positive")
    if set(np.unique(y)) != {0.0, 1.0}:
        raise TrainingError("binary training needs both classes 0 and 1 present")
    beta = np.random.default_rng(seed).normal(0.0, 0.01, size=x.shape[1] + 1)
    iters = 0
    for iters in range(1, max_iter + 1):
        grad = log_likelihood_gradient(beta, x, y)
        new_beta = beta + rho * grad
        if not np.all(np.isfinite(new_beta)):
            raise TrainingError(f"logistic training diverged at iteration {iters}")
        step = float(np.linalg.norm(new_beta - beta))
        beta = new_beta
        if step < eps:
            break
    grad_norm = float(np.linalg.norm(log_likelihood_gradient(beta, x, y)))
    return beta, {"rho": rho, "iterations": iters, "final_gradient_norm": grad_norm}


@dataclass(frozen=True)
class LogisticModel:
    """One-vs-rest lift of the binary model: one 6-vector of coefficients per class."""

    betas: dict[OcdClass, tuple[float, ...]]
    metadata: dict

    def __post_init__(self):
        for c in CLASSES:
            b = np.asarray(self.betas[c])
            if b.shape != (N_FEATURES + 1,) or not np.all(np.isfinite(b)):
                raise TrainingError(f"coefficients for {c.name} must be 6 finite values")


def lr_train(
    data: Dataset,
    rho: float = 0.005,
    eps: float = 1e-8,
    max_iter: int = 50000,
    seed: int = 0,
) -> LogisticModel:
    """Train three one-vs-rest binary models, one per class."""
    counts = data.class_counts()
    missing = [c.name for c in CLASSES if counts[c] == 0]
    if missing:
        raise TrainingError(f"dataset is missing class(es): {', '.join(missing)}")
    x = data.features()
    labels = data.labels()
    betas = {}
    meta = {}
    for c in CLASSES:
        beta, m = lr_train_binary(x, (labels == int(c)).astype(float), rho, eps, max_iter, seed)
        betas[c] = tuple(float(v) for v in beta)
        meta[c.name] = m
    return LogisticModel(betas=betas, metadata=meta)


def lr_predict(model: LogisticModel, x: BiomarkerVector) -> tuple[OcdClass, dict[OcdClass, float]]:
    """Per-class sigmoid scores renormalized to sum 1; argmax wins, ties to lowest code."""
    s = np.concatenate([[1.0], x.as_array()])
    raw = {c: float(_sigmoid(np.dot(np.asarray(model.betas[c]), s))) for c in CLASSES}
    total = sum(raw.values())
    probs = {c: v / total for c, v in raw.items()}
    best = max(CLASSES, key=lambda c: (probs[c], -int(c)))
    return best, probs


@dataclass(frozen=True)
class LdaModel:
    """Class priors, class means, and shared diagonal per-feature variances.

    Fitting always produces the three OCD classes; the type itself works for
    any class count, which the tests use for hand-checked two-class setups.
    """

    priors: tuple[float, ...]
    means: tuple[tuple[float, ...], ...]
    variances: tuple[float, ...]

    def __post_init__(self):
        if abs(sum(self.priors) - 1.0) > 1e-12 or any(p <= 0 for p in self.priors):
            raise TrainingError("priors must be positive and sum to 1")
        if any(v <= 0 for v in self.variances):
            raise TrainingError("pooled variances must be strictly positive")


def lda_fit(data: Dataset) -> LdaModel:
    """Estimate priors n_k/N, class means, and pooled within-class variance
    with divisor N - M (M = 3 classes)."""
    counts = data.class_counts()
    small = [c.name for c in CLASSES if counts[c] < 2]
    if small:
        raise TrainingError(f"each class needs >= 2 samples; too few in: {', '.join(small)}")
    x = data.features()
    labels = data.labels()
    n, m = len(data), len(CLASSES)
    priors = tuple(counts[c] / n for c in CLASSES)
    means = []
    pooled = np.zeros(N_FEATURES)
    for c in CLASSES:
        xc = x[labels == int(c)]
        mu = xc.mean(axis=0)
        means.append(tuple(float(v) for v in mu))
        pooled += ((xc - mu) ** 2).sum(axis=0)
    variances = pooled / (n - m)
    if np.any(variances <= 0):
        raise TrainingError("zero pooled variance in at least one feature")
    return LdaModel(priors=priors, means=tuple(means), variances=tuple(float(v) for v in variances))


def lda_discriminant(model: LdaModel, x: BiomarkerVector, k) -> float:
    """delta_k = x' Sigma^-1 mu_k - 1/2 mu_k' Sigma^-1 mu_k + log(prior_k),
    with Sigma diagonal. k is a class code starting at 1."""
    inv_var = 1.0 / np.asarray(model.variances)
    mu = np.asarray(model.means[int(k) - 1])
    s = x.as_array()
    return float(s @ (inv_var * mu) - 0.5 * mu @ (inv_var * mu) + np.log(model.priors[int(k) - 1]))


def lda_predict(model: LdaModel, x: BiomarkerVector) -> OcdClass:
    """Class with the largest discriminant; ties go to the lowest class code."""
    deltas = [lda_discriminant(model, x, k) for k in range(1, len(model.priors) + 1)]
    best = max(range(len(deltas)), key=lambda i: (deltas[i], -i))
    return OcdClass(best + 1)


@dataclass(frozen=True)
class KnnModel:
    """Stored (normalized) training set plus the neighbor count k."""

    training: Dataset
    k: int = 5

    def __post_init__(self):
        if not 1 <= self.k <= len(self.training):
            raise TrainingError(f"need 1 <= k <= N, got k={self.k}, N={len(self.training)}")


def knn_predict(model: KnnModel, x: BiomarkerVector) -> OcdClass:
    """Majority class among the k nearest stored samples (Euclidean distance).

    Distance ties at the k-th rank go to the lower stored index; majority ties
    go to the lowest class code.
    """
    d = np.linalg.norm(model.training.features() - x.as_array(), axis=1)
    order = sorted(range(len(d)), key=lambda i: (d[i], i))
    votes = {c: 0 for c in CLASSES}
    for i in order[: model.k]:
        votes[model.training[i].label] += 1
    return max(CLASSES, key=lambda c: (votes[c], -int(c)))
