"""Two-layer credit-scoring network with a scaled sigmoid head.

predict(X) = (1 - delta) * sigmoid(tanh(X W1 + b1) . w2 + b2), so outputs
always lie in [0, 1 - delta] and the rejection probability stays a valid
probability. Trained with Adam on an atom-weighted squared loss (datasets on
a discrete support compress losslessly to per-atom weights and mean labels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError


@dataclass
class CreditModel:
    w1: np.ndarray   # (n_features, hidden)
    b1: np.ndarray   # (hidden,)
    w2: np.ndarray   # (hidden,)
    b2: float
    delta: float

    @classmethod
    def init(cls, rng: np.random.Generator, n_features: int = 11,
             hidden: int = 16, delta: float = 0.55) -> "CreditModel":
        if hidden < 1:
            raise InvalidInputError("hidden width must be >= 1")
        return cls(w1=rng.normal(0.0, 1.0 / np.sqrt(n_features), size=(n_features, hidden)),
                   b1=np.zeros(hidden),
                   w2=rng.normal(0.0, 1.0 / np.sqrt(hidden), size=hidden),
                   b2=0.0, delta=delta)

    def predict(self, x: np.ndarray) -> np.ndarray:
        h = np.tanh(np.atleast_2d(np.asarray(x, dtype=float)) @ self.w1 + self.b1)
        z = h @ self.w2 + self.b2
        return (1.0 - self.delta) / (1.0 + np.exp(-z))

    __call__ = predict

    def copy(self) -> "CreditModel":
        return CreditModel(self.w1.copy(), self.b1.copy(), self.w2.copy(),
                           float(self.b2), self.delta)

    def flat_params(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2, [self.b2]])


def _loss_and_grads(model: CreditModel, x: np.ndarray, weights: np.ndarray,
                    targets: np.ndarray):
    """Weighted squared loss sum_a w_a (yhat_a - m_a)^2 and its gradients."""
    h = np.tanh(x @ model.w1 + model.b1)
    z = h @ model.w2 + model.b2
    sig = 1.0 / (1.0 + np.exp(-z))
    yhat = (1.0 - model.delta) * sig
    resid = yhat - targets
    loss = float(weights @ resid**2)

    dz = 2.0 * weights * resid * (1.0 - model.delta) * sig * (1.0 - sig)
    g_w2 = h.T @ dz
    g_b2 = float(dz.sum())
    dh = np.outer(dz, model.w2) * (1.0 - h**2)
    g_w1 = x.T @ dh
    g_b1 = dh.sum(axis=0)
    return loss, (g_w1, g_b1, g_w2, g_b2)


def adam_train(model: CreditModel, x: np.ndarray, weights: np.ndarray,
               targets: np.ndarray, steps: int, lr: float = 3e-4,
               beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> CreditModel:
    """Return a copy of the model after `steps` full-batch Adam updates."""
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")
    model = model.copy()
    params = [model.w1, model.b1, model.w2, np.array(model.b2)]
    m = [np.zeros_like(p, dtype=float) for p in params]
    v = [np.zeros_like(p, dtype=float) for p in params]
    for t in range(1, steps + 1):
        _, grads = _loss_and_grads(model, x, weights, targets)
        grads = [np.asarray(g, dtype=float) for g in grads]
        for i, g in enumerate(grads):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g
            v[i] = beta2 * v[i] + (1.0 - beta2) * g**2
            m_hat = m[i] / (1.0 - beta1**t)
            v_hat = v[i] / (1.0 - beta2**t)
            params[i] = params[i] - lr * m_hat / (np.sqrt(v_hat) + eps)
        model.w1, model.b1, model.w2 = params[0], params[1], params[2]
        model.b2 = float(params[3])
    return model
