"""Minimal LSTM regressor, implemented directly on numpy.

One recurrent layer with forget/input/output gates and a tanh cell candidate,
followed by a linear head that maps the final hidden state to one scalar.
Inputs are short windows of normalized channel-state triplets; targets are
backlogs normalized to [0, 1]. Training is plain minibatch gradient descent
on the mean squared error with global-norm gradient clipping, and the
backward pass is exact backpropagation through time (verified against finite
differences in the test suite).

Gate order in the stacked weight matrices is forget, input, output, candidate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LstmModel:
    w_x: np.ndarray   # (4*hidden, input)
    w_h: np.ndarray   # (4*hidden, hidden)
    b: np.ndarray     # (4*hidden,)
    w_out: np.ndarray  # (hidden,)
    b_out: float

    @property
    def hidden_size(self) -> int:
        return self.w_out.size

    @property
    def input_size(self) -> int:
        return self.w_x.shape[1]

    def param_items(self):
        return (
            ("w_x", self.w_x),
            ("w_h", self.w_h),
            ("b", self.b),
            ("w_out", self.w_out),
            ("b_out", np.array([self.b_out])),
        )

    def copy(self) -> "LstmModel":
        return LstmModel(
            self.w_x.copy(), self.w_h.copy(), self.b.copy(), self.w_out.copy(), self.b_out
        )


def init_lstm(
    hidden_size: int,
    input_size: int = 3,
    rng: np.random.Generator | None = None,
    scale: float = 0.2,
) -> LstmModel:
    """Small uniform init; forget-gate bias starts at 1 to favour remembering."""
    if hidden_size < 1 or input_size < 1:
        raise ValueError("hidden_size and input_size must be >= 1")
    rng = rng or np.random.default_rng()
    h = hidden_size
    model = LstmModel(
        w_x=rng.uniform(-scale, scale, size=(4 * h, input_size)),
        w_h=rng.uniform(-scale, scale, size=(4 * h, h)),
        b=np.zeros(4 * h),
        w_out=rng.uniform(-scale, scale, size=h),
        b_out=0.0,
    )
    model.b[:h] = 1.0
    return model


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _forward_batch(model: LstmModel, x: np.ndarray):
    """Run the recurrence over a batch of windows x (n, t, input).

    Returns raw head outputs (n,) and the per-step caches needed by BPTT.
    """
    if x.ndim != 3 or x.shape[2] != model.input_size:
        raise ValueError(
            f"window shape {x.shape} incompatible with input size {model.input_size}"
        )
    n, t_len, _ = x.shape
    h_dim = model.hidden_size
    h = np.zeros((n, h_dim))
    c = np.zeros((n, h_dim))
    caches = []
    for t in range(t_len):
        xt = x[:, t, :]
        a = xt @ model.w_x.T + h @ model.w_h.T + model.b
        f = _sigmoid(a[:, :h_dim])
        i = _sigmoid(a[:, h_dim : 2 * h_dim])
        o = _sigmoid(a[:, 2 * h_dim : 3 * h_dim])
        g = np.tanh(a[:, 3 * h_dim :])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        caches.append((xt, h, c, f, i, o, g, tc))
        h = o * tc
        c = c_new
    y = h @ model.w_out + model.b_out
    return y, h, caches


def lstm_forward(model: LstmModel, window: np.ndarray) -> float:
    """Deterministic estimate for one window (t, input), clamped to [0, 1]."""
    window = np.asarray(window, dtype=float)
    if window.ndim != 2 or window.shape[0] < 1:
        raise ValueError("window must be a non-empty (t, input) array")
    y, _, _ = _forward_batch(model, window[None, :, :])
    return float(min(max(y[0], 0.0), 1.0))


def lstm_loss_and_grads(model: LstmModel, x: np.ndarray, targets: np.ndarray):
    """MSE over the batch and its exact gradients w.r.t. every parameter."""
    y, h_last, caches = _forward_batch(model, x)
    n = x.shape[0]
    h_dim = model.hidden_size
    err = y - targets
    loss = float(np.mean(err**2))

    grads = {
        "w_x": np.zeros_like(model.w_x),
        "w_h": np.zeros_like(model.w_h),
        "b": np.zeros_like(model.b),
        "w_out": h_last.T @ (2.0 * err / n),
        "b_out": np.array([float(np.sum(2.0 * err / n))]),
    }
    dh = np.outer(2.0 * err / n, model.w_out)
    dc = np.zeros((n, h_dim))
    for xt, h_prev, c_prev, f, i, o, g, tc in reversed(caches):
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc**2)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        da = np.concatenate(
            [
                df * f * (1.0 - f),
                di * i * (1.0 - i),
                do * o * (1.0 - o),
                dg * (1.0 - g**2),
            ],
            axis=1,
        )
        grads["w_x"] += da.T @ xt
        grads["w_h"] += da.T @ h_prev
        grads["b"] += da.sum(axis=0)
        dh = da @ model.w_h
        dc = dc * f
    return loss, grads


def _clip_global_norm(grads: dict, max_norm: float):
    total = np.sqrt(sum(float(np.sum(g**2)) for g in grads.values()))
    if total > max_norm > 0:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return grads


def lstm_train(
    dataset,
    epochs: int,
    learning_rate: float = 1e-2,
    rng: np.random.Generator | None = None,
    hidden_size: int = 20,
    batch_size: int = 32,
    clip_norm: float = 1.0,
    model: LstmModel | None = None,
):
    """Fit a model to (window, target) pairs; returns (model, epoch losses).

    Targets must already be normalized to [0, 1] and all windows must share
    one length. Raises RuntimeError if the loss goes non-finite.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    pairs = list(dataset)
    if not pairs:
        raise ValueError("training dataset is empty")
    x = np.stack([np.asarray(w, dtype=float) for w, _ in pairs])
    y = np.asarray([t for _, t in pairs], dtype=float)
    if y.min() < -1e-9 or y.max() > 1.0 + 1e-9:
        raise ValueError("targets must be normalized to [0, 1]")
    rng = rng or np.random.default_rng()
    if model is None:
        model = init_lstm(hidden_size, x.shape[2], rng)

    n = x.shape[0]
    losses = []
    for epoch in range(epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            idx = perm[start : start + batch_size]
            loss, grads = lstm_loss_and_grads(model, x[idx], y[idx])
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}: loss {loss!r} "
                    f"(lr={learning_rate}, batch={batch_size})"
                )
            _clip_global_norm(grads, clip_norm)
            model.w_x -= learning_rate * grads["w_x"]
            model.w_h -= learning_rate * grads["w_h"]
            model.b -= learning_rate * grads["b"]
            model.w_out -= learning_rate * grads["w_out"]
            model.b_out -= learning_rate * float(grads["b_out"][0])
            epoch_loss += loss * len(idx)
        losses.append(epoch_loss / n)
    return model, losses
