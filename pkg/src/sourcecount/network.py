"""From-scratch fully-connected network engine.

Implements exactly what the detectors need and nothing more: dense
layers with ReLU / linear / softmax activations, L2 and categorical
cross-entropy losses, analytic backpropagation, the ADAM optimizer, a
truncated-normal initializer, and a deterministic mini-batch training
loop.  Parameters live in plain float64 numpy arrays.

A layer applies ``g(W x + b)`` with ``W`` of shape (out, in).  Batches
are row-major: an input batch has shape (batch, in).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("relu", "linear", "softmax")
LOSSES = ("l2", "cce")

# Probability floor inside the cross-entropy logarithm.
CCE_FLOOR = 1e-12


@dataclass
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class Network:
    """Ordered dense layers; softmax only last, ReLU only hidden."""

    layers: list[Layer]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        for i, layer in enumerate(self.layers):
            if layer.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {layer.activation!r}")
            if layer.weights.ndim != 2 or layer.bias.ndim != 1:
                raise ValueError("layer weights must be 2-D and bias 1-D")
            if layer.bias.shape[0] != layer.out_dim:
                raise ValueError("bias length must match output size")
            last = i == len(self.layers) - 1
            if layer.activation == "softmax" and not last:
                raise ValueError("softmax is only allowed on the output layer")
            if layer.activation == "relu" and last:
                raise ValueError("relu is only allowed on hidden layers")
            if i > 0 and layer.in_dim != self.layers[i - 1].out_dim:
                raise ValueError(
                    f"layer {i} input size {layer.in_dim} does not chain with "
                    f"previous output size {self.layers[i - 1].out_dim}"
                )

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def layer_sizes(self) -> list[int]:
        return [self.input_dim] + [layer.out_dim for layer in self.layers]

    def copy(self) -> "Network":
        return Network(
            [Layer(l.weights.copy(), l.bias.copy(), l.activation) for l in self.layers]
        )


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training run."""

    learning_rate: float = 0.001
    batch_size: int = 128
    epochs: int = 400
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    loss: str = "l2"

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
            raise ValueError("adam betas must lie in [0, 1)")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")


def relu(z: np.ndarray) -> np.ndarray:
    """Elementwise max(0, z)."""
    return np.maximum(0.0, z)


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-shift overflow guard.

    Works on a single vector or a (batch, dim) matrix; output components
    are positive and sum to 1 along the last axis.
    """
    z = np.asarray(z, dtype=float)
    shifted = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return relu(z)
    if activation == "softmax":
        return softmax(z)
    return z


def _as_batch(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[np.newaxis, :], True
    if x.ndim == 2:
        return x, False
    raise ValueError("input must be a vector or a (batch, dim) matrix")


def _forward_cached(net: Network, x: np.ndarray):
    """Batch forward pass keeping pre-activations for backprop."""
    acts = [x]
    pre = []
    for layer in net.layers:
        z = acts[-1] @ layer.weights.T + layer.bias
        pre.append(z)
        acts.append(_activate(z, layer.activation))
    return pre, acts


def forward(net: Network, x) -> np.ndarray:
    """Network output for a single vector or a (batch, dim) batch."""
    batch, squeeze = _as_batch(x)
    if batch.shape[1] != net.input_dim:
        raise ValueError(
            f"input dimension {batch.shape[1]} does not match network input "
            f"{net.input_dim}"
        )
    _, acts = _forward_cached(net, batch)
    out = acts[-1]
    return out[0] if squeeze else out


def loss_l2(pred, target) -> float:
    """Batch mean of squared Euclidean distance."""
    pred, _ = _as_batch(pred)
    target, _ = _as_batch(target)
    if pred.shape != target.shape:
        raise ValueError("prediction and target shapes differ")
    return float(np.mean(np.sum((pred - target) ** 2, axis=1)))


def loss_cce(pred, target) -> float:
    """Batch mean of -sum(target * ln(pred)), with pred floored at 1e-12."""
    pred, _ = _as_batch(pred)
    target, _ = _as_batch(target)
    if pred.shape != target.shape:
        raise ValueError("prediction and target shapes differ")
    return float(-np.mean(np.sum(target * np.log(np.maximum(pred, CCE_FLOOR)), axis=1)))


def compute_loss(pred, target, loss: str) -> float:
    if loss == "l2":
        return loss_l2(pred, target)
    if loss == "cce":
        return loss_cce(pred, target)
    raise ValueError(f"unknown loss {loss!r}")


def _check_loss_pairing(net: Network, loss: str):
    final = net.layers[-1].activation
    if loss == "cce" and final != "softmax":
        raise ValueError("cce loss requires a softmax output layer")
    if loss == "l2" and final == "softmax":
        raise ValueError("l2 loss is paired with a linear output layer")


def _backward_from_cache(net: Network, pre, acts, target: np.ndarray, loss: str):
    """Analytic gradients given a cached forward pass.

    Softmax plus cross-entropy is fused, so the output delta is simply
    (prediction - target) scaled by the batch size in both loss modes.
    """
    batch = acts[0].shape[0]
    if loss == "l2":
        delta = 2.0 * (acts[-1] - target) / batch
    else:
        delta = (acts[-1] - target) / batch
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        grads[i] = (delta.T @ acts[i], delta.sum(axis=0))
        if i > 0:
            delta = delta @ layer.weights
            if net.layers[i - 1].activation == "relu":
                # Subgradient 0 at the kink: units with z <= 0 pass nothing.
                delta = delta * (pre[i - 1] > 0.0)
    return grads


def backward(net: Network, x, target, loss: str):
    """Gradients of the batch loss w.r.t. every weight and bias.

    Returns one ``(d_weights, d_bias)`` pair per layer, shaped like the
    parameters.
    """
    _check_loss_pairing(net, loss)
    xb, _ = _as_batch(x)
    tb, _ = _as_batch(target)
    if xb.shape[1] != net.input_dim:
        raise ValueError("input dimension does not match network input")
    if tb.shape != (xb.shape[0], net.output_dim):
        raise ValueError("target shape does not match network output")
    pre, acts = _forward_cached(net, xb)
    return _backward_from_cache(net, pre, acts, tb, loss)


@dataclass
class AdamState:
    """First/second moment accumulators mirroring the parameter shapes."""

    step: int = 0
    moment1: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    moment2: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @classmethod
    def for_network(cls, net: Network) -> "AdamState":
        z = lambda l: (np.zeros_like(l.weights), np.zeros_like(l.bias))
        return cls(
            step=0,
            moment1=[z(l) for l in net.layers],
            moment2=[z(l) for l in net.layers],
        )


def adam_step(net: Network, grads, state: AdamState, config: TrainConfig):
    """One ADAM update with bias correction, applied in place."""
    if len(grads) != len(net.layers):
        raise ValueError("gradient list does not match network layers")
    state.step += 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    bc1 = 1.0 - b1 ** state.step
    bc2 = 1.0 - b2 ** state.step
    for layer, (gw, gb), m, v in zip(net.layers, grads, state.moment1, state.moment2):
        for param, grad, m1, m2 in ((layer.weights, gw, m[0], v[0]),
                                    (layer.bias, gb, m[1], v[1])):
            m1 *= b1
            m1 += (1.0 - b1) * grad
            m2 *= b2
            m2 += (1.0 - b2) * grad * grad
            param -= config.learning_rate * (m1 / bc1) / (np.sqrt(m2 / bc2) + config.adam_epsilon)


def init_truncated_normal(shape, fan_in: int, rng: np.random.Generator) -> np.ndarray:
    """Normal draws with variance 1/fan_in, redrawn beyond two sigma."""
    if fan_in < 1:
        raise ValueError("fan_in must be at least 1")
    sigma = 1.0 / math.sqrt(fan_in)
    w = sigma * rng.standard_normal(shape)
    out_of_bounds = np.abs(w) > 2.0 * sigma
    while np.any(out_of_bounds):
        w[out_of_bounds] = sigma * rng.standard_normal(int(np.count_nonzero(out_of_bounds)))
        out_of_bounds = np.abs(w) > 2.0 * sigma
    return w


def train(net: Network, features, targets, config: TrainConfig) -> list[float]:
    """Mini-batch ADAM training, in place; returns per-epoch mean loss.

    Each epoch reshuffles the full dataset with the config-seeded RNG
    and sweeps batches of ``config.batch_size`` (final short batch
    kept).  Deterministic given (net, data, config).

    Raises:
        ArithmeticError: If the loss stops being finite.
    """
    _check_loss_pairing(net, config.loss)
    x = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2 or y.ndim != 2:
        raise ValueError("features and targets must be 2-D arrays")
    if x.shape[0] != y.shape[0]:
        raise ValueError("features and targets must have equal sample counts")
    if x.shape[0] == 0:
        raise ValueError("dataset is empty")
    if x.shape[1] != net.input_dim or y.shape[1] != net.output_dim:
        raise ValueError("dataset dimensions do not match the network")

    n = x.shape[0]
    rng = np.random.default_rng(config.seed)
    state = AdamState.for_network(net)
    history: list[float] = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb = x[idx], y[idx]
            pre, acts = _forward_cached(net, xb)
            batch_loss = compute_loss(acts[-1], yb, config.loss)
            if not math.isfinite(batch_loss):
                raise ArithmeticError(
                    f"non-finite loss {batch_loss} at epoch {epoch}, "
                    f"batch starting at {start}"
                )
            grads = _backward_from_cache(net, pre, acts, yb, config.loss)
            adam_step(net, grads, state, config)
            total += batch_loss * len(idx)
        history.append(total / n)
    return history


# --- Serialization -----------------------------------------------------
#
# Portable text format: a JSON document whose floats are written with 17
# significant digits, which round-trips float64 exactly.

FORMAT_NAME = "sourcecount-network"
FORMAT_VERSION = 1


def _fmt(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("cannot serialize non-finite parameter values")
    return format(value, ".16e")


def _fmt_array(arr: np.ndarray) -> str:
    return "[" + ", ".join(_fmt(v) for v in np.asarray(arr, dtype=float).ravel()) + "]"


def dumps_network(net: Network, train_config: TrainConfig | None = None,
                  meta: dict | None = None) -> str:
    """Serializes a network (plus optional training config and metadata)."""
    lines = [
        "{",
        f'  "format": {json.dumps(FORMAT_NAME)},',
        f'  "version": {FORMAT_VERSION},',
        f'  "layer_sizes": {json.dumps(net.layer_sizes)},',
        '  "layers": [',
    ]
    for i, layer in enumerate(net.layers):
        comma = "," if i < len(net.layers) - 1 else ""
        lines.append("    {")
        lines.append(f'      "activation": {json.dumps(layer.activation)},')
        lines.append(f'      "rows": {layer.out_dim}, "cols": {layer.in_dim},')
        lines.append(f'      "weights": {_fmt_array(layer.weights)},')
        lines.append(f'      "bias": {_fmt_array(layer.bias)}')
        lines.append(f"    }}{comma}")
    lines.append("  ],")
    if train_config is None:
        lines.append('  "train_config": null,')
    else:
        lines.append('  "train_config": {')
        lines.append(f'    "learning_rate": {_fmt(train_config.learning_rate)},')
        lines.append(f'    "batch_size": {train_config.batch_size},')
        lines.append(f'    "epochs": {train_config.epochs},')
        lines.append(f'    "adam_beta1": {_fmt(train_config.adam_beta1)},')
        lines.append(f'    "adam_beta2": {_fmt(train_config.adam_beta2)},')
        lines.append(f'    "adam_epsilon": {_fmt(train_config.adam_epsilon)},')
        lines.append(f'    "seed": {train_config.seed},')
        lines.append(f'    "loss": {json.dumps(train_config.loss)}')
        lines.append("  },")
    lines.append(f'  "meta": {json.dumps(meta if meta is not None else {}, sort_keys=True)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_network(text: str) -> tuple[Network, TrainConfig | None, dict]:
    """Parses :func:`dumps_network` output back, bit-exact."""
    doc = json.loads(text)
    if doc.get("format") != FORMAT_NAME:
        raise ValueError("not a serialized network document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {doc.get('version')}")
    layers = []
    for entry in doc["layers"]:
        rows, cols = int(entry["rows"]), int(entry["cols"])
        weights = np.array(entry["weights"], dtype=float).reshape(rows, cols)
        bias = np.array(entry["bias"], dtype=float)
        layers.append(Layer(weights=weights, bias=bias, activation=entry["activation"]))
    net = Network(layers)
    config = None
    if doc.get("train_config") is not None:
        config = TrainConfig(**doc["train_config"])
    return net, config, doc.get("meta", {})


def save_network(net: Network, path, train_config: TrainConfig | None = None,
                 meta: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_network(net, train_config, meta))


def load_network(path) -> tuple[Network, TrainConfig | None, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_network(fh.read())
