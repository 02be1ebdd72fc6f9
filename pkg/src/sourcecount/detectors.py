"""Eigenvalue-fed source-number detectors.

Assembles the two proposed networks plus the covariance-input ablation:

* ERNet — regression net on the sorted eigenvalues, scalar output
  rounded half-up to the nearest integer and clamped to [0, M-1].
* ECNet — classification net on the same features, softmax over M
  classes, argmax index is the estimate.
* CovNet — ablation fed the raw covariance entries (real parts then
  imaginary parts, 2*M^2 inputs) with the same trunk and softmax head.

With a sub-array size set, features come from the forward-backward
smoothed covariance instead (coherent-source mode).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig
from .network import (
    Layer,
    Network,
    TrainConfig,
    forward,
    init_truncated_normal,
    load_network,
    save_network,
)
from .signal_model import fbss_covariance

KINDS = ("ernet", "ecnet", "covnet")
DEFAULT_HIDDEN = (8, 8)


@dataclass(frozen=True)
class DetectorSpec:
    """Architecture and feature choices of one detector.

    Attributes:
        kind: "ernet", "ecnet" or "covnet".
        num_antennas: Full-array antenna count M; also the class count
            of the classification heads.
        subarray_size: Optional smoothing sub-array size M0; ``None``
            disables smoothing.
        hidden: Hidden layer widths, (8, 8) unless overridden.
        normalize: Divide features by the covariance trace before the
            network (optional experiment, off by default).
    """

    kind: str
    num_antennas: int
    subarray_size: int | None = None
    hidden: tuple[int, int] = DEFAULT_HIDDEN
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.num_antennas < 2:
            raise ValueError("need at least two antennas")
        if any(h < 1 for h in self.hidden):
            raise ValueError("hidden sizes must be positive")
        if self.subarray_size is not None and not 1 <= self.subarray_size <= self.num_antennas:
            raise ValueError("subarray_size must lie in [1, num_antennas]")

    @property
    def feature_size(self) -> int:
        m = self.subarray_size if self.subarray_size is not None else self.num_antennas
        return 2 * m * m if self.kind == "covnet" else m

    @property
    def output_size(self) -> int:
        return 1 if self.kind == "ernet" else self.num_antennas

    @property
    def loss(self) -> str:
        return "l2" if self.kind == "ernet" else "cce"

    @property
    def name(self) -> str:
        return f"fbss-{self.kind}" if self.subarray_size is not None else self.kind


@dataclass(frozen=True)
class LabeledSample:
    """One training/testing record: feature vector plus the true count."""

    features: np.ndarray
    true_k: int
    meta: dict | None = None


def make_feature_eigen(r_hat) -> np.ndarray:
    """Sorted (descending) eigenvalues of the covariance, raw scale."""
    return hermitian_eig(r_hat).eigenvalues


def make_feature_fbss(r_hat, subarray_size: int) -> np.ndarray:
    """Sorted eigenvalues of the forward-backward smoothed covariance."""
    return hermitian_eig(fbss_covariance(r_hat, subarray_size)).eigenvalues


def make_feature_cov(r_hat) -> np.ndarray:
    """Row-major real parts then imaginary parts of all entries."""
    r_hat = np.asarray(r_hat)
    if r_hat.ndim != 2 or r_hat.shape[0] != r_hat.shape[1]:
        raise ValueError("covariance must be a square matrix")
    return np.concatenate([r_hat.real.ravel(), r_hat.imag.ravel()]).astype(float)


def one_hot(k: int, num_classes: int) -> np.ndarray:
    """Length-``num_classes`` vector with a single 1 at index ``k``."""
    if not 0 <= k < num_classes:
        raise ValueError(f"need 0 <= k < {num_classes}, got {k}")
    v = np.zeros(num_classes)
    v[k] = 1.0
    return v


def ernet_decide(net: Network, features, num_antennas: int) -> int:
    """Rounds the scalar regression output half-up, clamped to [0, M-1]."""
    raw = float(forward(net, features)[0])
    return int(min(max(np.floor(raw + 0.5), 0), num_antennas - 1))


def ecnet_decide(net: Network, features) -> int:
    """Index of the maximum output component (ties to the smaller index)."""
    return int(np.argmax(forward(net, features)))


def build_detector(spec: DetectorSpec, rng: np.random.Generator) -> Network:
    """Untrained 4-layer network for ``spec``: input -> hidden -> output.

    Hidden layers use ReLU; the output layer is linear for ERNet and
    softmax otherwise.  Weights are truncated-normal with variance
    1/fan_in; biases start at zero.
    """
    sizes = [spec.feature_size, *spec.hidden, spec.output_size]
    layers = []
    for i in range(len(sizes) - 1):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        last = i == len(sizes) - 2
        activation = ("linear" if spec.kind == "ernet" else "softmax") if last else "relu"
        layers.append(
            Layer(
                weights=init_truncated_normal((fan_out, fan_in), fan_in, rng),
                bias=np.zeros(fan_out),
                activation=activation,
            )
        )
    return Network(layers)


@dataclass
class Detector:
    """A spec bundled with its (possibly trained) network."""

    spec: DetectorSpec
    net: Network
    train_config: TrainConfig | None = None

    def features(self, r_hat) -> np.ndarray:
        if self.spec.kind == "covnet":
            src = r_hat if self.spec.subarray_size is None else fbss_covariance(
                r_hat, self.spec.subarray_size)
            feat = make_feature_cov(src)
            trace = float(np.trace(np.asarray(src)).real)
        elif self.spec.subarray_size is not None:
            feat = make_feature_fbss(r_hat, self.spec.subarray_size)
            trace = float(np.sum(feat))
        else:
            feat = make_feature_eigen(r_hat)
            trace = float(np.sum(feat))
        if self.spec.normalize and trace > 0.0:
            feat = feat / trace
        return feat

    def decide(self, features) -> int:
        if self.spec.kind == "ernet":
            return ernet_decide(self.net, features, self.spec.num_antennas)
        return ecnet_decide(self.net, features)

    def decide_batch(self, features: np.ndarray) -> np.ndarray:
        """Vectorized decisions for a (num, feature_size) batch."""
        out = forward(self.net, features)
        if self.spec.kind == "ernet":
            raw = np.floor(out[:, 0] + 0.5)
            return np.clip(raw, 0, self.spec.num_antennas - 1).astype(int)
        return np.argmax(out, axis=1)

    def estimate(self, r_hat) -> int:
        return self.decide(self.features(r_hat))


def save_detector(detector: Detector, path):
    """Writes the network in the portable model format, tagging the spec
    in the metadata block so the detector can be rebuilt on load."""
    spec = detector.spec
    meta = {
        "detector": spec.kind,
        "num_antennas": spec.num_antennas,
        "subarray_size": spec.subarray_size,
        "hidden": list(spec.hidden),
        "normalize": spec.normalize,
    }
    save_network(detector.net, path, detector.train_config, meta)


def load_detector(path) -> Detector:
    net, train_config, meta = load_network(path)
    try:
        spec = DetectorSpec(
            kind=meta["detector"],
            num_antennas=int(meta["num_antennas"]),
            subarray_size=meta.get("subarray_size"),
            hidden=tuple(meta.get("hidden", DEFAULT_HIDDEN)),
            normalize=bool(meta.get("normalize", False)),
        )
    except KeyError as exc:
        raise ValueError(f"model file {path} lacks detector metadata: {exc}") from exc
    return Detector(spec=spec, net=net, train_config=train_config)
