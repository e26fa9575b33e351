"""Small dense feed-forward reference network.

Supplies the genuine signals the pruning scores consume: per-layer input
activations and per-sample weight gradients of a mean-squared-error loss.
Layers have no bias term; layer l maps x to act(x @ W.T) with W of shape
[fan_out, fan_in]. The per-sample loss is the mean over output dimensions
of the squared error, so for a single output unit it reduces to the plain
squared error. Weights are stored float32; all forward/backward arithmetic
runs in float64.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .tensorfile import read_tensor, write_tensor

ACTIVATIONS = ("identity", "relu")


@dataclass
class DenseLayer:
    weight: np.ndarray  # [fan_out, fan_in] float32
    activation: str = "identity"


@dataclass
class CalibrationBatch:
    inputs: np.ndarray  # [n_samples, n_features]
    targets: np.ndarray  # [n_samples, n_outputs]


def _check_network(net):
    if not net:
        raise ValueError("network has no layers")
    for idx, layer in enumerate(net):
        w = layer.weight
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError("layer %d weight must be 2-D and non-empty" % idx)
        if not np.isfinite(w).all():
            raise ValueError("layer %d weight has non-finite entries" % idx)
        if layer.activation not in ACTIVATIONS:
            raise ValueError("layer %d has unknown activation %r" % (idx, layer.activation))
        if idx > 0 and w.shape[1] != net[idx - 1].weight.shape[0]:
            raise ValueError(
                "layer %d expects %d inputs but layer %d emits %d"
                % (idx, w.shape[1], idx - 1, net[idx - 1].weight.shape[0])
            )


def _apply_activation(kind, z):
    if kind == "relu":
        return np.maximum(z, 0.0)
    return z


def forward(net, inputs):
    """Run the network; returns (layer_inputs, output).

    layer_inputs[l] is the [n_samples, fan_in] matrix layer l consumed,
    which is exactly what activation norms are taken over.
    """
    _check_network(net)
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("inputs must be [n_samples, n_features] with n_samples >= 1")
    if x.shape[1] != net[0].weight.shape[1]:
        raise ValueError(
            "inputs have %d features, first layer expects %d"
            % (x.shape[1], net[0].weight.shape[1])
        )
    layer_inputs = []
    for layer in net:
        layer_inputs.append(x)
        z = x @ layer.weight.astype(np.float64).T
        x = _apply_activation(layer.activation, z)
    return layer_inputs, x


def per_sample_loss(outputs, targets):
    """Mean squared error over output dimensions, one value per sample."""
    out = np.asarray(outputs, dtype=np.float64)
    tgt = np.asarray(targets, dtype=np.float64)
    if out.shape != tgt.shape:
        raise ValueError("outputs %r and targets %r differ" % (out.shape, tgt.shape))
    return np.mean((out - tgt) ** 2, axis=1)


def batch_loss(net, batch) -> float:
    _, out = forward(net, batch.inputs)
    return float(np.mean(per_sample_loss(out, batch.targets)))


def per_sample_gradients(net, batch):
    """Per-sample gradients of the loss w.r.t. every weight.

    Returns one [n_samples, fan_out, fan_in] float64 array per layer.
    The relu derivative at exactly zero is taken as zero.
    """
    _check_network(net)
    x = np.asarray(batch.inputs, dtype=np.float64)
    targets = np.asarray(batch.targets, dtype=np.float64)
    layer_inputs = []
    pre_acts = []
    for layer in net:
        layer_inputs.append(x)
        z = x @ layer.weight.astype(np.float64).T
        pre_acts.append(z)
        x = _apply_activation(layer.activation, z)
    if x.shape != targets.shape:
        raise ValueError("targets %r do not match outputs %r" % (targets.shape, x.shape))

    grads = [None] * len(net)
    # d loss / d output, for the mean-over-dims squared error
    delta = 2.0 * (x - targets) / x.shape[1]
    for idx in range(len(net) - 1, -1, -1):
        layer = net[idx]
        if layer.activation == "relu":
            delta = delta * (pre_acts[idx] > 0.0)
        grads[idx] = np.einsum("sm,sn->smn", delta, layer_inputs[idx])
        if idx > 0:
            delta = delta @ layer.weight.astype(np.float64)
    return grads


def activation_norms(layer_input):
    """Euclidean norm of each input feature column across samples."""
    x = np.asarray(layer_input, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("layer input must be 2-D")
    return np.linalg.norm(x, axis=0)


def gradient_norms(per_sample, p=2):
    """Aggregate a [n_samples, m, n] gradient stack to an [m, n] norm map."""
    g = np.asarray(per_sample, dtype=np.float64)
    if g.ndim != 3:
        raise ValueError("per-sample gradients must be 3-D")
    if p == 2:
        return np.sqrt(np.sum(g * g, axis=0))
    if p == 1:
        return np.sum(np.abs(g), axis=0)
    raise ValueError("unsupported norm order %r (use 1 or 2)" % (p,))


MANIFEST_NAME = "manifest.json"


def save_network(dirpath, net) -> None:
    """Write one tensor file per layer plus a manifest with layer order."""
    _check_network(net)
    os.makedirs(dirpath, exist_ok=True)
    entries = []
    for idx, layer in enumerate(net):
        fname = "layer_%02d.tensor" % idx
        write_tensor(os.path.join(dirpath, fname), layer.weight)
        entries.append({"weights": fname, "activation": layer.activation})
    manifest = {"layers": entries}
    with open(os.path.join(dirpath, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def load_network(dirpath):
    with open(os.path.join(dirpath, MANIFEST_NAME), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    net = []
    for entry in manifest["layers"]:
        weight = read_tensor(os.path.join(dirpath, entry["weights"]))
        net.append(DenseLayer(weight=weight, activation=entry["activation"]))
    _check_network(net)
    return net


def make_network(sizes, seed, hidden_activation="relu"):
    """Seeded demo network: uniform [-0.5, 0.5] weights, identity output layer."""
    if len(sizes) < 2:
        raise ValueError("need at least an input and an output size")
    rng = np.random.default_rng(seed)
    net = []
    for idx in range(len(sizes) - 1):
        w = rng.uniform(-0.5, 0.5, size=(sizes[idx + 1], sizes[idx])).astype(np.float32)
        last = idx == len(sizes) - 2
        net.append(DenseLayer(weight=w, activation="identity" if last else hidden_activation))
    return net


def make_batch(n_samples, n_features, n_outputs, seed):
    """Seeded demo batch: inputs and targets uniform on [-1, 1]."""
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(-1.0, 1.0, size=(n_samples, n_features)).astype(np.float32)
    targets = rng.uniform(-1.0, 1.0, size=(n_samples, n_outputs)).astype(np.float32)
    return CalibrationBatch(inputs=inputs, targets=targets)
