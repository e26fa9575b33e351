"""Per-weight pruning scores. Lower score means prune first, for every method.

Inputs are a weight matrix W [m, n], per-input-feature activation norms
act [n], and an aggregated per-weight gradient norm map grad [m, n].

    magnitude       |W|
    wanda           |W| * act[j]
    gblm_gradient   |W| * grad[i, j]
    gblm_pruner     |W| * (alpha * grad[i, j] + act[j]),  alpha defaults to 100
    hgla            | (|W| * act[j]) / rescaled grad[i, j] |

The hgla denominator uses gradients rescaled onto the activation scale:

    grad' = grad * mean(|W| * act) / mean(grad)

with both means taken over all m*n entries, so mean(grad') equals
mean(|W| * act) exactly up to rounding. A weight with a high rescaled
gradient and a low activation term therefore lands near the bottom of the
ranking and is pruned early. Entries whose rescaled gradient is exactly
zero are given a sentinel larger than every finite score in the matrix,
so they are never selected before any finite-scored entry.

All arithmetic runs in float64; stored score matrices are float32.
"""

from dataclasses import dataclass, field

import numpy as np

METHODS = ("magnitude", "wanda", "gblm_gradient", "gblm_pruner", "hgla")
DEFAULT_ALPHA = 100.0

_F32MAX = float(np.finfo(np.float32).max)


class DegenerateGradientError(ValueError):
    """All gradient norms are zero, so the rescale in hgla is undefined."""


@dataclass
class ScoreInputs:
    weight: np.ndarray  # [m, n]
    act_norm: np.ndarray  # [n]
    grad_norm: np.ndarray  # [m, n]
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.act_norm = np.asarray(self.act_norm, dtype=np.float64)
        self.grad_norm = np.asarray(self.grad_norm, dtype=np.float64)
        if self.weight.ndim != 2 or self.weight.size == 0:
            raise ValueError("weight must be a non-empty 2-D matrix")
        m, n = self.weight.shape
        if self.act_norm.shape != (n,):
            raise ValueError(
                "act_norm shape %r does not match weight columns %d"
                % (self.act_norm.shape, n)
            )
        if self.grad_norm.shape != (m, n):
            raise ValueError(
                "grad_norm shape %r does not match weight shape %r"
                % (self.grad_norm.shape, self.weight.shape)
            )
        for name, arr in (("weight", self.weight), ("act_norm", self.act_norm),
                          ("grad_norm", self.grad_norm)):
            if not np.isfinite(arr).all():
                raise ValueError("%s has non-finite entries" % name)
        if (self.act_norm < 0).any():
            raise ValueError("act_norm has negative entries")
        if (self.grad_norm < 0).any():
            raise ValueError("grad_norm has negative entries")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError("alpha must be finite and non-negative")


@dataclass
class ScoreMatrix:
    values: np.ndarray  # [m, n] float32, finite, >= 0
    method: str = field(default="")


def _finish(values, method) -> ScoreMatrix:
    # Saturate well below float32 max so the zero-gradient sentinel can
    # always sit strictly above every finite score after the f32 cast.
    values = np.minimum(values, _F32MAX / 4.0)
    return ScoreMatrix(values=values.astype(np.float32), method=method)


def score_magnitude(inputs) -> ScoreMatrix:
    return _finish(np.abs(inputs.weight), "magnitude")


def score_wanda(inputs) -> ScoreMatrix:
    return _finish(np.abs(inputs.weight) * inputs.act_norm[None, :], "wanda")


def score_gblm_gradient(inputs) -> ScoreMatrix:
    return _finish(np.abs(inputs.weight) * inputs.grad_norm, "gblm_gradient")


def score_gblm_pruner(inputs) -> ScoreMatrix:
    mix = inputs.alpha * inputs.grad_norm + inputs.act_norm[None, :]
    return _finish(np.abs(inputs.weight) * mix, "gblm_pruner")


def _rescale(weight, act_norm, grad_norm):
    numer = np.abs(weight) * act_norm[None, :]
    grad_mean = float(np.mean(grad_norm))
    if grad_mean == 0.0:
        raise DegenerateGradientError("gradient norms are all zero")
    return numer, grad_norm * (float(np.mean(numer)) / grad_mean)


def rescale_gradients(weight, act_norm, grad_norm) -> np.ndarray:
    """Gradient map scaled so its mean matches mean(|W| * act). Float32."""
    inputs = ScoreInputs(weight=weight, act_norm=act_norm, grad_norm=grad_norm)
    _, rescaled = _rescale(inputs.weight, inputs.act_norm, inputs.grad_norm)
    return rescaled.astype(np.float32)


def score_hgla(inputs) -> ScoreMatrix:
    numer, rescaled = _rescale(inputs.weight, inputs.act_norm, inputs.grad_norm)
    zero = rescaled == 0.0
    values = np.zeros_like(numer)
    np.divide(numer, rescaled, out=values, where=~zero)
    values = np.abs(values)
    values = np.minimum(values, _F32MAX / 4.0)
    if zero.any():
        finite_max = float(values[~zero].max()) if (~zero).any() else 0.0
        values[zero] = 2.0 * finite_max + 1.0
    return ScoreMatrix(values=values.astype(np.float32), method="hgla")


_DISPATCH = {
    "magnitude": score_magnitude,
    "wanda": score_wanda,
    "gblm_gradient": score_gblm_gradient,
    "gblm_pruner": score_gblm_pruner,
    "hgla": score_hgla,
}


def score(method, inputs) -> ScoreMatrix:
    if method not in _DISPATCH:
        raise ValueError("unknown scoring method %r (choose from %s)" % (method, ", ".join(METHODS)))
    return _DISPATCH[method](inputs)
