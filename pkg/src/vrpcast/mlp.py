"""The p -> h -> 1 feedforward network: representation, init, forward pass
and the analytic residual Jacobian consumed by the second-order trainers."""

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class MlpModel:
    """tanh-hidden, linear-output network. Immutable after construction."""

    w1: np.ndarray = field(repr=False)   # (h, p)
    b1: np.ndarray = field(repr=False)   # (h,)
    w2: np.ndarray = field(repr=False)   # (h,)
    b2: float
    hidden_activation: str = "tanh"
    output_activation: str = "linear"

    def __post_init__(self):
        for name in ("w1", "b1", "w2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), float))
        if self.hidden_activation != "tanh" or self.output_activation != "linear":
            raise ValueError("only tanh hidden / linear output is supported")
        h, p = self.w1.shape
        if self.b1.shape != (h,) or self.w2.shape != (h,):
            raise ValueError("inconsistent layer shapes")
        if not (np.all(np.isfinite(self.w1)) and np.all(np.isfinite(self.b1))
                and np.all(np.isfinite(self.w2)) and np.isfinite(self.b2)):
            raise ValueError("parameters must be finite")

    @property
    def input_dim(self):
        return self.w1.shape[1]

    @property
    def hidden_dim(self):
        return self.w1.shape[0]

    @property
    def n_params(self):
        h, p = self.w1.shape
        return h * p + 2 * h + 1


def init(p: int, h: int, seed: int) -> MlpModel:
    """Glorot-uniform weights, zero biases, deterministic per seed."""
    if p < 1 or h < 1:
        raise ValueError("p and h must be >= 1")
    rng = np.random.default_rng(seed)
    r1 = np.sqrt(6.0 / (p + h))
    r2 = np.sqrt(6.0 / (h + 1))
    return MlpModel(
        w1=rng.uniform(-r1, r1, size=(h, p)),
        b1=np.zeros(h),
        w2=rng.uniform(-r2, r2, size=h),
        b2=0.0,
    )


def flatten(model: MlpModel) -> np.ndarray:
    """Parameter vector in the fixed order w1 row-major, b1, w2, b2."""
    return np.concatenate(
        [model.w1.ravel(), model.b1, model.w2, [model.b2]]
    )


def unflatten(theta, p: int, h: int) -> MlpModel:
    theta = np.asarray(theta, dtype=float)
    expected = h * p + 2 * h + 1
    if theta.shape != (expected,):
        raise ValueError(f"expected {expected} parameters, got {theta.shape}")
    return MlpModel(
        w1=theta[: h * p].reshape(h, p).copy(),
        b1=theta[h * p : h * p + h].copy(),
        w2=theta[h * p + h : h * p + 2 * h].copy(),
        b2=float(theta[-1]),
    )


def forward(model: MlpModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise ValueError(f"expected input of length {model.input_dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input must be finite")
    return float(
        kernels.forward_batch(x[None, :], model.w1, model.b1, model.w2, model.b2)[0]
    )


def forward_batch(model: MlpModel, inputs) -> np.ndarray:
    inputs = np.ascontiguousarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != model.input_dim:
        raise ValueError("inputs must be (n, p)")
    return kernels.forward_batch(inputs, model.w1, model.b1, model.w2, model.b2)


def batch_residuals_and_jacobian(model: MlpModel, inputs, targets):
    """residuals[i] = targets[i] - forward(inputs[i]) and d(residual)/d(theta)."""
    inputs = np.ascontiguousarray(inputs, dtype=float)
    targets = np.ascontiguousarray(targets, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != model.input_dim:
        raise ValueError("inputs must be (n, p)")
    if targets.shape != (inputs.shape[0],):
        raise ValueError("targets length must match the number of input rows")
    return kernels.residuals_and_jacobian(
        inputs, targets, model.w1, model.b1, model.w2, model.b2
    )


def to_dict(model: MlpModel, provenance: dict | None = None) -> dict:
    return {
        "input_dim": model.input_dim,
        "hidden_dim": model.hidden_dim,
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "params": [float(v) for v in flatten(model)],
        "provenance": provenance or {},
    }


def from_dict(payload: dict) -> MlpModel:
    return unflatten(
        np.asarray(payload["params"], dtype=float),
        int(payload["input_dim"]),
        int(payload["hidden_dim"]),
    )


def save(model: MlpModel, path, provenance: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(model, provenance), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path) -> tuple[MlpModel, dict]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return from_dict(payload), payload.get("provenance", {})
