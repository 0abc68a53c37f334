"""Online binary linear classifiers trained one observation at a time.

Four variants share the same state (weights, bias) and decision rule
``w . x + b >= 0 -> class 1``:

* ``LOGIT`` — single-sample gradient steps on the logistic loss
  ``log(1 + exp(-s * f(x)))`` plus a shrinkage term, where ``s = 2y - 1``.
* ``LINEAR_SVM`` — the same scheme on the hinge loss ``max(0, 1 - s * f(x))``.
* ``PA_I`` / ``PA_II`` — passive-aggressive closed-form updates with the
  bias folded in as an always-on unit feature: with ``loss`` the hinge loss
  and ``q = ||x||^2 + 1``, PA-I uses ``tau = min(C, loss / q)`` and PA-II
  uses ``tau = loss / (q + 1 / (2C))``; then ``w += tau * s * x`` and
  ``b += tau * s``.

Gradient steps use the decaying rate
``eta_t = lr0 / (1 + lr0 * alpha_reg * t)`` with ``t`` the number of
updates already applied. The shrinkage gradient is ``alpha_reg * w`` (L2),
``alpha_reg * sign(w)`` (L1, with ``sign(0) = 0``) or their ``l1_ratio``
mix (elastic net); the bias is never shrunk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class ModelKind(str, Enum):
    LOGIT = "logit"
    LINEAR_SVM = "linear_svm"
    PA_I = "pa1"
    PA_II = "pa2"


class Penalty(str, Enum):
    L1 = "l1"
    L2 = "l2"
    ELASTICNET = "elasticnet"


#: Kinds updated by gradient steps (the others are passive-aggressive).
GRADIENT_KINDS = (ModelKind.LOGIT, ModelKind.LINEAR_SVM)


@dataclass(frozen=True)
class LinearModelConfig:
    """Hyperparameters of one online linear classifier.

    ``alpha_reg``/``penalty``/``l1_ratio``/``learning_rate0`` apply to the
    gradient kinds only; ``aggressiveness_c`` to the PA kinds only.
    """

    kind: ModelKind
    alpha_reg: float = 1e-4
    penalty: Penalty = Penalty.L2
    l1_ratio: float = 0.15
    aggressiveness_c: float = 1.0
    learning_rate0: float = 0.01

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "penalty", Penalty(self.penalty))
        if self.alpha_reg < 0:
            raise ValueError("alpha_reg must be non-negative")
        if not 0.0 <= self.l1_ratio <= 1.0:
            raise ValueError("l1_ratio must lie in [0, 1]")
        if self.aggressiveness_c <= 0:
            raise ValueError("aggressiveness_c must be positive")
        if self.learning_rate0 <= 0:
            raise ValueError("learning_rate0 must be positive")

    def build(self, dim: int) -> "OnlineLinearModel":
        """Fresh zero-weight model of this configuration."""
        return OnlineLinearModel(self, dim)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "alpha_reg": float(self.alpha_reg),
            "penalty": self.penalty.value,
            "l1_ratio": float(self.l1_ratio),
            "aggressiveness_c": float(self.aggressiveness_c),
            "learning_rate0": float(self.learning_rate0),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModelConfig":
        return cls(
            kind=ModelKind(d["kind"]),
            alpha_reg=d.get("alpha_reg", 1e-4),
            penalty=Penalty(d.get("penalty", "l2")),
            l1_ratio=d.get("l1_ratio", 0.15),
            aggressiveness_c=d.get("aggressiveness_c", 1.0),
            learning_rate0=d.get("learning_rate0", 0.01),
        )


def _sigmoid(z: float) -> float:
    # branch keeps exp() off large positive arguments
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


class OnlineLinearModel:
    """Mutable weights/bias updated one labeled sample at a time.

    Labels are 0/1. A model instance is owned by a single caller; distinct
    instances are fully independent.
    """

    def __init__(self, config: LinearModelConfig, dim: int):
        if dim < 1:
            raise ValueError("dim must be at least 1")
        self.config = config
        self.weights = np.zeros(dim, dtype=float)
        self.bias = 0.0
        self.step_count = 0

    @property
    def dim(self) -> int:
        return self.weights.size

    def decision_value(self, x) -> float:
        """Signed margin ``w . x + b``."""
        x = self._check_point(x)
        return float(self.weights @ x) + self.bias

    def predict(self, x) -> int:
        """Class 1 when the margin is >= 0 (ties go to class 1), else 0."""
        return 1 if self.decision_value(x) >= 0.0 else 0

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (X @ self.weights + self.bias >= 0.0).astype(int)

    def partial_fit(self, x, y: int) -> "OnlineLinearModel":
        """Apply one update for the sample ``(x, y)`` and return self."""
        x = self._check_point(x)
        if y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {y!r}")
        s = 2.0 * y - 1.0
        cfg = self.config
        f = float(self.weights @ x) + self.bias
        if cfg.kind in GRADIENT_KINDS:
            if cfg.kind is ModelKind.LOGIT:
                # d/df log(1 + exp(-s f)) = -s * sigmoid(-s f)
                g = -s * _sigmoid(-s * f)
            else:
                g = -s if s * f < 1.0 else 0.0
            eta = cfg.learning_rate0 / (1.0 + cfg.learning_rate0 * cfg.alpha_reg * self.step_count)
            self.weights -= eta * (g * x + self._penalty_gradient())
            self.bias -= eta * g
        else:
            loss = max(0.0, 1.0 - s * f)
            if loss > 0.0:
                norm_sq = float(x @ x)
                if norm_sq == 0.0:
                    # degenerate sample: nothing informative to move along
                    self.step_count += 1
                    return self
                q = norm_sq + 1.0  # unit bias feature included
                if cfg.kind is ModelKind.PA_I:
                    tau = min(cfg.aggressiveness_c, loss / q)
                else:
                    tau = loss / (q + 0.5 / cfg.aggressiveness_c)
                self.weights += (tau * s) * x
                self.bias += tau * s
        self.step_count += 1
        return self

    def fit(self, X, Y, epochs: int = 100, seed: int = 0) -> "OnlineLinearModel":
        """Run ``epochs`` shuffled passes of single-sample updates."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("X must be a non-empty 2-d matrix")
        if X.shape[0] != Y.shape[0]:
            raise ValueError("X and Y row counts differ")
        rng = np.random.default_rng(seed)
        for _ in range(epochs):
            for i in rng.permutation(X.shape[0]):
                self.partial_fit(X[i], int(Y[i]))
        return self

    def _penalty_gradient(self):
        cfg = self.config
        if cfg.alpha_reg == 0.0:
            return 0.0
        if cfg.penalty is Penalty.L2:
            return cfg.alpha_reg * self.weights
        if cfg.penalty is Penalty.L1:
            return cfg.alpha_reg * np.sign(self.weights)
        r = cfg.l1_ratio
        return cfg.alpha_reg * (r * np.sign(self.weights) + (1.0 - r) * self.weights)

    def to_dict(self) -> dict:
        d = self.config.to_dict()
        d.update(
            weights=[float(w) for w in self.weights],
            bias=float(self.bias),
            step_count=int(self.step_count),
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OnlineLinearModel":
        config = LinearModelConfig.from_dict(d)
        model = cls(config, len(d["weights"]))
        model.weights = np.asarray(d["weights"], dtype=float)
        model.bias = float(d["bias"])
        model.step_count = int(d.get("step_count", 0))
        return model

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size != self.dim:
            raise ValueError(f"point has dimension {x.size}, model has {self.dim}")
        return x
