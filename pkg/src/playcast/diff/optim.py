"""Adam optimizer with the per-epoch learning-rate decay used for training."""

from __future__ import annotations

import numpy as np

from .nn import Parameter


class GradientNaNError(RuntimeError):
    """A parameter gradient contained NaN/Inf; carries the parameter name."""


class Adam:
    """Standard Adam with bias correction.

    ``decay_epoch()`` multiplies the learning rate by ``lr_decay`` and is
    meant to be called once per training epoch.
    """

    def __init__(self, params: list[Parameter], lr: float = 0.0005,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8,
                 lr_decay: float = 0.999):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.lr_decay = lr_decay
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1 ** t
        bc2 = 1.0 - self.beta2 ** t
        for i, p in enumerate(self.params):
            g = p.grad
            if g is None:
                continue
            if not np.all(np.isfinite(g)):
                raise GradientNaNError(f"non-finite gradient in parameter {p.name!r}")
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * (g * g)
            m_hat = self.m[i] / bc1
            v_hat = self.v[i] / bc2
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def decay_epoch(self) -> None:
        self.lr *= self.lr_decay

    def state_dict(self) -> dict:
        return {
            "lr": self.lr,
            "lr_decay": self.lr_decay,
            "betas": [self.beta1, self.beta2],
            "eps": self.eps,
            "step_count": self.step_count,
            "m": {p.name: m for p, m in zip(self.params, self.m)},
            "v": {p.name: v for p, v in zip(self.params, self.v)},
        }

    def load_state_dict(self, state: dict) -> None:
        self.lr = float(state["lr"])
        self.lr_decay = float(state["lr_decay"])
        self.beta1, self.beta2 = (float(b) for b in state["betas"])
        self.eps = float(state["eps"])
        self.step_count = int(state["step_count"])
        for i, p in enumerate(self.params):
            self.m[i] = state["m"][p.name].copy()
            self.v[i] = state["v"][p.name].copy()
