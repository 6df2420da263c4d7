"""Finite-difference verification of analytic gradients.

``grad_check`` re-evaluates a scalar-producing closure with each input
element nudged by ±eps and compares the central difference against the
gradient from one backward pass. Discrepancies are normalized by
``max(1, |analytic|, |numeric|)`` so the tolerance is relative for large
gradients and absolute near zero, where central differences bottom out in
rounding noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


@dataclass
class GradCheckReport:
    max_discrepancy: float
    worst_input: str
    tolerance: float
    n_checked: int

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= self.tolerance


def grad_check(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    tolerance: float = 1e-4,
) -> GradCheckReport:
    """Compare analytic and central-difference gradients of ``fn``.

    ``fn`` must rebuild its graph on every call (the tape is dynamic) and
    return a scalar tensor. ``inputs`` are the leaves to perturb; each must
    have ``requires_grad`` set.
    """
    for t in inputs:
        if not t.requires_grad:
            raise ValueError("grad_check inputs must require grad")
        t.grad = None
    out = fn()
    if out.size != 1:
        raise ValueError(f"grad_check needs a scalar output, got shape {out.shape}")
    out.backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    worst = 0.0
    worst_name = ""
    n = 0
    for t, ag in zip(inputs, analytic):
        if not t.data.flags["C_CONTIGUOUS"]:
            t.data = np.ascontiguousarray(t.data)
        flat = t.data.reshape(-1)  # view: perturbations hit the live array
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up = fn().item()
            flat[j] = orig - eps
            down = fn().item()
            flat[j] = orig
            num = (up - down) / (2.0 * eps)
            ana = ag.reshape(-1)[j]
            disc = abs(ana - num) / max(1.0, abs(ana), abs(num))
            n += 1
            if disc > worst:
                worst = disc
                name = t.name or f"input{inputs.index(t)}"
                worst_name = f"{name}[{j}]"
        t.grad = None
    return GradCheckReport(max_discrepancy=worst, worst_input=worst_name,
                           tolerance=tolerance, n_checked=n)
