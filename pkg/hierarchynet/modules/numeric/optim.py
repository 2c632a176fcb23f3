"""
AdamW with decoupled weight decay, and the learning-rate schedule.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from hierarchynet.modules.numeric.diffArray import DiffArray
from hierarchynet.utils.errors import ConfigError, ShapeMismatch


@dataclass
class OptimizerState:
    lr: float = 1e-4
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    weight_decay: float = 0.01
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def init_for(self, params: Dict[str, DiffArray]) -> "OptimizerState":
        for name, p in params.items():
            self.m.setdefault(name, np.zeros_like(p.values))
            self.v.setdefault(name, np.zeros_like(p.values))
        return self


def adamw_step(params: Dict[str, DiffArray], grads: Dict[str, np.ndarray], state: OptimizerState,
               lr: Optional[float] = None) -> None:
    """
    One in-place update:
        p <- p - lr*wd*p - lr * m_hat / (sqrt(v_hat) + eps)
    with bias-corrected moments m_hat, v_hat. Parameters without a gradient entry are
    only decayed.
    """
    lr = state.lr if lr is None else lr
    b1, b2 = state.betas
    state.step += 1
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.values)
        if g.shape != p.shape:
            raise ShapeMismatch("adamw_step", g.shape, p.shape)
        m = state.m.setdefault(name, np.zeros_like(p.values))
        v = state.v.setdefault(name, np.zeros_like(p.values))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        if state.weight_decay:
            p.values -= lr * state.weight_decay * p.values
        p.values -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


class AdamW:
    """Thin stateful wrapper binding a parameter dict to an OptimizerState."""

    def __init__(self, params: Dict[str, DiffArray], lr: float = 1e-4, betas=(0.9, 0.999),
                 eps: float = 1e-8, weight_decay: float = 0.01):
        self.params = params
        self.state = OptimizerState(lr, tuple(betas), eps, weight_decay).init_for(params)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self, lr: Optional[float] = None, grads: Optional[Dict[str, np.ndarray]] = None) -> None:
        if grads is None:
            grads = {n: p.grad for n, p in self.params.items() if p.grad is not None}
        adamw_step(self.params, grads, self.state, lr)


def linear_warmup_lr(step: int, warmup_steps: int, max_lr: float, decay: str = "none") -> float:
    """
    max_lr * step / warmup_steps during warm-up, then max_lr (decay="none") or
    max_lr * sqrt(warmup_steps / step) (decay="inverse_sqrt").
    """
    if step < 0:
        raise ConfigError(f"step must be >= 0, got {step}")
    if warmup_steps <= 0:
        return max_lr
    if step <= warmup_steps:
        return max_lr * step / warmup_steps
    if decay == "inverse_sqrt":
        return max_lr * math.sqrt(warmup_steps / step)
    if decay != "none":
        raise ConfigError(f"unknown lr decay '{decay}'")
    return max_lr


def global_grad_norm(grads: List[np.ndarray]) -> float:
    return float(math.sqrt(sum(float(np.sum(g * g)) for g in grads)))
