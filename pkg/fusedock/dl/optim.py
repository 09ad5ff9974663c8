from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple
import math

import torch
from torch.optim import Optimizer
from torch.optim.lr_scheduler import LambdaLR

from fusedock.dl.config import TrainConfig

BETAS = (0.9, 0.999)
EPS = 1e-8
LR_MIN_FRACTION = 0.1


@dataclass
class AdamState:
    step: int = 0
    exp_avg: List[torch.Tensor] = field(default_factory=list)
    exp_avg_sq: List[torch.Tensor] = field(default_factory=list)

    @staticmethod
    def zeros_like(params: List[torch.Tensor]) -> "AdamState":
        return AdamState(
            step=0,
            exp_avg=[torch.zeros_like(p) for p in params],
            exp_avg_sq=[torch.zeros_like(p) for p in params],
        )


@torch.no_grad()
def adam_step(
    params: List[torch.Tensor],
    grads: List[torch.Tensor],
    state: AdamState,
    lr: float,
    betas: Tuple[float, float] = BETAS,
    eps: float = EPS,
) -> AdamState:
    """
    In place Adam update with bias corrected first and second moments.
    """
    if len(state.exp_avg) != len(params) or any(m.shape != p.shape for m, p in zip(state.exp_avg, params)):
        raise Exception("Error: optimizer state does not match the parameters")
    beta1, beta2 = betas
    state.step += 1
    bias_correction1 = 1.0 - beta1**state.step
    bias_correction2 = 1.0 - beta2**state.step
    step_size = lr / bias_correction1
    for p, g, m, v in zip(params, grads, state.exp_avg, state.exp_avg_sq):
        m.lerp_(g, 1.0 - beta1)
        v.mul_(beta2).addcmul_(g, g, value=1.0 - beta2)
        denom = (v.sqrt() / math.sqrt(bias_correction2)).add_(eps)
        p.addcdiv_(m, denom, value=-step_size)
    return state


class DockAdam(Optimizer):
    """torch optimizer front end of adam_step; one AdamState per parameter"""

    def __init__(self, params: Iterable, lr: float = 1e-3, betas: Tuple[float, float] = BETAS, eps: float = EPS):
        if lr <= 0:
            raise Exception(f"Error: invalid learning rate {lr}")
        super().__init__(params, dict(lr=lr, betas=betas, eps=eps))

    @torch.no_grad()
    def step(self, closure: Optional[Callable] = None) -> Optional[torch.Tensor]:
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()
        for group in self.param_groups:
            for p in group["params"]:
                if p.grad is None:
                    continue
                state = self.state[p]
                if "adam" not in state:
                    state["adam"] = AdamState.zeros_like([p])
                adam_step([p], [p.grad], state["adam"], group["lr"], group["betas"], group["eps"])
        return loss


def cyclical_lr(epoch: int, config: TrainConfig) -> float:
    """
    Triangular cycles between lr_max / 10 and lr_max: each of the `cycles` periods starts low,
    peaks half way and ramps back down.
    """
    low = config.lr_max * LR_MIN_FRACTION
    period = config.epochs / config.cycles
    x = (epoch % period) / period
    return low + (config.lr_max - low) * (1.0 - abs(2.0 * x - 1.0))


def cyclical_lr_scheduler(optimizer: Optimizer, config: TrainConfig) -> LambdaLR:
    """per epoch scheduler; the optimizer's initial lr must be config.lr_max"""
    return LambdaLR(optimizer, lr_lambda=lambda epoch: cyclical_lr(epoch, config) / config.lr_max)
