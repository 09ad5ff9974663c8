from typing import Dict, Tuple

import torch
import torch.nn as nn


def safe_norm(x: torch.Tensor, dim: int = -1) -> torch.Tensor:
    """euclidean norm along dim whose gradient at exactly zero is zero"""
    squared = (x * x).sum(dim=dim)
    positive = squared > 0
    safe_squared = torch.where(positive, squared, torch.ones_like(squared))
    return torch.where(positive, torch.sqrt(safe_squared), torch.zeros_like(squared))


def pose_loss_terms(
    t_hat: torch.Tensor, r_hat: torch.Tensor, t: torch.Tensor, r: torch.Tensor
) -> Tuple[torch.Tensor, torch.Tensor]:
    """:return: L_r, L_t, each the batch sum of unsquared residual norms"""
    if t_hat.shape != t.shape or r_hat.shape != r.shape:
        raise Exception(f"prediction/label shape mismatch: {tuple(t_hat.shape)}/{tuple(t.shape)}, {tuple(r_hat.shape)}/{tuple(r.shape)}")
    return safe_norm(r_hat - r).sum(), safe_norm(t_hat - t).sum()


def pose_loss(
    t_hat: torch.Tensor,
    r_hat: torch.Tensor,
    t: torch.Tensor,
    r: torch.Tensor,
    sigma_r: torch.Tensor,
    sigma_t: torch.Tensor,
) -> torch.Tensor:
    """
    L = L_r exp(-2 sigma_r) + L_t exp(-2 sigma_t) + 2 (sigma_r + sigma_t)
    with learnable log standard deviations weighting attitude and position.
    """
    loss_r, loss_t = pose_loss_terms(t_hat, r_hat, t, r)
    return loss_r * torch.exp(-2.0 * sigma_r) + loss_t * torch.exp(-2.0 * sigma_t) + 2.0 * (sigma_r + sigma_t)


class PoseLoss(nn.Module):
    def __init__(self) -> None:
        super().__init__()
        self.sigma_r = nn.Parameter(torch.zeros(()))
        self.sigma_t = nn.Parameter(torch.zeros(()))

    def forward(self, t_hat: torch.Tensor, r_hat: torch.Tensor, t: torch.Tensor, r: torch.Tensor) -> torch.Tensor:
        return pose_loss(t_hat, r_hat, t, r, self.sigma_r, self.sigma_t)


def backward(
    model: nn.Module, loss_fn: PoseLoss, images: torch.Tensor, t: torch.Tensor, r: torch.Tensor
) -> Dict[str, torch.Tensor]:
    """
    One forward / backward pass.
    :return: gradient of the loss for every learnable of model and loss_fn, keyed by parameter name
    """
    named = [(f"model.{n}", p) for n, p in model.named_parameters()] + [(f"loss.{n}", p) for n, p in loss_fn.named_parameters()]
    for _, p in named:
        p.grad = None
    t_hat, r_hat = model(images)
    loss_fn(t_hat, r_hat, t, r).backward()
    return {n: p.grad.detach().clone() if p.grad is not None else torch.zeros_like(p) for n, p in named}
