from typing import List, Tuple
import logging

import numpy as np
import torch
import torch.nn as nn

from fusedock.utils.errors import DegenerateInput, ShapeMismatch
from fusedock.utils.pose import Pose, rot6d_to_dcm

lgr = logging.getLogger("Fuse")

LEAKY_SLOPE = 0.1


class PoseRegressor(nn.Module):
    """
    Direct pose regression from a single RGB image.

    blocks x [3x3 conv, leaky ReLU, 2x2 max pool] -> spatial dropout -> global average pooling
    -> two affine heads: translation (3) and 6D attitude (6).
    """

    def __init__(self, blocks: int = 5, width: int = 8, dropout_p: float = 0.2, in_channels: int = 3):
        super().__init__()
        self.blocks = blocks
        self.in_channels = in_channels

        layers: List[nn.Module] = []
        channels = in_channels
        for b in range(blocks):
            out_channels = width * 2**b
            layers += [
                nn.Conv2d(channels, out_channels, kernel_size=3, stride=1, padding=1),
                nn.LeakyReLU(LEAKY_SLOPE),
                nn.MaxPool2d(2),
            ]
            channels = out_channels
        self.backbone = nn.Sequential(*layers)
        self.dropout = nn.Dropout2d(p=dropout_p)
        self.num_features = channels
        self.head_t = nn.Linear(channels, 3)
        self.head_r = nn.Linear(channels, 6)
        self.reset_parameters()

    def reset_parameters(self) -> None:
        for m in self.modules():
            if isinstance(m, nn.Conv2d):
                nn.init.kaiming_uniform_(m.weight, a=LEAKY_SLOPE, nonlinearity="leaky_relu")
                nn.init.zeros_(m.bias)
            elif isinstance(m, nn.Linear):
                nn.init.zeros_(m.bias)

    @property
    def min_input_size(self) -> int:
        return 2**self.blocks

    def features(self, x: torch.Tensor) -> torch.Tensor:
        """B x C x H x W -> B x num_features"""
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatch(f"expected a B x {self.in_channels} x H x W batch, got {tuple(x.shape)}")
        if min(x.shape[2], x.shape[3]) < self.min_input_size:
            raise ShapeMismatch(f"input {x.shape[3]}x{x.shape[2]} is smaller than {self.min_input_size} px for {self.blocks} blocks")
        x = self.backbone(x)
        x = self.dropout(x)
        return x.mean(dim=(2, 3))

    def forward(self, x: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """:return: t_hat B x 3 [m], r_hat B x 6"""
        features = self.features(x)
        return self.head_t(features), self.head_r(features)


def predictions_to_poses(t_hat: torch.Tensor, r_hat: torch.Tensor) -> List[Pose]:
    """
    Maps network outputs to poses. A degenerate 6D output falls back to the identity attitude.
    """
    t_np = t_hat.detach().cpu().numpy().astype(np.float64)
    r_np = r_hat.detach().cpu().numpy().astype(np.float64)
    poses = []
    for t, r in zip(t_np, r_np):
        try:
            R = rot6d_to_dcm(r)
        except DegenerateInput as e:
            lgr.warning(f"degenerate attitude prediction, using identity: {e}")
            R = np.eye(3)
        poses.append(Pose.from_dcm(R, t))
    return poses
