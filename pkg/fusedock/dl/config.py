from dataclasses import dataclass, field

from fusedock.utils.errors import ConfigInvalid
from fusedock.data.docking.config import AugmentConfig


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 16
    lr_max: float = 1e-3
    cycles: int = 5
    dropout_p: float = 0.2
    seed: int = 0
    downscale: int = 4  # 744x480 -> 186x120
    blocks: int = 5
    width: int = 8  # channels of the first block, doubled by every further block
    num_workers: int = 0
    augment: AugmentConfig = field(default_factory=AugmentConfig)

    def validate(self) -> "TrainConfig":
        errors = []
        if not self.epochs >= self.cycles >= 1:
            errors.append(f"expected epochs >= cycles >= 1, got epochs={self.epochs}, cycles={self.cycles}")
        if not 0.0 <= self.dropout_p < 1.0:
            errors.append(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if self.lr_max <= 0:
            errors.append(f"lr_max must be positive, got {self.lr_max}")
        for name in ("batch_size", "downscale", "blocks", "width"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.num_workers < 0:
            errors.append(f"num_workers must be >= 0, got {self.num_workers}")
        if len(errors) > 0:
            raise ConfigInvalid("invalid train config: " + "; ".join(errors))
        return self
