from fusedock.dl.config import TrainConfig
from fusedock.dl.models import PoseRegressor, predictions_to_poses
from fusedock.dl.losses import PoseLoss, pose_loss, backward
from fusedock.dl.optim import AdamState, DockAdam, adam_step, cyclical_lr
from fusedock.dl.checkpoint import save_checkpoint, load_checkpoint
