from fusedock.dl.losses.pose_loss import PoseLoss, pose_loss, pose_loss_terms, safe_norm, backward
