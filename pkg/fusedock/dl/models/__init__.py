from fusedock.dl.models.pose_regressor import PoseRegressor, predictions_to_poses
