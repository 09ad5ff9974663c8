from fusedock.utils.pose.rotations import (
    normalize_quat,
    quat_multiply,
    quat_conjugate,
    quat_to_dcm,
    dcm_to_quat,
    dcm_quat_convert,
    rot6d_to_dcm,
    dcm_to_rot6d,
    is_valid_dcm,
    random_quats,
)
from fusedock.utils.pose.pose import Pose, pose_distance
