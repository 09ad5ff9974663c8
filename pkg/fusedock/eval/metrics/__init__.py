from fusedock.eval.metrics.pose_errors import (
    position_error,
    attitude_error,
    range_normalized_error,
)
