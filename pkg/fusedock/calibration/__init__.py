from fusedock.calibration.statics import (
    CalibSample,
    CalibResult,
    solve_statics,
    apply_calibration,
    simulate_samples,
    nearest_rotation,
)
from fusedock.calibration.calib_io import (
    read_samples_csv,
    write_samples_csv,
    read_result_json,
    write_result_json,
    calibrate_stream,
)
