from fusedock.data.imaging.camera import (
    CameraIntrinsics,
    intrinsics_from_fov,
    native_intrinsics,
    project,
    project_points,
)
from fusedock.data.imaging.fixture import FixtureModel, default_fixture
from fusedock.data.imaging.perlin import perlin2d, fractal_noise
from fusedock.data.imaging.backgrounds import background, BACKGROUND_MODES
from fusedock.data.imaging.render import (
    RenderSettings,
    render,
    sun_from_elevation,
    sun_in_camera,
)
from fusedock.data.imaging.augment import (
    PhotometricStrength,
    PhotometricParams,
    WarpLimits,
    draw_photometric_params,
    augment_photometric,
    augment_pose_warp,
    plane_homography,
    downscale,
)
from fusedock.data.imaging.ppm import write_ppm, read_ppm, read_ppm_size
