"""
Attitude algebra at double precision.

Conventions:
    * quaternions are stored scalar-last [x, y, z, w] and multiplied with the Hamilton product
    * a DCM R maps vectors expressed in the source frame into the destination frame (p_dst = R @ p_src)
    * the 6D representation is the first two DCM columns, column-major: [R[:,0], R[:,1]]
"""

from typing import Union
import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import DegenerateInput

GRAM_SCHMIDT_EPS = 1e-12


def normalize_quat(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q)
    if norm < GRAM_SCHMIDT_EPS:
        raise DegenerateInput(f"cannot normalize a zero quaternion {q}")
    return q / norm


def quat_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product p ⊗ q of scalar-last quaternions"""
    px, py, pz, pw = p
    qx, qy, qz, qw = q
    return np.array(
        [
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
            pw * qw - px * qx - py * qy - pz * qz,
        ],
        dtype=np.float64,
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_to_dcm(q: np.ndarray) -> np.ndarray:
    return Rotation.from_quat(normalize_quat(q)).as_matrix()


def dcm_to_quat(R: np.ndarray) -> np.ndarray:
    """
    scipy picks the numerically dominant of (trace, diagonal) terms before extracting the quaternion
    (Shepperd's branch selection), so rotations close to 180 degrees are handled without cancellation.
    The returned quaternion has a non-negative scalar part.
    """
    q = Rotation.from_matrix(np.asarray(R, dtype=np.float64)).as_quat()
    if q[3] < 0:
        q = -q
    return q


def dcm_quat_convert(x: np.ndarray) -> np.ndarray:
    """
    Converts a 3x3 DCM to a unit quaternion, or a 4-vector quaternion to a DCM
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape == (3, 3):
        return dcm_to_quat(x)
    if x.shape == (4,):
        return quat_to_dcm(x)
    raise Exception(f"expected a 3x3 DCM or a 4-vector quaternion, got shape {x.shape}")


def rot6d_to_dcm(r: Union[np.ndarray, list]) -> np.ndarray:
    """
    Gram-Schmidt orthogonalisation of the two 3-vector columns packed in r.

    :param r: 6-vector [a1, a2] (column-major 3x2 matrix)
    :return: DCM whose columns are [b1, b2, b1 x b2]
    """
    r = np.asarray(r, dtype=np.float64).reshape(6)
    a1, a2 = r[:3], r[3:]
    n1 = np.linalg.norm(a1)
    n2 = np.linalg.norm(a2)
    if n1 <= GRAM_SCHMIDT_EPS or n2 <= GRAM_SCHMIDT_EPS:
        raise DegenerateInput(f"zero column in 6D attitude {r.tolist()}")
    b1 = a1 / n1
    cos_angle = float(np.dot(b1, a2 / n2))
    if abs(cos_angle) >= 1.0 - GRAM_SCHMIDT_EPS:
        raise DegenerateInput(f"parallel columns in 6D attitude {r.tolist()}")
    rejection = a2 - np.dot(b1, a2) * b1
    b2 = rejection / np.linalg.norm(rejection)
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=1)


def dcm_to_rot6d(R: np.ndarray) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    return np.concatenate([R[:, 0], R[:, 1]])


def is_valid_dcm(R: np.ndarray, tol: float = 1e-9) -> bool:
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (3, 3):
        return False
    orthogonal = np.allclose(R.T @ R, np.eye(3), atol=tol)
    return bool(orthogonal and abs(np.linalg.det(R) - 1.0) <= tol)


def random_quats(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed unit quaternions (n x 4), used by generators and property tests"""
    return Rotation.random(n, random_state=rng).as_quat().reshape(n, 4)
