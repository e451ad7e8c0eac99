"""Camera geometry: pinhole projection, ground-plane rays, BEV grid coords.

Conventions used throughout the package:

* Ego frame: x forward, y left, z up, origin on the ground under the ego
  vehicle.  The ground is the plane z = 0.
* Camera frame: x right (image u), y down (image v), z forward (depth).
  Extrinsics map ego coordinates to camera coordinates.
* Pixel coordinates: (u, v) with u along columns and v along rows; the
  center of pixel (row, col) is at (u, v) = (col, row).
* BEV raster: row 0 is the far front (largest x), column 0 the far left
  (largest y), so the map is the scene viewed from above with the ego
  facing up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CalibrationError, ParameterError

_ROT_TOL = 1e-6


@dataclass
class Camera:
    """One pinhole camera: intrinsics, ego-to-camera extrinsics, image size."""

    name: str
    intrinsics: np.ndarray  # 3x3, zero skew
    extrinsics: np.ndarray  # 4x4 rigid transform, ego -> camera
    image_size: tuple[int, int]  # (height px, width px)

    def __post_init__(self):
        self.intrinsics = np.asarray(self.intrinsics, dtype=np.float64).reshape(3, 3)
        self.extrinsics = np.asarray(self.extrinsics, dtype=np.float64).reshape(4, 4)
        validate_camera(self)

    @property
    def rotation(self) -> np.ndarray:
        return self.extrinsics[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.extrinsics[:3, 3]

    @property
    def center(self) -> np.ndarray:
        """Camera center in ego coordinates."""
        return -self.rotation.T @ self.translation


@dataclass
class CameraRig:
    """An ordered collection of cameras sharing the ego frame."""

    cameras: list[Camera] = field(default_factory=list)

    def __iter__(self):
        return iter(self.cameras)

    def __len__(self):
        return len(self.cameras)

    def __getitem__(self, idx):
        return self.cameras[idx]

    def names(self) -> list[str]:
        return [c.name for c in self.cameras]


def validate_camera(cam: Camera) -> None:
    """Check the Camera invariants, raising CalibrationError on violation."""
    K = cam.intrinsics
    if K[0, 0] <= 0 or K[1, 1] <= 0:
        raise CalibrationError(f"camera {cam.name!r}: focal lengths must be > 0")
    if abs(K[0, 1]) > 0 or abs(K[1, 0]) > 0 or np.any(K[2] != (0.0, 0.0, 1.0)):
        raise CalibrationError(f"camera {cam.name!r}: intrinsics must have zero skew")
    R = cam.rotation
    if np.abs(R @ R.T - np.eye(3)).max() > _ROT_TOL:
        raise CalibrationError(f"camera {cam.name!r}: rotation block is not orthonormal")
    if abs(np.linalg.det(R) - 1.0) > _ROT_TOL:
        raise CalibrationError(f"camera {cam.name!r}: rotation determinant must be +1")
    h, w = cam.image_size
    if h <= 0 or w <= 0:
        raise CalibrationError(f"camera {cam.name!r}: image size must be positive")


def project_point(point: np.ndarray, cam: Camera):
    """Project ego-frame point(s) into a camera.

    Accepts a single (3,) point or an (..., 3) array.  Returns
    (u, v, depth, visible) with matching leading shape; visible is true iff
    depth > 0 and (u, v) lies inside [0, W-1] x [0, H-1].
    """
    p = np.asarray(point, dtype=np.float64)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    cam_pts = pts @ cam.rotation.T + cam.translation
    depth = cam_pts[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        x = cam_pts[..., 0] / depth
        y = cam_pts[..., 1] / depth
    K = cam.intrinsics
    u = K[0, 0] * x + K[0, 2]
    v = K[1, 1] * y + K[1, 2]
    h, w = cam.image_size
    visible = (depth > 0) & (u >= 0) & (u <= w - 1) & (v >= 0) & (v <= h - 1)
    u = np.where(depth > 0, u, np.nan)
    v = np.where(depth > 0, v, np.nan)
    if single:
        return float(u[0]), float(v[0]), float(depth[0]), bool(visible[0])
    return u, v, depth, visible


def pixel_rays(cam: Camera):
    """Ego-frame origin and per-pixel ray directions for every pixel center.

    Returns (center (3,), dirs (H, W, 3)); dirs are not normalized.
    """
    h, w = cam.image_size
    K = cam.intrinsics
    u = np.arange(w, dtype=np.float64)
    v = np.arange(h, dtype=np.float64)
    uu, vv = np.meshgrid(u, v)
    x = (uu - K[0, 2]) / K[0, 0]
    y = (vv - K[1, 2]) / K[1, 1]
    dirs_cam = np.stack([x, y, np.ones_like(x)], axis=-1)
    dirs_ego = dirs_cam @ cam.rotation  # R.T applied to each row vector
    return cam.center, dirs_ego


def ray_ground_hits(origin: np.ndarray, dirs: np.ndarray):
    """Intersect rays with the ground plane z = 0.

    Returns (points (..., 3), hit (...,) bool); a ray hits only if it reaches
    the plane at a strictly positive parameter, i.e. in front of the camera.
    """
    dz = dirs[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -origin[2] / dz
    hit = np.isfinite(s) & (s > 0)
    pts = origin + dirs * s[..., None]
    return pts, hit


@dataclass(frozen=True)
class BevGrid:
    """Square BEV raster geometry: extent in meters and resolution."""

    half_extent: float  # map spans [-half_extent, +half_extent] in x and y
    meters_per_pixel: float

    def __post_init__(self):
        if self.half_extent <= 0:
            raise ParameterError("half_extent must be > 0")
        if self.meters_per_pixel <= 0:
            raise ParameterError("meters_per_pixel must be > 0")
        n = 2.0 * self.half_extent / self.meters_per_pixel
        if abs(n - round(n)) > 1e-9:
            raise ParameterError(
                "extent span must be an integer number of pixels: "
                f"2*{self.half_extent}/{self.meters_per_pixel} = {n}"
            )

    @property
    def size(self) -> int:
        return int(round(2.0 * self.half_extent / self.meters_per_pixel))

    @property
    def extent(self) -> tuple[float, float, float, float]:
        """(x_min, x_max, y_min, y_max) in meters."""
        e = self.half_extent
        return (-e, e, -e, e)

    def cell_centers(self):
        """Ego-frame (x, y) coordinates of every cell center, shape (H, W)."""
        n = self.size
        mpp = self.meters_per_pixel
        rows = np.arange(n, dtype=np.float64)
        cols = np.arange(n, dtype=np.float64)
        x = self.half_extent - (rows + 0.5) * mpp
        y = self.half_extent - (cols + 0.5) * mpp
        return np.meshgrid(x, y, indexing="ij")

    def xy_to_cell(self, x, y):
        """Fractional (row, col) of ego-frame coordinates; centers at .0."""
        mpp = self.meters_per_pixel
        row = (self.half_extent - np.asarray(x)) / mpp - 0.5
        col = (self.half_extent - np.asarray(y)) / mpp - 0.5
        return row, col

    def cell_to_xy(self, row, col):
        mpp = self.meters_per_pixel
        x = self.half_extent - (np.asarray(row, dtype=np.float64) + 0.5) * mpp
        y = self.half_extent - (np.asarray(col, dtype=np.float64) + 0.5) * mpp
        return x, y


def make_camera(
    name: str,
    yaw_deg: float,
    pitch_deg: float,
    height: float,
    focal_px: float,
    image_size: tuple[int, int],
) -> Camera:
    """Build a camera at (0, 0, height) looking along yaw, pitched down.

    yaw 0 faces +x (forward), 90 faces +y (left); pitch is degrees below
    horizontal.
    """
    yaw = math.radians(yaw_deg)
    pitch = math.radians(pitch_deg)
    fwd = np.array(
        [math.cos(yaw) * math.cos(pitch), math.sin(yaw) * math.cos(pitch), -math.sin(pitch)]
    )
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(fwd, up)
    right /= np.linalg.norm(right)
    down = np.cross(fwd, right)
    down /= np.linalg.norm(down)
    R = np.stack([right, down, fwd])  # rows are the camera axes in ego coords
    center = np.array([0.0, 0.0, height])
    T = np.eye(4)
    T[:3, :3] = R
    T[:3, 3] = -R @ center
    h, w = image_size
    K = np.array(
        [[focal_px, 0.0, (w - 1) / 2.0], [0.0, focal_px, (h - 1) / 2.0], [0.0, 0.0, 1.0]]
    )
    return Camera(name=name, intrinsics=K, extrinsics=T, image_size=image_size)


def default_rig(
    height: float = 1.6,
    pitch_deg: float = 28.0,
    focal_px: float = 92.0,
    image_size: tuple[int, int] = (96, 160),
) -> CameraRig:
    """Four-camera surround rig (front/left/back/right) over the toy world."""
    yaws = {"front": 0.0, "left": 90.0, "back": 180.0, "right": 270.0}
    cams = [
        make_camera(name, yaw, pitch_deg, height, focal_px, image_size)
        for name, yaw in yaws.items()
    ]
    return CameraRig(cameras=cams)
