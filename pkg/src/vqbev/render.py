"""Render perspective views of a BEV map by inverse ground-plane mapping.

Every image pixel casts a ray through the pinhole model; where the ray hits
the ground plane inside the map extent the pixel takes the color of the
top-most class painted at that location, otherwise the background color.
There is no occlusion or lighting; the images exist to carry the layout
semantics into the perspective view with exactly known geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CalibrationError, ShapeError
from .geometry import Camera, CameraRig, pixel_rays, ray_ground_hits
from .mapgen import BevMap

# one distinct color per toy class, drawn in order (later entries on top)
DEFAULT_CLASS_COLORS = {
    "drivable": (0.35, 0.35, 0.38),
    "crossing": (0.85, 0.75, 0.25),
    "walkway": (0.55, 0.30, 0.55),
    "divider": (0.90, 0.90, 0.90),
}
DEFAULT_BACKGROUND = (0.08, 0.14, 0.08)


@dataclass
class RenderConfig:
    class_colors: dict[str, tuple[float, float, float]] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_COLORS)
    )
    background: tuple[float, float, float] = DEFAULT_BACKGROUND
    noise_std: float = 0.0


@dataclass
class PvImageSet:
    """Per-camera float images in [0, 1], shape (3, H, W) each."""

    images: dict[str, np.ndarray]
    rig: CameraRig
    sample_id: str = ""

    def __post_init__(self):
        for cam in self.rig:
            img = self.images.get(cam.name)
            if img is None:
                raise ShapeError(f"missing image for camera {cam.name!r}")
            if img.shape[1:] != cam.image_size:
                raise ShapeError(
                    f"camera {cam.name!r}: image {img.shape[1:]} != rig {cam.image_size}"
                )


def colorize_map(bev: BevMap, cfg: RenderConfig) -> np.ndarray:
    """Paint the map into an H x W x 3 color raster, classes in order."""
    h = bev.size
    out = np.empty((h, h, 3), dtype=np.float64)
    out[:] = cfg.background
    for ci, name in enumerate(bev.classes):
        color = cfg.class_colors.get(name)
        if color is None:
            raise ShapeError(f"no color configured for class {name!r}")
        out[bev.grid[ci] > 0] = color
    return out


def render_camera(bev: BevMap, cam: Camera, cfg: RenderConfig, colored=None) -> np.ndarray:
    """Render one camera view; returns (3, H, W) float in [0, 1] (pre-noise)."""
    if abs(np.linalg.det(cam.intrinsics)) < 1e-12:
        raise CalibrationError(f"camera {cam.name!r}: intrinsics not invertible")
    if colored is None:
        colored = colorize_map(bev, cfg)
    origin, dirs = pixel_rays(cam)
    pts, hit = ray_ground_hits(origin, dirs)
    grid = bev.bev_grid()
    row, col = grid.xy_to_cell(pts[..., 0], pts[..., 1])
    r = np.round(row).astype(np.int64)
    c = np.round(col).astype(np.int64)
    n = bev.size
    inside = hit & (r >= 0) & (r < n) & (c >= 0) & (c < n)
    img = np.empty(dirs.shape[:2] + (3,), dtype=np.float64)
    img[:] = cfg.background
    img[inside] = colored[r[inside], c[inside]]
    return np.transpose(img, (2, 0, 1))


def render_views(
    bev: BevMap, rig: CameraRig, cfg: RenderConfig, rng: np.random.Generator | None = None,
    sample_id: str = "",
) -> PvImageSet:
    """Render all rig cameras; optional additive Gaussian noise, clipped."""
    colored = colorize_map(bev, cfg)
    images = {}
    for cam in rig:
        img = render_camera(bev, cam, cfg, colored)
        if cfg.noise_std > 0:
            if rng is None:
                raise ShapeError("noise_std > 0 requires an rng")
            img = img + rng.normal(0.0, cfg.noise_std, size=img.shape)
        images[cam.name] = np.clip(img, 0.0, 1.0).astype(np.float32)
    return PvImageSet(images=images, rig=rig, sample_id=sample_id)
