"""Procedural generation of groundtruth BEV layout rasters.

A scene is a handful of straight or arced road bands crossed at random by
striped pedestrian crossings, flanked by walkways and carrying a (possibly
dashed) center divider.  Classes are multi-label: crossings and dividers
overlap the drivable band.  Everything is driven by a single integer seed,
so the same (seed, spec) always reproduces the identical raster.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ParameterError, ShapeError
from .geometry import BevGrid

DEFAULT_CLASSES = ("drivable", "crossing", "walkway", "divider")


@dataclass
class SceneSpec:
    """Procedural parameters for one synthetic scene."""

    seed: int = 0
    num_roads: int = 8
    road_width_range: tuple[float, float] = (3.0, 5.5)  # meters
    crossing_density: float = 2.5  # expected crossings per road
    walkway_width: float = 1.8  # meters
    divider_width: float = 0.5  # meters

    def validate(self) -> None:
        if self.num_roads < 0:
            raise ParameterError("num_roads must be >= 0")
        lo, hi = self.road_width_range
        if lo <= 0 or hi <= 0:
            raise ParameterError("road_width_range entries must be > 0")
        if lo > hi:
            raise ParameterError("road_width_range must be (low, high) with low <= high")
        if self.crossing_density < 0:
            raise ParameterError("crossing_density must be >= 0")
        if self.walkway_width <= 0:
            raise ParameterError("walkway_width must be > 0")
        if self.divider_width <= 0:
            raise ParameterError("divider_width must be > 0")


@dataclass
class BevMap:
    """Multi-label binary raster of a layout: C x H x W of {0, 1}."""

    classes: tuple[str, ...]
    grid: np.ndarray  # uint8, C x H x W
    meters_per_pixel: float
    extent: tuple[float, float, float, float]  # x_min, x_max, y_min, y_max

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.uint8)
        if self.grid.ndim != 3:
            raise ShapeError(f"BevMap grid must be C x H x W, got shape {self.grid.shape}")
        c, h, w = self.grid.shape
        if c != len(self.classes):
            raise ShapeError(f"{len(self.classes)} classes but {c} channels")
        if h != w:
            raise ShapeError(f"BevMap must be square, got {h} x {w}")
        x_min, x_max, _, _ = self.extent
        if abs(h * self.meters_per_pixel - (x_max - x_min)) > 1e-6:
            raise ShapeError("extent span does not equal H * meters_per_pixel")
        if self.grid.max(initial=0) > 1:
            raise ShapeError("BevMap cells must be 0 or 1")

    @property
    def num_classes(self) -> int:
        return self.grid.shape[0]

    @property
    def size(self) -> int:
        return self.grid.shape[1]

    def bev_grid(self) -> BevGrid:
        return BevGrid(half_extent=self.extent[1], meters_per_pixel=self.meters_per_pixel)

    def meta_json(self) -> str:
        return json.dumps(
            {
                "classes": list(self.classes),
                "meters_per_pixel": self.meters_per_pixel,
                "extent": list(self.extent),
            },
            sort_keys=True,
        )


def _road_frame(X, Y, rng, grid: BevGrid, quadrant: int | None = None):
    """Centerline coordinates for one road: signed offset and arclength fields.

    Returns (signed, s) where |signed| is the distance to the centerline and s
    is an arclength-like coordinate along it.  Roads are straight lines or
    circular arcs; anchors are stratified by map quadrant so scenes do not
    cluster all their roads in the middle.
    """
    e = grid.half_extent
    if quadrant is None:
        px = rng.uniform(-0.7 * e, 0.7 * e)
        py = rng.uniform(-0.7 * e, 0.7 * e)
    else:
        sx = 1.0 if quadrant % 2 == 0 else -1.0
        sy = 1.0 if quadrant // 2 == 0 else -1.0
        px = sx * rng.uniform(0.05 * e, 0.8 * e)
        py = sy * rng.uniform(0.05 * e, 0.8 * e)
    theta = rng.uniform(0.0, np.pi)
    if rng.uniform() < 0.45:
        # arc: circle through (px, py) whose tangent there has direction theta
        radius = rng.uniform(1.2 * e, 4.0 * e)
        side = 1.0 if rng.uniform() < 0.5 else -1.0
        cx = px - side * radius * np.sin(theta)
        cy = py + side * radius * np.cos(theta)
        rr = np.hypot(X - cx, Y - cy)
        signed = rr - radius
        s = radius * np.arctan2(Y - cy, X - cx)
    else:
        dx, dy = np.cos(theta), np.sin(theta)
        signed = -(X - px) * dy + (Y - py) * dx
        s = (X - px) * dx + (Y - py) * dy
    return signed, s


def gen_map(spec: SceneSpec, grid: BevGrid, classes: tuple[str, ...] = DEFAULT_CLASSES) -> BevMap:
    """Rasterize one procedural scene onto the BEV grid.

    Classes are (drivable, crossing, walkway, divider); crossing and divider
    pixels are also drivable, walkways never are.
    """
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, 0])))
    n = grid.size
    X, Y = grid.cell_centers()

    drivable = np.zeros((n, n), dtype=bool)
    crossing = np.zeros((n, n), dtype=bool)
    walkway = np.zeros((n, n), dtype=bool)
    divider = np.zeros((n, n), dtype=bool)

    w_lo, w_hi = spec.road_width_range
    dw = spec.divider_width / 2.0
    for i in range(spec.num_roads):
        signed, s = _road_frame(X, Y, rng, grid, quadrant=i % 4)
        dist = np.abs(signed)
        width = rng.uniform(w_lo, w_hi)
        half = width / 2.0
        on_road = dist <= half
        drivable |= on_road

        # walkways flank the band; each side drawn independently
        for side in (-1.0, 1.0):
            if rng.uniform() < 0.85:
                ww = spec.walkway_width * rng.uniform(0.7, 1.3)
                off = side * signed
                walkway |= (off > half) & (off <= half + ww)

        # center divider, solid or dashed along the arclength coordinate
        div = dist <= dw
        if rng.uniform() < 0.6:
            period = rng.uniform(2.5, 4.0)
            div &= np.mod(s, period) < 0.6 * period
        divider |= div & on_road

        # dashed lane lines split wide roads into two lanes per direction
        if width > 4.0:
            lane = np.abs(dist - half / 2.0) <= dw
            period = rng.uniform(2.0, 3.5)
            lane &= np.mod(s, period) < 0.5 * period
            divider |= lane & on_road

        # zebra crossings: short bands across the road, striped along s
        n_cross = rng.poisson(spec.crossing_density)
        for _ in range(n_cross):
            s0 = rng.uniform(np.quantile(s, 0.1), np.quantile(s, 0.9))
            half_len = rng.uniform(1.5, 2.6)
            stripe = rng.uniform(0.5, 0.8)
            band = on_road & (np.abs(s - s0) <= half_len)
            crossing |= band & (np.mod(s - s0, 2.0 * stripe) < stripe)

    walkway &= ~drivable
    divider &= drivable & ~crossing

    layers = {
        "drivable": drivable,
        "crossing": crossing,
        "walkway": walkway,
        "divider": divider,
    }
    unknown = [c for c in classes if c not in layers]
    if unknown:
        raise ParameterError(f"unknown classes requested: {unknown}")
    stack = np.stack([layers[c] for c in classes]).astype(np.uint8)
    return BevMap(
        classes=tuple(classes),
        grid=stack,
        meters_per_pixel=grid.meters_per_pixel,
        extent=grid.extent,
    )


def spec_for_sample(base: SceneSpec, seed: int) -> SceneSpec:
    """The per-sample spec: identical knobs, sample-specific seed."""
    d = asdict(base)
    d["seed"] = seed
    d["road_width_range"] = tuple(d["road_width_range"])
    return SceneSpec(**d)
