"""Dataset generation and loading: paired BEV maps and camera renders.

A dataset directory holds one BEVM map and one PVIM image per camera for
each sample, a shared calibration JSON, and a manifest listing everything.
Sample i is generated from seed base_seed + i, so corpora are reproducible
and extendable.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import DataError, StorageError
from .formats import read_bevmap, read_image, write_bevmap, write_image
from .geometry import BevGrid, Camera, CameraRig
from .mapgen import SceneSpec, gen_map, spec_for_sample
from .render import RenderConfig, render_views

MANIFEST_NAME = "manifest.json"
WORKERS_ENV = "VQBEV_NUM_WORKERS"


def write_calibration(path, rig: CameraRig) -> None:
    cams = [
        {
            "name": cam.name,
            "K": [float(x) for x in cam.intrinsics.reshape(-1)],
            "T": [float(x) for x in cam.extrinsics.reshape(-1)],
            "height": cam.image_size[0],
            "width": cam.image_size[1],
        }
        for cam in rig
    ]
    Path(path).write_text(json.dumps({"cameras": cams}, indent=2, sort_keys=True))


def read_calibration(path) -> CameraRig:
    try:
        blob = json.loads(Path(path).read_text())
    except OSError as e:
        raise StorageError(f"cannot read calibration {path}: {e}") from e
    cams = [
        Camera(
            name=c["name"],
            intrinsics=np.array(c["K"], dtype=np.float64).reshape(3, 3),
            extrinsics=np.array(c["T"], dtype=np.float64).reshape(4, 4),
            image_size=(int(c["height"]), int(c["width"])),
        )
        for c in blob["cameras"]
    ]
    return CameraRig(cameras=cams)


def _num_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "0")
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def _generate_sample(i, base_seed, spec, grid, rig, render_cfg, out_dir):
    seed = base_seed + i
    sample_id = f"{i:05d}"
    bev = gen_map(spec_for_sample(spec, seed), grid)
    noise_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    views = render_views(bev, rig, render_cfg, rng=noise_rng, sample_id=sample_id)
    map_path = f"maps/{sample_id}.bevm"
    write_bevmap(out_dir / map_path, bev)
    image_paths = {}
    for name, img in views.images.items():
        rel = f"images/{sample_id}_{name}.pvim"
        write_image(out_dir / rel, img)
        image_paths[name] = rel
    return {"id": sample_id, "seed": seed, "map": map_path, "images": image_paths}


def make_dataset(
    n: int,
    base_seed: int,
    rig: CameraRig,
    out_dir,
    spec: SceneSpec,
    grid: BevGrid,
    render_cfg: RenderConfig | None = None,
) -> dict:
    """Generate n samples under out_dir and return the manifest dict."""
    render_cfg = render_cfg or RenderConfig()
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise StorageError(f"cannot create dataset dir {out_dir}: {e}") from e

    write_calibration(out_dir / "calibration.json", rig)
    args = [(i, base_seed, spec, grid, rig, render_cfg, out_dir) for i in range(n)]
    workers = _num_workers()
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda a: _generate_sample(*a), args))
    else:
        samples = [_generate_sample(*a) for a in args]

    manifest = {
        "version": 1,
        "base_seed": base_seed,
        "calibration": "calibration.json",
        "samples": samples,
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


class Dataset:
    """Random access to a generated dataset directory."""

    def __init__(self, manifest_path):
        path = Path(manifest_path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        try:
            self.manifest = json.loads(path.read_text())
        except OSError as e:
            raise StorageError(f"cannot read manifest {path}: {e}") from e
        self.root = path.parent
        self.rig = read_calibration(self.root / self.manifest["calibration"])
        if not self.manifest["samples"]:
            raise DataError(f"dataset {self.root} has no samples")

    def __len__(self):
        return len(self.manifest["samples"])

    def sample_ids(self):
        return [s["id"] for s in self.manifest["samples"]]

    def entry(self, idx_or_id):
        samples = self.manifest["samples"]
        if isinstance(idx_or_id, str):
            for s in samples:
                if s["id"] == idx_or_id:
                    return s
            raise DataError(f"sample id {idx_or_id!r} not in manifest")
        return samples[idx_or_id]

    def load_map(self, idx_or_id):
        return read_bevmap(self.root / self.entry(idx_or_id)["map"])

    def load_images(self, idx_or_id) -> dict[str, np.ndarray]:
        entry = self.entry(idx_or_id)
        return {name: read_image(self.root / rel) for name, rel in entry["images"].items()}
