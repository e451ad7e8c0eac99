"""Discrete BEV-map tokenization and camera-to-BEV token alignment.

The package covers a full desk-scale pipeline on a synthetic ground-plane
world: procedural layout generation with calibrated camera renders, a
codebook tokenizer trained to reconstruct layouts from discrete patch
tokens, a deformable-attention module that predicts those tokens from the
camera views, and an inference path that turns predicted tokens back into
maps, plus the metrics to score all of it.
"""

__version__ = "0.1.0"

from .geometry import BevGrid, Camera, CameraRig, default_rig, project_point
from .mapgen import BevMap, SceneSpec, gen_map
from .render import PvImageSet, RenderConfig, render_views
from .dataset import Dataset, make_dataset

__all__ = [
    "BevGrid",
    "BevMap",
    "Camera",
    "CameraRig",
    "Dataset",
    "PvImageSet",
    "RenderConfig",
    "SceneSpec",
    "default_rig",
    "gen_map",
    "make_dataset",
    "project_point",
    "render_views",
]
