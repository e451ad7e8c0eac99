"""Binary artifact formats.

All multi-byte integers and floats are little-endian.  Every format opens
with a 4-byte magic and a u16 version; readers refuse unknown magics and
versions.  JSON trailers are u32-length-prefixed UTF-8.

    BEVM  groundtruth/predicted BEV map      (u16 C, u32 H, u32 W, bytes, trailer)
    PVIM  float image raster                 (u16 C, u32 H, u32 W, f32 data)
    VQCB  codebook with EMA accumulators     (u32 K, u32 D, f32 blocks, trailer)
    TOKP  token probability grid + mask      (u32 rows, u32 cols, u32 K, f32, u8)
    VQCK  named-tensor checkpoint blob
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, StorageError
from .mapgen import BevMap

BEVM_VERSION = 1
PVIM_VERSION = 1
VQCB_VERSION = 1
TOKP_VERSION = 1
VQCK_VERSION = 1


def _read_exact(f, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file: wanted {n} bytes, got {len(data)}")
    return data


def _expect_magic(f, magic: bytes, version: int) -> None:
    got = _read_exact(f, 4)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}")
    (ver,) = struct.unpack("<H", _read_exact(f, 2))
    if ver != version:
        raise FormatError(f"{magic.decode()} version {ver} unsupported (want {version})")


def _write_json_trailer(f, obj) -> None:
    payload = json.dumps(obj, sort_keys=True).encode("utf-8")
    f.write(struct.pack("<I", len(payload)))
    f.write(payload)


def _read_json_trailer(f):
    (n,) = struct.unpack("<I", _read_exact(f, 4))
    return json.loads(_read_exact(f, n).decode("utf-8"))


def _open_write(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("wb")
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e


def _open_read(path):
    try:
        return Path(path).open("rb")
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e


# --- BEVM ---------------------------------------------------------------


def write_bevmap(path, bev: BevMap) -> None:
    with _open_write(path) as f:
        f.write(b"BEVM")
        c, h, w = bev.grid.shape
        f.write(struct.pack("<HHII", BEVM_VERSION, c, h, w))
        f.write(np.ascontiguousarray(bev.grid, dtype=np.uint8).tobytes())
        _write_json_trailer(
            f,
            {
                "classes": list(bev.classes),
                "meters_per_pixel": bev.meters_per_pixel,
                "extent": list(bev.extent),
            },
        )


def read_bevmap(path) -> BevMap:
    with _open_read(path) as f:
        _expect_magic(f, b"BEVM", BEVM_VERSION)
        c, h, w = struct.unpack("<HII", _read_exact(f, 10))
        grid = np.frombuffer(_read_exact(f, c * h * w), dtype=np.uint8).reshape(c, h, w)
        meta = _read_json_trailer(f)
    return BevMap(
        classes=tuple(meta["classes"]),
        grid=grid.copy(),
        meters_per_pixel=float(meta["meters_per_pixel"]),
        extent=tuple(meta["extent"]),
    )


# --- PVIM ---------------------------------------------------------------


def write_image(path, image: np.ndarray) -> None:
    img = np.asarray(image, dtype="<f4")
    if img.ndim != 3:
        raise FormatError(f"image must be C x H x W, got shape {img.shape}")
    with _open_write(path) as f:
        f.write(b"PVIM")
        c, h, w = img.shape
        f.write(struct.pack("<HHII", PVIM_VERSION, c, h, w))
        f.write(np.ascontiguousarray(img).tobytes())


def read_image(path) -> np.ndarray:
    with _open_read(path) as f:
        _expect_magic(f, b"PVIM", PVIM_VERSION)
        c, h, w = struct.unpack("<HII", _read_exact(f, 10))
        data = np.frombuffer(_read_exact(f, 4 * c * h * w), dtype="<f4")
    return data.reshape(c, h, w).copy()


# --- VQCB ---------------------------------------------------------------


def write_codebook_file(path, vectors, ema_cluster_size, ema_sum, meta: dict) -> None:
    """meta must hold decay, epsilon, patch_size, classes."""
    vec = np.asarray(vectors, dtype="<f4")
    k, d = vec.shape
    cs = np.asarray(ema_cluster_size, dtype="<f4").reshape(k)
    es = np.asarray(ema_sum, dtype="<f4").reshape(k, d)
    with _open_write(path) as f:
        f.write(b"VQCB")
        f.write(struct.pack("<HII", VQCB_VERSION, k, d))
        f.write(np.ascontiguousarray(vec).tobytes())
        f.write(np.ascontiguousarray(cs).tobytes())
        f.write(np.ascontiguousarray(es).tobytes())
        _write_json_trailer(f, meta)


def read_codebook_file(path):
    """Returns (vectors, ema_cluster_size, ema_sum, meta)."""
    with _open_read(path) as f:
        _expect_magic(f, b"VQCB", VQCB_VERSION)
        k, d = struct.unpack("<II", _read_exact(f, 8))
        vec = np.frombuffer(_read_exact(f, 4 * k * d), dtype="<f4").reshape(k, d).copy()
        cs = np.frombuffer(_read_exact(f, 4 * k), dtype="<f4").copy()
        es = np.frombuffer(_read_exact(f, 4 * k * d), dtype="<f4").reshape(k, d).copy()
        meta = _read_json_trailer(f)
    return vec, cs, es, meta


# --- TOKP ---------------------------------------------------------------


def write_token_probs(path, probs: np.ndarray, mask: np.ndarray) -> None:
    p = np.asarray(probs, dtype="<f4")
    if p.ndim != 3:
        raise FormatError(f"probs must be rows x cols x K, got shape {p.shape}")
    rows, cols, k = p.shape
    m = np.asarray(mask, dtype=np.uint8).reshape(rows, cols)
    with _open_write(path) as f:
        f.write(b"TOKP")
        f.write(struct.pack("<HIII", TOKP_VERSION, rows, cols, k))
        f.write(np.ascontiguousarray(p).tobytes())
        f.write(np.ascontiguousarray(m).tobytes())


def read_token_probs(path):
    with _open_read(path) as f:
        _expect_magic(f, b"TOKP", TOKP_VERSION)
        rows, cols, k = struct.unpack("<III", _read_exact(f, 12))
        p = np.frombuffer(_read_exact(f, 4 * rows * cols * k), dtype="<f4")
        m = np.frombuffer(_read_exact(f, rows * cols), dtype=np.uint8)
    return p.reshape(rows, cols, k).copy(), m.reshape(rows, cols).astype(bool)


# --- VQCK checkpoints -----------------------------------------------------

_DTYPES = {0: "<f4", 1: "<f8", 2: "<i8", 3: "|u1"}
_DTYPE_CODES = {np.dtype(v): k for k, v in _DTYPES.items()}


def write_checkpoint(path, tensors: dict[str, np.ndarray]) -> None:
    """Write named arrays in a stable, timestamp-free binary layout."""
    with _open_write(path) as f:
        f.write(b"VQCK")
        f.write(struct.pack("<HI", VQCK_VERSION, len(tensors)))
        for name in sorted(tensors):
            arr = np.asarray(tensors[name])
            code = _DTYPE_CODES.get(arr.dtype.newbyteorder("<"))
            if code is None:
                arr = arr.astype("<f4")
                code = _DTYPE_CODES[np.dtype("<f4")]
            raw = name.encode("utf-8")
            f.write(struct.pack("<H", len(raw)))
            f.write(raw)
            f.write(struct.pack("<BB", code, arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(np.ascontiguousarray(arr).tobytes())


def read_checkpoint(path) -> dict[str, np.ndarray]:
    tensors = {}
    with _open_read(path) as f:
        _expect_magic(f, b"VQCK", VQCK_VERSION)
        (count,) = struct.unpack("<I", _read_exact(f, 4))
        for _ in range(count):
            (nlen,) = struct.unpack("<H", _read_exact(f, 2))
            name = _read_exact(f, nlen).decode("utf-8")
            code, ndim = struct.unpack("<BB", _read_exact(f, 2))
            shape = struct.unpack(f"<{ndim}I", _read_exact(f, 4 * ndim))
            dtype = np.dtype(_DTYPES[code])
            n = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            data = np.frombuffer(_read_exact(f, dtype.itemsize * n), dtype=dtype)
            tensors[name] = data.reshape(shape).copy()
    return tensors
