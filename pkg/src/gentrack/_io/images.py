"""
Numbered image sequences.

Binary Netpbm rasters (PGM `P5`, PPM `P6`) are read natively. Other formats
are decoded through OpenCV when the `codecs` extra is installed.
"""
import logging
import pathlib
import re
from typing import Iterator, Union

import numpy as np

from .._exceptions import SequenceError

logger = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]

NETPBM_SUFFIXES = {".pgm", ".ppm", ".pnm"}
CODEC_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
LUMA = np.array([0.299, 0.587, 0.114])


def natural_key(path: PathLike) -> int:
    m = re.search(r"(\d+)", pathlib.Path(path).stem)
    if m is None:
        raise SequenceError(f"no frame number in file name {str(path)!r}")
    return int(m.group(1))


def to_grayscale(image: np.ndarray) -> np.ndarray:
    if image.ndim == 2:
        return image.astype(np.uint8)
    luma = image[..., :3].astype(np.float64) @ LUMA
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def _read_header(data: bytes) -> tuple[bytes, list[int], int]:
    # Magic number, then width, height and maxval, with `#` comments allowed.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise SequenceError("truncated Netpbm header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # Exactly one whitespace byte separates the header from the raster.
    pos += 1
    magic = tokens[0]
    try:
        values = [int(t) for t in tokens[1:]]
    except ValueError:
        raise SequenceError(f"malformed Netpbm header: {tokens!r}")
    return magic, values, pos


def read_netpbm(path: PathLike) -> np.ndarray:
    data = pathlib.Path(path).read_bytes()
    magic, (width, height, maxval), offset = _read_header(data)

    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise SequenceError(f"{str(path)!r}: unsupported Netpbm type {magic!r}")
    if not 0 < maxval < 65536:
        raise SequenceError(f"{str(path)!r}: invalid maxval {maxval}")

    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    count = width * height * channels
    raster = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
    if channels == 3:
        raster = raster.reshape(height, width, 3)
    else:
        raster = raster.reshape(height, width)

    if maxval != 255:
        raster = np.rint(raster.astype(np.float64) * 255.0 / maxval)
    return raster.astype(np.uint8)


def write_pgm(path: PathLike, image: np.ndarray) -> None:
    image = to_grayscale(image)
    height, width = image.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    pathlib.Path(path).write_bytes(header + image.tobytes())


def _read_with_codec(path: pathlib.Path) -> np.ndarray:
    try:
        import cv2
    except ImportError:
        raise SequenceError(
            f"{str(path)!r}: reading {path.suffix} files requires opencv "
            "(install the 'codecs' extra)"
        )
    image = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if image is None:
        raise SequenceError(f"cannot decode image {str(path)!r}")
    # OpenCV stores channels as BGR.
    return image[..., ::-1]


def read_image(path: PathLike) -> np.ndarray:
    path = pathlib.Path(path)
    if path.suffix.lower() in NETPBM_SUFFIXES:
        return to_grayscale(read_netpbm(path))
    return to_grayscale(_read_with_codec(path))


def list_frames(directory: PathLike) -> list[pathlib.Path]:
    root = pathlib.Path(directory)
    if not root.is_dir():
        raise SequenceError(f"not a directory: {str(root)!r}")

    suffixes = NETPBM_SUFFIXES | CODEC_SUFFIXES
    paths = sorted(
        (p for p in root.iterdir() if p.suffix.lower() in suffixes),
        key=natural_key,
    )
    if not paths:
        raise SequenceError(f"no frames found in {str(root)!r}")

    numbers = [natural_key(p) for p in paths]
    expected = range(numbers[0], numbers[0] + len(numbers))
    missing = sorted(set(range(numbers[0], numbers[-1] + 1)) - set(numbers))
    if missing:
        listed = ", ".join(str(n) for n in missing)
        raise SequenceError(f"missing frames in {str(root)!r}: {listed}")
    if numbers != list(expected):
        raise SequenceError(f"duplicate frame numbers in {str(root)!r}")

    return paths


def load_frames(directory: PathLike) -> Iterator[np.ndarray]:
    paths = list_frames(directory)
    logger.info("loading %d frames from %s", len(paths), directory)
    return (read_image(path) for path in paths)
