"""Raster types, channel split/merge and binary PGM/PPM I/O.

Pixels live in read-only ``numpy.uint8`` arrays of shape ``(height, width)``,
row-major, so planes can be shared freely between threads.
"""

from __future__ import annotations

import os
import sys
import tempfile
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DimensionError, ParseError, TruncationError, UnsupportedFormatError

MAX_DIMENSION = 16384


def _frozen_array(values, allowed_max: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"raster must be at least 1x1, got {arr.shape[1]}x{arr.shape[0]}")
    if arr.dtype.kind not in "biu":
        raise TypeError(f"pixel values must be integers, got dtype {arr.dtype}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > allowed_max):
            raise ValueError(f"pixel values must lie in [0, {allowed_max}]")
        arr = arr.astype(np.uint8)
    elif allowed_max < 255 and arr.max() > allowed_max:
        raise ValueError(f"pixel values must lie in [0, {allowed_max}]")
    arr = np.array(arr, dtype=np.uint8, copy=True)
    arr.setflags(write=False)
    return arr


class _Raster:
    _max_value = 255
    __slots__ = ("pixels",)

    def __init__(self, pixels):
        object.__setattr__(self, "pixels", _frozen_array(pixels, self._max_value))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_flat(cls, width: int, height: int, values):
        flat = np.asarray(values)
        if flat.size != width * height:
            raise DimensionError(
                f"{width}x{height} raster needs {width * height} pixels, got {flat.size}"
            )
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def tolist(self) -> list[int]:
        """Row-major flat list of pixel values."""
        return self.pixels.ravel().tolist()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((type(self).__name__, self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.width}x{self.height})"


class ImagePlane(_Raster):
    """Single 8-bit intensity channel."""

    __slots__ = ()


class BinaryPlane(_Raster):
    """Two-valued plane; every pixel is 0 or 1."""

    _max_value = 1
    __slots__ = ()


class RgbImage:
    """Three equally sized planes."""

    __slots__ = ("red", "green", "blue")

    def __init__(self, red: ImagePlane, green: ImagePlane, blue: ImagePlane):
        if not (red.shape == green.shape == blue.shape):
            raise DimensionError(
                f"channel sizes differ: {red!r}, {green!r}, {blue!r}"
            )
        object.__setattr__(self, "red", red)
        object.__setattr__(self, "green", green)
        object.__setattr__(self, "blue", blue)

    def __setattr__(self, name, value):
        raise AttributeError("RgbImage is immutable")

    @classmethod
    def from_array(cls, arr) -> "RgbImage":
        """Build from an ``(height, width, 3)`` interleaved array."""
        arr = np.asarray(arr)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"expected (height, width, 3) array, got shape {arr.shape}")
        return cls(ImagePlane(arr[:, :, 0]), ImagePlane(arr[:, :, 1]), ImagePlane(arr[:, :, 2]))

    def to_array(self) -> np.ndarray:
        return np.stack([self.red.pixels, self.green.pixels, self.blue.pixels], axis=-1)

    @property
    def width(self) -> int:
        return self.red.width

    @property
    def height(self) -> int:
        return self.red.height

    @property
    def shape(self) -> tuple[int, int]:
        return self.red.shape

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.red == other.red and self.green == other.green and self.blue == other.blue

    def __hash__(self):
        return hash((self.red, self.green, self.blue))

    def __repr__(self):
        return f"RgbImage({self.width}x{self.height})"


Image = Union[ImagePlane, RgbImage]


def split_channels(img: RgbImage) -> tuple[ImagePlane, ImagePlane, ImagePlane]:
    return img.red, img.green, img.blue


def merge_channels(red: ImagePlane, green: ImagePlane, blue: ImagePlane) -> RgbImage:
    return RgbImage(red, green, blue)


def binary_to_display(b: BinaryPlane) -> ImagePlane:
    """Map 0 -> 0 and 1 -> 255 for viewing."""
    return ImagePlane(b.pixels * np.uint8(255))


# --- PNM codec -------------------------------------------------------------

_WHITESPACE = b" \t\n\r\v\f"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        if pos >= n:
            raise ParseError(f"header ended after {len(tokens)} of {count} fields")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    if pos >= n or data[pos] not in _WHITESPACE:
        raise ParseError("missing whitespace after header")
    return tokens, pos + 1


def _header_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise ParseError(f"bad {field} token {token.decode('latin-1')!r}")
    return int(token)


def decode_pnm(data: bytes) -> Image:
    """Parse binary PGM (P5) or PPM (P6) bytes with maxval 255."""
    if len(data) < 2:
        raise ParseError(f"bad magic token {data.decode('latin-1')!r}")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ParseError(f"bad magic token {magic.decode('latin-1')!r}")
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != magic:
        raise ParseError(f"bad magic token {tokens[0].decode('latin-1')!r}")
    width = _header_int(tokens[1], "width")
    height = _header_int(tokens[2], "height")
    maxval = _header_int(tokens[3], "maxval")
    if maxval != 255:
        raise UnsupportedFormatError(f"maxval {maxval} not supported (only 255)")
    if not (1 <= width <= MAX_DIMENSION and 1 <= height <= MAX_DIMENSION):
        raise DimensionError(
            f"dimensions {width}x{height} outside 1..{MAX_DIMENSION}"
        )
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    actual = len(data) - offset
    if actual < expected:
        raise TruncationError("pixel payload", expected, actual)
    raw = np.frombuffer(data, dtype=np.uint8, count=expected, offset=offset)
    if channels == 1:
        return ImagePlane(raw.reshape(height, width))
    return RgbImage.from_array(raw.reshape(height, width, 3))


def encode_pnm(img: Image) -> bytes:
    if isinstance(img, RgbImage):
        header = b"P6\n%d %d\n255\n" % (img.width, img.height)
        return header + img.to_array().tobytes()
    if isinstance(img, ImagePlane):
        return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.pixels.tobytes()
    raise TypeError(f"cannot encode {type(img).__name__}; convert BinaryPlane with binary_to_display")


def load_image(path) -> Image:
    """Load a P5/P6 file; ``"-"`` reads from stdin."""
    if str(path) == "-":
        return decode_pnm(sys.stdin.buffer.read())
    with open(path, "rb") as fh:
        return decode_pnm(fh.read())


def save_image(img: Image, path) -> None:
    """Write ``img`` as PGM/PPM. The target is replaced atomically; ``"-"`` writes to stdout."""
    data = encode_pnm(img)
    if str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    write_atomic(Path(path), data)


def write_atomic(path: Path, data: bytes) -> None:
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
