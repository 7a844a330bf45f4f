"""Global per-channel adaptive binarization.

Each channel is smoothed with the 5x5 box kernel, its threshold is the floor
of the mean intensity of the smoothed plane (computed from the histogram by
multiply-accumulate), and pixels at or above the threshold become foreground.
For colour input the three binary planes are OR-combined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyImageError
from .filters import box_kernel_5x5, convolve_streaming
from .imaging import BinaryPlane, ImagePlane, RgbImage, split_channels

TARGET_RAW = "raw"
TARGET_SMOOTHED = "smoothed"


@dataclass(frozen=True)
class ThresholdRange:
    low: int
    high: int = 255

    def __post_init__(self):
        if not (0 <= self.low <= 255 and 0 <= self.high <= 255):
            raise ValueError(f"threshold bounds must lie in [0, 255], got [{self.low}, {self.high}]")
        if self.low > self.high:
            raise ValueError(f"empty threshold range [{self.low}, {self.high}]")


def histogram(plane: ImagePlane, stride: int = 1) -> np.ndarray:
    """256-bin intensity histogram.

    With ``stride`` k > 1 only pixels at 1-based rows and columns k, 2k, ...
    are counted.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    sampled = plane.pixels[stride - 1::stride, stride - 1::stride]
    return np.bincount(sampled.ravel(), minlength=256).astype(np.int64)


def mean_threshold(hist, total: int) -> int:
    """Floor of the mean intensity described by ``hist``."""
    if total <= 0:
        raise EmptyImageError("cannot threshold an image with no pixels")
    counts = [int(c) for c in hist]
    if len(counts) != 256:
        raise ValueError(f"histogram must have 256 bins, got {len(counts)}")
    if sum(counts) != total:
        raise ValueError(f"histogram holds {sum(counts)} pixels, expected {total}")
    acc = 0
    for value, count in enumerate(counts):
        acc += value * count
    return acc // total


def plane_threshold(plane: ImagePlane, stride: int = 1) -> int:
    hist = histogram(plane, stride)
    return mean_threshold(hist, int(hist.sum()))


def binarize(plane: ImagePlane, rng: ThresholdRange) -> BinaryPlane:
    p = plane.pixels
    return BinaryPlane((p >= rng.low) & (p <= rng.high))


def combine_rgb(r: BinaryPlane, g: BinaryPlane, b: BinaryPlane) -> BinaryPlane:
    """0 where the three channel bits sum to less than 1, else 1."""
    if not (r.shape == g.shape == b.shape):
        raise DimensionError(f"binary planes differ in size: {r!r}, {g!r}, {b!r}")
    total = r.pixels.astype(np.int16) + g.pixels + b.pixels
    return BinaryPlane(total >= 1)


def _channel(plane: ImagePlane, stride: int, invert: bool, target: str) -> tuple[BinaryPlane, int]:
    smoothed = convolve_streaming(plane, box_kernel_5x5())
    t = plane_threshold(smoothed, stride)
    if target == TARGET_SMOOTHED:
        source = smoothed
    elif target == TARGET_RAW:
        source = plane
    else:
        raise ValueError(f"unknown binarization target {target!r}")
    b = binarize(source, ThresholdRange(t, 255))
    if invert:
        b = BinaryPlane(1 - b.pixels)
    return b, t


def binarize_gray_with_threshold(plane: ImagePlane, stride: int = 1, invert: bool = False,
                                 target: str = TARGET_RAW) -> tuple[BinaryPlane, int]:
    return _channel(plane, stride, invert, target)


def binarize_color_with_thresholds(img: RgbImage, stride: int = 1, invert: bool = False,
                                   target: str = TARGET_RAW) -> tuple[BinaryPlane, tuple[int, int, int]]:
    results = [_channel(p, stride, invert, target) for p in split_channels(img)]
    (br, tr), (bg, tg), (bb, tb) = results
    return combine_rgb(br, bg, bb), (tr, tg, tb)


def binarize_gray(plane: ImagePlane, stride: int = 1, invert: bool = False,
                  target: str = TARGET_RAW) -> BinaryPlane:
    """Smooth, take the mean of the smoothed plane as threshold T, keep pixels in [T, 255].

    ``target`` selects whether T is applied to the original plane (default)
    or to the smoothed plane. ``invert`` complements the result so that
    pixels below T become foreground.
    """
    return _channel(plane, stride, invert, target)[0]


def binarize_color(img: RgbImage, stride: int = 1, invert: bool = False,
                   target: str = TARGET_RAW) -> BinaryPlane:
    """Per-channel :func:`binarize_gray`, then :func:`combine_rgb`."""
    return binarize_color_with_thresholds(img, stride, invert, target)[0]
