"""Exit criteria for the build. Run with ``pytest tests/test_acceptance.py``;
a PASS/FAIL line per criterion is printed in the terminal summary."""

import io
import itertools
import time
import zlib
from pathlib import Path

import numpy as np
import pytest

from svip.cli import run
from svip.errors import EndOfStream, IntegrityError, SvipError
from svip.filters import Kernel, convolve_direct, convolve_streaming
from svip.imaging import ImagePlane, RgbImage, load_image
from svip.rc4 import apply_keystream, ksa
from svip.threshold import (
    ThresholdRange,
    binarize,
    binarize_color,
    binarize_gray,
    combine_rgb,
    histogram,
    mean_threshold,
)
from svip.transport import HEADER_SIZE, decode_frame, encode_frame, loopback_transfer, recv_image

DATA = Path(__file__).parent / "data"

RC4_VECTORS = [
    (b"Key", b"Plaintext", bytes.fromhex("BBF316E8D940AF0AD3")),
    (b"Wiki", b"pedia", bytes.fromhex("1021BF0420")),
    (b"Secret", b"Attack at dawn", bytes.fromhex("45A01F645FC35B383552544B9BF5")),
]

TEXT_RECALL_MIN = 0.95
BACKGROUND_FP_MAX = 0.05


@pytest.mark.acceptance(1, "RC4 published vectors, < 1 s")
def test_rc4_vectors():
    start = time.perf_counter()
    for key, plain, cipher in RC4_VECTORS:
        assert apply_keystream(ksa(key), plain) == cipher
        assert apply_keystream(ksa(key), cipher) == plain
    assert time.perf_counter() - start < 1.0


@pytest.mark.acceptance(2, "streaming == direct convolution on 200 random pairs, < 10 s")
def test_convolution_equivalence():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    for _ in range(200):
        h, w = rng.integers(5, 65, size=2)
        plane = ImagePlane(rng.integers(0, 256, (h, w)))
        kernel = Kernel(rng.integers(-128, 128, (5, 5)), int(rng.choice([1, 25, 256])))
        assert np.array_equal(convolve_streaming(plane, kernel).pixels, convolve_direct(plane, kernel).pixels)
    assert time.perf_counter() - start < 10.0


@pytest.mark.acceptance(3, "mean threshold == floor of exact mean on 100 random planes")
def test_threshold_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        h, w = rng.integers(1, 80, size=2)
        plane = ImagePlane(rng.integers(0, 256, (h, w)))
        flat = plane.pixels.ravel().tolist()
        assert mean_threshold(histogram(plane), len(flat)) == sum(flat) // len(flat)


@pytest.mark.acceptance(4, "binary outputs, combine_rgb permutation invariance, antitone foreground on 50 planes")
def test_binarization_invariants():
    rng = np.random.default_rng(4)
    for _ in range(50):
        h, w = rng.integers(5, 40, size=2)
        chans = [ImagePlane(rng.integers(0, 256, (h, w))) for _ in range(3)]
        gray = binarize_gray(chans[0])
        colour = binarize_color(RgbImage(*chans))
        assert set(np.unique(gray.pixels)) <= {0, 1}
        assert set(np.unique(colour.pixels)) <= {0, 1}

        bins = [binarize(c, ThresholdRange(int(rng.integers(0, 256)))) for c in chans]
        ref = combine_rgb(*bins)
        assert all(combine_rgb(*perm) == ref for perm in itertools.permutations(bins))

        prev = binarize(chans[0], ThresholdRange(0)).pixels
        for low in range(1, 256):
            cur = binarize(chans[0], ThresholdRange(low)).pixels
            assert not np.any(cur & ~prev)
            prev = cur


@pytest.mark.acceptance(5, "degraded document: >= 95% text recall, <= 5% background false positives")
def test_degraded_document(tmp_path):
    page = load_image(DATA / "degraded_document.pgm")
    text = load_image(DATA / "degraded_document_mask.pgm").pixels > 0
    assert page.pixels[text].max() <= 60 and page.pixels[~text].min() >= 180

    out = tmp_path / "binary.pgm"
    assert run(["binarize", "--invert", str(DATA / "degraded_document.pgm"), str(out)], out=io.StringIO()) == 0
    found = load_image(out).pixels == 255
    recall = (found & text).sum() / text.sum()
    false_pos = (found & ~text).sum() / (~text).sum()
    print(f"text recall {recall:.4f}, background false positives {false_pos:.4f}")
    assert recall >= TEXT_RECALL_MIN
    assert false_pos <= BACKGROUND_FP_MAX


def _random_image(rng):
    h, w = rng.integers(1, 257, size=2)
    if rng.random() < 0.5:
        return ImagePlane(rng.integers(0, 256, (h, w)))
    return RgbImage.from_array(rng.integers(0, 256, (h, w, 3)))


def _garbage(rng):
    kind = rng.integers(4)
    n = int(rng.integers(0, 80))
    body = rng.integers(0, 256, n, dtype=np.uint8).tobytes()
    if kind == 0:
        return body
    if kind == 1:
        return b"SVIP" + body
    # plausible header with random fields and a short random payload
    ch = int(rng.choice([1, 3, int(rng.integers(0, 256))]))
    w, h = (int(v) for v in rng.integers(0, 9, size=2))
    header = b"SVIP" + bytes([int(rng.choice([1, 1, 2])), ch]) + w.to_bytes(2, "big") + h.to_bytes(2, "big")
    header += rng.integers(0, 256, 4, dtype=np.uint8).tobytes()
    return header + (body if kind == 2 else body[: w * h * max(ch, 1)])


@pytest.mark.acceptance(6, "transport: 50 loopback roundtrips, 50 wrong-key rejections, 10000 garbage streams, < 30 s")
def test_transport_roundtrip():
    rng = np.random.default_rng(6)
    start = time.perf_counter()
    for _ in range(50):
        img = _random_image(rng)
        key = rng.integers(0, 256, int(rng.integers(1, 33)), dtype=np.uint8).tobytes()
        assert loopback_transfer([img], key) == [img]
        wrong = bytes([key[0] ^ 0x01]) + key[1:]
        with pytest.raises(IntegrityError):
            decode_frame(encode_frame(img, key), wrong)

    outcomes = {}
    for _ in range(10000):
        data = _garbage(rng)
        try:
            recv_image(io.BytesIO(data), b"key")
            name = "decoded"
        except (SvipError, EndOfStream) as exc:
            name = type(exc).__name__
        outcomes[name] = outcomes.get(name, 0) + 1
    print("garbage outcomes:", dict(sorted(outcomes.items())))
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance(7, "frame format: 1x1 pixel 0x42 under key 'Key' -> payload 0xA9, 14-byte clear header")
def test_frame_bit_exactness():
    frame = encode_frame(ImagePlane([[0x42]]), b"Key")
    expected_header = b"SVIP" + bytes([1, 1, 0, 1, 0, 1]) + zlib.crc32(b"\x42").to_bytes(4, "big")
    assert HEADER_SIZE == 14
    assert frame == expected_header + b"\xA9"
    assert encode_frame(ImagePlane([[0x42]]), b"other")[:14] == expected_header
