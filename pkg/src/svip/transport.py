"""Encrypted image frames over a reliable byte stream.

Wire layout (big-endian, 14-byte header sent in the clear)::

    magic "SVIP" | version u8 | channels u8 | width u16 | height u16 | crc32 u32
    payload: width*height*channels RC4-encrypted bytes, row-major, RGB interleaved

The CRC covers the plaintext payload. Every frame is encrypted with a fresh
RC4 state keyed by the shared key alone, so the same image sent twice yields
the same ciphertext and the keystream is reused across frames. That mirrors
the emulated hardware link and is not secure against an eavesdropper.
"""

from __future__ import annotations

import socket
import struct
import threading
import zlib

import numpy as np

from .errors import (
    EndOfStream,
    FrameTooLargeError,
    IntegrityError,
    ProtocolError,
    TransportError,
    TruncationError,
    VersionError,
)
from .imaging import MAX_DIMENSION, Image, ImagePlane, RgbImage
from .rc4 import apply_keystream, check_key, ksa

MAGIC = b"SVIP"
VERSION = 1
HEADER = struct.Struct(">4sBBHHI")
HEADER_SIZE = HEADER.size  # 14


def _payload(img: Image) -> tuple[int, bytes]:
    if isinstance(img, RgbImage):
        return 3, img.to_array().tobytes()
    if isinstance(img, ImagePlane):
        return 1, img.pixels.tobytes()
    raise TypeError(f"cannot frame {type(img).__name__}")


def encode_frame(img: Image, key: bytes) -> bytes:
    key = check_key(key)
    if img.width > MAX_DIMENSION or img.height > MAX_DIMENSION:
        raise FrameTooLargeError(
            f"{img.width}x{img.height} exceeds the {MAX_DIMENSION}x{MAX_DIMENSION} frame limit"
        )
    channels, plain = _payload(img)
    crc = zlib.crc32(plain)
    header = HEADER.pack(MAGIC, VERSION, channels, img.width, img.height, crc)
    return header + apply_keystream(ksa(key), plain)


def parse_header(header: bytes) -> tuple[int, int, int, int]:
    """Validate a 14-byte header; returns ``(channels, width, height, crc)``."""
    if len(header) < HEADER_SIZE:
        raise TruncationError("frame header", HEADER_SIZE, len(header))
    magic, version, channels, width, height, crc = HEADER.unpack(header[:HEADER_SIZE])
    if magic != MAGIC:
        raise ProtocolError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionError(f"unsupported frame version {version} (expected {VERSION})")
    if channels not in (1, 3):
        raise ProtocolError(f"bad channel count {channels}")
    if width < 1 or height < 1:
        raise ProtocolError(f"bad frame dimensions {width}x{height}")
    if width > MAX_DIMENSION or height > MAX_DIMENSION:
        raise FrameTooLargeError(f"frame dimensions {width}x{height} exceed {MAX_DIMENSION}")
    return channels, width, height, crc


def _build_image(plain: bytes, channels: int, width: int, height: int) -> Image:
    arr = np.frombuffer(plain, dtype=np.uint8)
    if channels == 1:
        return ImagePlane(arr.reshape(height, width))
    return RgbImage.from_array(arr.reshape(height, width, 3))


def decode_frame(data: bytes, key: bytes, verify: bool = True) -> Image:
    """Validate, decrypt and rebuild one frame.

    With ``verify=False`` a CRC mismatch is ignored, which lets a wrong key
    produce a viewable (garbled) image.
    """
    key = check_key(key)
    channels, width, height, crc = parse_header(data)
    expected = width * height * channels
    actual = len(data) - HEADER_SIZE
    if actual < expected:
        raise TruncationError("frame payload", expected, actual)
    if actual > expected:
        raise ProtocolError(f"{actual - expected} trailing bytes after frame payload")
    plain = apply_keystream(ksa(key), data[HEADER_SIZE:])
    if verify and zlib.crc32(plain) != crc:
        raise IntegrityError("payload checksum mismatch (wrong key or corrupted frame)")
    return _build_image(plain, channels, width, height)


# --- stream endpoints --------------------------------------------------------


def _read_exact(stream, n: int) -> bytes:
    chunks = []
    got = 0
    while got < n:
        chunk = stream.read(n - got)
        if not chunk:
            break
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(stream) -> bytes:
    """Read the raw bytes of one frame, validating the header before the payload.

    Raises :class:`EndOfStream` if the stream is exhausted exactly at a frame
    boundary.
    """
    header = _read_exact(stream, HEADER_SIZE)
    if not header:
        raise EndOfStream("no more frames")
    channels, width, height, _ = parse_header(header)
    expected = width * height * channels
    payload = _read_exact(stream, expected)
    if len(payload) < expected:
        raise TruncationError("frame payload", expected, len(payload))
    return header + payload


def send_image(stream, img: Image, key: bytes) -> None:
    data = memoryview(encode_frame(img, key))
    written = 0
    try:
        while written < len(data):
            n = stream.write(data[written:])
            # buffered streams return None or the full count; raw ones may write less
            written += len(data) - written if n is None else n
        stream.flush()
    except (OSError, ValueError) as exc:
        raise TransportError(f"channel failed ({exc})", written) from exc


def recv_image(stream, key: bytes, verify: bool = True) -> Image:
    return decode_frame(read_frame(stream), key, verify=verify)


def iter_images(stream, key: bytes, verify: bool = True):
    """Yield images until the stream ends on a frame boundary."""
    while True:
        try:
            frame = read_frame(stream)
        except EndOfStream:
            return
        yield decode_frame(frame, key, verify=verify)


def parse_address(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit() or not 0 <= int(port) <= 65535:
        raise ValueError(f"address must be HOST:PORT, got {addr!r}")
    return host or "127.0.0.1", int(port)


def loopback_transfer(images, key: bytes, verify: bool = True) -> list[Image]:
    """Send ``images`` from a sender thread to this thread over a local socket pair."""
    tx, rx = socket.socketpair()
    errors = []

    def sender():
        try:
            with tx.makefile("wb") as out:
                for img in images:
                    send_image(out, img, key)
        except Exception as exc:
            errors.append(exc)
        finally:
            tx.close()

    thread = threading.Thread(target=sender, name="svip-sender")
    thread.start()
    try:
        with rx.makefile("rb") as inp:
            received = list(iter_images(inp, key, verify=verify))
    finally:
        rx.close()
        thread.join()
    if errors:
        raise errors[0]
    return received

