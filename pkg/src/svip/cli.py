"""Command-line entry point: ``svip <subcommand> ...``.

Exit status: 0 on success, 1 on usage errors, 2 on processing errors (with a
one-line ``error: <kind>: ...`` diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import binascii
import socket
import sys

import numpy as np

from . import __version__
from .errors import EndOfStream, SvipError
from .filters import box_kernel_5x5, convolve_direct, convolve_streaming, identity_kernel, parse_kernel
from .imaging import RgbImage, binary_to_display, load_image, merge_channels, save_image, split_channels
from .rc4 import check_key, keystream, ksa
from .threshold import (
    TARGET_RAW,
    TARGET_SMOOTHED,
    binarize_color_with_thresholds,
    binarize_gray_with_threshold,
)
from .transport import loopback_transfer, parse_address, recv_image, send_image


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_key_args(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--key-hex", metavar="HEX", help="shared RC4 key as hex digits")
    group.add_argument("--key-file", metavar="PATH", help="file holding the raw key bytes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svip", description="Streaming image filter, adaptive binarizer and RC4 image link.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("filter", help="5x5 convolution of every channel")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kernel", default="box5", help="box5, identity or @FILE with 26 integers (default: box5)")
    p.add_argument("--engine", choices=("streaming", "direct"), default="streaming")

    p = sub.add_parser("binarize", help="adaptive mean-threshold binarization")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--stride", type=int, default=1, help="histogram sampling stride (default: 1)")
    p.add_argument("--invert", action="store_true", help="treat pixels below the threshold as foreground")
    p.add_argument("--on-smoothed", action="store_true",
                   help="apply the threshold to the smoothed plane instead of the input")
    p.add_argument("--dump-threshold", action="store_true", help="print per-channel thresholds (R G B)")

    p = sub.add_parser("send", help="encrypt and send images as frames")
    p.add_argument("images", nargs="+")
    p.add_argument("--to", required=True, metavar="ADDR", help="HOST:PORT or - for stdout")
    _add_key_args(p)

    p = sub.add_parser("recv", help="receive one frame and write the image")
    p.add_argument("--listen", required=True, metavar="ADDR", help="HOST:PORT or - for stdin")
    p.add_argument("--out", required=True)
    p.add_argument("--no-verify", action="store_true", help="skip the checksum (view garbled output)")
    _add_key_args(p)

    p = sub.add_parser("roundtrip", help="send and receive over an in-memory loopback")
    p.add_argument("image")
    _add_key_args(p)

    p = sub.add_parser("rc4-keystream", help="hex dump of the first COUNT keystream bytes")
    p.add_argument("--key-hex", required=True, metavar="HEX")
    p.add_argument("--count", required=True, type=int)
    return parser


def _key(args) -> bytes:
    if getattr(args, "key_file", None):
        with open(args.key_file, "rb") as fh:
            key = fh.read()
    else:
        try:
            key = binascii.unhexlify(args.key_hex)
        except (binascii.Error, ValueError):
            raise UsageError(f"--key-hex is not valid hex: {args.key_hex!r}") from None
    return check_key(key)


def _kernel(spec: str):
    if spec == "box5":
        return box_kernel_5x5()
    if spec == "identity":
        return identity_kernel()
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="ascii") as fh:
            return parse_kernel(fh.read())
    raise UsageError(f"unknown kernel {spec!r} (use box5, identity or @FILE)")


def cmd_filter(args, out):
    kernel = _kernel(args.kernel)
    conv = convolve_streaming if args.engine == "streaming" else convolve_direct
    img = load_image(args.input)
    if isinstance(img, RgbImage):
        result = merge_channels(*(conv(p, kernel) for p in split_channels(img)))
    else:
        result = conv(img, kernel)
    save_image(result, args.output)


def cmd_binarize(args, out):
    if args.stride < 1:
        raise UsageError("--stride must be >= 1")
    target = TARGET_SMOOTHED if args.on_smoothed else TARGET_RAW
    img = load_image(args.input)
    if isinstance(img, RgbImage):
        binary, thresholds = binarize_color_with_thresholds(img, args.stride, args.invert, target)
    else:
        binary, t = binarize_gray_with_threshold(img, args.stride, args.invert, target)
        thresholds = (t,)
    save_image(binary_to_display(binary), args.output)
    if args.dump_threshold:
        for t in thresholds:
            print(t, file=out)


def cmd_send(args, out):
    key = _key(args)
    images = [load_image(path) for path in args.images]
    if args.to == "-":
        for img in images:
            send_image(sys.stdout.buffer, img, key)
        return
    with socket.create_connection(parse_address(args.to)) as sock, sock.makefile("wb") as stream:
        for img in images:
            send_image(stream, img, key)


def cmd_recv(args, out):
    key = _key(args)
    verify = not args.no_verify
    if args.listen == "-":
        img = recv_image(sys.stdin.buffer, key, verify=verify)
    else:
        with socket.create_server(parse_address(args.listen)) as server:
            host, port = server.getsockname()[:2]
            print(f"listening on {host}:{port}", file=sys.stderr, flush=True)
            conn, _ = server.accept()
            with conn, conn.makefile("rb") as stream:
                img = recv_image(stream, key, verify=verify)
    save_image(img, args.out)


def _diff_summary(sent, got) -> str:
    if type(sent) is not type(got) or sent.shape != got.shape:
        return f"MISMATCH: sent {sent!r}, received {got!r}"
    a = sent.to_array() if isinstance(sent, RgbImage) else sent.pixels
    b = got.to_array() if isinstance(got, RgbImage) else got.pixels
    bad = np.argwhere(a != b)
    return f"MISMATCH: {len(bad)} values differ, first at {tuple(int(v) for v in bad[0])}"


def cmd_roundtrip(args, out):
    key = _key(args)
    img = load_image(args.image)
    received = loopback_transfer([img], key)
    if len(received) == 1 and received[0] == img:
        print("OK", file=out)
        return 0
    if len(received) != 1:
        print(f"MISMATCH: received {len(received)} frames, expected 1", file=out)
    else:
        print(_diff_summary(img, received[0]), file=out)
    return 2


def cmd_rc4_keystream(args, out):
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    key = _key(args)
    print(keystream(ksa(key), args.count).hex().upper(), file=out)


COMMANDS = {
    "filter": cmd_filter,
    "binarize": cmd_binarize,
    "send": cmd_send,
    "recv": cmd_recv,
    "roundtrip": cmd_roundtrip,
    "rc4-keystream": cmd_rc4_keystream,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out) or 0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"svip: error: {exc}", file=sys.stderr)
        return 1
    except SvipError as exc:
        print(f"error: {exc.prefix}: {exc}", file=sys.stderr)
    except EndOfStream:
        print("error: eof: stream ended before any frame", file=sys.stderr)
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
