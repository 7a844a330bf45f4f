"""5x5 spatial convolution.

Two interchangeable forms are provided:

* :func:`convolve_direct` evaluates the 2-D convolution sum over a
  zero-padded plane in one vectorised pass.
* :func:`convolve_streaming` models the hardware filter: pixels enter one at
  a time in row-major order, five line buffers hold the most recent rows, and
  five MAC FIR engines (one per buffered row, each fed by its own 5-tap
  addressable shift register) produce partial sums that are added, made
  absolute, scaled and narrowed to 8 bits.

Both produce the same, centre-aligned, same-size output.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ParseError
from .imaging import ImagePlane

KERNEL_SIZE = 5
RADIUS = KERNEL_SIZE // 2
MAX_COEFFICIENT = 32767
# worst case |acc| = 25 * 255 * 32767 < 2**31, so a signed 32-bit accumulator never overflows


class Kernel:
    """5x5 signed integer coefficients plus a positive divisor.

    ``coefficients[i][j]`` is the kernel tap at offset ``(i - 2, j - 2)`` from
    the centre, in convolution (not correlation) orientation.
    """

    __slots__ = ("coefficients", "divisor")

    def __init__(self, coefficients, divisor: int = 1):
        coeffs = np.asarray(coefficients)
        if coeffs.size != KERNEL_SIZE * KERNEL_SIZE:
            raise DimensionError(f"kernel needs 25 coefficients, got {coeffs.size}")
        if coeffs.dtype.kind not in "iu":
            raise TypeError("kernel coefficients must be integers")
        coeffs = coeffs.astype(np.int64).reshape(KERNEL_SIZE, KERNEL_SIZE)
        if np.abs(coeffs).max() > MAX_COEFFICIENT:
            raise ValueError(f"kernel coefficients must satisfy |c| <= {MAX_COEFFICIENT}")
        if int(divisor) < 1:
            raise ValueError(f"kernel divisor must be >= 1, got {divisor}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "divisor", int(divisor))

    def __setattr__(self, name, value):
        raise AttributeError("Kernel is immutable")

    def __eq__(self, other):
        if not isinstance(other, Kernel):
            return NotImplemented
        return self.divisor == other.divisor and np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash((self.coefficients.tobytes(), self.divisor))

    def __repr__(self):
        return f"Kernel({self.coefficients.tolist()}, divisor={self.divisor})"


def box_kernel_5x5() -> Kernel:
    return Kernel(np.ones((5, 5), dtype=np.int64), 25)


def identity_kernel() -> Kernel:
    return delta_kernel(0, 0)


def delta_kernel(di: int, dj: int) -> Kernel:
    """Single unit tap at row offset ``di`` and column offset ``dj``.

    Convolving with it shifts the image down by ``di`` and right by ``dj``.
    """
    if abs(di) > RADIUS or abs(dj) > RADIUS:
        raise ValueError(f"offset ({di}, {dj}) outside the 5x5 window")
    coeffs = np.zeros((5, 5), dtype=np.int64)
    coeffs[di + RADIUS, dj + RADIUS] = 1
    return Kernel(coeffs, 1)


def parse_kernel(text: str) -> Kernel:
    """Parse 26 whitespace-separated integers: 25 row-major coefficients, then the divisor."""
    tokens = text.split()
    if len(tokens) != 26:
        raise ParseError(f"kernel text needs 26 integers, got {len(tokens)}")
    values = []
    for tok in tokens:
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(f"bad kernel token {tok!r}") from None
    try:
        return Kernel(values[:25], values[25])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def saturate_narrow(acc: int, divisor: int) -> int:
    """Absolute value, truncating division by ``divisor``, clamp to 255."""
    if divisor < 1:
        raise ValueError("divisor must be >= 1")
    return min(255, abs(acc) // divisor)


def _narrow_array(acc: np.ndarray, divisor: int) -> np.ndarray:
    return np.minimum(255, np.abs(acc) // divisor).astype(np.uint8)


# --- direct path -----------------------------------------------------------


def accumulate_direct(plane: ImagePlane, kernel: Kernel) -> np.ndarray:
    """Raw convolution accumulators (before narrowing), zero padding at the borders."""
    h, w = plane.shape
    padded = np.zeros((h + 2 * RADIUS, w + 2 * RADIUS), dtype=np.int64)
    padded[RADIUS:RADIUS + h, RADIUS:RADIUS + w] = plane.pixels
    acc = np.zeros((h, w), dtype=np.int64)
    # out[y, x] += g[a, b] * f[y - a, x - b] for a, b in -2..2
    for i in range(KERNEL_SIZE):
        for j in range(KERNEL_SIZE):
            c = kernel.coefficients[i, j]
            if c:
                a, b = i - RADIUS, j - RADIUS
                acc += c * padded[RADIUS - a:RADIUS - a + h, RADIUS - b:RADIUS - b + w]
    return acc


def convolve_direct(plane: ImagePlane, kernel: Kernel) -> ImagePlane:
    return ImagePlane(_narrow_array(accumulate_direct(plane, kernel), kernel.divisor))


# --- streaming path --------------------------------------------------------


class LineBuffer:
    """Five row buffers written in rotation by a single column counter.

    Each :meth:`push` writes one pixel at the current column of the newest
    row and returns the five vertically aligned pixels at that column, oldest
    row first. Rows not yet filled read as zero.
    """

    def __init__(self, width: int, lines: int = KERNEL_SIZE):
        self.width = width
        self.lines = lines
        self.rows = [[0] * width for _ in range(lines)]
        self.counter = 0
        self.newest = lines - 1
        self.rows_ingested = 0

    @property
    def occupancy(self) -> int:
        return min(self.rows_ingested, self.lines)

    def push(self, pixel: int) -> list[int]:
        col = self.counter
        self.rows[self.newest][col] = pixel
        lines = self.lines
        start = self.newest + 1
        column = [self.rows[(start + k) % lines][col] for k in range(lines)]
        col += 1
        if col == self.width:
            col = 0
            self.rows_ingested += 1
            self.newest = (self.newest + 1) % lines
        self.counter = col
        return column


class MacFirEngine:
    """5-tap FIR over one row stream: an addressable shift register feeding a MAC."""

    def __init__(self, taps):
        # taps[0] multiplies the oldest sample in the register
        self.taps = [int(t) for t in taps]
        self.register = [0] * len(self.taps)

    def reset(self) -> None:
        self.register = [0] * len(self.taps)

    def push(self, sample: int) -> int:
        reg = self.register
        reg.pop(0)
        reg.append(sample)
        acc = 0
        for t, s in zip(self.taps, reg):
            acc += t * s
        return acc


class StreamingConvolver:
    """Row-major streaming 5x5 convolution for planes of a fixed width.

    The latency of two rows and two columns is absorbed by flushing two zero
    pixels after every row and two zero rows after the last one, so the
    emitted image is aligned with :func:`convolve_direct`.
    """

    def __init__(self, width: int, kernel: Kernel):
        self.width = width
        self.kernel = kernel
        self.line_buffer = LineBuffer(width)
        # Buffer row k (oldest first) sits k - 2 rows from the output centre
        # and pairs with kernel row 4 - k; register slot m pairs with column 4 - m.
        coeffs = kernel.coefficients
        self.engines = [MacFirEngine(coeffs[KERNEL_SIZE - 1 - k, ::-1]) for k in range(KERNEL_SIZE)]

    def _run_row(self, row) -> list[int]:
        """Push one row through the line buffer and return its output accumulators."""
        engines = self.engines
        for e in engines:
            e.reset()
        out = []
        for x, pixel in enumerate(row):
            column = self.line_buffer.push(pixel)
            acc = 0
            for e, sample in zip(engines, column):
                acc += e.push(sample)
            if x >= RADIUS:
                out.append(acc)
        # two trailing zeros complete the right border
        for _ in range(RADIUS):
            acc = 0
            for e in engines:
                acc += e.push(0)
            out.append(acc)
        return out

    def accumulate(self, plane: ImagePlane) -> list[list[int]]:
        if plane.width != self.width:
            raise DimensionError(f"convolver built for width {self.width}, got {plane.width}")
        rows = plane.pixels.tolist()
        zero_row = [0] * self.width
        result = []
        for y, row in enumerate(rows + [zero_row] * RADIUS):
            accs = self._run_row(row)
            if y >= RADIUS:
                result.append(accs)
        return result


def _check_streaming_size(plane: ImagePlane) -> None:
    if plane.width < KERNEL_SIZE or plane.height < KERNEL_SIZE:
        raise DimensionError(
            f"streaming path needs at least 5x5, got {plane.width}x{plane.height}"
        )


def accumulate_streaming(plane: ImagePlane, kernel: Kernel) -> np.ndarray:
    _check_streaming_size(plane)
    return np.array(StreamingConvolver(plane.width, kernel).accumulate(plane), dtype=np.int64)


def convolve_streaming(plane: ImagePlane, kernel: Kernel) -> ImagePlane:
    _check_streaming_size(plane)
    conv = StreamingConvolver(plane.width, kernel)
    divisor = kernel.divisor
    rows = [[min(255, abs(a) // divisor) for a in accs] for accs in conv.accumulate(plane)]
    return ImagePlane(np.array(rows, dtype=np.uint8))
