"""Regenerate the degraded-document fixture used by the acceptance suite.

Writes ``degraded_document.pgm`` (64x64, dark glyph strokes on a noisy bright
page) and ``degraded_document_mask.pgm`` (255 where a pixel belongs to text).
The committed files are the frozen reference; rerunning this script with the
same numpy release reproduces them.
"""

from pathlib import Path

import numpy as np

SIZE = 64
STROKE = 2
GLYPH_W, GLYPH_H = 10, 12
GAP = 3
TEXT_LEVEL, BG_LEVEL, NOISE = 40, 200, 20
SEED = 20121


def glyph(mask, y, x, kind):
    s = STROKE
    if kind == "F":
        mask[y:y + GLYPH_H, x:x + s] = True
        mask[y:y + s, x:x + GLYPH_W] = True
        mask[y + 5:y + 5 + s, x:x + GLYPH_W - 3] = True
    elif kind == "L":
        mask[y:y + GLYPH_H, x:x + s] = True
        mask[y + GLYPH_H - s:y + GLYPH_H, x:x + GLYPH_W] = True
    elif kind == "T":
        mask[y:y + s, x:x + GLYPH_W] = True
        mask[y:y + GLYPH_H, x + 4:x + 4 + s] = True
    elif kind == "H":
        mask[y:y + GLYPH_H, x:x + s] = True
        mask[y:y + GLYPH_H, x + GLYPH_W - s:x + GLYPH_W] = True
        mask[y + 5:y + 5 + s, x:x + GLYPH_W] = True
    elif kind == "E":
        mask[y:y + GLYPH_H, x:x + s] = True
        for row in (0, 5, GLYPH_H - s):
            mask[y + row:y + row + s, x:x + GLYPH_W] = True


def make(seed=SEED):
    rng = np.random.default_rng(seed)
    mask = np.zeros((SIZE, SIZE), dtype=bool)
    kinds = "FLTHE"
    y = 4
    while y + GLYPH_H <= SIZE - 4:
        x = 4
        while x + GLYPH_W <= SIZE - 4:
            glyph(mask, y, x, kinds[rng.integers(len(kinds))])
            x += GLYPH_W + GAP
        y += GLYPH_H + GAP
    noise = rng.integers(-NOISE, NOISE + 1, size=mask.shape)
    page = np.where(mask, TEXT_LEVEL, BG_LEVEL) + noise
    return page.clip(0, 255).astype(np.uint8), mask


def main():
    here = Path(__file__).parent
    page, mask = make()
    header = b"P5\n%d %d\n255\n" % (SIZE, SIZE)
    (here / "degraded_document.pgm").write_bytes(header + page.tobytes())
    (here / "degraded_document_mask.pgm").write_bytes(header + (mask * 255).astype(np.uint8).tobytes())


if __name__ == "__main__":
    main()
