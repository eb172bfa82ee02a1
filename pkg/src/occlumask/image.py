"""2-D scalar images with an explicit value domain, plus PGM I/O.

Pixels are stored as float64 row-major grids. The ``domain`` tag says how
to interpret values:

* ``"counts"``    -- sensor / panel levels in [0, 2**bit_depth - 1]
* ``"radiance"``  -- relative scene radiance, >= 0, unitless
* ``"fraction"``  -- transmittance-like values in [0, 1]

One rounding rule is used everywhere counts are quantized: round half up
(ties go toward +inf).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

COUNTS = "counts"
RADIANCE = "radiance"
FRACTION = "fraction"

_DOMAINS = (COUNTS, RADIANCE, FRACTION)


def max_count(bit_depth: int) -> int:
    return (1 << int(bit_depth)) - 1


def round_half_up(values):
    """Round to nearest integer with ties toward +inf. Returns float64."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def quantize_counts(values, bit_depth: int) -> np.ndarray:
    """Clamp to the representable level range and round half up."""
    v = round_half_up(values)
    return np.clip(v, 0.0, float(max_count(bit_depth)))


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable wrapper around a float64 pixel grid."""

    pixels: np.ndarray
    domain: str
    bit_depth: int = 12

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise DataError("image must be a non-empty 2-D grid")
        if self.domain not in _DOMAINS:
            raise DataError(f"unknown image domain {self.domain!r}")
        if not np.all(np.isfinite(px)):
            raise DataError("image contains non-finite pixels")
        if self.domain == COUNTS:
            if px.min() < 0 or px.max() > max_count(self.bit_depth):
                raise DataError(
                    f"counts outside [0, {max_count(self.bit_depth)}]"
                )
        elif self.domain == RADIANCE:
            if px.min() < 0:
                raise DataError("radiance must be non-negative")
        elif self.domain == FRACTION:
            if px.min() < 0 or px.max() > 1.0:
                raise DataError("fractions must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    @property
    def max_count(self) -> int:
        return max_count(self.bit_depth)

    def require_domain(self, domain: str) -> None:
        if self.domain != domain:
            raise DataError(
                f"expected a {domain}-domain image, got {self.domain}"
            )

    def with_pixels(self, pixels, domain: str | None = None) -> "Image":
        return Image(np.array(pixels, dtype=np.float64), domain or self.domain, self.bit_depth)

    @classmethod
    def counts(cls, pixels, bit_depth: int = 12) -> "Image":
        return cls(np.array(pixels, dtype=np.float64), COUNTS, bit_depth)

    @classmethod
    def radiance(cls, pixels, bit_depth: int = 12) -> "Image":
        return cls(np.array(pixels, dtype=np.float64), RADIANCE, bit_depth)

    @classmethod
    def fraction(cls, pixels, bit_depth: int = 12) -> "Image":
        return cls(np.array(pixels, dtype=np.float64), FRACTION, bit_depth)


def write_pgm(path, image: Image) -> None:
    """Write a counts-domain image as binary PGM (P5).

    Levels above 255 use the 2-byte big-endian sample format; maxval is the
    image's full-scale count (4095 for 12-bit data).
    """
    image.require_domain(COUNTS)
    maxval = image.max_count
    data = round_half_up(image.pixels)
    if data.min() < 0 or data.max() > maxval:
        raise DataError("pixel levels exceed the PGM maxval")
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        payload = data.astype(">u2").tobytes()
    else:
        payload = data.astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def _read_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(buf):
        if buf[pos : pos + 1].isspace():
            pos += 1
        elif buf[pos : pos + 1] == b"#":
            while pos < len(buf) and buf[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(buf) and not buf[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise DataError("truncated PGM header")
    return buf[start:pos], pos


def read_pgm(path) -> Image:
    """Read a binary PGM (P5) into a counts-domain image."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, pos = _read_token(buf, 0)
    if magic != b"P5":
        raise DataError(f"not a binary PGM file: {path}")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(buf, pos)
        fields.append(int(tok))
    width, height, maxval = fields
    if not (0 < maxval < 65536):
        raise DataError(f"unsupported PGM maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    n = width * height
    if maxval > 255:
        raw = np.frombuffer(buf, dtype=">u2", count=n, offset=pos)
    else:
        raw = np.frombuffer(buf, dtype=np.uint8, count=n, offset=pos)
    if raw.size != n:
        raise DataError("PGM payload shorter than header promises")
    bit_depth = maxval.bit_length()
    return Image.counts(raw.reshape(height, width).astype(np.float64), bit_depth)
